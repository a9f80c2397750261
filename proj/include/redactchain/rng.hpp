#ifndef REDACTCHAIN_RNG_HPP
#define REDACTCHAIN_RNG_HPP

#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "redactchain/sha256.hpp"

namespace redactchain {

// Anything that can fill a buffer with bytes. All randomized operations in
// the library are parameterized on this so tests and the simulator can run
// fully deterministic streams.
template <typename T>
concept ByteSource = requires(T& t, std::span<std::uint8_t> out) {
    { t.fill(out) } -> std::same_as<void>;
};

// OS-backed randomness for real key material.
class SystemRng {
public:
    void fill(std::span<std::uint8_t> out) {
        for (auto& b : out) b = static_cast<std::uint8_t>(dev_() & 0xff);
    }

private:
    std::random_device dev_;
};

// SHA-256 in counter mode over (seed, domain tag). Byte stream depends only
// on the constructor arguments, never on platform or library versions.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed, std::string_view domain = "") {
        Sha256 h;
        std::uint8_t seed_be[8];
        for (int i = 0; i < 8; i++) seed_be[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
        h.update(std::span<const std::uint8_t>(seed_be, 8));
        h.update(domain);
        key_ = h.finalize();
    }

    void fill(std::span<std::uint8_t> out) {
        std::size_t off = 0;
        while (off < out.size()) {
            if (avail_ == 0) refill();
            std::size_t take = std::min<std::size_t>(avail_, out.size() - off);
            std::copy_n(block_.data() + (32 - avail_), take, out.data() + off);
            avail_ -= take;
            off += take;
        }
    }

private:
    void refill() {
        Sha256 h;
        h.update(std::span<const std::uint8_t>(key_.data(), key_.size()));
        std::uint8_t ctr_be[8];
        for (int i = 0; i < 8; i++) ctr_be[i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
        h.update(std::span<const std::uint8_t>(ctr_be, 8));
        block_ = h.finalize();
        counter_++;
        avail_ = 32;
    }

    Digest32 key_{};
    Digest32 block_{};
    std::uint64_t counter_ = 0;
    std::size_t avail_ = 0;
};

static_assert(ByteSource<SystemRng>);
static_assert(ByteSource<DeterministicRng>);

} // namespace redactchain

#endif
