#ifndef REDACTCHAIN_TEST_SUPPORT_HPP
#define REDACTCHAIN_TEST_SUPPORT_HPP

// Shared fixtures and the independent brute-force oracles the tests check
// the library against. The oracles deliberately avoid the library's bigint
// layer: toy-scale modular arithmetic runs on plain uint64.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "redactchain/chamhash.hpp"
#include "redactchain/rng.hpp"

namespace testsupport {

// Emits a scripted byte sequence; throws when the script runs out.
class FixedByteSource {
public:
    explicit FixedByteSource(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    void fill(std::span<std::uint8_t> out) {
        for (auto& b : out) {
            if (pos_ >= bytes_.size()) throw std::runtime_error("FixedByteSource exhausted");
            b = bytes_[pos_++];
        }
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

static_assert(redactchain::ByteSource<FixedByteSource>);

// uint64 modular arithmetic; safe for moduli up to ~2^32.
inline std::uint64_t u64_mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    std::uint64_t acc = 1 % mod;
    base %= mod;
    while (exp > 0) {
        if (exp & 1) acc = acc * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return acc;
}

// Direct g^e * y^r mod p, the brute-force chameleon oracle for toy params.
inline std::uint64_t toy_cham_hash(std::uint64_t g, std::uint64_t y, std::uint64_t p,
                                   std::uint64_t e, std::uint64_t r) {
    return u64_mod_pow(g, e, p) * u64_mod_pow(y, r, p) % p;
}

// The worked toy group: p = 23, q = 11, g = 2, trapdoor 3, so y = 8.
inline redactchain::ChameleonKeyPair toy_keypair() {
    return redactchain::make_keypair(redactchain::GroupParams{23, 11, 2}, 3);
}

// One shared 64-bit key pair per process; prime search is not free.
inline const redactchain::ChameleonKeyPair& small_keypair() {
    static const redactchain::ChameleonKeyPair key = [] {
        redactchain::DeterministicRng rng(20240, "unit-64bit-key");
        return redactchain::keygen(64, rng);
    }();
    return key;
}

// Pearson chi-square statistic against a uniform expectation.
inline double chi_square_uniform(const std::vector<std::uint64_t>& counts, double total) {
    double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

} // namespace testsupport

#endif
