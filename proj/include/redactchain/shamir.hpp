#ifndef REDACTCHAIN_SHAMIR_HPP
#define REDACTCHAIN_SHAMIR_HPP

// Shamir secret sharing of the chameleon trapdoor over GF(q). Dealer-based:
// one process splits and later reconstructs by Lagrange interpolation at
// zero. Reconstruction from fewer than t shares still returns a value; it is
// the downstream adapt postcondition that detects a wrong secret.

#include <cstdint>
#include <filesystem>
#include <span>
#include <sstream>
#include <vector>

#include "redactchain/bigint.hpp"
#include "redactchain/encoding.hpp"
#include "redactchain/errors.hpp"
#include "redactchain/rng.hpp"

namespace redactchain {

struct TrapdoorShare {
    unsigned index = 0; // evaluation point, in [1, n]
    BigInt value;

    bool operator==(const TrapdoorShare&) const = default;
};

template <ByteSource R>
std::vector<TrapdoorShare> split_trapdoor(const BigInt& tk, unsigned t, unsigned n,
                                          const BigInt& q, R& rng) {
    if (t < 1 || t > n) throw ConfigError("threshold must satisfy 1 <= t <= n");
    if (BigInt(n) >= q) throw ConfigError("share count must be below the field order");
    if (tk < 0 || tk >= q) throw ConfigError("secret outside the field");
    std::vector<BigInt> coeff;
    coeff.push_back(tk);
    for (unsigned i = 1; i < t; i++) coeff.push_back(sample_below(q, rng));
    std::vector<TrapdoorShare> shares;
    shares.reserve(n);
    for (unsigned x = 1; x <= n; x++) {
        BigInt acc = 0;
        BigInt xpow = 1;
        for (const BigInt& c : coeff) {
            acc = (acc + c * xpow) % q;
            xpow = (xpow * x) % q;
        }
        shares.push_back(TrapdoorShare{x, acc});
    }
    return shares;
}

inline BigInt reconstruct_trapdoor(std::span<const TrapdoorShare> shares, const BigInt& q) {
    if (shares.empty()) throw ConfigError("no shares supplied");
    for (std::size_t i = 0; i < shares.size(); i++) {
        if (shares[i].index == 0 || BigInt(shares[i].index) >= q)
            throw ConfigError("share index outside the field");
        for (std::size_t j = i + 1; j < shares.size(); j++)
            if (shares[i].index == shares[j].index)
                throw ConfigError("duplicate share index " + std::to_string(shares[i].index));
    }
    BigInt secret = 0;
    for (std::size_t i = 0; i < shares.size(); i++) {
        BigInt num = 1, den = 1;
        BigInt xi = shares[i].index;
        for (std::size_t j = 0; j < shares.size(); j++) {
            if (i == j) continue;
            BigInt xj = shares[j].index;
            num = (num * xj) % q;
            den = (den * mod_reduce(xj - xi, q)) % q;
        }
        BigInt term = (shares[i].value % q) * num % q;
        term = term * mod_inverse(den, q) % q;
        secret = (secret + term) % q;
    }
    return secret;
}

// Share file:
//   redactchain-share v1
//   index <dec>
//   value <hex>
//   q <hex>

inline constexpr const char* kShareFileHeader = "redactchain-share v1";

inline std::string serialize_share(const TrapdoorShare& share, const BigInt& q) {
    std::ostringstream out;
    out << kShareFileHeader << "\n";
    out << "index " << share.index << "\n";
    out << "value " << to_hex(share.value) << "\n";
    out << "q " << to_hex(q) << "\n";
    return out.str();
}

inline std::pair<TrapdoorShare, BigInt> parse_share(const std::string& text,
                                                    const std::string& path = "<share>") {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto field = [&](const char* name) -> std::string {
        line_no++;
        if (!std::getline(in, line))
            throw ParseError(path, line_no, std::string("missing field '") + name + "'");
        std::string prefix = std::string(name) + " ";
        if (line.rfind(prefix, 0) != 0)
            throw ParseError(path, line_no, "expected '" + std::string(name) + " <value>'");
        return line.substr(prefix.size());
    };
    line_no++;
    if (!std::getline(in, line) || line != kShareFileHeader)
        throw ParseError(path, line_no, std::string("expected header '") + kShareFileHeader + "'");
    TrapdoorShare share;
    share.index = static_cast<unsigned>(parse_u64(path, line_no, field("index")));
    BigInt q;
    try {
        share.value = bigint_from_hex(field("value"));
        q = bigint_from_hex(field("q"));
    } catch (const RangeError& e) {
        throw ParseError(path, line_no, e.what());
    }
    if (share.index == 0 || share.value >= q)
        throw ParseError(path, line_no, "share is inconsistent with its field order");
    return {share, q};
}

inline void save_share_file(const std::filesystem::path& path, const TrapdoorShare& share,
                            const BigInt& q) {
    atomic_write_file(path, serialize_share(share, q));
}

inline std::pair<TrapdoorShare, BigInt> load_share_file(const std::filesystem::path& path) {
    return parse_share(read_text_file(path), path.string());
}

} // namespace redactchain

#endif
