#ifndef REDACTCHAIN_CLAWFREE_HPP
#define REDACTCHAIN_CLAWFREE_HPP

// Chameleon hashing from a claw-free trapdoor permutation pair, instantiated
// with modular squaring over a Blum integer n = p'q' (p', q' = 3 mod 4):
//
//   f0(x) = x^2 mod n      f1(x) = 4x^2 mod n      domain = QR_n
//
// A k-bit message m selects the composition f_{m[k]} o ... o f_{m[1]}(r),
// first bit applied first. The trapdoor (the factorization) inverts each
// step by taking the unique square root that is itself a quadratic residue.
// Test-grade backend: it cross-checks the composition construction at desk
// scale; the discrete-log scheme is the production path.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redactchain/bigint.hpp"
#include "redactchain/errors.hpp"
#include "redactchain/rng.hpp"

namespace redactchain {

// Fixed-length bit string; all messages hashed under one pair share the same
// length k, which keeps the encoding suffix-free.
struct BitMessage {
    std::vector<std::uint8_t> bits; // each 0 or 1, bits[0] = m[1]

    static BitMessage from_string(std::string_view s) {
        BitMessage m;
        m.bits.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') throw RangeError("bit message must be over {0,1}");
            m.bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return m;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits.size());
        for (auto b : bits) s.push_back(static_cast<char>('0' + b));
        return s;
    }

    std::size_t size() const { return bits.size(); }
    bool operator==(const BitMessage&) const = default;
};

struct ClawFreeTrapdoor {
    BigInt p; // = 3 mod 4
    BigInt q; // = 3 mod 4
    bool operator==(const ClawFreeTrapdoor&) const = default;
};

class ClawFreePair {
public:
    // Explicit construction from a factorization; validates the Blum shape.
    static ClawFreePair from_primes(const BigInt& p, const BigInt& q, std::size_t message_bits) {
        if (message_bits == 0) throw ConfigError("message length must be positive");
        if (p == q) throw ConfigError("Blum factors must be distinct");
        if (!is_probable_prime(p) || !is_probable_prime(q))
            throw ConfigError("Blum factors must be prime");
        if (p % 4 != 3 || q % 4 != 3)
            throw ConfigError("Blum factors must be congruent to 3 mod 4");
        ClawFreePair pair;
        pair.n_ = p * q;
        pair.k_ = message_bits;
        pair.trapdoor_ = ClawFreeTrapdoor{p, q};
        return pair;
    }

    static ClawFreePair public_only(const BigInt& n, std::size_t message_bits) {
        if (message_bits == 0) throw ConfigError("message length must be positive");
        if (n < 15 || (n & 1) == 0) throw ConfigError("modulus is not a Blum integer");
        ClawFreePair pair;
        pair.n_ = n;
        pair.k_ = message_bits;
        return pair;
    }

    // Attaches an externally supplied factorization without checking it
    // against the modulus; adapt's postcondition gate detects a wrong claim.
    static ClawFreePair with_claimed_trapdoor(const BigInt& n, ClawFreeTrapdoor t,
                                              std::size_t message_bits) {
        ClawFreePair pair = public_only(n, message_bits);
        if (t.p % 4 != 3 || t.q % 4 != 3)
            throw ConfigError("claimed factors must be congruent to 3 mod 4");
        pair.trapdoor_ = std::move(t);
        return pair;
    }

    const BigInt& modulus() const { return n_; }
    std::size_t message_bits() const { return k_; }
    bool has_trapdoor() const { return trapdoor_.has_value(); }
    const ClawFreeTrapdoor& trapdoor() const {
        if (!trapdoor_) throw AuthorizationError("pair holds no trapdoor");
        return *trapdoor_;
    }

    ClawFreePair public_part() const {
        ClawFreePair pair;
        pair.n_ = n_;
        pair.k_ = k_;
        return pair;
    }

    bool operator==(const ClawFreePair&) const = default;

private:
    BigInt n_;
    std::size_t k_ = 0;
    std::optional<ClawFreeTrapdoor> trapdoor_;
};

// Test-grade key generation over random Blum primes of the requested size.
template <ByteSource R>
ClawFreePair cf_keygen(unsigned bits_per_prime, std::size_t message_bits, R& rng,
                       std::uint64_t max_attempts = 100000) {
    if (bits_per_prime < 8) throw ConfigError("bits_per_prime must be at least 8");
    auto draw_blum_prime = [&]() -> BigInt {
        for (std::uint64_t i = 0; i < max_attempts; i++) {
            BigInt c = sample_below(BigInt(1) << (bits_per_prime - 1), rng) +
                       (BigInt(1) << (bits_per_prime - 1));
            c = c - mod_reduce(c, 4) + 3; // force c = 3 mod 4
            if (bit_length(c) != bits_per_prime) continue;
            if (is_probable_prime(c)) return c;
        }
        throw GenerationError("Blum prime search exhausted");
    };
    BigInt p = draw_blum_prime();
    BigInt q;
    do {
        q = draw_blum_prime();
    } while (q == p);
    return ClawFreePair::from_primes(p, q, message_bits);
}

namespace cfdetail {

inline BigInt f0(const BigInt& x, const BigInt& n) { return (x * x) % n; }
inline BigInt f1(const BigInt& x, const BigInt& n) { return (4 * x * x) % n; }

inline bool is_residue_mod_prime(const BigInt& a, const BigInt& p) {
    return mod_pow(mod_reduce(a, p), (p - 1) / 2, p) == 1;
}

// Unique square root of y that is itself a quadratic residue mod n = pq.
// Roots mod each Blum prime come from the (p+1)/4 exponent; the four CRT
// combinations contain exactly one element of QR_n.
inline BigInt qr_sqrt(const BigInt& y, const ClawFreeTrapdoor& t) {
    const BigInt n = t.p * t.q;
    BigInt rp = mod_pow(y, (t.p + 1) / 4, t.p);
    BigInt rq = mod_pow(y, (t.q + 1) / 4, t.q);
    BigInt q_inv_p = mod_inverse(t.q, t.p);
    const BigInt roots_p[2] = {rp, BigInt(t.p - rp)};
    const BigInt roots_q[2] = {rq, BigInt(t.q - rq)};
    for (const BigInt& sp : roots_p) {
        for (const BigInt& sq : roots_q) {
            BigInt x = mod_reduce(sq + t.q * mod_reduce((sp - sq) * q_inv_p, t.p), n);
            if (is_residue_mod_prime(x, t.p) && is_residue_mod_prime(x, t.q)) return x;
        }
    }
    throw IntegrityError("no quadratic-residue square root found; factorization is wrong");
}

} // namespace cfdetail

inline void check_domain(const ClawFreePair& pair, const BigInt& r) {
    if (r <= 0 || r >= pair.modulus())
        throw RangeError("seed outside the modulus range");
    if (boost::multiprecision::gcd(r, pair.modulus()) != 1)
        throw RangeError("seed shares a factor with the modulus");
    // Exact QR_n membership needs the factorization; publicly we can still
    // reject anything with Jacobi symbol != 1.
    if (pair.has_trapdoor()) {
        const auto& t = pair.trapdoor();
        if (!cfdetail::is_residue_mod_prime(r, t.p) || !cfdetail::is_residue_mod_prime(r, t.q))
            throw RangeError("seed is not a quadratic residue");
    } else if (jacobi(r, pair.modulus()) != 1) {
        throw RangeError("seed is not a quadratic residue (Jacobi check)");
    }
}

// Uniform-ish domain element: square of a uniform unit, which lands uniformly
// on QR_n because squaring is 4-to-1 on the units of a Blum integer.
template <ByteSource R>
BigInt cf_sample_domain(const ClawFreePair& pair, R& rng) {
    for (;;) {
        BigInt x = sample_below(pair.modulus(), rng);
        if (x <= 1) continue;
        if (boost::multiprecision::gcd(x, pair.modulus()) != 1) continue;
        return (x * x) % pair.modulus();
    }
}

// f_{m[k]} o ... o f_{m[1]}(r): first message bit applied first.
inline BigInt cf_hash(const ClawFreePair& pair, const BitMessage& m, const BigInt& r) {
    if (m.size() != pair.message_bits())
        throw RangeError("message length does not match the pair's fixed length");
    check_domain(pair, r);
    BigInt v = r;
    for (std::uint8_t bit : m.bits)
        v = bit ? cfdetail::f1(v, pair.modulus()) : cfdetail::f0(v, pair.modulus());
    return v;
}

// Inverts the composition for the new message over the old hash value.
inline BigInt cf_adapt(const ClawFreePair& pair, const BitMessage& m_old, const BigInt& r_old,
                       const BitMessage& m_new) {
    if (!pair.has_trapdoor())
        throw AuthorizationError("adapt requires the factorization trapdoor");
    if (m_old.size() != pair.message_bits() || m_new.size() != pair.message_bits())
        throw RangeError("message length does not match the pair's fixed length");
    const auto& t = pair.trapdoor();
    const BigInt& n = pair.modulus();
    BigInt h = cf_hash(pair, m_old, r_old);
    BigInt inv4 = mod_inverse(4, n);
    BigInt v = h;
    for (auto it = m_new.bits.rbegin(); it != m_new.bits.rend(); ++it) {
        if (*it)
            v = cfdetail::qr_sqrt((v * inv4) % n, t);
        else
            v = cfdetail::qr_sqrt(v, t);
    }
    if (cf_hash(pair, m_new, v) != h)
        throw IntegrityError("adapt postcondition failed; trapdoor inconsistent with modulus");
    return v;
}

} // namespace redactchain

#endif
