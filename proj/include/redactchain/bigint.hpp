#ifndef REDACTCHAIN_BIGINT_HPP
#define REDACTCHAIN_BIGINT_HPP

// Arbitrary-precision integers (Boost.Multiprecision cpp_int, header-only)
// plus the modular arithmetic, primality and sampling helpers the rest of
// the library needs. Canonical text form for a big integer everywhere in
// this project: lowercase hex, no leading zeros, "0" for zero.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redactchain/errors.hpp"
#include "redactchain/rng.hpp"
#include "redactchain/sha256.hpp"

namespace redactchain {

using BigInt = boost::multiprecision::cpp_int;
using Bytes = std::vector<std::uint8_t>;

inline unsigned bit_length(const BigInt& n) {
    if (n == 0) return 0;
    return static_cast<unsigned>(boost::multiprecision::msb(n)) + 1;
}

// Minimal big-endian byte representation; zero encodes as the empty string.
inline Bytes to_bytes_be(const BigInt& n) {
    Bytes out;
    if (n == 0) return out;
    export_bits(n, std::back_inserter(out), 8);
    return out;
}

inline BigInt from_bytes_be(std::span<const std::uint8_t> bytes) {
    BigInt n = 0;
    if (!bytes.empty()) import_bits(n, bytes.begin(), bytes.end(), 8);
    return n;
}

inline std::string to_hex(const BigInt& n) {
    if (n == 0) return "0";
    if (n < 0) throw RangeError("negative value has no canonical hex form");
    static const char* digits = "0123456789abcdef";
    std::string out;
    BigInt v = n;
    while (v > 0) {
        out.push_back(digits[static_cast<unsigned>(v & 0xf)]);
        v >>= 4;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline BigInt bigint_from_hex(std::string_view hex) {
    if (hex.empty()) throw RangeError("empty hex integer");
    if (hex.size() > 1 && hex.front() == '0')
        throw RangeError("non-canonical hex integer (leading zero): " + std::string(hex));
    BigInt v = 0;
    for (char c : hex) {
        unsigned d;
        if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a') + 10;
        else throw RangeError(std::string("bad hex digit '") + c + "'");
        v = (v << 4) | d;
    }
    return v;
}

inline BigInt mod_reduce(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r < 0) r += m;
    return r;
}

inline BigInt mod_pow(const BigInt& base, const BigInt& exp, const BigInt& mod) {
    if (mod <= 0) throw RangeError("modulus must be positive");
    if (mod == 1) return 0;
    BigInt b = mod_reduce(base, mod);
    return boost::multiprecision::powm(b, exp, mod);
}

// Extended Euclid; throws RangeError when gcd(a, m) != 1.
inline BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt r0 = m, r1 = mod_reduce(a, m);
    BigInt s0 = 0, s1 = 1;
    while (r1 != 0) {
        BigInt qt = r0 / r1;
        BigInt r2 = r0 - qt * r1;
        BigInt s2 = s0 - qt * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (r0 != 1) throw RangeError("value is not invertible modulo m");
    return mod_reduce(s0, m);
}

// Jacobi symbol (a/n) for odd n > 0.
inline int jacobi(const BigInt& a_in, const BigInt& n_in) {
    if (n_in <= 0 || (n_in & 1) == 0) throw RangeError("jacobi requires odd positive n");
    BigInt a = mod_reduce(a_in, n_in), n = n_in;
    int result = 1;
    while (a != 0) {
        while ((a & 1) == 0) {
            a >>= 1;
            unsigned r = static_cast<unsigned>(n & 7);
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) result = -result;
        a = a % n;
    }
    return n == 1 ? result : 0;
}

// Uniform integer in [0, bound) by rejection over the minimal bit width.
template <ByteSource R>
BigInt sample_below(const BigInt& bound, R& rng) {
    if (bound <= 0) throw RangeError("sample_below requires a positive bound");
    if (bound == 1) return 0;
    unsigned bits = bit_length(bound);
    std::size_t nbytes = (bits + 7) / 8;
    unsigned top_mask = (bits % 8 == 0) ? 0xff : ((1u << (bits % 8)) - 1);
    Bytes buf(nbytes);
    for (;;) {
        rng.fill(buf);
        buf[0] = static_cast<std::uint8_t>(buf[0] & top_mask);
        BigInt v = from_bytes_be(buf);
        if (v < bound) return v;
    }
}

namespace detail {

inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        std::vector<std::uint32_t> out;
        std::vector<bool> sieve(8192, true);
        for (std::uint32_t i = 2; i < sieve.size(); i++) {
            if (!sieve[i]) continue;
            out.push_back(i);
            for (std::uint32_t j = i * i; j < sieve.size(); j += i) sieve[j] = false;
        }
        return out;
    }();
    return primes;
}

inline bool miller_rabin_witness(const BigInt& n, const BigInt& a, const BigInt& d, unsigned s) {
    BigInt x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (unsigned i = 1; i < s; i++) {
        x = (x * x) % n;
        if (x == n - 1) return false;
    }
    return true; // composite witness
}

} // namespace detail

// Miller-Rabin with `rounds` bases drawn from a stream keyed on n itself, so
// the verdict is deterministic per input while the bases stay unpredictable.
inline bool is_probable_prime(const BigInt& n, unsigned rounds = 128) {
    if (n < 2) return false;
    for (std::uint32_t p : detail::small_primes()) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    BigInt d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) { d >>= 1; s++; }
    Digest32 key = sha256(to_bytes_be(n));
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; i++) seed = (seed << 8) | key[static_cast<std::size_t>(i)];
    DeterministicRng bases(seed, "miller-rabin");
    if (detail::miller_rabin_witness(n, 2, d, s)) return false;
    for (unsigned i = 0; i < rounds; i++) {
        BigInt a = sample_below(n - 3, bases) + 2; // a in [2, n-2]
        if (detail::miller_rabin_witness(n, a, d, s)) return false;
    }
    return true;
}

} // namespace redactchain

#endif
