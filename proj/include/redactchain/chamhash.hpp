#ifndef REDACTCHAIN_CHAMHASH_HPP
#define REDACTCHAIN_CHAMHASH_HPP

// Discrete-log chameleon hash over a safe-prime group (Krawczyk–Rabin form):
//
//   h = g^e * y^r mod p          with y = g^x, e and r scalars mod q
//
// The holder of the trapdoor x can, for any (e1, r1) and target e2, compute
// r2 = (e1 - e2) * x^-1 + r1 mod q so that both pairs hash identically.
// That collision equation also means one published collision reveals x:
// this instantiation is weakly collision resistant WITH key exposure, and
// redaction authority must therefore be enforced by governance, not by the
// hash. extract_trapdoor_from_collision() below makes the exposure testable.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "redactchain/bigint.hpp"
#include "redactchain/encoding.hpp"
#include "redactchain/errors.hpp"
#include "redactchain/rng.hpp"
#include "redactchain/sha256.hpp"

namespace redactchain {

// Desk-scale tier: anything below this is for exhaustive-oracle tests only
// and gets flagged as insecure in every output that mentions it.
inline constexpr unsigned kInsecureBitsThreshold = 256;

struct GroupParams {
    BigInt p; // safe prime, p = 2q + 1
    BigInt q; // prime subgroup order
    BigInt g; // generator of the order-q subgroup

    void validate(unsigned mr_rounds = 128) const {
        if (p != 2 * q + 1) throw ConfigError("group: p != 2q + 1");
        if (!is_probable_prime(q, mr_rounds)) throw ConfigError("group: q is not prime");
        if (!is_probable_prime(p, mr_rounds)) throw ConfigError("group: p is not prime");
        if (g <= 1 || g >= p) throw ConfigError("group: generator out of range");
        if (mod_pow(g, q, p) != 1) throw ConfigError("group: generator does not have order q");
    }

    bool operator==(const GroupParams&) const = default;
};

struct ChameleonKeyPair {
    GroupParams params;
    BigInt hk;                 // public hashing key y = g^x mod p
    std::optional<BigInt> tk;  // trapdoor x in [1, q-1]; absent on public copies

    bool has_trapdoor() const { return tk.has_value(); }

    ChameleonKeyPair public_part() const { return {params, hk, std::nullopt}; }

    void validate(unsigned mr_rounds = 128) const {
        params.validate(mr_rounds);
        if (hk <= 0 || hk >= params.p) throw ConfigError("key: hashing key out of range");
        if (mod_pow(hk, params.q, params.p) != 1)
            throw ConfigError("key: hashing key is not in the order-q subgroup");
        if (tk) {
            if (*tk < 1 || *tk > params.q - 1) throw ConfigError("key: trapdoor out of range");
            if (mod_pow(params.g, *tk, params.p) != hk)
                throw ConfigError("key: trapdoor does not match hashing key");
        }
    }

    bool operator==(const ChameleonKeyPair&) const = default;
};

struct MessageScalar {
    BigInt e;
    bool operator==(const MessageScalar&) const = default;
};

struct Randomness {
    BigInt r;
    bool operator==(const Randomness&) const = default;
};

struct ChameleonDigest {
    BigInt h;
    bool operator==(const ChameleonDigest&) const = default;
};

// Uniform over [0, q-1]; rejection sampling over the minimal bit width so
// there is no modulo bias.
template <ByteSource R>
Randomness sample_randomness(const BigInt& q, R& rng) {
    return Randomness{sample_below(q, rng)};
}

// Searches for a safe prime pair (q, p = 2q + 1) with q exactly q_bits long,
// then picks a generator of the quadratic-residue subgroup. Throws
// GenerationError once the attempt budget is spent.
template <ByteSource R>
GroupParams generate_group(unsigned q_bits, R& rng, std::uint64_t max_attempts = 0) {
    if (q_bits < 4) throw ConfigError("group size too small");
    if (max_attempts == 0)
        max_attempts = std::max<std::uint64_t>(200000, std::uint64_t(q_bits) * q_bits);

    const auto& primes = detail::small_primes();
    for (std::uint64_t attempt = 0; attempt < max_attempts; attempt++) {
        BigInt q = sample_below(BigInt(1) << (q_bits - 1), rng) + (BigInt(1) << (q_bits - 1));
        q |= 1;
        if (bit_length(q) != q_bits) continue;

        // Joint sieve: q % s == 0 kills q, q % s == (s-1)/2 kills p = 2q + 1.
        bool sieved_out = false;
        for (std::uint32_t s : primes) {
            if (s <= 2) continue;
            std::uint32_t rem = static_cast<std::uint32_t>(q % s);
            if ((rem == 0 && q != s) || (rem == (s - 1) / 2 && 2 * q + 1 != s)) {
                sieved_out = true;
                break;
            }
        }
        if (sieved_out) continue;

        BigInt p = 2 * q + 1;
        if (!is_probable_prime(q, 2) || !is_probable_prime(p, 2)) continue;
        if (!is_probable_prime(q, 128) || !is_probable_prime(p, 128)) continue;

        // Squares generate the order-q subgroup of Z_p^*.
        for (;;) {
            BigInt a = sample_below(p - 3, rng) + 2;
            BigInt g = mod_pow(a, 2, p);
            if (g != 1) return GroupParams{p, q, g};
        }
    }
    throw GenerationError("prime search exhausted after " + std::to_string(max_attempts) +
                          " attempts at " + std::to_string(q_bits) + " bits");
}

inline constexpr bool supported_security_bits(unsigned bits) {
    return bits == 64 || bits == 256 || bits == 2048 || bits == 3072;
}

// security_bits is the bit length of the subgroup order q; the modulus
// p = 2q + 1 is one bit longer. 64 is the desk-scale/testing tier.
template <ByteSource R>
ChameleonKeyPair keygen(unsigned security_bits, R& rng) {
    if (!supported_security_bits(security_bits))
        throw ConfigError("unsupported security_bits " + std::to_string(security_bits) +
                          " (expected 64, 256, 2048 or 3072)");
    GroupParams params = generate_group(security_bits, rng);
    BigInt x;
    do {
        x = sample_below(params.q, rng);
    } while (x == 0);
    BigInt y = mod_pow(params.g, x, params.p);
    return ChameleonKeyPair{std::move(params), std::move(y), std::move(x)};
}

// Assembles a key pair from explicit parameters and trapdoor (toy vectors,
// reconstructed consortium secrets). Validates all invariants.
inline ChameleonKeyPair make_keypair(GroupParams params, BigInt tk, unsigned mr_rounds = 128) {
    BigInt y = mod_pow(params.g, tk, params.p);
    ChameleonKeyPair key{std::move(params), std::move(y), std::move(tk)};
    key.validate(mr_rounds);
    return key;
}

inline void check_scalar_range(const BigInt& v, const BigInt& q, const char* what) {
    if (v < 0 || v >= q) throw RangeError(std::string(what) + " outside [0, q-1]");
}

inline ChameleonDigest cham_hash(const ChameleonKeyPair& key, const MessageScalar& e,
                                 const Randomness& r) {
    check_scalar_range(e.e, key.params.q, "message scalar");
    check_scalar_range(r.r, key.params.q, "randomness");
    BigInt h = (mod_pow(key.params.g, e.e, key.params.p) *
                mod_pow(key.hk, r.r, key.params.p)) % key.params.p;
    return ChameleonDigest{h};
}

// Total: malformed inputs yield false rather than an error.
inline bool cham_verify(const ChameleonKeyPair& key, const MessageScalar& e,
                        const Randomness& r, const ChameleonDigest& h) {
    if (e.e < 0 || e.e >= key.params.q) return false;
    if (r.r < 0 || r.r >= key.params.q) return false;
    if (h.h < 1 || h.h >= key.params.p) return false;
    return cham_hash(key, e, r) == h;
}

// Trapdoor collision: r2 = (e1 - e2) * tk^-1 + r1 mod q.
inline Randomness cham_adapt(const ChameleonKeyPair& key, const MessageScalar& e_old,
                             const Randomness& r_old, const MessageScalar& e_new) {
    if (!key.tk || *key.tk == 0)
        throw AuthorizationError("adapt requires the trapdoor key");
    check_scalar_range(e_old.e, key.params.q, "old message scalar");
    check_scalar_range(e_new.e, key.params.q, "new message scalar");
    check_scalar_range(r_old.r, key.params.q, "old randomness");
    const BigInt& q = key.params.q;
    BigInt inv = mod_inverse(*key.tk, q);
    BigInt r_new = mod_reduce((e_old.e - e_new.e) * inv + r_old.r, q);
    return Randomness{std::move(r_new)};
}

// Canonical message-to-scalar mapping used by every module: SHA-256 of the
// message, interpreted big-endian, reduced mod q.
inline MessageScalar message_scalar(std::span<const std::uint8_t> message, const BigInt& q) {
    Digest32 d = sha256(message);
    return MessageScalar{mod_reduce(from_bytes_be(std::span<const std::uint8_t>(d.data(), d.size())), q)};
}

inline MessageScalar message_scalar(const Bytes& message, const BigInt& q) {
    return message_scalar(std::span<const std::uint8_t>(message.data(), message.size()), q);
}

// Digest-then-chameleon composition for arbitrary-length messages.
inline std::pair<ChameleonDigest, MessageScalar> layered_hash(const ChameleonKeyPair& key,
                                                              std::span<const std::uint8_t> message,
                                                              const Randomness& r) {
    MessageScalar e = message_scalar(message, key.params.q);
    return {cham_hash(key, e, r), e};
}

inline std::pair<ChameleonDigest, MessageScalar> layered_hash(const ChameleonKeyPair& key,
                                                              const Bytes& message,
                                                              const Randomness& r) {
    return layered_hash(key, std::span<const std::uint8_t>(message.data(), message.size()), r);
}

// One published collision (e1, r1), (e2, r2) on the same digest reveals the
// trapdoor: x = (e1 - e2) / (r2 - r1) mod q. This is the key-exposure
// property the tests demonstrate.
inline BigInt extract_trapdoor_from_collision(const ChameleonKeyPair& key,
                                              const MessageScalar& e1, const Randomness& r1,
                                              const MessageScalar& e2, const Randomness& r2) {
    const BigInt& q = key.params.q;
    BigInt dr = mod_reduce(r2.r - r1.r, q);
    if (dr == 0) throw RangeError("collision pair shares its randomness; no extraction possible");
    return mod_reduce(mod_reduce(e1.e - e2.e, q) * mod_inverse(dr, q), q);
}

// --- key files --------------------------------------------------------------
//
//   redactchain-key v1
//   kind public|secret
//   p <hex>
//   q <hex>
//   g <hex>
//   y <hex>
//   x <hex>        (secret files only)

inline constexpr const char* kKeyFileHeader = "redactchain-key v1";

inline std::string serialize_key(const ChameleonKeyPair& key, bool include_secret) {
    if (include_secret && !key.tk)
        throw AuthorizationError("key pair holds no trapdoor to serialize");
    std::ostringstream out;
    out << kKeyFileHeader << "\n";
    out << "kind " << (include_secret ? "secret" : "public") << "\n";
    out << "p " << to_hex(key.params.p) << "\n";
    out << "q " << to_hex(key.params.q) << "\n";
    out << "g " << to_hex(key.params.g) << "\n";
    out << "y " << to_hex(key.hk) << "\n";
    if (include_secret) out << "x " << to_hex(*key.tk) << "\n";
    return out.str();
}

inline ChameleonKeyPair parse_key(const std::string& text, const std::string& path = "<key>") {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        line_no++;
        return static_cast<bool>(std::getline(in, line));
    };
    auto field = [&](const char* name) -> std::string {
        if (!next_line()) throw ParseError(path, line_no, std::string("missing field '") + name + "'");
        std::string prefix = std::string(name) + " ";
        if (line.rfind(prefix, 0) != 0)
            throw ParseError(path, line_no, "expected '" + std::string(name) + " <value>'");
        return line.substr(prefix.size());
    };
    if (!next_line() || line != kKeyFileHeader)
        throw ParseError(path, line_no, std::string("expected header '") + kKeyFileHeader + "'");
    std::string kind = field("kind");
    if (kind != "public" && kind != "secret")
        throw ParseError(path, line_no, "kind must be public or secret");
    ChameleonKeyPair key;
    try {
        key.params.p = bigint_from_hex(field("p"));
        key.params.q = bigint_from_hex(field("q"));
        key.params.g = bigint_from_hex(field("g"));
        key.hk = bigint_from_hex(field("y"));
        if (kind == "secret") key.tk = bigint_from_hex(field("x"));
    } catch (const RangeError& e) {
        throw ParseError(path, line_no, e.what());
    }
    if (next_line() && !line.empty()) throw ParseError(path, line_no, "trailing content");
    key.validate();
    return key;
}

inline void save_key_file(const std::filesystem::path& path, const ChameleonKeyPair& key,
                          bool include_secret) {
    atomic_write_file(path, serialize_key(key, include_secret));
}

inline ChameleonKeyPair load_key_file(const std::filesystem::path& path) {
    return parse_key(read_text_file(path), path.string());
}

inline Bytes canonical_public_encoding(const ChameleonKeyPair& key) {
    Bytes enc;
    append_bigint_field(enc, key.params.p);
    append_bigint_field(enc, key.params.q);
    append_bigint_field(enc, key.params.g);
    append_bigint_field(enc, key.hk);
    return enc;
}

// First 8 bytes of SHA-256 over the canonical public encoding, hex.
inline std::string key_fingerprint(const ChameleonKeyPair& key) {
    Digest32 d = sha256(canonical_public_encoding(key));
    return hex_encode(std::span<const std::uint8_t>(d.data(), 8));
}

} // namespace redactchain

#endif
