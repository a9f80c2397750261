#ifndef REDACTCHAIN_LEDGER_HPP
#define REDACTCHAIN_LEDGER_HPP

// Chameleon-hashed ledger. Each transaction carries its payload, the
// chameleon randomness r and the chameleon digest h; Merkle leaves are the
// digests, so an authorized collision swaps a payload in place while the
// Merkle root, the block hash and all downstream linkage stay bit-identical.
// Block hashes are conventional SHA-256 over the canonical header encoding;
// redaction stamps are block metadata excluded from that encoding.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "redactchain/chamhash.hpp"
#include "redactchain/encoding.hpp"
#include "redactchain/errors.hpp"
#include "redactchain/merkle.hpp"
#include "redactchain/sha256.hpp"

namespace redactchain {

using TxId = std::array<std::uint8_t, 16>;

inline constexpr std::size_t kMaxPayloadBytes = 1 << 20; // 1 MiB

struct Transaction {
    TxId id{};
    Bytes payload;
    Randomness r;
    ChameleonDigest digest;
    std::uint64_t version = 1;
    std::uint64_t redaction_count = 0;

    bool operator==(const Transaction&) const = default;
};

struct RedactionStamp {
    TxId tx_id{};
    Digest32 old_payload_commitment{}; // SHA-256 of the replaced payload
    std::string request_id;
    std::uint64_t approved_at = 0; // chain height when the redaction executed

    bool operator==(const RedactionStamp&) const = default;
};

struct BlockHeader {
    std::uint64_t height = 0;
    Digest32 prev_hash{};
    Digest32 merkle_root{};
    std::uint64_t timestamp = 0;
    std::vector<RedactionStamp> stamps; // append-only; not part of block_hash

    bool operator==(const BlockHeader&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> txs;

    Digest32 block_hash() const {
        Bytes enc;
        append_u64_field(enc, header.height);
        append_field(enc, header.prev_hash);
        append_field(enc, header.merkle_root);
        append_u64_field(enc, header.timestamp);
        return sha256(enc);
    }

    bool operator==(const Block&) const = default;
};

struct ValidationIssue {
    std::uint64_t height = 0;
    std::optional<TxId> tx_id;
    std::string what;

    std::string to_string() const {
        std::string s = "block " + std::to_string(height);
        if (tx_id) s += " tx " + hex_encode(*tx_id);
        s += ": " + what;
        return s;
    }
};

struct ValidationReport {
    std::optional<ValidationIssue> first_failure;

    bool ok() const { return !first_failure.has_value(); }
    std::string to_string() const { return ok() ? "valid" : first_failure->to_string(); }
};

template <ByteSource R>
Transaction create_transaction(const ChameleonKeyPair& key, Bytes payload, R& rng) {
    if (payload.size() > kMaxPayloadBytes)
        throw ConfigError("payload exceeds the " + std::to_string(kMaxPayloadBytes) +
                          "-byte cap");
    Transaction tx;
    rng.fill(std::span<std::uint8_t>(tx.id.data(), tx.id.size()));
    tx.r = sample_randomness(key.params.q, rng);
    auto [digest, scalar] = layered_hash(key, payload, tx.r);
    (void)scalar;
    tx.digest = digest;
    tx.payload = std::move(payload);
    return tx;
}

inline bool transaction_verifies(const ChameleonKeyPair& key, const Transaction& tx) {
    return cham_verify(key, message_scalar(tx.payload, key.params.q), tx.r, tx.digest);
}

class Chain {
public:
    // A chain starts with an empty genesis block at height 0. In
    // public-trapdoor governance the trapdoor rides in the chain itself.
    static Chain init(const ChameleonKeyPair& public_key, std::uint64_t genesis_time,
                      std::optional<BigInt> embedded_trapdoor = std::nullopt) {
        Chain chain;
        chain.key_ = public_key.public_part();
        chain.key_.validate();
        if (embedded_trapdoor) {
            ChameleonKeyPair probe = chain.key_;
            probe.tk = *embedded_trapdoor;
            probe.validate(); // embedded trapdoor must match the hashing key
            chain.trapdoor_ = std::move(embedded_trapdoor);
        }
        Block genesis;
        genesis.header.height = 0;
        genesis.header.prev_hash.fill(0);
        genesis.header.merkle_root = merkle_root({});
        genesis.header.timestamp = genesis_time;
        chain.blocks_.push_back(std::move(genesis));
        return chain;
    }

    const ChameleonKeyPair& key() const { return key_; }
    const BigInt& q() const { return key_.params.q; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<Transaction>& pending() const { return pending_; }
    std::uint64_t height() const { return blocks_.back().header.height; }
    const std::optional<BigInt>& embedded_trapdoor() const { return trapdoor_; }

    template <ByteSource R>
    const Transaction& add_pending(Bytes payload, R& rng) {
        Transaction tx = create_transaction(key_, std::move(payload), rng);
        while (find_tx(tx.id) || pending_has(tx.id))
            rng.fill(std::span<std::uint8_t>(tx.id.data(), tx.id.size()));
        pending_.push_back(std::move(tx));
        return pending_.back();
    }

    // Seals the given transactions into the next block.
    const Block& seal_block(std::vector<Transaction> txs, std::uint64_t timestamp) {
        if (txs.empty()) throw ConfigError("cannot seal an empty block");
        for (const auto& tx : txs) {
            if (!transaction_verifies(key_, tx))
                throw IntegrityError("transaction " + hex_encode(tx.id) +
                                     " fails chameleon verification");
            if (tx.version != tx.redaction_count + 1)
                throw IntegrityError("transaction " + hex_encode(tx.id) +
                                     " has inconsistent version metadata");
            if (find_tx(tx.id))
                throw IntegrityError("transaction " + hex_encode(tx.id) +
                                     " already exists on the chain");
        }
        for (std::size_t i = 0; i < txs.size(); i++)
            for (std::size_t j = i + 1; j < txs.size(); j++)
                if (txs[i].id == txs[j].id)
                    throw IntegrityError("transaction " + hex_encode(txs[i].id) +
                                         " appears twice in the block");
        Block block;
        block.header.height = height() + 1;
        block.header.prev_hash = blocks_.back().block_hash();
        std::vector<ChameleonDigest> leaves;
        leaves.reserve(txs.size());
        for (const auto& tx : txs) leaves.push_back(tx.digest);
        block.header.merkle_root = merkle_root(leaves);
        block.header.timestamp = timestamp;
        block.txs = std::move(txs);
        blocks_.push_back(std::move(block));
        return blocks_.back();
    }

    // CLI path: seal everything in the pending set.
    const Block& seal_pending(std::uint64_t timestamp) {
        if (pending_.empty()) throw ConfigError("no pending transactions to seal");
        std::vector<Transaction> txs = std::move(pending_);
        pending_.clear();
        return seal_block(std::move(txs), timestamp);
    }

    // Appends a block received from a peer, re-checking linkage and content.
    const Block& apply_block(const Block& block) {
        if (block.header.height != height() + 1)
            throw IntegrityError("block height " + std::to_string(block.header.height) +
                                 " does not extend tip " + std::to_string(height()));
        if (block.header.prev_hash != blocks_.back().block_hash())
            throw IntegrityError("block does not link to the local tip");
        if (block.txs.empty()) throw IntegrityError("received an empty block");
        std::vector<ChameleonDigest> leaves;
        for (const auto& tx : block.txs) {
            if (!transaction_verifies(key_, tx))
                throw IntegrityError("transaction " + hex_encode(tx.id) +
                                     " fails chameleon verification");
            if (find_tx(tx.id))
                throw IntegrityError("duplicate transaction " + hex_encode(tx.id));
            leaves.push_back(tx.digest);
        }
        if (merkle_root(leaves) != block.header.merkle_root)
            throw IntegrityError("merkle root mismatch in received block");
        blocks_.push_back(block);
        return blocks_.back();
    }

    struct TxLocation {
        std::size_t block_index;
        std::size_t tx_index;
    };

    std::optional<TxLocation> find_tx(const TxId& id) const {
        for (std::size_t b = 0; b < blocks_.size(); b++)
            for (std::size_t t = 0; t < blocks_[b].txs.size(); t++)
                if (blocks_[b].txs[t].id == id) return TxLocation{b, t};
        return std::nullopt;
    }

    const Transaction& tx_at(const TxLocation& loc) const {
        return blocks_[loc.block_index].txs[loc.tx_index];
    }

    // The §-core redaction: compute the trapdoor collision for the new
    // payload, then swap (payload, r) in place. The digest, the Merkle root
    // and every block hash are untouched; a stamp records the event. All
    // checks run before any mutation, so failure leaves the chain
    // byte-identical.
    RedactionStamp redact_transaction(const BigInt& trapdoor, std::uint64_t block_height,
                                      const TxId& tx_id, Bytes new_payload,
                                      const std::string& request_id) {
        if (new_payload.size() > kMaxPayloadBytes)
            throw ConfigError("payload exceeds the cap");
        if (!valid_token(request_id)) throw ConfigError("malformed request id");
        std::size_t block_index = index_of_height(block_height);
        Block& block = blocks_[block_index];
        auto it = std::find_if(block.txs.begin(), block.txs.end(),
                               [&](const Transaction& t) { return t.id == tx_id; });
        if (it == block.txs.end())
            throw NotFoundError("no transaction " + hex_encode(tx_id) + " in block " +
                                std::to_string(block_height));
        Transaction& tx = *it;

        ChameleonKeyPair adapt_key = key_;
        adapt_key.tk = trapdoor;
        MessageScalar e_old = message_scalar(tx.payload, key_.params.q);
        MessageScalar e_new = message_scalar(new_payload, key_.params.q);
        Randomness r_new = cham_adapt(adapt_key, e_old, tx.r, e_new);
        if (!cham_verify(key_, e_new, r_new, tx.digest))
            throw IntegrityError("adapt postcondition failed: supplied trapdoor does not "
                                 "produce a valid collision; chain left unmodified");

        RedactionStamp stamp;
        stamp.tx_id = tx_id;
        stamp.old_payload_commitment = sha256(tx.payload);
        stamp.request_id = request_id;
        stamp.approved_at = height();

        tx.payload = std::move(new_payload);
        tx.r = r_new;
        tx.version++;
        tx.redaction_count++;
        block.header.stamps.push_back(stamp);
        return stamp;
    }

    // Peer-side application of an executed redaction. No trapdoor needed:
    // the collision itself is checked against the recorded digest, and the
    // version counter must advance by exactly one (anti-replay).
    RedactionStamp apply_redaction(std::uint64_t block_height, const TxId& tx_id,
                                   const Bytes& new_payload, const Randomness& new_r,
                                   std::uint64_t new_version, const std::string& request_id,
                                   std::uint64_t approved_at) {
        std::size_t block_index = index_of_height(block_height);
        Block& block = blocks_[block_index];
        auto it = std::find_if(block.txs.begin(), block.txs.end(),
                               [&](const Transaction& t) { return t.id == tx_id; });
        if (it == block.txs.end())
            throw NotFoundError("no transaction " + hex_encode(tx_id) + " in block " +
                                std::to_string(block_height));
        Transaction& tx = *it;
        if (new_version != tx.version + 1)
            throw IntegrityError("stale redaction: version " + std::to_string(new_version) +
                                 " does not advance local version " + std::to_string(tx.version));
        MessageScalar e_new = message_scalar(new_payload, key_.params.q);
        if (!cham_verify(key_, e_new, new_r, tx.digest))
            throw IntegrityError("redaction rejected: collision fails chameleon verification");

        RedactionStamp stamp;
        stamp.tx_id = tx_id;
        stamp.old_payload_commitment = sha256(tx.payload);
        stamp.request_id = request_id;
        stamp.approved_at = approved_at;

        tx.payload = new_payload;
        tx.r = new_r;
        tx.version = new_version;
        tx.redaction_count++;
        block.header.stamps.push_back(stamp);
        return stamp;
    }

    ValidationReport validate() const {
        ValidationReport report;
        auto fail = [&](std::uint64_t height, std::optional<TxId> tx, std::string what) {
            report.first_failure = ValidationIssue{height, tx, std::move(what)};
            return report;
        };
        if (blocks_.empty()) return fail(0, std::nullopt, "chain has no genesis block");
        if (blocks_[0].header.height != 0 || !blocks_[0].txs.empty())
            return fail(0, std::nullopt, "malformed genesis block");
        Digest32 zero{};
        if (blocks_[0].header.prev_hash != zero)
            return fail(0, std::nullopt, "genesis prev_hash must be zero");

        std::vector<TxId> seen;
        for (std::size_t b = 0; b < blocks_.size(); b++) {
            const Block& block = blocks_[b];
            std::uint64_t h = block.header.height;
            if (h != b) return fail(h, std::nullopt, "non-contiguous block height");
            if (b > 0) {
                if (block.header.prev_hash != blocks_[b - 1].block_hash())
                    return fail(h, std::nullopt, "prev_hash does not match previous block");
                if (block.txs.empty()) return fail(h, std::nullopt, "empty block");
            }
            std::vector<ChameleonDigest> leaves;
            for (const auto& tx : block.txs) leaves.push_back(tx.digest);
            if (merkle_root(leaves) != block.header.merkle_root)
                return fail(h, std::nullopt, "merkle root mismatch");
            for (const auto& tx : block.txs) {
                if (std::find(seen.begin(), seen.end(), tx.id) != seen.end())
                    return fail(h, tx.id, "duplicate transaction id");
                seen.push_back(tx.id);
                if (!transaction_verifies(key_, tx))
                    return fail(h, tx.id, "chameleon verification failed");
                if (tx.version != tx.redaction_count + 1)
                    return fail(h, tx.id, "version does not equal 1 + redaction_count");
                std::size_t stamps = 0;
                for (const auto& s : block.header.stamps)
                    if (s.tx_id == tx.id) stamps++;
                if (stamps != tx.redaction_count)
                    return fail(h, tx.id, "stamp count does not match redaction_count");
            }
            std::uint64_t prev_height = 0;
            for (const auto& s : block.header.stamps) {
                bool known = std::any_of(block.txs.begin(), block.txs.end(),
                                         [&](const Transaction& t) { return t.id == s.tx_id; });
                if (!known) return fail(h, s.tx_id, "stamp references unknown transaction");
                if (s.approved_at < prev_height)
                    return fail(h, s.tx_id, "stamps are not in execution order");
                prev_height = s.approved_at;
            }
        }
        for (const auto& tx : pending_) {
            if (!transaction_verifies(key_, tx))
                return fail(height(), tx.id, "pending transaction fails chameleon verification");
        }
        return report;
    }

    std::vector<RedactionStamp> audit_history(const TxId& tx_id) const {
        auto loc = find_tx(tx_id);
        if (!loc) throw NotFoundError("no transaction " + hex_encode(tx_id) + " on the chain");
        std::vector<RedactionStamp> out;
        for (const auto& s : blocks_[loc->block_index].header.stamps)
            if (s.tx_id == tx_id) out.push_back(s);
        return out;
    }

    // --- persistence -------------------------------------------------------
    //
    //   redactchain-chain v1
    //   key p=<hex> q=<hex> g=<hex> y=<hex>
    //   trapdoor x=<hex>                    (public-trapdoor chains only)
    //   block height=<dec> prev=<hex64> merkle=<hex64> time=<dec>
    //   tx id=<hex32> version=<dec> redactions=<dec> r=<hex> h=<hex> payload=<hex>
    //   stamp tx=<hex32> request=<token> height=<dec> old=<hex64>
    //   pending id=<hex32> version=<dec> redactions=<dec> r=<hex> h=<hex> payload=<hex>

    static constexpr const char* kFileHeader = "redactchain-chain v1";

    std::string serialize() const {
        std::ostringstream out;
        out << kFileHeader << "\n";
        out << "key p=" << to_hex(key_.params.p) << " q=" << to_hex(key_.params.q)
            << " g=" << to_hex(key_.params.g) << " y=" << to_hex(key_.hk) << "\n";
        if (trapdoor_) out << "trapdoor x=" << to_hex(*trapdoor_) << "\n";
        for (const auto& block : blocks_) {
            out << "block height=" << block.header.height
                << " prev=" << hex_encode(block.header.prev_hash)
                << " merkle=" << hex_encode(block.header.merkle_root)
                << " time=" << block.header.timestamp << "\n";
            for (const auto& tx : block.txs) write_tx(out, "tx", tx);
            for (const auto& s : block.header.stamps) {
                out << "stamp tx=" << hex_encode(s.tx_id) << " request=" << s.request_id
                    << " height=" << s.approved_at
                    << " old=" << hex_encode(s.old_payload_commitment) << "\n";
            }
        }
        for (const auto& tx : pending_) write_tx(out, "pending", tx);
        return out.str();
    }

    static Chain deserialize(const std::string& text, const std::string& path = "<chain>") {
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 0;
        if (!std::getline(in, line) || line != kFileHeader)
            throw ParseError(path, 1, std::string("expected header '") + kFileHeader + "'");
        line_no = 1;

        Chain chain;
        bool have_key = false;
        Block* current = nullptr;
        auto as_bigint = [&](const std::string& s) {
            try {
                return bigint_from_hex(s);
            } catch (const RangeError& e) {
                throw ParseError(path, line_no, e.what());
            }
        };
        auto as_bytes = [&](const std::string& s) {
            try {
                return hex_decode(s);
            } catch (const RangeError& e) {
                throw ParseError(path, line_no, e.what());
            }
        };

        while (std::getline(in, line)) {
            line_no++;
            if (line.empty()) throw ParseError(path, line_no, "blank line");
            RecordLine rec = parse_record_line(path, line_no, line);
            if (rec.type == "key") {
                rec.expect(path, line_no, {"p", "q", "g", "y"});
                if (have_key) throw ParseError(path, line_no, "duplicate key record");
                chain.key_.params.p = as_bigint(rec.value(0));
                chain.key_.params.q = as_bigint(rec.value(1));
                chain.key_.params.g = as_bigint(rec.value(2));
                chain.key_.hk = as_bigint(rec.value(3));
                have_key = true;
            } else if (rec.type == "trapdoor") {
                rec.expect(path, line_no, {"x"});
                if (!have_key) throw ParseError(path, line_no, "trapdoor before key record");
                chain.trapdoor_ = as_bigint(rec.value(0));
            } else if (rec.type == "block") {
                rec.expect(path, line_no, {"height", "prev", "merkle", "time"});
                if (!have_key) throw ParseError(path, line_no, "block before key record");
                Block block;
                block.header.height = parse_u64(path, line_no, rec.value(0));
                try {
                    block.header.prev_hash = hex_decode_fixed<32>(rec.value(1));
                    block.header.merkle_root = hex_decode_fixed<32>(rec.value(2));
                } catch (const RangeError& e) {
                    throw ParseError(path, line_no, e.what());
                }
                block.header.timestamp = parse_u64(path, line_no, rec.value(3));
                chain.blocks_.push_back(std::move(block));
                current = &chain.blocks_.back();
            } else if (rec.type == "tx" || rec.type == "pending") {
                rec.expect(path, line_no, {"id", "version", "redactions", "r", "h", "payload"});
                Transaction tx;
                try {
                    tx.id = hex_decode_fixed<16>(rec.value(0));
                } catch (const RangeError& e) {
                    throw ParseError(path, line_no, e.what());
                }
                tx.version = parse_u64(path, line_no, rec.value(1));
                tx.redaction_count = parse_u64(path, line_no, rec.value(2));
                tx.r = Randomness{as_bigint(rec.value(3))};
                tx.digest = ChameleonDigest{as_bigint(rec.value(4))};
                tx.payload = as_bytes(rec.value(5));
                if (rec.type == "tx") {
                    if (!current) throw ParseError(path, line_no, "tx outside any block");
                    current->txs.push_back(std::move(tx));
                } else {
                    chain.pending_.push_back(std::move(tx));
                }
            } else if (rec.type == "stamp") {
                rec.expect(path, line_no, {"tx", "request", "height", "old"});
                if (!current) throw ParseError(path, line_no, "stamp outside any block");
                RedactionStamp s;
                try {
                    s.tx_id = hex_decode_fixed<16>(rec.value(0));
                    s.old_payload_commitment = hex_decode_fixed<32>(rec.value(3));
                } catch (const RangeError& e) {
                    throw ParseError(path, line_no, e.what());
                }
                s.request_id = rec.value(1);
                if (!valid_token(s.request_id))
                    throw ParseError(path, line_no, "malformed request id");
                s.approved_at = parse_u64(path, line_no, rec.value(2));
                current->header.stamps.push_back(std::move(s));
            } else {
                throw ParseError(path, line_no, "unknown record type '" + rec.type + "'");
            }
        }
        if (!have_key) throw ParseError(path, line_no, "missing key record");
        if (chain.blocks_.empty()) throw ParseError(path, line_no, "missing genesis block");
        chain.key_.validate();
        if (chain.trapdoor_) {
            ChameleonKeyPair probe = chain.key_;
            probe.tk = chain.trapdoor_;
            probe.validate();
        }
        return chain;
    }

    void save(const std::filesystem::path& file) const { atomic_write_file(file, serialize()); }

    static Chain load(const std::filesystem::path& file) {
        return deserialize(read_text_file(file), file.string());
    }

    bool operator==(const Chain&) const = default;

private:
    static void write_tx(std::ostringstream& out, const char* tag, const Transaction& tx) {
        out << tag << " id=" << hex_encode(tx.id) << " version=" << tx.version
            << " redactions=" << tx.redaction_count << " r=" << to_hex(tx.r.r)
            << " h=" << to_hex(tx.digest.h) << " payload=" << hex_encode(tx.payload) << "\n";
    }

    bool pending_has(const TxId& id) const {
        return std::any_of(pending_.begin(), pending_.end(),
                           [&](const Transaction& t) { return t.id == id; });
    }

    std::size_t index_of_height(std::uint64_t h) const {
        if (h >= blocks_.size() || blocks_[static_cast<std::size_t>(h)].header.height != h)
            throw NotFoundError("no block at height " + std::to_string(h));
        return static_cast<std::size_t>(h);
    }

    ChameleonKeyPair key_;
    std::optional<BigInt> trapdoor_;
    std::vector<Block> blocks_;
    std::vector<Transaction> pending_;
};

} // namespace redactchain

#endif
