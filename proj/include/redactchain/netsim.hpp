#ifndef REDACTCHAIN_NETSIM_HPP
#define REDACTCHAIN_NETSIM_HPP

// Deterministic in-process simulation of a permissioned network: one honest
// sealer, voter/observer peers, optional adversaries. Logical time drives a
// single-threaded discrete-event loop; every message is delivered in
// (time, sequence) order, so a fixed seed yields a byte-identical report.
//
// The scenario script (the redaction schedule) doubles as the honest nodes'
// redaction policy: voters approve or reject a proposal according to the
// scheduled decision for its target. Faults are reduced to configurable
// message drops; a node that detects it missed state (a redaction for a
// block or version it never saw) recovers by full replica transfer from the
// sealer.

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "redactchain/chamhash.hpp"
#include "redactchain/encoding.hpp"
#include "redactchain/errors.hpp"
#include "redactchain/governance.hpp"
#include "redactchain/ledger.hpp"
#include "redactchain/rng.hpp"
#include "redactchain/shamir.hpp"

namespace redactchain {

enum class SimRole { Sealer, Voter, Observer, Adversary };

inline const char* to_string(SimRole r) {
    switch (r) {
        case SimRole::Sealer: return "sealer";
        case SimRole::Voter: return "voter";
        case SimRole::Observer: return "observer";
        case SimRole::Adversary: return "adversary";
    }
    return "?";
}

enum class MessageKind { NewBlock, RedactionProposal, Vote, RedactionExecuted };

inline const char* to_string(MessageKind k) {
    switch (k) {
        case MessageKind::NewBlock: return "NewBlock";
        case MessageKind::RedactionProposal: return "RedactionProposal";
        case MessageKind::Vote: return "Vote";
        case MessageKind::RedactionExecuted: return "RedactionExecuted";
    }
    return "?";
}

inline MessageKind message_kind_from_string(std::string_view s) {
    if (s == "NewBlock") return MessageKind::NewBlock;
    if (s == "RedactionProposal") return MessageKind::RedactionProposal;
    if (s == "Vote") return MessageKind::Vote;
    if (s == "RedactionExecuted") return MessageKind::RedactionExecuted;
    throw ConfigError("unknown message kind '" + std::string(s) + "'");
}

enum class AdversaryBehavior { ForgeRedactionWithoutKey, ReplayOldVersion };

inline const char* to_string(AdversaryBehavior b) {
    switch (b) {
        case AdversaryBehavior::ForgeRedactionWithoutKey: return "forge_redaction_without_key";
        case AdversaryBehavior::ReplayOldVersion: return "replay_old_version";
    }
    return "?";
}

inline AdversaryBehavior adversary_behavior_from_string(std::string_view s) {
    if (s == "forge_redaction_without_key") return AdversaryBehavior::ForgeRedactionWithoutKey;
    if (s == "replay_old_version") return AdversaryBehavior::ReplayOldVersion;
    throw ConfigError("unknown adversary behavior '" + std::string(s) + "'");
}

struct RedactScheduleEntry {
    std::uint64_t at_height = 1;   // propose once this height is sealed
    std::uint64_t block_height = 1; // target block
    std::size_t tx_index = 0;       // target transaction within the block
    bool approve = true;            // honest voters' scripted decision
    Bytes new_payload;
};

struct DropRule {
    std::string node;
    MessageKind kind = MessageKind::RedactionExecuted;
    Rational rate{1, 1};
};

struct AdversaryEntry {
    AdversaryBehavior behavior = AdversaryBehavior::ForgeRedactionWithoutKey;
    std::uint64_t at_height = 1;    // forge trigger; replay reacts to executions
    std::uint64_t target_block = 1; // forge target
    std::size_t tx_index = 0;
    Bytes payload;
};

struct SimConfig {
    std::size_t node_count = 3;
    std::uint64_t seed = 1;
    std::uint64_t blocks_to_seal = 10;
    std::size_t txs_per_block = 2;
    unsigned key_bits = 64;
    std::size_t observers = 0;
    std::string sealer = "n0";
    bool resync_at_end = false;
    GovernanceMode mode = GovernanceMode::Central;
    unsigned threshold = 1;
    unsigned share_count = 1;
    Rational quorum{1, 2};
    std::uint64_t voting_window = 10;
    std::vector<RedactScheduleEntry> redactions;
    std::vector<AdversaryEntry> adversaries;
    std::vector<DropRule> drops;

    std::string node_name(std::size_t i) const { return "n" + std::to_string(i); }
    std::string adversary_name(std::size_t i) const { return "adv" + std::to_string(i); }

    std::size_t sealer_index() const {
        for (std::size_t i = 0; i < node_count; i++)
            if (node_name(i) == sealer) return i;
        throw ConfigError("sealer '" + sealer + "' is not an honest node; "
                          "the sealer must be honest in this harness");
    }

    std::vector<std::string> voter_names() const {
        std::size_t si = sealer_index();
        std::vector<std::string> out;
        for (std::size_t i = 0; i < node_count; i++) {
            if (i == si) continue;
            if (node_count - i <= observers) continue; // trailing nodes observe
            out.push_back(node_name(i));
        }
        return out;
    }

    void validate() const {
        if (node_count == 0) throw ConfigError("node_count must be positive");
        if (blocks_to_seal == 0) throw ConfigError("blocks_to_seal must be positive");
        if (txs_per_block == 0) throw ConfigError("txs_per_block must be positive");
        if (!supported_security_bits(key_bits))
            throw ConfigError("unsupported key bits " + std::to_string(key_bits));
        if (observers >= node_count) throw ConfigError("too many observers");
        std::size_t si = sealer_index();
        if (node_count - si <= observers && si != node_count - observers)
            throw ConfigError("sealer cannot be an observer");
        auto voters = voter_names();
        if (mode == GovernanceMode::PublicTrapdoor && voters.empty())
            throw ConfigError("public_trapdoor mode needs at least one voter");
        if (mode == GovernanceMode::Consortium) {
            if (voters.empty()) throw ConfigError("consortium mode needs voters to hold shares");
            if (share_count != voters.size())
                throw ConfigError("consortium share count must equal the number of voters");
            if (threshold < 1 || threshold > share_count)
                throw ConfigError("consortium requires 1 <= t <= n");
        }
        for (const auto& r : redactions) {
            if (r.block_height == 0 || r.block_height > blocks_to_seal)
                throw ConfigError("redaction targets a block outside the run");
            if (r.at_height < r.block_height || r.at_height > blocks_to_seal)
                throw ConfigError("redaction must trigger at or after its target height");
            if (r.new_payload.size() > kMaxPayloadBytes)
                throw ConfigError("redaction payload exceeds the cap");
        }
        for (const auto& a : adversaries) {
            if (a.behavior == AdversaryBehavior::ForgeRedactionWithoutKey) {
                if (a.target_block == 0 || a.target_block > blocks_to_seal ||
                    a.at_height < a.target_block || a.at_height > blocks_to_seal)
                    throw ConfigError("adversary forge entry targets a block outside the run");
            }
        }
        for (const auto& d : drops) {
            if (!valid_token(d.node)) throw ConfigError("bad drop rule node '" + d.node + "'");
        }
    }

    GovernanceConfig governance() const {
        GovernanceConfig g;
        g.mode = mode;
        g.threshold = threshold;
        g.share_count = share_count;
        g.quorum = quorum;
        g.voting_window = voting_window;
        g.oversight_enabled = false;
        g.voters = voter_names();
        return g;
    }

    // --- file format --------------------------------------------------------
    //
    //   redactchain-sim v1
    //   nodes <dec>
    //   seed <dec>
    //   blocks <dec>
    //   txs-per-block <dec>
    //   bits <dec>
    //   observers <dec>
    //   sealer <tok>
    //   resync <on|off>
    //   governance mode=<tok> threshold=<dec> shares=<dec> quorum=<num/den> window=<dec>
    //   redact at-height=<dec> block=<dec> tx-index=<dec> decision=<approve|reject> payload=<hex>
    //   adversary behavior=<tok> at-height=<dec> block=<dec> tx-index=<dec> payload=<hex>
    //   drop node=<tok> kind=<tok> rate=<num/den>

    static constexpr const char* kFileHeader = "redactchain-sim v1";

    std::string serialize() const {
        std::ostringstream out;
        out << kFileHeader << "\n";
        out << "nodes " << node_count << "\n";
        out << "seed " << seed << "\n";
        out << "blocks " << blocks_to_seal << "\n";
        out << "txs-per-block " << txs_per_block << "\n";
        out << "bits " << key_bits << "\n";
        out << "observers " << observers << "\n";
        out << "sealer " << sealer << "\n";
        out << "resync " << (resync_at_end ? "on" : "off") << "\n";
        out << "governance mode=" << to_string(mode) << " threshold=" << threshold
            << " shares=" << share_count << " quorum=" << quorum.to_string()
            << " window=" << voting_window << "\n";
        for (const auto& r : redactions)
            out << "redact at-height=" << r.at_height << " block=" << r.block_height
                << " tx-index=" << r.tx_index
                << " decision=" << (r.approve ? "approve" : "reject")
                << " payload=" << hex_encode(r.new_payload) << "\n";
        for (const auto& a : adversaries)
            out << "adversary behavior=" << to_string(a.behavior) << " at-height=" << a.at_height
                << " block=" << a.target_block << " tx-index=" << a.tx_index
                << " payload=" << hex_encode(a.payload) << "\n";
        for (const auto& d : drops)
            out << "drop node=" << d.node << " kind=" << to_string(d.kind)
                << " rate=" << d.rate.to_string() << "\n";
        return out.str();
    }

    static SimConfig parse(const std::string& text, const std::string& path = "<sim>") {
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 1;
        if (!std::getline(in, line) || line != kFileHeader)
            throw ParseError(path, 1, std::string("expected header '") + kFileHeader + "'");
        auto simple = [&](const char* name) -> std::string {
            line_no++;
            if (!std::getline(in, line))
                throw ParseError(path, line_no, std::string("missing field '") + name + "'");
            std::string prefix = std::string(name) + " ";
            if (line.rfind(prefix, 0) != 0)
                throw ParseError(path, line_no, "expected '" + std::string(name) + " <value>'");
            return line.substr(prefix.size());
        };
        SimConfig cfg;
        cfg.node_count = static_cast<std::size_t>(parse_u64(path, line_no, simple("nodes")));
        cfg.seed = parse_u64(path, line_no, simple("seed"));
        cfg.blocks_to_seal = parse_u64(path, line_no, simple("blocks"));
        cfg.txs_per_block = static_cast<std::size_t>(parse_u64(path, line_no, simple("txs-per-block")));
        cfg.key_bits = static_cast<unsigned>(parse_u64(path, line_no, simple("bits")));
        cfg.observers = static_cast<std::size_t>(parse_u64(path, line_no, simple("observers")));
        cfg.sealer = simple("sealer");
        std::string resync = simple("resync");
        if (resync != "on" && resync != "off")
            throw ParseError(path, line_no, "resync must be on or off");
        cfg.resync_at_end = resync == "on";
        try {
            line_no++;
            if (!std::getline(in, line)) throw ParseError(path, line_no, "missing governance record");
            RecordLine gov = parse_record_line(path, line_no, line);
            if (gov.type != "governance") throw ParseError(path, line_no, "expected governance record");
            gov.expect(path, line_no, {"mode", "threshold", "shares", "quorum", "window"});
            cfg.mode = governance_mode_from_string(gov.value(0));
            cfg.threshold = static_cast<unsigned>(parse_u64(path, line_no, gov.value(1)));
            cfg.share_count = static_cast<unsigned>(parse_u64(path, line_no, gov.value(2)));
            cfg.quorum = Rational::parse(gov.value(3));
            cfg.voting_window = parse_u64(path, line_no, gov.value(4));
            while (std::getline(in, line)) {
                line_no++;
                if (line.empty()) throw ParseError(path, line_no, "blank line");
                RecordLine rec = parse_record_line(path, line_no, line);
                if (rec.type == "redact") {
                    rec.expect(path, line_no, {"at-height", "block", "tx-index", "decision", "payload"});
                    RedactScheduleEntry e;
                    e.at_height = parse_u64(path, line_no, rec.value(0));
                    e.block_height = parse_u64(path, line_no, rec.value(1));
                    e.tx_index = static_cast<std::size_t>(parse_u64(path, line_no, rec.value(2)));
                    if (rec.value(3) != "approve" && rec.value(3) != "reject")
                        throw ParseError(path, line_no, "decision must be approve or reject");
                    e.approve = rec.value(3) == "approve";
                    e.new_payload = hex_decode(rec.value(4));
                    cfg.redactions.push_back(std::move(e));
                } else if (rec.type == "adversary") {
                    rec.expect(path, line_no, {"behavior", "at-height", "block", "tx-index", "payload"});
                    AdversaryEntry a;
                    a.behavior = adversary_behavior_from_string(rec.value(0));
                    a.at_height = parse_u64(path, line_no, rec.value(1));
                    a.target_block = parse_u64(path, line_no, rec.value(2));
                    a.tx_index = static_cast<std::size_t>(parse_u64(path, line_no, rec.value(3)));
                    a.payload = hex_decode(rec.value(4));
                    cfg.adversaries.push_back(std::move(a));
                } else if (rec.type == "drop") {
                    rec.expect(path, line_no, {"node", "kind", "rate"});
                    DropRule d;
                    d.node = rec.value(0);
                    d.kind = message_kind_from_string(rec.value(1));
                    d.rate = Rational::parse(rec.value(2));
                    cfg.drops.push_back(std::move(d));
                } else {
                    throw ParseError(path, line_no, "unknown record type '" + rec.type + "'");
                }
            }
            cfg.validate();
        } catch (const ParseError&) {
            throw;
        } catch (const ConfigError& e) {
            throw ParseError(path, line_no, e.what());
        }
        return cfg;
    }

    static SimConfig load(const std::filesystem::path& file) {
        return parse(read_text_file(file), file.string());
    }
};

// Appends an adversary node exhibiting the behavior, with derived defaults.
inline SimConfig inject_adversary(SimConfig cfg, AdversaryBehavior behavior) {
    AdversaryEntry e;
    e.behavior = behavior;
    e.target_block = std::max<std::uint64_t>(1, cfg.blocks_to_seal / 4);
    e.at_height = std::max<std::uint64_t>(e.target_block, cfg.blocks_to_seal / 2);
    e.tx_index = 0;
    const char* text = "forged-content";
    e.payload.assign(text, text + std::string_view(text).size());
    cfg.adversaries.push_back(std::move(e));
    cfg.validate();
    return cfg;
}

inline SimConfig inject_adversary(SimConfig cfg, std::string_view behavior) {
    return inject_adversary(std::move(cfg), adversary_behavior_from_string(behavior));
}

struct NodeReport {
    std::string node;
    SimRole role = SimRole::Voter;
    std::uint64_t height = 0;
    std::string digest_hex;
    std::uint64_t blocks_accepted = 0;
    std::uint64_t redactions_applied = 0;
    std::uint64_t forgeries_rejected = 0;
    std::uint64_t replays_rejected = 0;
    std::uint64_t resyncs = 0;
    bool valid = false;
    bool version_monotonic = true;
};

struct RedactionOutcome {
    std::string request_id;
    std::uint64_t block_height = 0;
    std::string tx_hex;
    RequestState state = RequestState::Open;
};

struct DivergenceEntry {
    std::string node;
    std::uint64_t first_divergent_line = 0; // 1-based line in the serialized replica
    std::vector<std::string> missed_requests;
};

struct SimReport {
    std::size_t honest_nodes = 0;
    std::uint64_t seed = 0;
    unsigned key_bits = 64;
    GovernanceMode mode = GovernanceMode::Central;
    std::uint64_t blocks = 0;
    std::size_t txs_per_block = 0;
    std::vector<NodeReport> nodes;
    std::vector<RedactionOutcome> redactions;
    std::vector<DivergenceEntry> divergences;
    std::optional<std::size_t> divergences_after_resync;
    std::uint64_t adversary_acceptances = 0;
    std::uint64_t messages_sent = 0;
    std::uint64_t messages_dropped = 0;
    bool safety_ok = true;
    bool converged = true;

    std::string to_text() const {
        std::ostringstream out;
        out << "redactchain-simreport v1\n";
        out << "config nodes=" << honest_nodes << " seed=" << seed << " blocks=" << blocks
            << " txs-per-block=" << txs_per_block << " bits=" << key_bits
            << " mode=" << to_string(mode)
            << " insecure=" << (key_bits < kInsecureBitsThreshold ? "true" : "false") << "\n";
        for (const auto& n : nodes) {
            out << "node id=" << n.node << " role=" << to_string(n.role)
                << " height=" << n.height << " digest=" << n.digest_hex
                << " blocks=" << n.blocks_accepted << " redactions=" << n.redactions_applied
                << " forgeries-rejected=" << n.forgeries_rejected
                << " replays-rejected=" << n.replays_rejected << " resyncs=" << n.resyncs
                << " valid=" << (n.valid ? "true" : "false")
                << " monotonic=" << (n.version_monotonic ? "true" : "false") << "\n";
        }
        for (const auto& r : redactions)
            out << "redaction request=" << r.request_id << " block=" << r.block_height
                << " tx=" << r.tx_hex << " state=" << to_string(r.state) << "\n";
        out << "adversary-acceptances count=" << adversary_acceptances << "\n";
        out << "divergence count=" << divergences.size() << "\n";
        for (const auto& d : divergences) {
            out << "divergence node=" << d.node << " first-line=" << d.first_divergent_line
                << " missed=";
            if (d.missed_requests.empty()) {
                out << "none";
            } else {
                for (std::size_t i = 0; i < d.missed_requests.size(); i++)
                    out << (i ? "," : "") << d.missed_requests[i];
            }
            out << "\n";
        }
        if (divergences_after_resync)
            out << "divergence-after-resync count=" << *divergences_after_resync << "\n";
        out << "messages sent=" << messages_sent << " dropped=" << messages_dropped << "\n";
        out << "safety ok=" << (safety_ok ? "true" : "false")
            << " converged=" << (converged ? "true" : "false") << "\n";
        return out.str();
    }
};

namespace simdetail {

struct NewBlockMsg {
    Block block;
};
struct ProposalMsg {
    std::string request_id;
    std::uint64_t block_height;
    TxId tx_id;
    Bytes new_payload;
    std::string proposer;
    std::uint64_t opened_at;
};
struct VoteMsg {
    std::string request_id;
    std::string voter;
    VoteChoice choice;
    std::optional<TrapdoorShare> share; // consortium transport
};
struct ExecutedMsg {
    std::string request_id;
    std::uint64_t block_height;
    TxId tx_id;
    Bytes payload;
    Randomness r;
    std::uint64_t version;
    std::uint64_t approved_at;
};

struct SimMessage {
    MessageKind kind = MessageKind::NewBlock;
    std::string sender;
    std::uint64_t sent_at = 0;
    std::variant<NewBlockMsg, ProposalMsg, VoteMsg, ExecutedMsg> body;
};

struct TxSnapshot {
    Bytes payload;
    Randomness r;
    std::uint64_t version;
};

struct SimNode {
    std::string name;
    SimRole role = SimRole::Voter;
    Chain replica;
    RequestRegistry registry;
    std::optional<TrapdoorShare> share;
    NodeReport stats;
    // per-request share pool (sealer, consortium mode)
    std::map<std::string, std::vector<TrapdoorShare>> gathered_shares;
    // adversary memory of pre-redaction transaction states
    std::map<std::uint64_t, std::map<std::size_t, TxSnapshot>> snapshots;
    std::map<Bytes, std::uint64_t> version_floor; // tx id bytes -> highest applied version

    SimNode(std::string n, SimRole r, Chain c, GovernanceConfig g)
        : name(std::move(n)), role(r), replica(std::move(c)), registry(std::move(g)) {
        stats.node = name;
        stats.role = role;
    }
};

struct Event {
    enum class Type { SealerTick, Propose, AdversaryForge, Deliver };
    std::uint64_t time = 0;
    std::uint64_t seq = 0;
    Type type = Type::Deliver;
    std::size_t node = 0;      // receiver (Deliver) or actor
    std::size_t entry = 0;     // schedule index for Propose/AdversaryForge
    SimMessage msg;            // Deliver only

    bool operator>(const Event& other) const {
        if (time != other.time) return time > other.time;
        return seq > other.seq;
    }
};

} // namespace simdetail

class Simulation {
public:
    explicit Simulation(SimConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    SimReport run() {
        setup();
        schedule_script();
        while (!queue_.empty()) {
            simdetail::Event ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            dispatch(ev);
        }
        return finalize();
    }

private:
    using SimNode = simdetail::SimNode;

    static constexpr std::uint64_t kTick = 10;

    void setup() {
        DeterministicRng key_rng(cfg_.seed, "netsim-keys");
        key_ = keygen(cfg_.key_bits, key_rng);
        GovernanceConfig gov = cfg_.governance();
        std::optional<BigInt> embedded;
        if (cfg_.mode == GovernanceMode::PublicTrapdoor) embedded = key_->tk;
        Chain genesis = Chain::init(key_->public_part(), 0, embedded);

        std::size_t sealer_idx = cfg_.sealer_index();
        auto voters = cfg_.voter_names();
        for (std::size_t i = 0; i < cfg_.node_count; i++) {
            SimRole role = SimRole::Voter;
            if (i == sealer_idx) role = SimRole::Sealer;
            else if (std::find(voters.begin(), voters.end(), cfg_.node_name(i)) == voters.end())
                role = SimRole::Observer;
            nodes_.emplace_back(cfg_.node_name(i), role, genesis, gov);
        }
        sealer_idx_ = sealer_idx;
        for (std::size_t i = 0; i < cfg_.adversaries.size(); i++)
            nodes_.emplace_back(cfg_.adversary_name(i), SimRole::Adversary, genesis, gov);

        if (cfg_.mode == GovernanceMode::Consortium) {
            DeterministicRng share_rng(cfg_.seed, "netsim-shares");
            auto shares = split_trapdoor(*key_->tk, cfg_.threshold, cfg_.share_count,
                                         key_->params.q, share_rng);
            std::size_t next = 0;
            for (auto& node : nodes_)
                if (node.role == SimRole::Voter) node.share = shares[next++];
        }

        tx_rng_.emplace(cfg_.seed, "netsim-payloads");
        drop_rng_.emplace(cfg_.seed, "netsim-drops");
    }

    void schedule_script() {
        for (std::uint64_t h = 1; h <= cfg_.blocks_to_seal; h++)
            push_event({h * kTick, next_seq(), simdetail::Event::Type::SealerTick, sealer_idx_,
                        0, {}});
        // Drain ticks keep tallying after sealing stops.
        std::uint64_t drain = cfg_.voting_window + 4;
        for (std::uint64_t d = 1; d <= drain; d++)
            push_event({(cfg_.blocks_to_seal + d) * kTick, next_seq(),
                        simdetail::Event::Type::SealerTick, sealer_idx_, 0, {}});
        for (std::size_t i = 0; i < cfg_.redactions.size(); i++) {
            std::size_t proposer = proposer_index();
            push_event({cfg_.redactions[i].at_height * kTick + 2, next_seq(),
                        simdetail::Event::Type::Propose, proposer, i, {}});
        }
        for (std::size_t i = 0; i < cfg_.adversaries.size(); i++) {
            if (cfg_.adversaries[i].behavior == AdversaryBehavior::ForgeRedactionWithoutKey)
                push_event({cfg_.adversaries[i].at_height * kTick + 3, next_seq(),
                            simdetail::Event::Type::AdversaryForge, cfg_.node_count + i, i, {}});
        }
    }

    std::size_t proposer_index() const {
        for (std::size_t i = 0; i < cfg_.node_count; i++)
            if (nodes_[i].role == SimRole::Voter) return i;
        return sealer_idx_; // central mode with no voters: the authority proposes
    }

    void dispatch(const simdetail::Event& ev) {
        switch (ev.type) {
            case simdetail::Event::Type::SealerTick: sealer_tick(); break;
            case simdetail::Event::Type::Propose: propose(ev.node, cfg_.redactions[ev.entry]); break;
            case simdetail::Event::Type::AdversaryForge:
                adversary_forge(ev.node, cfg_.adversaries[ev.entry]);
                break;
            case simdetail::Event::Type::Deliver: deliver(ev.node, ev.msg); break;
        }
    }

    void sealer_tick() {
        SimNode& sealer = nodes_[sealer_idx_];
        if (sealer.replica.height() < cfg_.blocks_to_seal) {
            std::uint64_t h = sealer.replica.height() + 1;
            std::vector<Transaction> txs;
            for (std::size_t i = 0; i < cfg_.txs_per_block; i++) {
                std::string text = "block-" + std::to_string(h) + "-tx-" + std::to_string(i);
                Bytes payload(text.begin(), text.end());
                std::array<std::uint8_t, 4> salt{};
                tx_rng_->fill(salt);
                payload.push_back('-');
                for (auto b : salt) payload.push_back(b);
                txs.push_back(create_transaction(*key_, std::move(payload), *tx_rng_));
            }
            const Block& block = sealer.replica.seal_block(std::move(txs), h);
            sealer.stats.blocks_accepted++;
            simdetail::SimMessage msg{MessageKind::NewBlock, sealer.name, now_,
                                      simdetail::NewBlockMsg{block}};
            broadcast(sealer_idx_, std::move(msg));
        }
        run_pending_executions();
    }

    // The sealer decides open requests and runs approved ones.
    void run_pending_executions() {
        SimNode& sealer = nodes_[sealer_idx_];
        std::uint64_t height = sealer.replica.height();
        for (const auto& snapshot : sealer.registry.requests()) {
            const std::string id = snapshot.id;
            RedactionRequest& req = sealer.registry.get(id);
            if (req.state == RequestState::Open) {
                bool window_closed = height > req.opened_at + cfg_.voting_window;
                bool all_voted = req.votes.size() == sealer.registry.config().voters.size();
                if (window_closed || all_voted) sealer.registry.tally(id, height);
            }
            if (sealer.registry.get(id).state != RequestState::Approved) continue;
            AuthorityMaterial material = AuthorityOnChain{};
            if (cfg_.mode == GovernanceMode::Central) {
                material = AuthorityTrapdoor{*key_->tk};
            } else if (cfg_.mode == GovernanceMode::Consortium) {
                auto& pool = sealer.gathered_shares[id];
                if (pool.size() < cfg_.threshold) continue; // keep waiting for shares
                material = AuthorityShares{pool};
            }
            RedactionStamp stamp;
            try {
                stamp = execute_redaction(sealer.registry, id, sealer.replica, material);
            } catch (const Error&) {
                continue; // stays approved; retried next tick
            }
            sealer.stats.redactions_applied++;
            const Transaction& tx =
                sealer.replica.tx_at(*sealer.replica.find_tx(stamp.tx_id));
            simdetail::ExecutedMsg body{id,          sealer.registry.get(id).block_height,
                                        stamp.tx_id, tx.payload,
                                        tx.r,        tx.version,
                                        stamp.approved_at};
            broadcast(sealer_idx_, {MessageKind::RedactionExecuted, sealer.name, now_,
                                    std::move(body)});
        }
    }

    void propose(std::size_t node_idx, const RedactScheduleEntry& entry) {
        SimNode& node = nodes_[node_idx];
        if (entry.block_height > node.replica.height()) return; // never sealed; drop silently
        const Block& block = node.replica.blocks()[entry.block_height];
        if (entry.tx_index >= block.txs.size()) return;
        const Transaction& tx = block.txs[entry.tx_index];
        RedactionRequest& req =
            node.registry.open_request(entry.block_height, tx.id, entry.new_payload, node.name,
                                       node.replica.height());
        simdetail::ProposalMsg body{req.id, entry.block_height, tx.id, entry.new_payload,
                                    node.name, req.opened_at};
        broadcast(node_idx, {MessageKind::RedactionProposal, node.name, now_, body});
        vote_on(node_idx, req.id, entry.block_height, tx.id);
    }

    // Scripted honest policy: look the proposal's target up in the schedule.
    std::optional<bool> scripted_decision(std::uint64_t block_height, const TxId& tx_id,
                                          std::size_t node_idx) const {
        const SimNode& node = nodes_[node_idx];
        if (block_height > node.replica.height()) return std::nullopt;
        const Block& block = node.replica.blocks()[block_height];
        for (const auto& entry : cfg_.redactions) {
            if (entry.block_height != block_height) continue;
            if (entry.tx_index >= block.txs.size()) continue;
            if (block.txs[entry.tx_index].id == tx_id) return entry.approve;
        }
        return std::nullopt;
    }

    void vote_on(std::size_t node_idx, const std::string& request_id,
                 std::uint64_t block_height, const TxId& tx_id) {
        SimNode& node = nodes_[node_idx];
        if (node.role != SimRole::Voter) return;
        std::optional<bool> decision = scripted_decision(block_height, tx_id, node_idx);
        VoteChoice choice = (decision && *decision) ? VoteChoice::Approve : VoteChoice::Reject;
        if (cfg_.mode == GovernanceMode::PublicTrapdoor) {
            try {
                node.registry.cast_vote(request_id, node.name, choice, node.replica.height());
            } catch (const Error&) {
                return; // window closed locally or duplicate; stay silent
            }
            broadcast(node_idx, {MessageKind::Vote, node.name, now_,
                                 simdetail::VoteMsg{request_id, node.name, choice, std::nullopt}});
        } else if (cfg_.mode == GovernanceMode::Consortium) {
            if (choice != VoteChoice::Approve) return; // withholding the share is the veto
            broadcast(node_idx, {MessageKind::Vote, node.name, now_,
                                 simdetail::VoteMsg{request_id, node.name, choice, node.share}});
        }
    }

    void adversary_forge(std::size_t node_idx, const AdversaryEntry& entry) {
        SimNode& adv = nodes_[node_idx];
        if (entry.target_block > adv.replica.height()) return;
        const Block& block = adv.replica.blocks()[entry.target_block];
        if (entry.tx_index >= block.txs.size()) return;
        const Transaction& tx = block.txs[entry.tx_index];
        // No trapdoor, so no valid collision exists; ship a perturbed r.
        Randomness bogus{mod_reduce(tx.r.r + 1, key_->params.q)};
        simdetail::ExecutedMsg body{"forged-" + std::to_string(forge_counter_++),
                                    entry.target_block,
                                    tx.id,
                                    entry.payload,
                                    bogus,
                                    tx.version + 1,
                                    adv.replica.height()};
        broadcast(node_idx, {MessageKind::RedactionExecuted, adv.name, now_, std::move(body)});
    }

    void deliver(std::size_t node_idx, const simdetail::SimMessage& msg) {
        SimNode& node = nodes_[node_idx];
        switch (msg.kind) {
            case MessageKind::NewBlock:
                handle_new_block(node, std::get<simdetail::NewBlockMsg>(msg.body));
                break;
            case MessageKind::RedactionProposal:
                handle_proposal(node_idx, std::get<simdetail::ProposalMsg>(msg.body));
                break;
            case MessageKind::Vote:
                handle_vote(node, std::get<simdetail::VoteMsg>(msg.body));
                break;
            case MessageKind::RedactionExecuted:
                handle_executed(node, msg.sender, std::get<simdetail::ExecutedMsg>(msg.body));
                break;
        }
    }

    void handle_new_block(SimNode& node, const simdetail::NewBlockMsg& m) {
        try {
            node.replica.apply_block(m.block);
            node.stats.blocks_accepted++;
        } catch (const Error&) {
            if (m.block.header.height > node.replica.height() + 1)
                resync(node);
            // stale or duplicate blocks are ignored
        }
    }

    void handle_proposal(std::size_t node_idx, const simdetail::ProposalMsg& m) {
        SimNode& node = nodes_[node_idx];
        try {
            node.registry.open_request(m.block_height, m.tx_id, m.new_payload, m.proposer,
                                       m.opened_at, m.request_id);
        } catch (const Error&) {
            return; // unauthorized proposer or duplicate id: ignore the proposal
        }
        if (node.role == SimRole::Voter && m.proposer != node.name)
            vote_on(node_idx, m.request_id, m.block_height, m.tx_id);
    }

    void handle_vote(SimNode& node, const simdetail::VoteMsg& m) {
        if (cfg_.mode == GovernanceMode::PublicTrapdoor) {
            try {
                node.registry.cast_vote(m.request_id, m.voter, m.choice, node.replica.height());
            } catch (const Error&) {
                return;
            }
        } else if (cfg_.mode == GovernanceMode::Consortium && node.role == SimRole::Sealer) {
            if (!m.share) return;
            auto& pool = node.gathered_shares[m.request_id];
            for (const auto& s : pool)
                if (s.index == m.share->index) return;
            pool.push_back(*m.share);
        }
    }

    void handle_executed(SimNode& node, const std::string& sender,
                         const simdetail::ExecutedMsg& m) {
        bool from_adversary = sender.rfind("adv", 0) == 0;
        if (node.role == SimRole::Adversary) {
            // Remember the pre-redaction state, then track the chain like
            // everyone else; replay adversaries rebroadcast the old version.
            auto loc = node.replica.find_tx(m.tx_id);
            if (loc && !from_adversary) {
                const Transaction& tx = node.replica.tx_at(*loc);
                node.snapshots[m.block_height][loc->tx_index] =
                    simdetail::TxSnapshot{tx.payload, tx.r, tx.version};
                try {
                    node.replica.apply_redaction(m.block_height, m.tx_id, m.payload, m.r,
                                                 m.version, m.request_id, m.approved_at);
                } catch (const Error&) {
                }
                for (std::size_t i = 0; i < cfg_.adversaries.size(); i++) {
                    if (cfg_.adversaries[i].behavior == AdversaryBehavior::ReplayOldVersion &&
                        node.name == cfg_.adversary_name(i)) {
                        const auto& old = node.snapshots[m.block_height][loc->tx_index];
                        simdetail::ExecutedMsg replay{
                            "replay-" + std::to_string(replay_counter_++),
                            m.block_height, m.tx_id, old.payload, old.r, old.version,
                            m.approved_at};
                        std::size_t self = index_of(node.name);
                        push_broadcast_at(self, now_ + 2,
                                          {MessageKind::RedactionExecuted, node.name, now_,
                                           std::move(replay)});
                        break;
                    }
                }
            }
            return;
        }

        auto loc = node.replica.find_tx(m.tx_id);
        if (!loc) {
            // A redaction for state this node never saw: protocol gap,
            // resolved by full replica transfer from the sealer.
            resync(node);
            node.stats.redactions_applied = count_node_stamps(node);
            return;
        }
        const Transaction& tx = node.replica.tx_at(*loc);
        if (m.version <= tx.version) {
            node.stats.replays_rejected++;
            return;
        }
        if (m.version > tx.version + 1) {
            resync(node);
            node.stats.redactions_applied = count_node_stamps(node);
            return;
        }
        try {
            node.replica.apply_redaction(m.block_height, m.tx_id, m.payload, m.r, m.version,
                                         m.request_id, m.approved_at);
            node.stats.redactions_applied++;
            Bytes key(m.tx_id.begin(), m.tx_id.end());
            auto [it, inserted] = node.version_floor.try_emplace(key, m.version);
            if (!inserted) {
                if (m.version < it->second) node.stats.version_monotonic = false;
                it->second = m.version;
            }
            if (from_adversary) adversary_acceptances_++;
        } catch (const Error&) {
            node.stats.forgeries_rejected++;
        }
    }

    std::uint64_t count_node_stamps(const SimNode& node) const {
        std::uint64_t n = 0;
        for (const auto& b : node.replica.blocks()) n += b.header.stamps.size();
        return n;
    }

    void resync(SimNode& node) {
        node.replica = nodes_[sealer_idx_].replica;
        node.stats.resyncs++;
    }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < nodes_.size(); i++)
            if (nodes_[i].name == name) return i;
        throw NotFoundError("no node '" + name + "'");
    }

    bool should_drop(const std::string& receiver, MessageKind kind) {
        for (const auto& rule : cfg_.drops) {
            if (rule.node != receiver || rule.kind != kind) continue;
            if (rule.rate.num == rule.rate.den) return true;
            BigInt draw = sample_below(BigInt(rule.rate.den), *drop_rng_);
            return draw < rule.rate.num;
        }
        return false;
    }

    void broadcast(std::size_t sender_idx, simdetail::SimMessage msg) {
        push_broadcast_at(sender_idx, now_ + 1, std::move(msg));
    }

    void push_broadcast_at(std::size_t sender_idx, std::uint64_t when,
                           simdetail::SimMessage msg) {
        for (std::size_t i = 0; i < nodes_.size(); i++) {
            if (i == sender_idx) continue;
            messages_sent_++;
            if (should_drop(nodes_[i].name, msg.kind)) {
                messages_dropped_++;
                if (msg.kind == MessageKind::RedactionExecuted)
                    missed_executions_[nodes_[i].name].push_back(
                        std::get<simdetail::ExecutedMsg>(msg.body).request_id);
                continue;
            }
            push_event({when, next_seq(), simdetail::Event::Type::Deliver, i, 0, msg});
        }
    }

    void push_event(simdetail::Event ev) { queue_.push(std::move(ev)); }

    std::uint64_t next_seq() { return seq_++; }

    SimReport finalize() {
        SimReport report;
        report.honest_nodes = cfg_.node_count;
        report.seed = cfg_.seed;
        report.key_bits = cfg_.key_bits;
        report.mode = cfg_.mode;
        report.blocks = cfg_.blocks_to_seal;
        report.txs_per_block = cfg_.txs_per_block;
        report.messages_sent = messages_sent_;
        report.messages_dropped = messages_dropped_;
        report.adversary_acceptances = adversary_acceptances_;

        std::vector<std::string> serialized;
        for (auto& node : nodes_) {
            serialized.push_back(node.replica.serialize());
            node.stats.height = node.replica.height();
            Digest32 digest = sha256(serialized.back());
            node.stats.digest_hex = hex_encode(digest);
            node.stats.valid = node.replica.validate().ok();
            report.nodes.push_back(node.stats);
        }

        const SimNode& sealer = nodes_[sealer_idx_];
        for (const auto& req : sealer.registry.requests()) {
            report.redactions.push_back(RedactionOutcome{req.id, req.block_height,
                                                         hex_encode(req.tx_id), req.state});
        }

        report.divergences = compute_divergences(serialized);
        report.converged = report.divergences.empty();
        if (cfg_.resync_at_end && !report.divergences.empty()) {
            for (const auto& d : report.divergences) resync(nodes_[index_of(d.node)]);
            std::vector<std::string> after;
            for (auto& node : nodes_) after.push_back(node.replica.serialize());
            report.divergences_after_resync = compute_divergences(after).size();
        }

        bool all_honest_valid = true;
        bool all_monotonic = true;
        for (std::size_t i = 0; i < cfg_.node_count; i++) {
            all_honest_valid = all_honest_valid && report.nodes[i].valid;
            all_monotonic = all_monotonic && report.nodes[i].version_monotonic;
        }
        report.safety_ok = all_honest_valid && all_monotonic && adversary_acceptances_ == 0;
        return report;
    }

    std::vector<DivergenceEntry> compute_divergences(const std::vector<std::string>& serialized) {
        std::vector<DivergenceEntry> out;
        const std::string& reference = serialized[sealer_idx_];
        for (std::size_t i = 0; i < cfg_.node_count; i++) {
            if (i == sealer_idx_ || serialized[i] == reference) continue;
            DivergenceEntry d;
            d.node = nodes_[i].name;
            d.first_divergent_line = first_divergent_line(reference, serialized[i]);
            auto it = missed_executions_.find(d.node);
            if (it != missed_executions_.end()) d.missed_requests = it->second;
            out.push_back(std::move(d));
        }
        return out;
    }

    static std::uint64_t first_divergent_line(const std::string& a, const std::string& b) {
        std::istringstream sa(a), sb(b);
        std::string la, lb;
        std::uint64_t line = 0;
        for (;;) {
            bool ga = static_cast<bool>(std::getline(sa, la));
            bool gb = static_cast<bool>(std::getline(sb, lb));
            line++;
            if (!ga && !gb) return 0;
            if (ga != gb || la != lb) return line;
        }
    }

    SimConfig cfg_;
    std::optional<ChameleonKeyPair> key_;
    std::vector<SimNode> nodes_;
    std::size_t sealer_idx_ = 0;
    std::optional<DeterministicRng> tx_rng_;
    std::optional<DeterministicRng> drop_rng_;
    std::priority_queue<simdetail::Event, std::vector<simdetail::Event>, std::greater<>> queue_;
    std::uint64_t now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t messages_sent_ = 0;
    std::uint64_t messages_dropped_ = 0;
    std::uint64_t adversary_acceptances_ = 0;
    std::uint64_t forge_counter_ = 0;
    std::uint64_t replay_counter_ = 0;
    std::map<std::string, std::vector<std::string>> missed_executions_;
};

inline SimReport run_simulation(const SimConfig& config) {
    Simulation sim(config);
    return sim.run();
}

} // namespace redactchain

#endif
