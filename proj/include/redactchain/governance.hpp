#ifndef REDACTCHAIN_GOVERNANCE_HPP
#define REDACTCHAIN_GOVERNANCE_HPP

// Who may call adapt. Three authority models:
//   central          - one authority holds the trapdoor; its requests are
//                      auto-approved and flow through the same state machine
//                      as everything else so the audit trail stays uniform.
//   consortium       - the trapdoor is Shamir-shared; a request auto-approves
//                      on open and execution requires reconstructing from
//                      gathered shares. Too few shares reconstruct a wrong
//                      secret, which the adapt postcondition rejects.
//   public_trapdoor  - the trapdoor is embedded in the chain itself and
//                      execution is gated purely by a vote: approvals must
//                      strictly exceed quorum * registered_voters (ties
//                      reject), within a voting window measured in blocks.
// An optional oversight authority may veto approved-but-not-executed
// requests regardless of model.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "redactchain/encoding.hpp"
#include "redactchain/errors.hpp"
#include "redactchain/ledger.hpp"
#include "redactchain/shamir.hpp"

namespace redactchain {

enum class GovernanceMode { Central, Consortium, PublicTrapdoor };

inline const char* to_string(GovernanceMode m) {
    switch (m) {
        case GovernanceMode::Central: return "central";
        case GovernanceMode::Consortium: return "consortium";
        case GovernanceMode::PublicTrapdoor: return "public_trapdoor";
    }
    return "?";
}

inline GovernanceMode governance_mode_from_string(std::string_view s) {
    if (s == "central") return GovernanceMode::Central;
    if (s == "consortium") return GovernanceMode::Consortium;
    if (s == "public_trapdoor") return GovernanceMode::PublicTrapdoor;
    throw ConfigError("unknown governance mode '" + std::string(s) + "'");
}

// Exact rational in (0, 1]; quorum comparisons cross-multiply, no floats.
struct Rational {
    std::uint64_t num = 1;
    std::uint64_t den = 2;

    std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

    static Rational parse(std::string_view s) {
        std::size_t slash = s.find('/');
        if (slash == std::string_view::npos || slash == 0 || slash + 1 >= s.size())
            throw ConfigError("rational must look like 'num/den', got '" + std::string(s) + "'");
        Rational r;
        r.num = parse_u64("<rational>", 0, std::string(s.substr(0, slash)));
        r.den = parse_u64("<rational>", 0, std::string(s.substr(slash + 1)));
        if (r.den == 0 || r.num == 0 || r.num > r.den)
            throw ConfigError("rational must be in (0, 1]");
        return r;
    }

    bool operator==(const Rational&) const = default;
};

struct GovernanceConfig {
    GovernanceMode mode = GovernanceMode::Central;
    unsigned threshold = 1;   // t, consortium
    unsigned share_count = 1; // n, consortium
    Rational quorum{1, 2};
    std::uint64_t voting_window = 10; // blocks
    bool oversight_enabled = false;
    std::vector<std::string> voters;

    void validate() const {
        if (mode == GovernanceMode::Consortium) {
            if (threshold < 1 || threshold > share_count)
                throw ConfigError("consortium requires 1 <= t <= n");
        }
        if (mode == GovernanceMode::PublicTrapdoor && voters.empty())
            throw ConfigError("public_trapdoor mode requires registered voters");
        for (const auto& v : voters) {
            if (!valid_token(v)) throw ConfigError("bad voter name '" + v + "'");
            if (std::count(voters.begin(), voters.end(), v) != 1)
                throw ConfigError("duplicate voter '" + v + "'");
        }
    }

    bool is_voter(std::string_view name) const {
        return std::find(voters.begin(), voters.end(), name) != voters.end();
    }

    bool operator==(const GovernanceConfig&) const = default;
};

enum class RequestState { Open, Approved, Rejected, Executed, Vetoed };

inline const char* to_string(RequestState s) {
    switch (s) {
        case RequestState::Open: return "open";
        case RequestState::Approved: return "approved";
        case RequestState::Rejected: return "rejected";
        case RequestState::Executed: return "executed";
        case RequestState::Vetoed: return "vetoed";
    }
    return "?";
}

inline RequestState request_state_from_string(std::string_view s) {
    if (s == "open") return RequestState::Open;
    if (s == "approved") return RequestState::Approved;
    if (s == "rejected") return RequestState::Rejected;
    if (s == "executed") return RequestState::Executed;
    if (s == "vetoed") return RequestState::Vetoed;
    throw ConfigError("unknown request state '" + std::string(s) + "'");
}

enum class VoteChoice { Approve, Reject };

struct RequestEvent {
    std::string kind; // opened | approved | rejected | executed | vetoed
    std::uint64_t height = 0;
    std::string actor;

    bool operator==(const RequestEvent&) const = default;
};

struct RedactionRequest {
    std::string id;
    std::uint64_t block_height = 0;
    TxId tx_id{};
    Bytes new_payload;
    std::string proposer;
    std::uint64_t opened_at = 0;
    std::vector<std::pair<std::string, VoteChoice>> votes; // one per voter, in arrival order
    RequestState state = RequestState::Open;
    std::vector<RequestEvent> history;

    bool has_vote_from(std::string_view voter) const {
        return std::any_of(votes.begin(), votes.end(),
                           [&](const auto& v) { return v.first == voter; });
    }

    std::size_t approvals() const {
        return static_cast<std::size_t>(
            std::count_if(votes.begin(), votes.end(),
                          [](const auto& v) { return v.second == VoteChoice::Approve; }));
    }

    bool operator==(const RedactionRequest&) const = default;
};

class RequestRegistry {
public:
    explicit RequestRegistry(GovernanceConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    const GovernanceConfig& config() const { return cfg_; }
    const std::vector<RedactionRequest>& requests() const { return requests_; }

    RedactionRequest* find(std::string_view id) {
        for (auto& r : requests_)
            if (r.id == id) return &r;
        return nullptr;
    }

    const RedactionRequest* find(std::string_view id) const {
        for (const auto& r : requests_)
            if (r.id == id) return &r;
        return nullptr;
    }

    RedactionRequest& get(std::string_view id) {
        RedactionRequest* r = find(id);
        if (!r) throw NotFoundError("no request '" + std::string(id) + "'");
        return *r;
    }

    // Central and consortium requests auto-approve: the real gate is the
    // authority material presented at execution time. Public-trapdoor
    // requests stay open for voting.
    RedactionRequest& open_request(std::uint64_t block_height, const TxId& tx_id,
                                   Bytes new_payload, const std::string& proposer,
                                   std::uint64_t current_height,
                                   std::optional<std::string> id = std::nullopt) {
        if (!valid_token(proposer)) throw ConfigError("bad proposer name '" + proposer + "'");
        if (cfg_.mode != GovernanceMode::Central && !cfg_.is_voter(proposer))
            throw AuthorizationError("proposer '" + proposer + "' is not a registered voter");
        RedactionRequest req;
        req.id = id ? *id : next_id();
        if (!valid_token(req.id)) throw ConfigError("bad request id '" + req.id + "'");
        if (find(req.id)) throw ConfigError("request id '" + req.id + "' already exists");
        req.block_height = block_height;
        req.tx_id = tx_id;
        req.new_payload = std::move(new_payload);
        req.proposer = proposer;
        req.opened_at = current_height;
        req.history.push_back({"opened", current_height, proposer});
        if (cfg_.mode != GovernanceMode::PublicTrapdoor) {
            req.state = RequestState::Approved;
            req.history.push_back({"approved", current_height, to_string(cfg_.mode)});
        }
        requests_.push_back(std::move(req));
        return requests_.back();
    }

    void cast_vote(std::string_view id, const std::string& voter, VoteChoice choice,
                   std::uint64_t current_height) {
        RedactionRequest& req = get(id);
        if (req.state != RequestState::Open)
            throw ConfigError("request '" + req.id + "' is not open for voting (state " +
                              to_string(req.state) + ")");
        if (!cfg_.is_voter(voter))
            throw AuthorizationError("'" + voter + "' is not a registered voter");
        if (req.has_vote_from(voter))
            throw ConfigError("'" + voter + "' already voted on '" + req.id + "'");
        if (current_height > req.opened_at + cfg_.voting_window)
            throw ConfigError("voting window for '" + req.id + "' closed at height " +
                              std::to_string(req.opened_at + cfg_.voting_window));
        req.votes.emplace_back(voter, choice);
    }

    // Decides an open request once the window has closed or every registered
    // voter has spoken. Approval requires approvals strictly greater than
    // quorum * registered_voters; a tie rejects. Calling tally on an already
    // decided request just reports its state.
    RequestState tally(std::string_view id, std::uint64_t current_height) {
        RedactionRequest& req = get(id);
        if (req.state != RequestState::Open) return req.state;
        bool window_closed = current_height > req.opened_at + cfg_.voting_window;
        bool all_voted = req.votes.size() == cfg_.voters.size();
        if (!window_closed && !all_voted)
            throw ConfigError("voting window for '" + req.id + "' is still open until height " +
                              std::to_string(req.opened_at + cfg_.voting_window));
        // approvals / voters > num / den  <=>  approvals * den > num * voters
        bool approved = static_cast<std::uint64_t>(req.approvals()) * cfg_.quorum.den >
                        cfg_.quorum.num * static_cast<std::uint64_t>(cfg_.voters.size());
        req.state = approved ? RequestState::Approved : RequestState::Rejected;
        req.history.push_back({approved ? "approved" : "rejected", current_height, "tally"});
        return req.state;
    }

    // Oversight veto: only approved-but-not-executed requests can be vetoed,
    // and a vetoed request can never execute.
    void veto(std::string_view id, const std::string& authority, std::uint64_t current_height) {
        if (!cfg_.oversight_enabled)
            throw AuthorizationError("oversight is not enabled in this governance config");
        if (!valid_token(authority)) throw ConfigError("bad authority name '" + authority + "'");
        RedactionRequest& req = get(id);
        if (req.state == RequestState::Executed)
            throw AuthorizationError("request '" + req.id + "' already executed; veto is not retroactive");
        if (req.state != RequestState::Approved)
            throw AuthorizationError(std::string("only approved requests can be vetoed (state ") +
                                     to_string(req.state) + ")");
        req.state = RequestState::Vetoed;
        req.history.push_back({"vetoed", current_height, authority});
    }

    void mark_executed(std::string_view id, std::uint64_t current_height,
                       const std::string& actor) {
        RedactionRequest& req = get(id);
        req.state = RequestState::Executed;
        req.history.push_back({"executed", current_height, actor});
    }

    // --- persistence ---------------------------------------------------------
    //
    //   redactchain-requests v1
    //   request id=<tok> block=<dec> tx=<hex32> proposer=<tok> opened=<dec>
    //           state=<state> payload=<hex>
    //   vote request=<tok> node=<tok> choice=<approve|reject>
    //   event request=<tok> kind=<tok> height=<dec> actor=<tok>

    static constexpr const char* kFileHeader = "redactchain-requests v1";

    std::string serialize() const {
        std::ostringstream out;
        out << kFileHeader << "\n";
        for (const auto& req : requests_) {
            out << "request id=" << req.id << " block=" << req.block_height
                << " tx=" << hex_encode(req.tx_id) << " proposer=" << req.proposer
                << " opened=" << req.opened_at << " state=" << to_string(req.state)
                << " payload=" << hex_encode(req.new_payload) << "\n";
            for (const auto& [node, choice] : req.votes)
                out << "vote request=" << req.id << " node=" << node << " choice="
                    << (choice == VoteChoice::Approve ? "approve" : "reject") << "\n";
            for (const auto& ev : req.history)
                out << "event request=" << req.id << " kind=" << ev.kind
                    << " height=" << ev.height << " actor=" << ev.actor << "\n";
        }
        return out.str();
    }

    static RequestRegistry deserialize(const std::string& text, GovernanceConfig cfg,
                                       const std::string& path = "<requests>") {
        std::istringstream in(text);
        std::string line;
        std::size_t line_no = 1;
        if (!std::getline(in, line) || line != kFileHeader)
            throw ParseError(path, 1, std::string("expected header '") + kFileHeader + "'");
        RequestRegistry reg(std::move(cfg));
        RedactionRequest* current = nullptr;
        while (std::getline(in, line)) {
            line_no++;
            if (line.empty()) throw ParseError(path, line_no, "blank line");
            RecordLine rec = parse_record_line(path, line_no, line);
            if (rec.type == "request") {
                rec.expect(path, line_no,
                           {"id", "block", "tx", "proposer", "opened", "state", "payload"});
                RedactionRequest req;
                req.id = rec.value(0);
                if (!valid_token(req.id)) throw ParseError(path, line_no, "bad request id");
                if (reg.find(req.id)) throw ParseError(path, line_no, "duplicate request id");
                req.block_height = parse_u64(path, line_no, rec.value(1));
                try {
                    req.tx_id = hex_decode_fixed<16>(rec.value(2));
                    req.new_payload = hex_decode(rec.value(6));
                } catch (const RangeError& e) {
                    throw ParseError(path, line_no, e.what());
                }
                req.proposer = rec.value(3);
                req.opened_at = parse_u64(path, line_no, rec.value(4));
                try {
                    req.state = request_state_from_string(rec.value(5));
                } catch (const ConfigError& e) {
                    throw ParseError(path, line_no, e.what());
                }
                reg.requests_.push_back(std::move(req));
                current = &reg.requests_.back();
            } else if (rec.type == "vote") {
                rec.expect(path, line_no, {"request", "node", "choice"});
                if (!current || current->id != rec.value(0))
                    throw ParseError(path, line_no, "vote does not follow its request");
                if (rec.value(2) != "approve" && rec.value(2) != "reject")
                    throw ParseError(path, line_no, "choice must be approve or reject");
                if (current->has_vote_from(rec.value(1)))
                    throw ParseError(path, line_no, "duplicate vote");
                current->votes.emplace_back(rec.value(1), rec.value(2) == "approve"
                                                              ? VoteChoice::Approve
                                                              : VoteChoice::Reject);
            } else if (rec.type == "event") {
                rec.expect(path, line_no, {"request", "kind", "height", "actor"});
                if (!current || current->id != rec.value(0))
                    throw ParseError(path, line_no, "event does not follow its request");
                current->history.push_back(
                    {rec.value(1), parse_u64(path, line_no, rec.value(2)), rec.value(3)});
            } else {
                throw ParseError(path, line_no, "unknown record type '" + rec.type + "'");
            }
        }
        return reg;
    }

    void save(const std::filesystem::path& file) const { atomic_write_file(file, serialize()); }

    static RequestRegistry load(const std::filesystem::path& file, GovernanceConfig cfg) {
        return deserialize(read_text_file(file), std::move(cfg), file.string());
    }

private:
    std::string next_id() const {
        std::uint64_t max_seen = 0;
        for (const auto& r : requests_) {
            if (r.id.rfind("req-", 0) == 0) {
                std::uint64_t v = 0;
                bool numeric = r.id.size() > 4;
                for (std::size_t i = 4; i < r.id.size(); i++) {
                    if (r.id[i] < '0' || r.id[i] > '9') { numeric = false; break; }
                    v = v * 10 + static_cast<std::uint64_t>(r.id[i] - '0');
                }
                if (numeric) max_seen = std::max(max_seen, v);
            }
        }
        char buf[16];
        std::snprintf(buf, sizeof(buf), "req-%06llu",
                      static_cast<unsigned long long>(max_seen + 1));
        return buf;
    }

    GovernanceConfig cfg_;
    std::vector<RedactionRequest> requests_;
};

// Authority material presented at execution time, one shape per mode.
struct AuthorityTrapdoor {
    BigInt x;
};
struct AuthorityShares {
    std::vector<TrapdoorShare> shares;
};
struct AuthorityOnChain {};
using AuthorityMaterial = std::variant<AuthorityTrapdoor, AuthorityShares, AuthorityOnChain>;

// Runs an approved request against the chain. Mode decides where the
// trapdoor comes from; the ledger's adapt postcondition is the final word on
// whether the presented material was genuine. On integrity failure the
// request stays Approved and the chain is untouched.
inline RedactionStamp execute_redaction(RequestRegistry& registry, std::string_view id,
                                        Chain& chain, const AuthorityMaterial& material) {
    RedactionRequest& req = registry.get(id);
    if (req.state == RequestState::Vetoed)
        throw AuthorizationError("request '" + req.id + "' was vetoed and can never execute");
    if (req.state != RequestState::Approved)
        throw AuthorizationError("request '" + req.id + "' is not approved (state " +
                                 to_string(req.state) + ")");
    BigInt trapdoor;
    switch (registry.config().mode) {
        case GovernanceMode::Central: {
            const auto* held = std::get_if<AuthorityTrapdoor>(&material);
            if (!held) throw AuthorizationError("central mode requires the authority trapdoor");
            trapdoor = held->x;
            break;
        }
        case GovernanceMode::Consortium: {
            const auto* held = std::get_if<AuthorityShares>(&material);
            if (!held || held->shares.empty())
                throw AuthorizationError("consortium mode requires gathered trapdoor shares");
            trapdoor = reconstruct_trapdoor(held->shares, chain.q());
            break;
        }
        case GovernanceMode::PublicTrapdoor: {
            if (!chain.embedded_trapdoor())
                throw AuthorizationError("chain carries no embedded public trapdoor");
            trapdoor = *chain.embedded_trapdoor();
            break;
        }
    }
    RedactionStamp stamp = chain.redact_transaction(trapdoor, req.block_height, req.tx_id,
                                                    req.new_payload, req.id);
    registry.mark_executed(req.id, chain.height(), "execute");
    return stamp;
}

// Governance configuration file:
//   redactchain-govcfg v1
//   mode <central|consortium|public_trapdoor>
//   threshold <dec>
//   shares <dec>
//   quorum <num/den>
//   voting-window <dec>
//   oversight <on|off>
//   voter <tok>        (zero or more)

inline constexpr const char* kGovernanceFileHeader = "redactchain-govcfg v1";

inline std::string serialize_governance(const GovernanceConfig& cfg) {
    std::ostringstream out;
    out << kGovernanceFileHeader << "\n";
    out << "mode " << to_string(cfg.mode) << "\n";
    out << "threshold " << cfg.threshold << "\n";
    out << "shares " << cfg.share_count << "\n";
    out << "quorum " << cfg.quorum.to_string() << "\n";
    out << "voting-window " << cfg.voting_window << "\n";
    out << "oversight " << (cfg.oversight_enabled ? "on" : "off") << "\n";
    for (const auto& v : cfg.voters) out << "voter " << v << "\n";
    return out.str();
}

inline GovernanceConfig parse_governance(const std::string& text,
                                         const std::string& path = "<governance>") {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kGovernanceFileHeader)
        throw ParseError(path, 1, std::string("expected header '") + kGovernanceFileHeader + "'");
    auto field = [&](const char* name) -> std::string {
        line_no++;
        if (!std::getline(in, line))
            throw ParseError(path, line_no, std::string("missing field '") + name + "'");
        std::string prefix = std::string(name) + " ";
        if (line.rfind(prefix, 0) != 0)
            throw ParseError(path, line_no, "expected '" + std::string(name) + " <value>'");
        return line.substr(prefix.size());
    };
    GovernanceConfig cfg;
    try {
        cfg.mode = governance_mode_from_string(field("mode"));
        cfg.threshold = static_cast<unsigned>(parse_u64(path, line_no, field("threshold")));
        cfg.share_count = static_cast<unsigned>(parse_u64(path, line_no, field("shares")));
        cfg.quorum = Rational::parse(field("quorum"));
        cfg.voting_window = parse_u64(path, line_no, field("voting-window"));
        std::string oversight = field("oversight");
        if (oversight != "on" && oversight != "off")
            throw ConfigError("oversight must be on or off");
        cfg.oversight_enabled = oversight == "on";
        while (std::getline(in, line)) {
            line_no++;
            if (line.rfind("voter ", 0) != 0)
                throw ParseError(path, line_no, "expected 'voter <name>'");
            cfg.voters.push_back(line.substr(6));
        }
        cfg.validate();
    } catch (const ParseError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ParseError(path, line_no, e.what());
    }
    return cfg;
}

inline void save_governance_file(const std::filesystem::path& path, const GovernanceConfig& cfg) {
    atomic_write_file(path, serialize_governance(cfg));
}

inline GovernanceConfig load_governance_file(const std::filesystem::path& path) {
    return parse_governance(read_text_file(path), path.string());
}

} // namespace redactchain

#endif
