// redactchain command-line tool: key management, chain building, the
// redaction lifecycle, auditing and simulation runs.
//
// Exit status contract (stable): 0 success, 2 usage/config/parse errors,
// 3 authorization failures, 4 integrity failures.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "redactchain/chamhash.hpp"
#include "redactchain/clawfree.hpp"
#include "redactchain/governance.hpp"
#include "redactchain/ledger.hpp"
#include "redactchain/netsim.hpp"
#include "redactchain/shamir.hpp"

namespace rc = redactchain;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitAuthorization = 3;
constexpr int kExitIntegrity = 4;

constexpr const char* kSecretKeyEnv = "REDACTCHAIN_SECRET_KEY";

std::string dec_hex(std::uint64_t v) {
    std::ostringstream out;
    out << v << " (0x" << std::hex << v << ")";
    return out.str();
}

struct KeygenArgs {
    unsigned bits = 256;
    std::optional<std::uint64_t> seed;
    std::string out_prefix;
    bool force = false;
};

int cmd_keygen(const KeygenArgs& args) {
    if (!rc::supported_security_bits(args.bits))
        throw rc::ConfigError("unsupported --bits " + std::to_string(args.bits) +
                              " (expected 64, 256, 2048 or 3072)");
    fs::path pub = args.out_prefix + ".pub";
    fs::path sec = args.out_prefix + ".key";
    if (!args.force && (fs::exists(pub) || fs::exists(sec)))
        throw rc::ConfigError("output key files exist; pass --force to overwrite");

    rc::ChameleonKeyPair key;
    if (args.seed) {
        rc::DeterministicRng rng(*args.seed, "keygen");
        key = rc::keygen(args.bits, rng);
    } else {
        rc::SystemRng rng;
        key = rc::keygen(args.bits, rng);
    }
    rc::save_key_file(pub, key, false);
    rc::save_key_file(sec, key, true);
    std::cout << "public key:  " << pub.string() << "\n";
    std::cout << "secret key:  " << sec.string() << "\n";
    std::cout << "fingerprint: " << rc::key_fingerprint(key) << "\n";
    std::cout << "q bits:      " << dec_hex(args.bits) << "\n";
    if (args.bits < rc::kInsecureBitsThreshold)
        std::cout << "warning: " << args.bits
                  << "-bit parameters are desk-scale test parameters; INSECURE\n";
    return kExitOk;
}

rc::ChameleonKeyPair load_secret_key(const std::string& flag_path) {
    std::string path = flag_path;
    if (path.empty()) {
        const char* env = std::getenv(kSecretKeyEnv);
        if (env) path = env;
    }
    if (path.empty())
        throw rc::AuthorizationError(std::string("no secret key: pass --secret-key or set $") +
                                     kSecretKeyEnv);
    rc::ChameleonKeyPair key = rc::load_key_file(path);
    if (!key.has_trapdoor())
        throw rc::AuthorizationError(path + " is a public key file; the trapdoor is required");
    return key;
}

int cmd_chain_init(const std::string& key_path, const std::string& out,
                   const std::string& governance_path, const std::string& secret_key_path,
                   std::uint64_t genesis_time, bool force) {
    if (!force && fs::exists(out))
        throw rc::ConfigError(out + " exists; pass --force to overwrite");
    rc::ChameleonKeyPair key = rc::load_key_file(key_path);
    std::optional<rc::BigInt> embedded;
    if (!governance_path.empty()) {
        rc::GovernanceConfig gov = rc::load_governance_file(governance_path);
        if (gov.mode == rc::GovernanceMode::PublicTrapdoor) {
            rc::ChameleonKeyPair secret = load_secret_key(secret_key_path);
            if (secret.public_part() != key.public_part())
                throw rc::ConfigError("secret key does not match --key");
            embedded = secret.tk;
        }
    }
    rc::Chain chain = rc::Chain::init(key.public_part(), genesis_time, embedded);
    chain.save(out);
    std::cout << "initialized " << out << " at height " << dec_hex(chain.height()) << "\n";
    std::cout << "key fingerprint: " << rc::key_fingerprint(key) << "\n";
    if (embedded) std::cout << "trapdoor embedded in chain (public_trapdoor governance)\n";
    if (rc::bit_length(key.params.q) < rc::kInsecureBitsThreshold)
        std::cout << "warning: desk-scale key parameters; INSECURE\n";
    return kExitOk;
}

rc::Bytes resolve_payload(const std::string& text, const std::string& file,
                          const std::string& hex) {
    int given = (!text.empty() ? 1 : 0) + (!file.empty() ? 1 : 0) + (!hex.empty() ? 1 : 0);
    if (given > 1)
        throw rc::ConfigError("give at most one of --payload, --payload-file, --payload-hex");
    if (!file.empty()) {
        std::string content = rc::read_text_file(file);
        return rc::Bytes(content.begin(), content.end());
    }
    if (!hex.empty()) return rc::hex_decode(hex);
    return rc::Bytes(text.begin(), text.end()); // empty payloads are allowed
}

int cmd_tx_add(const std::string& chain_path, const rc::Bytes& payload,
               std::optional<std::uint64_t> seed) {
    rc::FileLock lock{fs::path(chain_path)};
    rc::Chain chain = rc::Chain::load(chain_path);
    const rc::Transaction* tx = nullptr;
    if (seed) {
        rc::DeterministicRng rng(*seed, "tx");
        tx = &chain.add_pending(payload, rng);
    } else {
        rc::SystemRng rng;
        tx = &chain.add_pending(payload, rng);
    }
    chain.save(chain_path);
    std::cout << "pending tx " << rc::hex_encode(tx->id) << " payload bytes "
              << dec_hex(tx->payload.size()) << "\n";
    return kExitOk;
}

int cmd_block_seal(const std::string& chain_path, std::optional<std::uint64_t> time) {
    rc::FileLock lock{fs::path(chain_path)};
    rc::Chain chain = rc::Chain::load(chain_path);
    std::uint64_t ts = time ? *time : chain.blocks().back().header.timestamp + 1;
    const rc::Block& block = chain.seal_pending(ts);
    chain.save(chain_path);
    std::cout << "sealed block height " << dec_hex(block.header.height) << " with "
              << dec_hex(block.txs.size()) << " txs\n";
    std::cout << "block hash " << rc::hex_encode(block.block_hash()) << "\n";
    return kExitOk;
}

int cmd_chain_verify(const std::string& chain_path) {
    rc::Chain chain = rc::Chain::load(chain_path);
    rc::ValidationReport report = chain.validate();
    if (report.ok()) {
        std::cout << "chain valid: height " << dec_hex(chain.height()) << ", "
                  << dec_hex(chain.blocks().size()) << " blocks\n";
        return kExitOk;
    }
    std::cout << "chain INVALID at " << report.to_string() << "\n";
    return kExitIntegrity;
}

rc::TxId parse_tx_id(const std::string& hex) {
    try {
        return rc::hex_decode_fixed<16>(hex);
    } catch (const rc::RangeError& e) {
        throw rc::ConfigError(std::string("bad --tx id: ") + e.what());
    }
}

int cmd_redact_propose(const std::string& chain_path, const std::string& gov_path,
                       const std::string& requests_path, std::uint64_t block_height,
                       const std::string& tx_hex, const rc::Bytes& payload,
                       const std::string& proposer) {
    rc::FileLock lock{fs::path(requests_path)};
    rc::Chain chain = rc::Chain::load(chain_path);
    rc::GovernanceConfig gov = rc::load_governance_file(gov_path);
    rc::RequestRegistry registry =
        fs::exists(requests_path)
            ? rc::RequestRegistry::load(requests_path, gov)
            : rc::RequestRegistry(gov);
    rc::TxId tx_id = parse_tx_id(tx_hex);
    auto loc = chain.find_tx(tx_id);
    if (!loc) throw rc::NotFoundError("no transaction " + tx_hex + " on the chain");
    if (chain.blocks()[loc->block_index].header.height != block_height)
        throw rc::NotFoundError("transaction " + tx_hex + " is not in block " +
                                std::to_string(block_height));
    rc::RedactionRequest& req =
        registry.open_request(block_height, tx_id, payload, proposer, chain.height());
    registry.save(requests_path);
    std::cout << "opened request " << req.id << " state " << rc::to_string(req.state) << "\n";
    std::cout << "target block " << dec_hex(block_height) << " tx " << tx_hex << "\n";
    return kExitOk;
}

int cmd_redact_vote(const std::string& chain_path, const std::string& gov_path,
                    const std::string& requests_path, const std::string& request_id,
                    const std::string& voter, bool approve) {
    rc::FileLock lock{fs::path(requests_path)};
    rc::Chain chain = rc::Chain::load(chain_path);
    rc::RequestRegistry registry =
        rc::RequestRegistry::load(requests_path, rc::load_governance_file(gov_path));
    registry.cast_vote(request_id, voter,
                       approve ? rc::VoteChoice::Approve : rc::VoteChoice::Reject,
                       chain.height());
    registry.save(requests_path);
    std::cout << "recorded " << (approve ? "approve" : "reject") << " from " << voter << " on "
              << request_id << "\n";
    return kExitOk;
}

int cmd_redact_tally(const std::string& chain_path, const std::string& gov_path,
                     const std::string& requests_path, const std::string& request_id) {
    rc::Chain chain = rc::Chain::load(chain_path);
    rc::RequestRegistry registry =
        rc::RequestRegistry::load(requests_path, rc::load_governance_file(gov_path));
    const rc::RedactionRequest& before = registry.get(request_id);
    bool was_open = before.state == rc::RequestState::Open;
    rc::RequestState state = registry.tally(request_id, chain.height());
    if (was_open) {
        rc::FileLock lock{fs::path(requests_path)};
        registry.save(requests_path);
    }
    const rc::RedactionRequest& req = registry.get(request_id);
    std::cout << "request " << request_id << ": " << rc::to_string(state) << " ("
              << req.approvals() << " of " << registry.config().voters.size()
              << " approvals, quorum " << registry.config().quorum.to_string() << ")\n";
    return kExitOk;
}

int cmd_redact_veto(const std::string& chain_path, const std::string& gov_path,
                    const std::string& requests_path, const std::string& request_id,
                    const std::string& authority) {
    rc::FileLock lock{fs::path(requests_path)};
    rc::Chain chain = rc::Chain::load(chain_path);
    rc::RequestRegistry registry =
        rc::RequestRegistry::load(requests_path, rc::load_governance_file(gov_path));
    registry.veto(request_id, authority, chain.height());
    registry.save(requests_path);
    std::cout << "request " << request_id << " vetoed by " << authority << "\n";
    return kExitOk;
}

int cmd_redact_execute(const std::string& chain_path, const std::string& gov_path,
                       const std::string& requests_path, const std::string& request_id,
                       const std::string& secret_key_path,
                       const std::vector<std::string>& share_paths) {
    rc::FileLock lock{fs::path(chain_path)};
    rc::Chain chain = rc::Chain::load(chain_path);
    rc::GovernanceConfig gov = rc::load_governance_file(gov_path);
    rc::RequestRegistry registry = rc::RequestRegistry::load(requests_path, gov);

    rc::AuthorityMaterial material = rc::AuthorityOnChain{};
    switch (gov.mode) {
        case rc::GovernanceMode::Central: {
            rc::ChameleonKeyPair key = load_secret_key(secret_key_path);
            material = rc::AuthorityTrapdoor{*key.tk};
            break;
        }
        case rc::GovernanceMode::Consortium: {
            if (share_paths.empty())
                throw rc::AuthorizationError("consortium execution requires --share files");
            std::vector<rc::TrapdoorShare> shares;
            for (const auto& path : share_paths) {
                auto [share, q] = rc::load_share_file(path);
                if (q != chain.q())
                    throw rc::ConfigError(path + " was issued for a different group order");
                shares.push_back(share);
            }
            material = rc::AuthorityShares{std::move(shares)};
            break;
        }
        case rc::GovernanceMode::PublicTrapdoor:
            break; // the chain carries the trapdoor
    }

    std::vector<std::string> hashes_before;
    for (const auto& b : chain.blocks()) hashes_before.push_back(rc::hex_encode(b.block_hash()));

    rc::RedactionStamp stamp = rc::execute_redaction(registry, request_id, chain, material);

    std::size_t unchanged = 0;
    for (std::size_t i = 0; i < chain.blocks().size(); i++)
        if (rc::hex_encode(chain.blocks()[i].block_hash()) == hashes_before[i]) unchanged++;
    if (unchanged != hashes_before.size())
        throw rc::IntegrityError("block hashes changed during redaction");

    chain.save(chain_path);
    registry.save(requests_path);
    std::cout << "executed " << request_id << "; stamp height " << dec_hex(stamp.approved_at)
              << "\n";
    std::cout << "old payload commitment " << rc::hex_encode(stamp.old_payload_commitment)
              << "\n";
    std::cout << "block hashes unchanged: " << unchanged << "/" << hashes_before.size() << "\n";
    return kExitOk;
}

int cmd_redact_audit(const std::string& chain_path, const std::string& tx_hex) {
    rc::Chain chain = rc::Chain::load(chain_path);
    rc::TxId tx_id = parse_tx_id(tx_hex);
    auto stamps = chain.audit_history(tx_id);
    auto loc = chain.find_tx(tx_id);
    const rc::Transaction& tx = chain.tx_at(*loc);
    std::cout << "tx " << tx_hex << " version " << dec_hex(tx.version) << " redactions "
              << dec_hex(tx.redaction_count) << "\n";
    for (const auto& s : stamps)
        std::cout << "stamp request=" << s.request_id << " height=" << s.approved_at
                  << " old=" << rc::hex_encode(s.old_payload_commitment) << "\n";
    if (stamps.empty()) std::cout << "no redactions recorded\n";
    return kExitOk;
}

int cmd_clawfree_demo(unsigned bits_per_prime, std::uint64_t seed, const std::string& message_old,
                      const std::string& message_new) {
    rc::BitMessage m_old = rc::BitMessage::from_string(message_old);
    rc::BitMessage m_new = rc::BitMessage::from_string(message_new);
    if (m_old.size() != m_new.size())
        throw rc::ConfigError("old and new messages must share the same bit length");
    rc::DeterministicRng rng(seed, "clawfree-demo");
    rc::ClawFreePair pair = rc::cf_keygen(bits_per_prime, m_old.size(), rng);
    rc::BigInt r = rc::cf_sample_domain(pair, rng);
    rc::BigInt h = rc::cf_hash(pair, m_old, r);
    rc::BigInt r_new = rc::cf_adapt(pair, m_old, r, m_new);
    std::cout << "modulus n = " << rc::to_hex(pair.modulus()) << " (" << pair.modulus() << ")\n";
    std::cout << "message bits k = " << m_old.size() << "\n";
    std::cout << "hash(" << m_old.to_string() << ", r=" << rc::to_hex(r) << ") = "
              << rc::to_hex(h) << "\n";
    std::cout << "adapt -> r' = " << rc::to_hex(r_new) << "\n";
    std::cout << "hash(" << m_new.to_string() << ", r') = "
              << rc::to_hex(rc::cf_hash(pair, m_new, r_new)) << "\n";
    std::cout << "collision verified: "
              << (rc::cf_hash(pair, m_new, r_new) == h ? "yes" : "NO") << "\n";
    std::cout << "warning: desk-scale parameters; this backend is test-grade only\n";
    return kExitOk;
}

int cmd_sim_run(const std::string& config_path, const std::string& out_path) {
    rc::SimConfig config = rc::SimConfig::load(config_path);
    rc::SimReport report = rc::run_simulation(config);
    std::string text = report.to_text();
    std::cout << text;
    if (!out_path.empty()) rc::atomic_write_file(out_path, text);
    if (!report.safety_ok) {
        std::cout << "SAFETY VIOLATION: an honest node accepted invalid state\n";
        return kExitIntegrity;
    }
    if (!report.converged)
        std::cout << "warning: " << report.divergences.size()
                  << " node(s) diverged (see divergence records)\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"redactable chameleon-hash ledger toolkit"};
    app.require_subcommand(1);

    // keygen
    KeygenArgs keygen_args;
    auto* keygen = app.add_subcommand("keygen", "generate a chameleon key pair");
    keygen->add_option("--bits", keygen_args.bits, "subgroup order size: 64, 256, 2048, 3072")
        ->required();
    std::uint64_t keygen_seed = 0;
    auto* keygen_seed_opt =
        keygen->add_option("--seed", keygen_seed, "deterministic generation seed");
    keygen->add_option("--out", keygen_args.out_prefix, "output prefix (.pub/.key)")->required();
    keygen->add_flag("--force", keygen_args.force, "overwrite existing key files");

    // chain
    auto* chain = app.add_subcommand("chain", "chain file operations");
    chain->require_subcommand(1);
    std::string ci_key, ci_out, ci_gov, ci_secret;
    std::uint64_t ci_time = 0;
    bool ci_force = false;
    auto* chain_init = chain->add_subcommand("init", "create a genesis-only chain file");
    chain_init->add_option("--key", ci_key, "public key file")->required();
    chain_init->add_option("--out", ci_out, "chain file to create")->required();
    chain_init->add_option("--governance", ci_gov, "governance config (embeds trapdoor in "
                                                   "public_trapdoor mode)");
    chain_init->add_option("--secret-key", ci_secret, "secret key file (public_trapdoor mode)");
    chain_init->add_option("--time", ci_time, "genesis timestamp (default 0)");
    chain_init->add_flag("--force", ci_force, "overwrite an existing chain file");

    std::string cv_chain;
    auto* chain_verify = chain->add_subcommand("verify", "validate the whole chain file");
    chain_verify->add_option("--chain", cv_chain, "chain file")->required();

    // tx add
    auto* tx = app.add_subcommand("tx", "transaction operations");
    tx->require_subcommand(1);
    std::string ta_chain, ta_payload, ta_payload_file, ta_payload_hex;
    std::uint64_t ta_seed = 0;
    auto* tx_add = tx->add_subcommand("add", "append a pending transaction");
    tx_add->add_option("--chain", ta_chain, "chain file")->required();
    tx_add->add_option("--payload", ta_payload, "payload text");
    tx_add->add_option("--payload-file", ta_payload_file, "payload from file");
    tx_add->add_option("--payload-hex", ta_payload_hex, "payload bytes as hex");
    auto* ta_seed_opt = tx_add->add_option("--seed", ta_seed, "deterministic id/randomness seed");

    // block seal
    auto* block = app.add_subcommand("block", "block operations");
    block->require_subcommand(1);
    std::string bs_chain;
    std::uint64_t bs_time = 0;
    auto* block_seal = block->add_subcommand("seal", "seal all pending transactions");
    block_seal->add_option("--chain", bs_chain, "chain file")->required();
    auto* bs_time_opt = block_seal->add_option("--time", bs_time, "block timestamp");

    // redact
    auto* redact = app.add_subcommand("redact", "redaction lifecycle");
    redact->require_subcommand(1);

    std::string rp_chain, rp_gov, rp_requests, rp_tx, rp_payload, rp_payload_file,
        rp_payload_hex, rp_proposer;
    std::uint64_t rp_block = 0;
    auto* propose = redact->add_subcommand("propose", "open a redaction request");
    propose->add_option("--chain", rp_chain, "chain file")->required();
    propose->add_option("--gov", rp_gov, "governance config file")->required();
    propose->add_option("--requests", rp_requests, "request registry file")->required();
    propose->add_option("--block", rp_block, "target block height")->required();
    propose->add_option("--tx", rp_tx, "target transaction id (hex)")->required();
    propose->add_option("--payload", rp_payload, "replacement payload text");
    propose->add_option("--payload-file", rp_payload_file, "replacement payload from file");
    propose->add_option("--payload-hex", rp_payload_hex, "replacement payload as hex");
    propose->add_option("--proposer", rp_proposer, "proposing node name")->required();

    std::string rv_chain, rv_gov, rv_requests, rv_request, rv_voter;
    bool rv_approve = false, rv_reject = false;
    auto* vote = redact->add_subcommand("vote", "cast a vote on an open request");
    vote->add_option("--chain", rv_chain, "chain file")->required();
    vote->add_option("--gov", rv_gov, "governance config file")->required();
    vote->add_option("--requests", rv_requests, "request registry file")->required();
    vote->add_option("--request", rv_request, "request id")->required();
    vote->add_option("--voter", rv_voter, "voter name")->required();
    vote->add_flag("--approve", rv_approve, "vote approve");
    vote->add_flag("--reject", rv_reject, "vote reject");

    std::string rt_chain, rt_gov, rt_requests, rt_request;
    auto* tally = redact->add_subcommand("tally", "tally an open request");
    tally->add_option("--chain", rt_chain, "chain file")->required();
    tally->add_option("--gov", rt_gov, "governance config file")->required();
    tally->add_option("--requests", rt_requests, "request registry file")->required();
    tally->add_option("--request", rt_request, "request id")->required();

    std::string rveto_chain, rveto_gov, rveto_requests, rveto_request, rveto_authority;
    auto* veto = redact->add_subcommand("veto", "oversight veto of an approved request");
    veto->add_option("--chain", rveto_chain, "chain file")->required();
    veto->add_option("--gov", rveto_gov, "governance config file")->required();
    veto->add_option("--requests", rveto_requests, "request registry file")->required();
    veto->add_option("--request", rveto_request, "request id")->required();
    veto->add_option("--authority", rveto_authority, "oversight authority name")->required();

    std::string re_chain, re_gov, re_requests, re_request, re_secret;
    std::vector<std::string> re_shares;
    auto* execute = redact->add_subcommand("execute", "execute an approved request");
    execute->add_option("--chain", re_chain, "chain file")->required();
    execute->add_option("--gov", re_gov, "governance config file")->required();
    execute->add_option("--requests", re_requests, "request registry file")->required();
    execute->add_option("--request", re_request, "request id")->required();
    execute->add_option("--secret-key", re_secret,
                        std::string("secret key file (central mode; or $") + kSecretKeyEnv + ")");
    execute->add_option("--share", re_shares, "trapdoor share file (repeatable, consortium)");

    std::string ra_chain, ra_tx;
    auto* audit = redact->add_subcommand("audit", "print a transaction's redaction stamps");
    audit->add_option("--chain", ra_chain, "chain file")->required();
    audit->add_option("--tx", ra_tx, "transaction id (hex)")->required();

    // clawfree demo
    auto* clawfree = app.add_subcommand("clawfree", "claw-free permutation backend");
    clawfree->require_subcommand(1);
    unsigned cf_bits = 16;
    std::uint64_t cf_seed = 1;
    std::string cf_old = "1011", cf_new = "0100";
    auto* cf_demo = clawfree->add_subcommand("demo", "hash and adapt a bit message");
    cf_demo->add_option("--bits-per-prime", cf_bits, "Blum prime size (default 16)");
    cf_demo->add_option("--seed", cf_seed, "deterministic seed");
    cf_demo->add_option("--message", cf_old, "original bit message");
    cf_demo->add_option("--new-message", cf_new, "replacement bit message");

    // sim run
    auto* sim = app.add_subcommand("sim", "network simulation");
    sim->require_subcommand(1);
    std::string sr_config, sr_out;
    auto* sim_run = sim->add_subcommand("run", "run a simulation config");
    sim_run->add_option("--config", sr_config, "simulation config file")->required();
    sim_run->add_option("--out", sr_out, "write the machine-readable report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*keygen) {
            if (keygen_seed_opt->count()) keygen_args.seed = keygen_seed;
            return cmd_keygen(keygen_args);
        }
        if (*chain_init)
            return cmd_chain_init(ci_key, ci_out, ci_gov, ci_secret, ci_time, ci_force);
        if (*chain_verify) return cmd_chain_verify(cv_chain);
        if (*tx_add) {
            std::optional<std::uint64_t> seed;
            if (ta_seed_opt->count()) seed = ta_seed;
            return cmd_tx_add(ta_chain, resolve_payload(ta_payload, ta_payload_file, ta_payload_hex),
                              seed);
        }
        if (*block_seal) {
            std::optional<std::uint64_t> time;
            if (bs_time_opt->count()) time = bs_time;
            return cmd_block_seal(bs_chain, time);
        }
        if (*propose)
            return cmd_redact_propose(rp_chain, rp_gov, rp_requests, rp_block, rp_tx,
                                      resolve_payload(rp_payload, rp_payload_file, rp_payload_hex),
                                      rp_proposer);
        if (*vote) {
            if (rv_approve == rv_reject)
                throw rc::ConfigError("pass exactly one of --approve / --reject");
            return cmd_redact_vote(rv_chain, rv_gov, rv_requests, rv_request, rv_voter, rv_approve);
        }
        if (*tally) return cmd_redact_tally(rt_chain, rt_gov, rt_requests, rt_request);
        if (*veto)
            return cmd_redact_veto(rveto_chain, rveto_gov, rveto_requests, rveto_request,
                                   rveto_authority);
        if (*execute)
            return cmd_redact_execute(re_chain, re_gov, re_requests, re_request, re_secret,
                                      re_shares);
        if (*audit) return cmd_redact_audit(ra_chain, ra_tx);
        if (*cf_demo) return cmd_clawfree_demo(cf_bits, cf_seed, cf_old, cf_new);
        if (*sim_run) return cmd_sim_run(sr_config, sr_out);
        throw rc::ConfigError("no subcommand selected");
    } catch (const rc::AuthorizationError& e) {
        std::cerr << "error (authorization): " << e.what() << "\n";
        return kExitAuthorization;
    } catch (const rc::IntegrityError& e) {
        std::cerr << "error (integrity): " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const rc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
