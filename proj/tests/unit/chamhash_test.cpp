#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <set>

#include "redactchain/chamhash.hpp"
#include "test_support.hpp"

using namespace redactchain;
using namespace testsupport;

TEST_CASE("toy group vector: g = 2 has order 11 in Z*_23 and y = g^3 = 8") {
    // exhaustive oracle: walk the powers of 2 mod 23 by hand arithmetic
    std::uint64_t v = 1;
    std::size_t order = 0;
    for (std::size_t i = 1; i <= 22; i++) {
        v = v * 2 % 23;
        if (v == 1) {
            order = i;
            break;
        }
    }
    CHECK(order == 11);
    CHECK(u64_mod_pow(2, 3, 23) == 8);

    ChameleonKeyPair key = toy_keypair();
    CHECK(key.hk == 8);
    CHECK_NOTHROW(key.validate());
}

TEST_CASE("keygen produces valid parameters and honors the seed") {
    DeterministicRng rng(99, "kg");
    ChameleonKeyPair key = keygen(64, rng);
    CHECK_NOTHROW(key.validate());
    CHECK(bit_length(key.params.q) == 64);
    CHECK(key.params.p == 2 * key.params.q + 1);
    CHECK(*key.tk >= 1);
    CHECK(*key.tk <= key.params.q - 1);

    DeterministicRng rng2(99, "kg");
    ChameleonKeyPair again = keygen(64, rng2);
    CHECK(key == again);

    DeterministicRng rng3(100, "kg");
    CHECK(keygen(64, rng3) != key);
}

TEST_CASE("keygen rejects unsupported sizes") {
    DeterministicRng rng(1, "kg");
    CHECK_THROWS_AS(keygen(13, rng), ConfigError);
    CHECK_THROWS_AS(keygen(0, rng), ConfigError);
    CHECK_THROWS_AS(keygen(1024, rng), ConfigError);
}

TEST_CASE("prime search reports exhaustion instead of hanging") {
    DeterministicRng rng(1, "kg");
    CHECK_THROWS_AS(generate_group(64, rng, 1), GenerationError);
}

TEST_CASE("hash matches the brute-force oracle on the toy group") {
    ChameleonKeyPair key = toy_keypair();
    CHECK(toy_cham_hash(2, 8, 23, 5, 7) == 16);
    CHECK(cham_hash(key, MessageScalar{5}, Randomness{7}).h == 16);
    CHECK(cham_hash(key, MessageScalar{0}, Randomness{0}).h == 1);
    CHECK(cham_hash(key, MessageScalar{5}, Randomness{7}) ==
          cham_hash(key, MessageScalar{5}, Randomness{7}));
    // full cross-check over the whole toy domain
    for (std::uint64_t e = 0; e < 11; e++)
        for (std::uint64_t r = 0; r < 11; r++)
            CHECK(cham_hash(key, MessageScalar{e}, Randomness{r}).h ==
                  toy_cham_hash(2, 8, 23, e, r));
    CHECK_THROWS_AS(cham_hash(key, MessageScalar{11}, Randomness{7}), RangeError);
    CHECK_THROWS_AS(cham_hash(key, MessageScalar{5}, Randomness{-1}), RangeError);
}

TEST_CASE("verify is total and exact") {
    ChameleonKeyPair key = toy_keypair();
    CHECK(cham_verify(key, MessageScalar{5}, Randomness{7}, ChameleonDigest{16}));
    CHECK_FALSE(cham_verify(key, MessageScalar{5}, Randomness{7}, ChameleonDigest{15}));
    // oracle recompute for the perturbed randomness
    CHECK(toy_cham_hash(2, 8, 23, 5, 8) != 16);
    CHECK_FALSE(cham_verify(key, MessageScalar{5}, Randomness{8}, ChameleonDigest{16}));
    // malformed inputs return false, never throw
    CHECK_FALSE(cham_verify(key, MessageScalar{11}, Randomness{7}, ChameleonDigest{16}));
    CHECK_FALSE(cham_verify(key, MessageScalar{5}, Randomness{-3}, ChameleonDigest{16}));
    CHECK_FALSE(cham_verify(key, MessageScalar{5}, Randomness{7}, ChameleonDigest{0}));
    CHECK_FALSE(cham_verify(key, MessageScalar{5}, Randomness{7}, ChameleonDigest{23}));
}

TEST_CASE("adapt finds the unique toy collision") {
    ChameleonKeyPair key = toy_keypair();
    // oracle: brute-force search of all r for a collision with hash(5, 7) = 16
    std::uint64_t expected = 99;
    std::size_t hits = 0;
    for (std::uint64_t r = 0; r < 11; r++) {
        if (toy_cham_hash(2, 8, 23, 9, r) == 16) {
            expected = r;
            hits++;
        }
    }
    REQUIRE(hits == 1);
    REQUIRE(expected == 2);

    Randomness r_new = cham_adapt(key, MessageScalar{5}, Randomness{7}, MessageScalar{9});
    CHECK(r_new.r == 2);
    CHECK(cham_hash(key, MessageScalar{9}, r_new).h == 16);

    SECTION("identity redaction returns the original randomness") {
        CHECK(cham_adapt(key, MessageScalar{5}, Randomness{7}, MessageScalar{5}).r == 7);
    }
    SECTION("adapting back is an involution") {
        Randomness back = cham_adapt(key, MessageScalar{9}, r_new, MessageScalar{5});
        CHECK(back.r == 7);
    }
    SECTION("missing or zero trapdoor is an authorization error") {
        ChameleonKeyPair pub = key.public_part();
        CHECK_THROWS_AS(cham_adapt(pub, MessageScalar{5}, Randomness{7}, MessageScalar{9}),
                        AuthorizationError);
        ChameleonKeyPair broken = key;
        broken.tk = 0;
        CHECK_THROWS_AS(cham_adapt(broken, MessageScalar{5}, Randomness{7}, MessageScalar{9}),
                        AuthorizationError);
    }
}

TEST_CASE("layered hash reduces SHA-256 canonically") {
    ChameleonKeyPair key = toy_keypair();

    SECTION("empty message uses the well-known SHA-256 constant") {
        BigInt sha_empty =
            bigint_from_hex("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        MessageScalar e = message_scalar(Bytes{}, key.params.q);
        CHECK(e.e == sha_empty % 11);
        CHECK(e.e == 9); // frozen from the independent two-step oracle
    }

    SECTION("frozen two-step oracle value for 'tx1'") {
        Bytes msg{'t', 'x', '1'};
        auto [digest, e] = layered_hash(key, msg, Randomness{7});
        CHECK(e.e == 3); // sha256("tx1") mod 11, computed independently
        CHECK(digest.h == 4);
        CHECK(digest.h == toy_cham_hash(2, 8, 23, 3, 7));
    }

    SECTION("messages with equal reduced digests collide by construction") {
        // 'l' and 'ay' both reduce to e = 5 mod 11 (found by exhaustive search)
        Bytes m1{'l'};
        Bytes m2{'a', 'y'};
        REQUIRE(message_scalar(m1, key.params.q).e == 5);
        REQUIRE(message_scalar(m2, key.params.q).e == 5);
        CHECK(layered_hash(key, m1, Randomness{7}).first ==
              layered_hash(key, m2, Randomness{7}).first);
        CHECK(layered_hash(key, m1, Randomness{7}).first.h == 16);
    }
}

TEST_CASE("sample_randomness is uniform without modulo bias") {
    SECTION("range") {
        DeterministicRng rng(5, "sr");
        for (int i = 0; i < 500; i++) {
            BigInt r = sample_randomness(11, rng).r;
            REQUIRE(r >= 0);
            REQUIRE(r < 11);
        }
    }
    SECTION("chi-square uniformity at q = 11, 1e5 samples, alpha = 0.01") {
        DeterministicRng rng(6, "sr-chi");
        std::vector<std::uint64_t> counts(11, 0);
        const int n = 100000;
        for (int i = 0; i < n; i++)
            counts[static_cast<std::size_t>(sample_randomness(11, rng).r)]++;
        double stat = chi_square_uniform(counts, n);
        CHECK(stat < 23.209251); // chi2 critical value, 10 dof, alpha 0.01
    }
    SECTION("q = 2 hits both residues") {
        DeterministicRng rng(7, "sr2");
        std::set<int> seen;
        for (int i = 0; i < 64; i++) seen.insert(static_cast<int>(sample_randomness(2, rng).r));
        CHECK(seen == std::set<int>{0, 1});
    }
}

TEST_CASE("trapdoor collision correctness holds across random trials") {
    const ChameleonKeyPair& key = small_keypair();
    DeterministicRng rng(11, "trials");
    for (int i = 0; i < 300; i++) {
        MessageScalar e1{sample_below(key.params.q, rng)};
        Randomness r1{sample_below(key.params.q, rng)};
        MessageScalar e2{sample_below(key.params.q, rng)};
        ChameleonDigest h = cham_hash(key, e1, r1);
        Randomness r2 = cham_adapt(key, e1, r1, e2);
        REQUIRE(r2.r >= 0);
        REQUIRE(r2.r < key.params.q); // adapt closure
        REQUIRE(cham_verify(key, e2, r2, h));
    }
}

TEST_CASE("one published collision exposes the trapdoor") {
    const ChameleonKeyPair& key = small_keypair();
    DeterministicRng rng(12, "exposure");
    MessageScalar e1{sample_below(key.params.q, rng)};
    Randomness r1{sample_below(key.params.q, rng)};
    MessageScalar e2{sample_below(key.params.q, rng)};
    Randomness r2 = cham_adapt(key, e1, r1, e2);
    REQUIRE(r2.r != r1.r);

    BigInt extracted = extract_trapdoor_from_collision(key.public_part(), e1, r1, e2, r2);
    CHECK(extracted == *key.tk);
    CHECK(mod_pow(key.params.g, extracted, key.params.p) == key.hk);
}

TEST_CASE("collisions are only reachable through the trapdoor") {
    SECTION("toy scale: exhaustive search finds them, proving the harness can") {
        ChameleonKeyPair key = toy_keypair();
        ChameleonDigest target = cham_hash(key, MessageScalar{5}, Randomness{7});
        std::size_t found = 0;
        for (std::uint64_t e = 0; e < 11; e++) {
            if (e == 5) continue;
            for (std::uint64_t r = 0; r < 11; r++)
                if (cham_hash(key, MessageScalar{e}, Randomness{r}) == target) found++;
        }
        CHECK(found == 10); // one collision per foreign message scalar
    }
    SECTION("256-bit: a bounded random search finds nothing") {
        DeterministicRng kg(13, "kg256");
        ChameleonKeyPair key = keygen(256, kg);
        ChameleonDigest target = cham_hash(key, MessageScalar{12345}, Randomness{67890});
        DeterministicRng rng(14, "search");
        std::size_t found = 0;
        for (int i = 0; i < 100000; i++) {
            MessageScalar e{sample_below(key.params.q, rng)};
            Randomness r{sample_below(key.params.q, rng)};
            if (e.e == 12345) continue;
            if (cham_hash(key, e, r) == target) found++;
        }
        CHECK(found == 0);
    }
}

TEST_CASE("key files round trip through the canonical text format") {
    namespace fs = std::filesystem;
    const ChameleonKeyPair& key = small_keypair();
    fs::path dir = fs::temp_directory_path() / "redactchain-test-keys";
    fs::create_directories(dir);

    save_key_file(dir / "k.pub", key, false);
    save_key_file(dir / "k.key", key, true);
    ChameleonKeyPair pub = load_key_file(dir / "k.pub");
    ChameleonKeyPair sec = load_key_file(dir / "k.key");
    CHECK(pub == key.public_part());
    CHECK_FALSE(pub.has_trapdoor());
    CHECK(sec == key);
    CHECK(key_fingerprint(pub) == key_fingerprint(key));
    CHECK(key_fingerprint(pub).size() == 16);

    SECTION("tampered key files fail validation on load") {
        std::string text = serialize_key(key, true);
        auto pos = text.find("\nx ");
        REQUIRE(pos != std::string::npos);
        std::string bad = text.substr(0, pos) + "\nx " + to_hex(*key.tk + 1) + "\n";
        CHECK_THROWS_AS(parse_key(bad), ConfigError);
        CHECK_THROWS_AS(parse_key("not a key file"), ParseError);
    }

    SECTION("public serialization of a secretless pair refuses secrets") {
        CHECK_THROWS_AS(serialize_key(key.public_part(), true), AuthorizationError);
    }
    fs::remove_all(dir);
}

TEST_CASE("toy public key fingerprint is stable") {
    // frozen value from the independent canonical-encoding oracle
    CHECK(key_fingerprint(toy_keypair()) == "70fb69ec3cd5c494");
}
