#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "redactchain/bigint.hpp"
#include "redactchain/encoding.hpp"
#include "redactchain/rng.hpp"
#include "redactchain/sha256.hpp"
#include "test_support.hpp"

using namespace redactchain;

TEST_CASE("sha256 matches the FIPS 180-4 vectors") {
    CHECK(hex_encode(sha256(std::string_view(""))) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hex_encode(sha256(std::string_view("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // multi-block input, plus streaming in uneven chunks
    std::string a200(200, 'a');
    CHECK(hex_encode(sha256(a200)) ==
          "c2a908d98f5df987ade41b5fce213067efbcc21ef2240212a41e54b5e7c28ae5");
    Sha256 streaming;
    streaming.update(std::string_view(a200).substr(0, 63));
    streaming.update(std::string_view(a200).substr(63, 65));
    streaming.update(std::string_view(a200).substr(128));
    CHECK(streaming.finalize() == sha256(a200));
}

TEST_CASE("deterministic rng replays its stream and separates domains") {
    DeterministicRng a(42, "x");
    DeterministicRng b(42, "x");
    DeterministicRng c(42, "y");
    DeterministicRng d(43, "x");
    std::array<std::uint8_t, 48> ba{}, bb{}, bc{}, bd{};
    a.fill(ba);
    b.fill(bb);
    c.fill(bc);
    d.fill(bd);
    CHECK(ba == bb);
    CHECK(ba != bc);
    CHECK(ba != bd);
    // chunked reads see the same stream
    DeterministicRng e(42, "x");
    std::array<std::uint8_t, 48> be{};
    e.fill(std::span(be.data(), 7));
    e.fill(std::span(be.data() + 7, 41));
    CHECK(be == ba);
}

TEST_CASE("bigint hex round trip is canonical") {
    CHECK(to_hex(BigInt(0)) == "0");
    CHECK(to_hex(BigInt(255)) == "ff");
    CHECK(to_hex(BigInt(0x1a2b3c)) == "1a2b3c");
    CHECK(bigint_from_hex("1a2b3c") == BigInt(0x1a2b3c));
    CHECK(bigint_from_hex("0") == 0);
    CHECK_THROWS_AS(bigint_from_hex("0ff"), RangeError); // leading zero
    CHECK_THROWS_AS(bigint_from_hex(""), RangeError);
    CHECK_THROWS_AS(bigint_from_hex("xyz"), RangeError);
    BigInt big = (BigInt(1) << 255) + 12345;
    CHECK(bigint_from_hex(to_hex(big)) == big);
}

TEST_CASE("bigint byte codec is minimal big-endian") {
    CHECK(to_bytes_be(BigInt(0)).empty());
    CHECK(to_bytes_be(BigInt(1)) == Bytes{1});
    CHECK(to_bytes_be(BigInt(0x0102)) == Bytes{1, 2});
    CHECK(from_bytes_be(Bytes{1, 2}) == BigInt(0x0102));
    CHECK(from_bytes_be(Bytes{}) == 0);
}

TEST_CASE("modular helpers") {
    CHECK(mod_pow(2, 3, 23) == 8);
    CHECK(mod_pow(2, 0, 23) == 1);
    CHECK(mod_pow(5, 100, 1) == 0);
    CHECK(mod_inverse(3, 11) == 4);
    CHECK(mod_reduce(-4, 11) == 7);
    CHECK_THROWS_AS(mod_inverse(6, 9), RangeError); // gcd 3
    for (int a = 1; a < 11; a++) CHECK(a * static_cast<int>(mod_inverse(a, 11)) % 11 == 1);
}

TEST_CASE("jacobi symbol agrees with Euler's criterion for odd primes") {
    for (BigInt p : {BigInt(23), BigInt(11), BigInt(101)}) {
        for (BigInt a = 1; a < p; a++) {
            BigInt euler = mod_pow(a, (p - 1) / 2, p);
            int expected = euler == 1 ? 1 : -1;
            CHECK(jacobi(a, p) == expected);
        }
    }
    CHECK(jacobi(0, 9) == 0);
    CHECK(jacobi(12, 9) == 0); // shares factor 3
}

TEST_CASE("primality testing") {
    CHECK(is_probable_prime(2));
    CHECK(is_probable_prime(23));
    CHECK(is_probable_prime(1009));
    CHECK(is_probable_prime(BigInt("162259276829213363391578010288127"))); // 2^107 - 1
    CHECK_FALSE(is_probable_prime(1));
    CHECK_FALSE(is_probable_prime(0));
    CHECK_FALSE(is_probable_prime(561));   // Carmichael
    CHECK_FALSE(is_probable_prime(8911));  // Carmichael
    CHECK_FALSE(is_probable_prime(BigInt("162259276829213363391578010288125")));
    // product of two primes near 2^32
    BigInt semi = BigInt(4294967311ull) * BigInt(4294967357ull);
    CHECK_FALSE(is_probable_prime(semi));
}

TEST_CASE("sample_below rejection sampling stays in range and covers the range") {
    DeterministicRng rng(7, "sample");
    std::set<int> seen;
    for (int i = 0; i < 2000; i++) {
        BigInt v = sample_below(11, rng);
        REQUIRE(v >= 0);
        REQUIRE(v < 11);
        seen.insert(static_cast<int>(v));
    }
    CHECK(seen.size() == 11);
    CHECK(sample_below(1, rng) == 0);
    CHECK_THROWS_AS(sample_below(0, rng), RangeError);
}

TEST_CASE("hex codec for byte strings") {
    Bytes b{0x00, 0xff, 0x10};
    CHECK(hex_encode(b) == "00ff10");
    CHECK(hex_decode("00ff10") == b);
    CHECK(hex_decode("").empty());
    CHECK_THROWS_AS(hex_decode("abc"), RangeError);
    CHECK_THROWS_AS(hex_decode("zz"), RangeError);
    CHECK_THROWS_AS(hex_decode_fixed<4>("0011"), RangeError);
    CHECK(hex_decode_fixed<2>("0011") == std::array<std::uint8_t, 2>{0x00, 0x11});
}

TEST_CASE("record line parser enforces shape") {
    RecordLine rec = parse_record_line("f", 1, "tx id=ab payload=");
    CHECK(rec.type == "tx");
    REQUIRE(rec.fields.size() == 2);
    CHECK(rec.fields[0].first == "id");
    CHECK(rec.fields[0].second == "ab");
    CHECK(rec.fields[1].second.empty());
    rec.expect("f", 1, {"id", "payload"});
    CHECK_THROWS_AS(rec.expect("f", 1, {"payload", "id"}), ParseError);
    CHECK_THROWS_AS(rec.expect("f", 1, {"id"}), ParseError);
    CHECK_THROWS_AS(parse_record_line("f", 2, "tx id"), ParseError);
    CHECK_THROWS_AS(parse_record_line("f", 3, ""), ParseError);
}

TEST_CASE("u64 parser rejects junk") {
    CHECK(parse_u64("f", 1, "0") == 0);
    CHECK(parse_u64("f", 1, "18446744073709551615") == UINT64_MAX);
    CHECK_THROWS_AS(parse_u64("f", 1, "01"), ParseError);
    CHECK_THROWS_AS(parse_u64("f", 1, ""), ParseError);
    CHECK_THROWS_AS(parse_u64("f", 1, "1x"), ParseError);
    CHECK_THROWS_AS(parse_u64("f", 1, "18446744073709551616"), ParseError);
}

TEST_CASE("atomic file write replaces content and tolerates stray temp files") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "redactchain-test-io";
    fs::create_directories(dir);
    fs::path target = dir / "file.txt";
    atomic_write_file(target, "first\n");
    atomic_write_file(target, "second\n");
    CHECK(read_text_file(target) == "second\n");
    // an interrupted write leaves only a temp file behind; the target survives
    std::ofstream(dir / "file.txt.tmp.9999") << "garbage";
    CHECK(read_text_file(target) == "second\n");
    fs::remove_all(dir);
}

TEST_CASE("token validation") {
    CHECK(valid_token("node-1"));
    CHECK(valid_token("req_000.a"));
    CHECK_FALSE(valid_token(""));
    CHECK_FALSE(valid_token("a b"));
    CHECK_FALSE(valid_token("x=y"));
    CHECK_FALSE(valid_token(std::string(65, 'a')));
}
