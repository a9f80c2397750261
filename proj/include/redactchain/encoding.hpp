#ifndef REDACTCHAIN_ENCODING_HPP
#define REDACTCHAIN_ENCODING_HPP

// Canonical encodings shared by every on-disk format and every hashed
// structure:
//   * binary: length-prefixed fields (u32 big-endian length, then bytes),
//     integers big-endian minimal, fixed field order;
//   * text files: one record per line, `type key=value ...`, hex lowercase,
//     a format-version header line first.
// Plus atomic file replacement and the advisory lock the CLI uses.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "redactchain/bigint.hpp"
#include "redactchain/errors.hpp"

namespace redactchain {

inline std::string hex_encode(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline std::string hex_encode(const Bytes& bytes) {
    return hex_encode(std::span<const std::uint8_t>(bytes.data(), bytes.size()));
}

template <std::size_t N>
std::string hex_encode(const std::array<std::uint8_t, N>& bytes) {
    return hex_encode(std::span<const std::uint8_t>(bytes.data(), N));
}

inline Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) throw RangeError("hex string has odd length");
    auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a') + 10;
        throw RangeError(std::string("bad hex digit '") + c + "'");
    };
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); i++)
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> hex_decode_fixed(std::string_view hex) {
    Bytes b = hex_decode(hex);
    if (b.size() != N)
        throw RangeError("expected " + std::to_string(N) + " bytes, got " + std::to_string(b.size()));
    std::array<std::uint8_t, N> out{};
    std::copy(b.begin(), b.end(), out.begin());
    return out;
}

// --- canonical binary field encoding -------------------------------------

inline void append_u32_be(Bytes& out, std::uint32_t v) {
    for (int i = 3; i >= 0; i--) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void append_field(Bytes& out, std::span<const std::uint8_t> bytes) {
    append_u32_be(out, static_cast<std::uint32_t>(bytes.size()));
    out.insert(out.end(), bytes.begin(), bytes.end());
}

inline void append_field(Bytes& out, const Bytes& bytes) {
    append_field(out, std::span<const std::uint8_t>(bytes.data(), bytes.size()));
}

template <std::size_t N>
void append_field(Bytes& out, const std::array<std::uint8_t, N>& bytes) {
    append_field(out, std::span<const std::uint8_t>(bytes.data(), N));
}

inline void append_u64_field(Bytes& out, std::uint64_t v) {
    Bytes be(8);
    for (int i = 0; i < 8; i++) be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    append_field(out, be);
}

inline void append_bigint_field(Bytes& out, const BigInt& v) {
    append_field(out, to_bytes_be(v));
}

// --- text record files ----------------------------------------------------

// Names that may appear as bare tokens in record files (node ids, request
// ids, ...). Keeps the line format unambiguous.
inline bool valid_token(std::string_view s) {
    if (s.empty() || s.size() > 64) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

struct RecordLine {
    std::string type;
    std::vector<std::pair<std::string, std::string>> fields; // in file order

    // Enforces the exact canonical field set and order.
    void expect(const std::string& path, std::size_t line,
                std::initializer_list<const char*> names) const {
        if (fields.size() != names.size())
            throw ParseError(path, line, "record '" + type + "' expects " +
                             std::to_string(names.size()) + " fields, got " +
                             std::to_string(fields.size()));
        std::size_t i = 0;
        for (const char* name : names) {
            if (fields[i].first != name)
                throw ParseError(path, line, "record '" + type + "' field " +
                                 std::to_string(i + 1) + " must be '" + name +
                                 "', got '" + fields[i].first + "'");
            i++;
        }
    }

    const std::string& value(std::size_t i) const { return fields[i].second; }
};

inline RecordLine parse_record_line(const std::string& path, std::size_t line_no,
                                    std::string_view line) {
    RecordLine rec;
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
        if (pos >= line.size()) return {};
        std::size_t sp = line.find(' ', pos);
        std::string_view tok = (sp == std::string_view::npos)
                                   ? line.substr(pos)
                                   : line.substr(pos, sp - pos);
        pos = (sp == std::string_view::npos) ? line.size() : sp + 1;
        return tok;
    };
    std::string_view type = next_token();
    if (type.empty()) throw ParseError(path, line_no, "empty record");
    rec.type = std::string(type);
    while (pos < line.size()) {
        std::string_view tok = next_token();
        std::size_t eq = tok.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path, line_no, "expected key=value, got '" + std::string(tok) + "'");
        rec.fields.emplace_back(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
    }
    return rec;
}

inline std::uint64_t parse_u64(const std::string& path, std::size_t line, const std::string& s) {
    if (s.empty() || (s.size() > 1 && s[0] == '0'))
        throw ParseError(path, line, "bad integer '" + s + "'");
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw ParseError(path, line, "bad integer '" + s + "'");
        if (v > (UINT64_MAX - static_cast<std::uint64_t>(c - '0')) / 10)
            throw ParseError(path, line, "integer overflow in '" + s + "'");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

// --- files ------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Write-to-temp then rename, so a crash mid-write never corrupts the target.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ConfigError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError("cannot replace " + path.string() + ": " + ec.message());
    }
}

// Advisory lock keyed on "<target>.lock". Released on destruction or exit.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& target) : path_(target.string() + ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw ConfigError("cannot open lock file " + path_);
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw ConfigError("another invocation holds the lock on " + path_);
        }
    }

    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    std::string path_;
    int fd_ = -1;
};

} // namespace redactchain

#endif
