#ifndef REDACTCHAIN_ERRORS_HPP
#define REDACTCHAIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace redactchain {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments, unsupported parameters, malformed configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed file content. Carries "path:line: message" in what().
class ParseError : public ConfigError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& message)
        : ConfigError(path + ":" + std::to_string(line) + ": " + message),
          path_(path), line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

// A scalar outside its domain (e or r not in [0, q-1], r not a residue, ...).
class RangeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Parameter search exhausted its attempt budget.
class GenerationError : public Error {
public:
    using Error::Error;
};

// Caller lacks the trapdoor / approval / credential the operation requires.
class AuthorizationError : public Error {
public:
    using Error::Error;
};

// An operation would have produced (or detected) an inconsistent chain state.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Lookup of a transaction, block or request that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

} // namespace redactchain

#endif
