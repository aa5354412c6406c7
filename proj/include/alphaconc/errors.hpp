#pragma once

#include <stdexcept>
#include <string>

namespace alphaconc {

/// Raised when an operation is asked for more memory than its configured budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an internal invariant fails (a bug, not bad input).
class DefectError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised for malformed configuration or input files; carries the offending location.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::string key = {})
        : std::runtime_error(what), line_(line), key_(std::move(key)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

}  // namespace alphaconc
