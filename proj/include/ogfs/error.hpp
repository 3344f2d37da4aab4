#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ogfs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller: bad shape, bad index, non-finite value.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A malformed dataset file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A malformed group-spec file.
class SpecError : public Error {
public:
    SpecError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace ogfs
