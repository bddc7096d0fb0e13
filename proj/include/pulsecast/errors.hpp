#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pulsecast {

// Bad caller-supplied parameters (out-of-range n, empty inputs, unknown ids).
class argument_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A series is too short for the requested computation.
class length_error : public std::length_error {
public:
    using std::length_error::length_error;
};

// Input data violates a domain invariant (non-positive price, unordered dates).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computed value left its domain (e.g. a non-positive forecast price).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Failure while reading an input file. line() is 1-based, 0 when not tied to a line.
class ingest_error : public std::runtime_error {
public:
    ingest_error(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace pulsecast
