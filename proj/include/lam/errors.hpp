#pragma once

#include <stdexcept>
#include <string>

namespace lam {

/// Input that violates an operation's preconditions (wrong shape, bad id).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A clause family could not be built from the given variables or context.
class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The A1/A2 data admits no completion of the forced bands.
class InfeasibleCase : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A count, witness or certificate did not match what the pipeline requires.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The solver hit its conflict budget. The handle stays usable.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An external solver produced no usable verdict.
class AdapterError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lam
