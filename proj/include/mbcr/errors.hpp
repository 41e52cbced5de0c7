#pragma once

#include <stdexcept>
#include <string>

namespace mbcr {

/// Root of the library's exception hierarchy.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition violation (maps to CLI exit code 1).
class parameter_error : public error {
public:
    using error::error;
};

/// Inversion of the zero element.
class division_by_zero_error : public error {
public:
    using error::error;
};

/// Linear system has no unique solution.
class singular_matrix_error : public error {
public:
    using error::error;
};

/// Stored data violates a structural invariant (maps to CLI exit code 2).
class corruption_error : public error {
public:
    using error::error;
};

/// Filesystem failure (maps to CLI exit code 3).
class io_error : public error {
public:
    using error::error;
};

/// Bound queries outside the d >= k regime.
class unsupported_regime_error : public parameter_error {
public:
    using parameter_error::parameter_error;
};

/// Repair requested for a failure pattern the code family does not cover.
class unsupported_failure_pattern_error : public parameter_error {
public:
    using parameter_error::parameter_error;
};

/// A postcondition that valid inputs can never violate did; indicates a bug.
class internal_error : public error {
public:
    using error::error;
};

/// Malformed text input, with the offending line number.
class spec_parse_error : public parameter_error {
public:
    spec_parse_error(int line, const std::string& what)
        : parameter_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

} // namespace mbcr
