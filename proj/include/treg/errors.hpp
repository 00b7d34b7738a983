#pragma once

#include <stdexcept>
#include <string>

namespace treg {

// Invalid parameters detected at construction time (bad p, tau <= 0, even
// kernel size, ...). Never thrown from hot evaluation paths.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Evaluation outside the mathematical domain (e.g. derivative at s <= 0).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation requested for a potential family whose assumptions do not
// license it (e.g. the second-order lower bound for a family whose second
// derivative is not monotone).
class UnsupportedFamilyError : public std::runtime_error {
public:
    explicit UnsupportedFamilyError(const std::string& msg) : std::runtime_error(msg) {}
};

// A verification oracle was asked for a problem shape it cannot certify
// (e.g. the chain DP with a dense measurement matrix).
class UnsupportedOracleError : public std::runtime_error {
public:
    explicit UnsupportedOracleError(const std::string& msg) : std::runtime_error(msg) {}
};

// The normal operator A^T A is singular at some frequency, so the quadratic
// subproblem has no unique solution.
class IllPosedOperatorError : public std::runtime_error {
public:
    explicit IllPosedOperatorError(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal invariant that should be unreachable under valid inputs
// (e.g. a root bracket with equal signs at both ends).
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace treg
