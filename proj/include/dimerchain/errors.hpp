#pragma once

#include <stdexcept>
#include <string>

namespace dimerchain {

// Input violates a documented type invariant or operation contract.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested object exceeds the configured size limits.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// A numerical routine failed to produce a usable result.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operator does not commute with the symmetry the caller relies on.
class SymmetryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two lowest eigenvalues coincide within tolerance; result would be
// convention-dependent unless the caller opts into a selection policy.
class DegenerateGroundStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested measurement branch has vanishing probability.
class ZeroProbabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every branch of a protocol scan failed; no result can be reported.
class ProtocolFailureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration file could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dimerchain
