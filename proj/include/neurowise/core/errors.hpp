#pragma once

#include <stdexcept>
#include <string>

namespace neurowise {

/// Caller broke a documented precondition (empty text, out-of-range level, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Session is not in a state that accepts the request, or a turn is already in flight.
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input is well-formed but statistically degenerate (zero variance, all-zero differences, ...).
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input document: CSV header mismatch, bad cell, invalid config value.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace neurowise
