#pragma once

#include <stdexcept>
#include <string>

namespace tcmax {

/// Malformed scenario document (wrong type, missing field).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A market invariant does not hold; the message names it.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Children probabilities do not add up to their parent's.
class ProbabilityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A size guard (node budget, double-description budget) was hit.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation precondition on mathematical inputs failed (e.g. claim not attainable,
/// market has arbitrage).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A self-check failed. Indicates a bug, never a user error.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace tcmax
