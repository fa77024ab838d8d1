#pragma once

#include <stdexcept>
#include <string>

namespace riskmech {

// Tail of an integral over an unbounded support cannot be brought under the
// quadrature tolerance (e.g. a risk-averse expectation of the unbounded
// equal-revenue distribution under a weighting with positive slope at 0).
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A defining equation has no solution in the admissible range.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// A hypothesis required by a construction does not hold for the supplied
// inputs.
struct HypothesisViolationError : std::invalid_argument {
    explicit HypothesisViolationError(const std::string& what) : std::invalid_argument(what) {}
};

// A documented precondition of an operation was violated.
struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace riskmech
