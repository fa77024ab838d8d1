#pragma once

#include <vector>

#include "riskmech/distribution.hpp"
#include "riskmech/weighting.hpp"

namespace riskmech {

struct Outcome {
    double value = 0.0;
    double prob = 0.0;
};

// A finite-outcome random variable; probabilities must be nonnegative and sum
// to 1 within 1e-12.
using OutcomeSet = std::vector<Outcome>;

// Throws std::invalid_argument if the outcome set is malformed.
void validate_outcomes(const OutcomeSet& outcomes);

// Converts a discrete distribution to its outcome set.
OutcomeSet outcomes_of(const ValueDistribution& F);

// Risk-averse expectation of a nonnegative random variable:
// integral of y(1 - F(z)) over the support. Exact closed forms where
// available, adaptive quadrature (tol 1e-8) elsewhere. Throws DivergenceError
// when the tail integral diverges (unbounded F, y with positive slope at 0).
double rae_nonneg(const ValueDistribution& F, const WeightingFunction& y);

// Risk-averse expectation of a general finite-outcome random variable,
// evaluated exactly via the two-sided integral of the weighted survival
// function specialized to step CDFs.
double rae_general(const OutcomeSet& outcomes, const WeightingFunction& y);

// Residual of the additivity axiom: rae(outcomes + c) - rae(outcomes) - c.
double rae_shift_check(const OutcomeSet& outcomes, const WeightingFunction& y,
                       double c);

}  // namespace riskmech
