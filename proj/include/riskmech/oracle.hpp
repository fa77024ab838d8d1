#pragma once

#include "riskmech/rae.hpp"
#include "riskmech/singleshot.hpp"

namespace riskmech {

struct OracleBudget {
    int x_grid = 32;        // allocation grid {i/x_grid}
    int p_extra = 8;        // extra prices between adjacent support values
    int menu_size = 0;      // 0 means |support|
    int beam_width = 64;
    int refine_rounds = 40; // coordinate-descent sweeps
};

// Independent reimplementation of the risk-averse expectation: sort the
// outcomes, start from the base value, add weighted survival increments.
// Serves as ground truth for rae_general.
double rae_oracle(const OutcomeSet& outcomes, const WeightingFunction& y);

struct OracleResult {
    Menu menu;
    double revenue = 0.0;
    long evaluations = 0;
};

// Brute-force lower bound on the optimal menu revenue for a small discrete
// distribution (<= 6 support points): beam search over binary-lottery menus
// on an (x, p) grid, then coordinate-descent refinement. Posted prices are in
// the search space, so the result is always >= Mye(F).
OracleResult brute_force_opt(const ValueDistribution& F,
                             const WeightingFunction& y,
                             const OracleBudget& budget = {});

struct CounterexampleReport {
    double eps = 0.0;
    Menu menu;
    double revenue_y1 = 0.0;         // under max(3x/2 - 1/2, x^2)
    double revenue_y2 = 0.0;         // under x^2
    double indifference_residual = 0.0;
    bool family_non_crossing = false;
    bool family_monotone = false;
};

// Reproduces the two-lottery menu showing that revenue monotonicity fails for
// non-crossing but non-monotone weighting pairs: F = point mass at 1,
// lotteries (1 - 2eps/3, 3/4) and (1/2, eps).
CounterexampleReport monotonicity_counterexample(double eps);

}  // namespace riskmech
