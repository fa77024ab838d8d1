#pragma once

#include "riskmech/oracle.hpp"
#include "riskmech/singleshot.hpp"

namespace riskmech {

// A mixture of menus offered with the given probabilities; revenue is the
// exact mixture average.
struct RandomizedMenu {
    std::vector<double> weights;
    std::vector<Menu> menus;
};

double mixture_revenue(const RandomizedMenu& mech, const WeightingFunction& y,
                       const ValueDistribution& F);

struct LogLogDiagnostics {
    int buckets = 0;                 // n = ceil(ln ln H)
    double log_h = 0.0;              // clamped at 1
    double guarantee_factor = 0.0;   // n * (ln H)^{1/n}
    std::vector<double> member_opt;  // oracle OPT per family member
    std::vector<int> member_bucket;
    std::vector<std::size_t> representative;  // member index per used bucket
};

struct LogLogResult {
    RandomizedMenu mechanism;
    LogLogDiagnostics diagnostics;
};

// The bucket-and-randomize construction: partitions a monotone non-crossing
// family by oracle-estimated optimal revenue into ceil(ln ln H) buckets,
// takes the least risk-averse member of each nonempty bucket, and mixes the
// oracle-optimal menus uniformly.
LogLogResult loglog_mechanism(const WeightingFamily& family,
                              const ValueDistribution& F,
                              const OracleBudget& budget = {});

struct RobustnessGap {
    double myerson_revenue = 0.0;
    double oracle_opt = 0.0;
    double ratio = 0.0;  // Mye(F) / OPT
    double beta = 0.0;   // boundedness of the weighting
};

// Ratio Mye(F) / brute_force_opt(y, F); boundedness guarantees
// ratio >= beta(y) up to oracle slack.
RobustnessGap myerson_robustness_gap(const WeightingFunction& y,
                                     const ValueDistribution& F,
                                     const OracleBudget& budget = {});

struct BoundLemmaChecks {
    double lhs_small = 0.0;  // expected payment collected below t
    double rhs_small = 0.0;  // x(t) * OPT
    double lhs_large = 0.0;  // expected payment collected at or above t
    double rhs_large = 0.0;  // Mye(F) / y(x(t))
};

// Evaluates both menu-decomposition bounds for a binary-lottery menu. OPT is
// the oracle value for discrete F; for continuous F the conservative lower
// bound max(Mye(F), revenue of the menu) stands in.
BoundLemmaChecks bound_lemma_checks(const Menu& menu, const WeightingFunction& y,
                                    const ValueDistribution& F, double t,
                                    const OracleBudget& budget = {});

}  // namespace riskmech
