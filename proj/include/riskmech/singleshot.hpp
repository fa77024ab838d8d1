#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "riskmech/distribution.hpp"
#include "riskmech/rae.hpp"
#include "riskmech/weighting.hpp"

namespace riskmech {

// Sells with probability x and charges p only upon allocation.
struct BinaryLottery {
    double x = 0.0;
    double p = 0.0;
    double expected_payment() const { return x * p; }
};

// A finite-outcome (allocation, payment) pair in normal form: the payment is
// zero whenever the allocation is zero.
class GeneralLottery {
public:
    struct Branch {
        int alloc = 0;       // 0 or 1
        double payment = 0;  // >= 0; must be 0 when alloc == 0
        double prob = 0;
    };

    // Requires normal form; throws std::invalid_argument otherwise.
    explicit GeneralLottery(std::vector<Branch> branches);

    // Canonicalizes arbitrary nonnegative payments by moving unconditional
    // charges into the on-allocation price (expectation preserving). Throws
    // if P[alloc=1] = 0 while unallocated payments are positive.
    static GeneralLottery normalized(std::vector<Branch> branches);

    const std::vector<Branch>& branches() const { return branches_; }
    double alloc_prob() const { return alloc_prob_; }
    double expected_payment() const { return expected_payment_; }

private:
    std::vector<Branch> branches_;
    double alloc_prob_ = 0.0;
    double expected_payment_ = 0.0;
};

using Lottery = std::variant<BinaryLottery, GeneralLottery>;

double expected_payment(const Lottery& L);
double alloc_prob(const Lottery& L);

// An ordered set of menu options; the null option (0,0) is implicit.
class Menu {
public:
    Menu() = default;
    explicit Menu(std::vector<Lottery> options);

    void add(Lottery option);
    const std::vector<Lottery>& options() const { return options_; }
    std::size_t size() const { return options_.size(); }
    bool empty() const { return options_.empty(); }

    // Distinct payment breakpoints of all options (utility kinks in v).
    std::vector<double> payment_breakpoints() const;

private:
    std::vector<Lottery> options_;
};

// Risk-averse utility of a lottery at value v.
double utility(const WeightingFunction& y, double v, const BinaryLottery& L);
double utility(const WeightingFunction& y, double v, const GeneralLottery& L);
double utility(const WeightingFunction& y, double v, const Lottery& L);

struct Choice {
    int index = -1;  // -1 denotes the null option
    double utility = 0.0;
    double expected_payment = 0.0;
    double alloc_prob = 0.0;
};

// Utility-maximizing option; ties within 1e-12 go to the option with the
// larger expected payment. The null option guarantees utility >= 0.
Choice buyer_choice(const WeightingFunction& y, double v, const Menu& menu);

struct ChoiceRegion {
    double lo = 0.0;
    double hi = 0.0;
    Choice choice;
};

// Partition of [lo, hi] into maximal intervals with a constant chosen option.
// Boundaries are exact crossings of the piecewise-linear utility curves.
std::vector<ChoiceRegion> choice_regions(const Menu& menu,
                                         const WeightingFunction& y, double lo,
                                         double hi);

// Expected payment of the buyer's choice under F.
double revenue(const Menu& menu, const WeightingFunction& y,
               const ValueDistribution& F);

struct UtilityCurve {
    std::vector<double> v;
    std::vector<double> u;

    double slope(std::size_t segment) const {
        return (u[segment + 1] - u[segment]) / (v[segment + 1] - v[segment]);
    }
};

// Pointwise maximum of the options' utility curves on an n-point grid
// (explicit options only; the null option is not included).
UtilityCurve utility_curve(const Menu& menu, const WeightingFunction& y,
                           double lo, double hi, int n);

// Maximal convex function below the sampled curve (lower hull of the points),
// re-sampled on the same grid; slopes are clipped to [0, 1].
UtilityCurve lower_convex_envelope(const UtilityCurve& curve);

// Replaces a menu by binary lotteries supporting the lower convex envelope of
// the buyer's value function (the IR-clamped utility curve): at grid value v0
// with envelope value u0 and maximal subgradient m0, emits
// (x, p) = (y^{-1}(m0), v0 - u0/m0). Throws InvalidSubgradient-style
// std::runtime_error if a slope exceeds 1 + 1e-9.
Menu binarize(const Menu& menu, const WeightingFunction& y, double lo,
              double hi, int grid = 1 << 12);

// The binary lottery (P[X=1], E[P]/P[X=1]) that pointwise dominates L.
BinaryLottery dominate_binary(const GeneralLottery& L);

// Max violation of the payment identity
//   y(x(v)) p(v) = y(x(v)) v - integral_0^v y(x(z)) dz
// over the sampled grid. The cumulative integral treats x as a
// right-continuous step rule (exact for menu-induced allocations whose jumps
// land on grid points).
double payment_identity_residual(const std::vector<double>& v_grid,
                                 const std::vector<double>& x_rule,
                                 const std::vector<double>& p_rule,
                                 const WeightingFunction& y);

// The welfare-extraction menu with options (y^{-1}(2^{-(i-1)}), H - i*eps).
// Requires y(1 - eps) <= 2^{-H/eps}; throws HypothesisViolationError.
Menu welfare_extraction_menu(double eps, double H, const WeightingFunction& y);

// Revenue comparison of a fixed binary menu under two weightings from a
// monotone non-crossing pair y1 >= y2. Throws PreconditionError if the
// pair fails the family checks.
struct RevenuePair {
    double rev1 = 0.0;
    double rev2 = 0.0;
};
RevenuePair revenue_monotonicity_check(const Menu& menu,
                                       const WeightingFunction& y1,
                                       const WeightingFunction& y2,
                                       const ValueDistribution& F);

}  // namespace riskmech
