#include "riskmech/rae.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "riskmech/errors.hpp"
#include "riskmech/lowerbound.hpp"
#include "riskmech/numerics.hpp"

namespace riskmech {

void validate_outcomes(const OutcomeSet& outcomes) {
    if (outcomes.empty()) {
        throw std::invalid_argument("outcome set must be nonempty");
    }
    double total = 0.0;
    for (const Outcome& o : outcomes) {
        if (!std::isfinite(o.value)) {
            throw std::invalid_argument("outcome values must be finite");
        }
        if (o.prob < 0.0) {
            throw std::invalid_argument("outcome probabilities must be nonnegative");
        }
        total += o.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("outcome probabilities must sum to 1 within 1e-12");
    }
}

OutcomeSet outcomes_of(const ValueDistribution& F) {
    if (!F.is_discrete()) {
        throw std::invalid_argument("outcomes_of requires a discrete distribution");
    }
    OutcomeSet out;
    out.reserve(F.atoms().size());
    for (const auto& [v, mass] : F.atoms()) out.push_back({v, mass});
    return out;
}

namespace {

// Sorted distinct values with survival probabilities P[Z > z_i].
struct StepLaw {
    std::vector<double> values;
    std::vector<double> survival;
};

StepLaw make_step_law(const OutcomeSet& outcomes) {
    std::map<double, double> merged;
    for (const Outcome& o : outcomes) merged[o.value] += o.prob;
    StepLaw law;
    law.values.reserve(merged.size());
    law.survival.reserve(merged.size());
    for (const auto& [v, p] : merged) {
        law.values.push_back(v);
        law.survival.push_back(p);  // temporarily the point mass
    }
    // Suffix-sum the masses into survivals P[Z > z_i].
    double acc = 0.0;
    for (std::size_t i = law.values.size(); i-- > 0;) {
        const double mass = law.survival[i];
        law.survival[i] = acc;
        acc += mass;
    }
    return law;
}

// Quadrature of y(1 - F(z)) over [lo, hi] with breakpoints of F and of y
// (mapped through the quantile function) forced as knots.
double weighted_survival_integral(const ValueDistribution& F,
                                  const WeightingFunction& y, double lo,
                                  double hi) {
    std::vector<double> knots = F.knots();
    for (double kink : y.input_kinks()) {
        knots.push_back(F.quantile(1.0 - kink));
    }
    return num::integrate([&](double z) { return y(1.0 - F.cdf(z)); }, lo, hi,
                          1e-8, knots);
}

}  // namespace

double rae_general(const OutcomeSet& outcomes, const WeightingFunction& y) {
    validate_outcomes(outcomes);
    const StepLaw law = make_step_law(outcomes);
    const double z_lo = law.values.front();
    const double z_hi = law.values.back();

    double total = 0.0;
    // Below the smallest value the survival is 1: the positive part
    // contributes the base value, the negative part integrand vanishes.
    if (z_lo > 0.0) total += z_lo;
    // Above the largest value the survival is 0: only the negative part
    // contributes (integrand 1 on [z_hi, 0]).
    if (z_hi < 0.0) total += z_hi;

    for (std::size_t i = 0; i + 1 < law.values.size(); ++i) {
        const double a = law.values[i];
        const double b = law.values[i + 1];
        const double w = y(law.survival[i]);
        const double neg_len = std::min(b, 0.0) - std::min(a, 0.0);
        const double pos_len = std::max(b, 0.0) - std::max(a, 0.0);
        total += w * pos_len - (1.0 - w) * neg_len;
    }
    return total;
}

double rae_shift_check(const OutcomeSet& outcomes, const WeightingFunction& y,
                       double c) {
    OutcomeSet shifted = outcomes;
    for (Outcome& o : shifted) o.value += c;
    return rae_general(shifted, y) - rae_general(outcomes, y) - c;
}

double rae_nonneg(const ValueDistribution& F, const WeightingFunction& y) {
    if (F.support_lo() < 0.0) {
        throw PreconditionError("rae_nonneg requires a distribution on [0,inf)");
    }
    if (F.is_discrete()) {
        return rae_general(outcomes_of(F), y);
    }
    if (y.kind() == WeightKind::Identity) {
        const Expectation e = F.expectation();
        if (e.infinite) {
            throw DivergenceError("risk-averse expectation diverges: risk-neutral tail of an unbounded distribution");
        }
        return e.value;
    }

    switch (F.kind()) {
        case DistKind::Uniform: {
            const double a = F.param_a();
            const double b = F.param_b();
            if (y.kind() == WeightKind::Power) {
                return a + (b - a) / (y.param_k() + 1.0);
            }
            return a + num::integrate(
                           [&](double z) { return y((b - z) / (b - a)); }, a, b,
                           1e-8, [&] {
                               std::vector<double> knots;
                               for (double kink : y.input_kinks()) {
                                   knots.push_back(b - kink * (b - a));
                               }
                               return knots;
                           }());
        }
        case DistKind::EqualRevenueBounded: {
            const double H = F.param_H();
            if (y.kind() == WeightKind::Power) {
                const double k = y.param_k();
                return 1.0 + (k == 1.0 ? std::log(H)
                                       : (1.0 - std::pow(H, 1.0 - k)) / (k - 1.0));
            }
            if (y.kind() == WeightKind::PiecewiseLinearQuadratic) {
                return u_eps(0.0, y.param_eps(), std::log(H));
            }
            std::vector<double> knots{1.0, H};
            for (double kink : y.input_kinks()) {
                if (kink > 1.0 / H && kink < 1.0) knots.push_back(1.0 / kink);
            }
            return 1.0 + num::integrate([&](double z) { return y(1.0 / z); }, 1.0,
                                        H, 1e-8, knots);
        }
        case DistKind::EqualRevenueUnbounded: {
            if (y.kind() == WeightKind::Power && y.param_k() > 1.0) {
                return 1.0 + 1.0 / (y.param_k() - 1.0);
            }
            if (y.kind() == WeightKind::PiecewiseLinearQuadratic &&
                y.param_eps() > 0.0) {
                const double eps = y.param_eps();
                return 2.0 * eps + (1.0 + eps) * std::log(1.0 / eps);
            }
            // The tail integral of y(1/z) converges iff y vanishes on a
            // neighborhood of 0 (piecewise-linear kinds) or starts with zero
            // slope (handled in closed form above).
            const double flat = y.flat_zero_until();
            if (flat > 0.0) {
                std::vector<double> knots;
                for (double kink : y.input_kinks()) {
                    if (kink > flat && kink < 1.0) knots.push_back(1.0 / kink);
                }
                return 1.0 + num::integrate([&](double z) { return y(1.0 / z); },
                                            1.0, 1.0 / flat, 1e-8, knots);
            }
            throw DivergenceError(
                "risk-averse expectation diverges for the unbounded equal-revenue "
                "distribution under " + y.describe());
        }
        case DistKind::TabulatedCdf: {
            const double lo = F.support_lo();
            const double hi = F.support_hi();
            return lo + weighted_survival_integral(F, y, lo, hi);
        }
        default:
            break;
    }
    throw std::logic_error("rae_nonneg: unhandled distribution kind");
}

}  // namespace riskmech
