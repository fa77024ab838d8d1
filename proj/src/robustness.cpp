#include "riskmech/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskmech/errors.hpp"
#include "riskmech/numerics.hpp"

namespace riskmech {

double mixture_revenue(const RandomizedMenu& mech, const WeightingFunction& y,
                       const ValueDistribution& F) {
    if (mech.weights.size() != mech.menus.size()) {
        throw std::invalid_argument("mixture_revenue: weight/menu size mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < mech.menus.size(); ++i) {
        total += mech.weights[i] * revenue(mech.menus[i], y, F);
    }
    return total;
}

LogLogResult loglog_mechanism(const WeightingFamily& family,
                              const ValueDistribution& F,
                              const OracleBudget& budget) {
    if (family.members.empty()) {
        throw std::invalid_argument("loglog_mechanism needs a nonempty family");
    }
    if (family.members.size() > 1) {
        if (!family_is_non_crossing(family).ok || !family_is_monotone(family).ok) {
            throw PreconditionError(
                "loglog_mechanism requires a monotone non-crossing family");
        }
    }
    const double H = F.support_hi();
    if (!std::isfinite(H)) {
        throw PreconditionError("loglog_mechanism requires a bounded support");
    }

    LogLogResult result;
    LogLogDiagnostics& diag = result.diagnostics;
    diag.log_h = std::max(std::log(H), 1.0);
    const double lnln = std::log(diag.log_h);
    diag.buckets = std::max(1, static_cast<int>(std::ceil(lnln)));
    diag.guarantee_factor =
        diag.buckets * std::pow(diag.log_h, 1.0 / diag.buckets);

    const double ev = F.expectation().value;
    const int n = diag.buckets;

    // Bucket i (1-based) holds members with OPT in [k_i, k_{i-1}),
    // k_i = E[v] / (ln H)^{i/n}; out-of-range estimates clamp to the ends.
    diag.member_opt.resize(family.members.size());
    diag.member_bucket.resize(family.members.size());
    std::vector<OracleResult> oracle_menus(family.members.size());
    for (std::size_t m = 0; m < family.members.size(); ++m) {
        oracle_menus[m] = brute_force_opt(F, family.members[m], budget);
        diag.member_opt[m] = oracle_menus[m].revenue;
        int bucket = n;
        for (int i = 1; i <= n; ++i) {
            const double k_i = ev / std::pow(diag.log_h, static_cast<double>(i) / n);
            if (diag.member_opt[m] >= k_i) {
                bucket = i;
                break;
            }
        }
        diag.member_bucket[m] = bucket;
    }

    // Least risk-averse member of a non-crossing family bucket = the
    // pointwise-largest; compare at a probe probability with a grid
    // tie-break.
    auto dominates = [&](std::size_t a, std::size_t b) {
        const auto xs = num::linspace(0.0, 1.0, 257);
        for (double x : xs) {
            const double da = family.members[a](x) - family.members[b](x);
            if (std::abs(da) > 1e-12) return da > 0.0;
        }
        return false;
    };

    for (int bucket = 1; bucket <= n; ++bucket) {
        std::size_t rep = family.members.size();
        for (std::size_t m = 0; m < family.members.size(); ++m) {
            if (diag.member_bucket[m] != bucket) continue;
            if (rep == family.members.size() || dominates(m, rep)) rep = m;
        }
        if (rep == family.members.size()) continue;  // empty bucket
        diag.representative.push_back(rep);
        result.mechanism.menus.push_back(oracle_menus[rep].menu);
    }
    const double w = 1.0 / static_cast<double>(result.mechanism.menus.size());
    result.mechanism.weights.assign(result.mechanism.menus.size(), w);
    return result;
}

RobustnessGap myerson_robustness_gap(const WeightingFunction& y,
                                     const ValueDistribution& F,
                                     const OracleBudget& budget) {
    RobustnessGap gap;
    gap.myerson_revenue = F.myerson().revenue;
    gap.oracle_opt = brute_force_opt(F, y, budget).revenue;
    gap.ratio = gap.oracle_opt > 0.0 ? gap.myerson_revenue / gap.oracle_opt : 1.0;
    gap.beta = y.beta_boundedness().beta;
    return gap;
}

BoundLemmaChecks bound_lemma_checks(const Menu& menu, const WeightingFunction& y,
                                    const ValueDistribution& F, double t,
                                    const OracleBudget& budget) {
    for (const Lottery& L : menu.options()) {
        if (!std::holds_alternative<BinaryLottery>(L)) {
            throw PreconditionError("bound_lemma_checks applies to binary-lottery menus");
        }
    }
    const auto regions = choice_regions(menu, y, F.support_lo(), F.support_hi());
    // The allocation rule induced by buyer choice must be nondecreasing.
    for (std::size_t i = 0; i + 1 < regions.size(); ++i) {
        if (regions[i + 1].choice.alloc_prob < regions[i].choice.alloc_prob - 1e-12) {
            throw PreconditionError(
                "bound_lemma_checks: buyer-induced allocation rule is not monotone");
        }
    }

    BoundLemmaChecks out;
    for (const ChoiceRegion& r : regions) {
        const double pay = r.choice.expected_payment;
        const double below = std::clamp(t, r.lo, r.hi);
        out.lhs_small += pay * (F.cdf_continuous(below) - F.cdf_continuous(r.lo));
        out.lhs_large += pay * (F.cdf_continuous(r.hi) - F.cdf_continuous(below));
    }
    for (const auto& [v, mass] : F.atoms()) {
        const double pay = buyer_choice(y, v, menu).expected_payment;
        if (v < t) out.lhs_small += mass * pay;
        else out.lhs_large += mass * pay;
    }

    double opt;
    if (F.is_discrete()) {
        opt = brute_force_opt(F, y, budget).revenue;
    } else {
        opt = std::max(F.myerson().revenue, revenue(menu, y, F));
    }
    const Choice at_t = buyer_choice(y, t, menu);
    out.rhs_small = at_t.alloc_prob * opt;
    const double wt = y(at_t.alloc_prob);
    out.rhs_large = wt > 0.0 ? F.myerson().revenue / wt
                             : std::numeric_limits<double>::infinity();
    return out;
}

}  // namespace riskmech
