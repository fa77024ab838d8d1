#include "riskmech/twostage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <span>

#include "riskmech/errors.hpp"
#include "riskmech/lowerbound.hpp"
#include "riskmech/numerics.hpp"
#include "riskmech/rae.hpp"

namespace riskmech {

namespace {
constexpr double kTieTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double second_stage_utility(double p2, const TwoStageSetting& setting) {
    if (!(p2 >= 0.0)) throw std::domain_error("second_stage_utility requires p2 >= 0");
    const ValueDistribution& F2 = setting.F2;
    const WeightingFunction& y = setting.y;
    const double hi = F2.support_hi();
    if (std::isfinite(hi) && p2 >= hi) return 0.0;

    if (F2.is_discrete()) {
        OutcomeSet outcomes;
        for (const auto& [v, mass] : F2.atoms()) {
            outcomes.push_back({std::max(0.0, v - p2), mass});
        }
        return rae_general(outcomes, y);
    }
    if (y.kind() == WeightKind::Identity) {
        // E[max(0, v2 - p2)] = E[v2] - E[min(v2, p2)].
        const Expectation e = F2.expectation();
        if (e.infinite) {
            throw DivergenceError("second-stage utility diverges for a risk-neutral buyer");
        }
        return e.value - F2.expected_min(p2);
    }

    switch (F2.kind()) {
        case DistKind::Uniform: {
            const double a = F2.param_a();
            const double b = F2.param_b();
            if (y.kind() == WeightKind::Power) {
                const double k = y.param_k();
                const double w = b - a;
                if (p2 <= a) {
                    return (a - p2) + w / (k + 1.0);
                }
                return w / (k + 1.0) * std::pow((b - p2) / w, k + 1.0);
            }
            const double lo = std::min(p2, b);
            std::vector<double> knots;
            for (double kink : y.input_kinks()) knots.push_back(b - kink * (b - a));
            const double inside =
                num::integrate([&](double z) { return y((b - z) / (b - a)); },
                               std::max(lo, a), b, 1e-8, knots);
            return inside + std::max(0.0, a - p2);
        }
        case DistKind::EqualRevenueBounded: {
            const double H = F2.param_H();
            const double n = std::log(H);
            if (y.kind() == WeightKind::PiecewiseLinearQuadratic) {
                return u_eps(p2, y.param_eps(), n);
            }
            if (y.kind() == WeightKind::Power) {
                const double k = y.param_k();
                const double lo = std::max(p2, 1.0);
                const double tail =
                    k == 1.0 ? std::log(H / lo)
                             : (std::pow(lo, 1.0 - k) - std::pow(H, 1.0 - k)) / (k - 1.0);
                return tail + std::max(0.0, 1.0 - p2);
            }
            std::vector<double> knots{1.0};
            for (double kink : y.input_kinks()) {
                if (kink > 1.0 / H && kink < 1.0) knots.push_back(1.0 / kink);
            }
            const double lo = std::max(p2, 1.0);
            const double inside = num::integrate(
                [&](double z) { return y(1.0 / z); }, lo, H, 1e-8, knots);
            return inside + std::max(0.0, 1.0 - p2);
        }
        case DistKind::EqualRevenueUnbounded: {
            // U(p2) = rae(v2) - integral over [0, p2]; reuse the tail logic.
            const double whole = rae_nonneg(F2, y);  // throws DivergenceError
            std::vector<double> knots{1.0};
            for (double kink : y.input_kinks()) {
                if (kink < 1.0 && 1.0 / kink > 1.0) knots.push_back(1.0 / kink);
            }
            const double lo = std::min(p2, 1.0);
            const double head =
                lo + num::integrate([&](double z) { return y(1.0 / z); },
                                    std::max(1.0, lo), std::max(1.0, p2), 1e-8, knots);
            return whole - head;
        }
        case DistKind::TabulatedCdf: {
            const double b = F2.support_hi();
            std::vector<double> knots = F2.knots();
            for (double kink : y.input_kinks()) {
                knots.push_back(F2.quantile(1.0 - kink));
            }
            return num::integrate([&](double z) { return y(1.0 - F2.cdf(z)); },
                                  p2, b, 1e-8, knots);
        }
        default:
            break;
    }
    throw std::logic_error("second_stage_utility: unhandled distribution kind");
}

double second_stage_utility_inverse(double target, const TwoStageSetting& setting) {
    const double u0 = second_stage_utility(0.0, setting);
    if (target > u0 + 1e-12 || target < -1e-12) {
        throw std::domain_error("second_stage_utility_inverse: target outside [0, U(0)]");
    }
    double hi = setting.F2.support_hi();
    if (!std::isfinite(hi)) {
        hi = 1.0;
        while (second_stage_utility(hi, setting) > target) hi *= 2.0;
    }
    // U is nonincreasing in p2; find the smallest price reaching the target.
    return num::bisect_first_true(
        [&](double p2) { return second_stage_utility(p2, setting) <= target; },
        0.0, hi, 1e-10);
}

PostedPriceMenu::PostedPriceMenu(std::vector<Option> options)
    : options_(std::move(options)) {
    for (const Option& o : options_) {
        if (!(o.p >= 0.0) || !(o.l >= 0.0)) {
            throw std::invalid_argument("posted-price options must be nonnegative");
        }
    }
    std::stable_sort(options_.begin(), options_.end(),
                     [](const Option& a, const Option& b) { return a.p < b.p; });
}

PostedPriceMenu PostedPriceMenu::functional(Schedule schedule, int resolution) {
    if (!(schedule.p_hi >= schedule.p_lo) || resolution < 2) {
        throw std::invalid_argument("functional menu needs p_hi >= p_lo and resolution >= 2");
    }
    std::vector<Option> options;
    const auto ps = num::linspace(schedule.p_lo, schedule.p_hi, resolution);
    options.reserve(ps.size());
    for (double p : ps) options.push_back({p, std::max(0.0, schedule.l_of_p(p))});
    PostedPriceMenu menu(std::move(options));
    menu.schedule_ = std::move(schedule);
    return menu;
}

double effective_price(double p, const PostedPriceMenu& menu,
                       const TwoStageSetting& setting) {
    for (const auto& o : menu.options()) {
        if (o.p == p) return o.p - second_stage_utility(o.l, setting);
    }
    throw std::invalid_argument("effective_price: price not present in the menu");
}

namespace {

struct Materialized {
    std::vector<PostedPriceMenu::Option> options;  // sorted by p
    std::vector<double> effective;
    double outside_utility = 0.0;
};

Materialized materialize(const PostedPriceMenu& menu, const TwoStageSetting& setting) {
    Materialized m;
    m.options = menu.options();
    m.effective.reserve(m.options.size());
    for (const auto& o : m.options) {
        m.effective.push_back(o.p - second_stage_utility(o.l, setting));
    }
    m.outside_utility =
        setting.default_second_price
            ? second_stage_utility(*setting.default_second_price, setting)
            : 0.0;
    return m;
}

TwoStageChoice choose(const Materialized& m, double v1) {
    TwoStageChoice best;
    bool found = false;
    for (std::size_t i = 0; i < m.options.size(); ++i) {
        const auto& o = m.options[i];
        if (o.p > v1) break;  // options are sorted by price
        // Participation: utility v1 - eff must be at least the outside value.
        if (v1 - m.effective[i] < m.outside_utility - kTieTol) continue;
        if (!found || m.effective[i] < best.effective - kTieTol ||
            (m.effective[i] < best.effective + kTieTol && o.p > best.p)) {
            best = {true, o.p, o.l, found ? std::min(best.effective, m.effective[i])
                                          : m.effective[i]};
            found = true;
        }
    }
    return best;
}

}  // namespace

double outside_utility(const TwoStageSetting& setting) {
    return setting.default_second_price
               ? second_stage_utility(*setting.default_second_price, setting)
               : 0.0;
}

// Continuum choice for a schedule whose options all carry the same effective
// price: the buyer takes the largest affordable price.
TwoStageChoice schedule_choice(const PostedPriceMenu::Schedule& s,
                               const TwoStageSetting& setting, double v1) {
    const double eff = s.p_lo - second_stage_utility(s.l_of_p(s.p_lo), setting);
    TwoStageChoice out;
    if (v1 < s.p_lo || v1 - eff < outside_utility(setting) - kTieTol) {
        return out;
    }
    const double p = std::min(v1, s.p_hi);
    return {true, p, s.l_of_p(p), eff};
}

// Expectation over F of g, with g constant at and beyond v_const.
double expect_over(const ValueDistribution& F,
                   const std::function<double(double)>& g, double v_const,
                   std::span<const double> knots) {
    double total = 0.0;
    for (const auto& [v, mass] : F.atoms()) total += mass * g(v);
    const double lo = F.support_lo();
    const double cut = std::max(lo, std::min(v_const, F.support_hi()));
    std::vector<double> all_knots(knots.begin(), knots.end());
    for (double k : F.knots()) all_knots.push_back(k);
    total += num::integrate([&](double v) { return g(v) * F.density(v); }, lo,
                            cut, 1e-9, all_knots);
    total += g(cut) * (F.cdf_continuous(F.support_hi()) - F.cdf_continuous(cut));
    return total;
}

PostedPriceMenu prune_dominated(const PostedPriceMenu& menu,
                                const TwoStageSetting& setting) {
    const Materialized m = materialize(menu, setting);
    std::vector<PostedPriceMenu::Option> kept;
    double running_min = kInf;
    for (std::size_t i = 0; i < m.options.size(); ++i) {
        // An option is dominated iff some cheaper option has a strictly
        // smaller effective price (an equal one loses the largest-p tie).
        if (m.effective[i] <= running_min + kTieTol) {
            kept.push_back(m.options[i]);
            running_min = std::min(running_min, m.effective[i]);
        }
    }
    return PostedPriceMenu(std::move(kept));
}

TwoStageChoice buyer_choice_two_stage(double v1, const PostedPriceMenu& menu,
                                      const TwoStageSetting& setting) {
    if (menu.schedule() && menu.schedule()->uniform_effective) {
        return schedule_choice(*menu.schedule(), setting, v1);
    }
    return choose(materialize(menu, setting), v1);
}

TwoStageRevenue revenue_two_stage(const PostedPriceMenu& menu,
                                  const TwoStageSetting& setting) {
    TwoStageRevenue out;
    if (menu.schedule() && menu.schedule()->uniform_effective) {
        // Exact continuum evaluation: the buyer pays min(v1, p_hi).
        const auto& s = *menu.schedule();
        const auto stage2_of =
            [&](double q) { return q * setting.F2.prob_geq(q); };
        const double default_rev = setting.default_second_price
                                       ? stage2_of(*setting.default_second_price)
                                       : 0.0;
        const std::vector<double> knots{s.p_lo, s.p_hi};
        out.stage1 = expect_over(
            setting.F1,
            [&](double v1) {
                return schedule_choice(s, setting, v1).purchased
                           ? std::min(v1, s.p_hi)
                           : 0.0;
            },
            s.p_hi, knots);
        out.stage2 = expect_over(
            setting.F1,
            [&](double v1) {
                const TwoStageChoice c = schedule_choice(s, setting, v1);
                return c.purchased ? stage2_of(c.l) : default_rev;
            },
            s.p_hi, knots);
        // The common no-default case collapses stage 1 to a closed form.
        if (!setting.default_second_price && s.p_lo == 0.0 &&
            std::abs(s.p_lo - second_stage_utility(s.l_of_p(s.p_lo), setting)) <
                1e-9) {
            out.stage1 = setting.F1.expected_min(s.p_hi);
        }
        out.total = out.stage1 + out.stage2;
        return out;
    }
    const Materialized m = materialize(menu, setting);
    const ValueDistribution& F1 = setting.F1;

    // Stage-2 revenue from a posted price q: q * P[v2 >= q] (atoms included:
    // an indifferent buyer purchases).
    auto stage2_rev = [&](double q) { return q * setting.F2.prob_geq(q); };
    const double default_rev =
        setting.default_second_price ? stage2_rev(*setting.default_second_price) : 0.0;

    // The chosen option is a step function of v1: it can change only where an
    // option becomes affordable (v1 = p) or participation activates
    // (v1 = eff + outside). Sweep those thresholds.
    std::vector<double> thresholds{F1.support_lo()};
    for (std::size_t i = 0; i < m.options.size(); ++i) {
        thresholds.push_back(m.options[i].p);
        thresholds.push_back(m.effective[i] + m.outside_utility);
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                     thresholds.end());

    const double lo = F1.support_lo();
    const double hi = F1.support_hi();
    std::vector<double> cuts;
    for (double t : thresholds) {
        if (t >= lo && (t <= hi || !std::isfinite(hi))) cuts.push_back(t);
    }
    if (cuts.empty() || cuts.front() > lo) cuts.insert(cuts.begin(), lo);
    const double last = std::isfinite(hi) ? hi : cuts.back() + 1.0;
    if (cuts.back() < last) cuts.push_back(last);

    auto cont_cdf = [&](double v) { return F1.cdf_continuous(v); };

    auto accumulate = [&](const TwoStageChoice& choice, double mass) {
        if (mass <= 0.0) return;
        if (choice.purchased) {
            out.stage1 += mass * choice.p;
            out.stage2 += mass * stage2_rev(choice.l);
        } else {
            out.stage2 += mass * default_rev;
        }
    };

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const double hi_mass = std::isfinite(hi) || i + 2 < cuts.size()
                                   ? cont_cdf(b)
                                   : cont_cdf(kInf);
        const double mass = hi_mass - cont_cdf(a);
        accumulate(choose(m, 0.5 * (a + b)), mass);
    }
    if (!std::isfinite(hi)) {
        // Tail beyond the last threshold: constant choice.
        // (handled above by extending the last interval's mass to infinity)
    }
    for (const auto& [v, mass] : F1.atoms()) {
        accumulate(choose(m, v), mass);
    }
    out.total = out.stage1 + out.stage2;
    return out;
}

double upper_bound(const TwoStageSetting& setting) {
    const double mye1 = setting.F1.myerson().revenue;
    const double mye2 = setting.F2.myerson().revenue;
    const double u0 = second_stage_utility(0.0, setting);
    return mye1 + mye2 + setting.F1.expected_min(u0);
}

PostedPriceMenu half_approx_menu(const TwoStageSetting& setting) {
    const double u0 = second_stage_utility(0.0, setting);
    if (!(u0 > 0.0)) {
        throw std::invalid_argument("half_approx_menu: U(0) = 0, schedule degenerates");
    }
    PostedPriceMenu::Schedule schedule;
    schedule.l_of_p = [setting](double p) {
        return second_stage_utility_inverse(p, setting);
    };
    schedule.p_lo = 0.0;
    schedule.p_hi = u0;
    schedule.uniform_effective = true;
    PostedPriceMenu menu = PostedPriceMenu::functional(schedule);
    return menu;
}

BestTwoStage best_two_stage(const TwoStageSetting& setting) {
    // Candidate A: per-stage Myerson prices; the stand-alone second-stage
    // price is also posted to non-purchasers.
    const auto mye1 = setting.F1.myerson();
    const auto mye2 = setting.F2.myerson();
    TwoStageSetting setting_a = setting;
    setting_a.default_second_price = mye2.price;
    PostedPriceMenu menu_a(std::vector<PostedPriceMenu::Option>{{mye1.price, mye2.price}});
    const TwoStageRevenue rev_a = revenue_two_stage(menu_a, setting_a);

    // Candidate B: the zero-effective-price schedule; no default offer, so
    // stage-1 revenue is exactly E[min(v1, U(0))].
    TwoStageSetting setting_b = setting;
    setting_b.default_second_price.reset();
    const double u0 = second_stage_utility(0.0, setting);
    if (u0 > 0.0) {
        PostedPriceMenu menu_b = half_approx_menu(setting_b);
        const TwoStageRevenue rev_b = revenue_two_stage(menu_b, setting_b);
        if (rev_b.total > rev_a.total) {
            return BestTwoStage{std::move(menu_b), rev_b, true, std::move(setting_b)};
        }
    }
    return BestTwoStage{std::move(menu_a), rev_a, false, std::move(setting_a)};
}

double composite_option_utility(double v1, const CompositeOption& option,
                                const TwoStageSetting& setting) {
    if (!setting.F2.is_discrete()) {
        throw PreconditionError("composite_option_utility requires a discrete F2");
    }
    if (!(option.x >= 0.0 && option.x <= 1.0) || !(option.p >= 0.0)) {
        throw std::invalid_argument("composite option requires x in [0,1] and p >= 0");
    }
    // Joint outcomes over (item-1 allocation) x (second-stage value); the
    // second-stage ex-post utility is v2 for a giveaway, max(0, v2 - p2) for
    // a posted price.
    auto stage2_utility = [&](double v2) {
        switch (option.mechanism) {
            case CompositeOption::SecondStage::FreeGiveaway:
                return v2;
            case CompositeOption::SecondStage::PostedPrice:
                return std::max(0.0, v2 - option.p2);
        }
        throw std::invalid_argument("unsupported second-stage mechanism");
    };
    OutcomeSet outcomes;
    for (const auto& [v2, mass] : setting.F2.atoms()) {
        const double u2 = stage2_utility(v2);
        if (option.x > 0.0) outcomes.push_back({v1 - option.p + u2, option.x * mass});
        if (option.x < 1.0) outcomes.push_back({u2, (1.0 - option.x) * mass});
    }
    return rae_general(outcomes, setting.y);
}

}  // namespace riskmech
