#include "riskmech/singleshot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "riskmech/errors.hpp"
#include "riskmech/numerics.hpp"

namespace riskmech {

namespace {
constexpr double kTieTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GeneralLottery::GeneralLottery(std::vector<Branch> branches)
    : branches_(std::move(branches)) {
    if (branches_.empty()) {
        throw std::invalid_argument("general lottery needs at least one branch");
    }
    double total = 0.0;
    for (const Branch& b : branches_) {
        if (b.alloc != 0 && b.alloc != 1) {
            throw std::invalid_argument("allocation must be 0 or 1");
        }
        if (b.payment < 0.0) {
            throw std::invalid_argument("payments must be nonnegative");
        }
        if (b.alloc == 0 && b.payment != 0.0) {
            throw std::invalid_argument(
                "normal form requires zero payment without allocation; use normalized()");
        }
        if (b.prob < 0.0) {
            throw std::invalid_argument("branch probabilities must be nonnegative");
        }
        total += b.prob;
        if (b.alloc == 1) alloc_prob_ += b.prob;
        expected_payment_ += b.prob * b.payment;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("branch probabilities must sum to 1 within 1e-12");
    }
    alloc_prob_ = std::min(alloc_prob_, 1.0);
}

GeneralLottery GeneralLottery::normalized(std::vector<Branch> branches) {
    double alloc_prob = 0.0;
    double unallocated_charge = 0.0;
    for (const Branch& b : branches) {
        if (b.alloc == 1) alloc_prob += b.prob;
        else unallocated_charge += b.prob * b.payment;
    }
    if (unallocated_charge > 0.0) {
        if (alloc_prob <= 0.0) {
            throw std::invalid_argument(
                "cannot normalize: positive payment with zero allocation probability");
        }
        for (Branch& b : branches) {
            if (b.alloc == 1) b.payment += unallocated_charge / alloc_prob;
            else b.payment = 0.0;
        }
    }
    return GeneralLottery(std::move(branches));
}

double expected_payment(const Lottery& L) {
    return std::visit([](const auto& l) { return l.expected_payment(); }, L);
}

double alloc_prob(const Lottery& L) {
    if (const auto* b = std::get_if<BinaryLottery>(&L)) return b->x;
    return std::get<GeneralLottery>(L).alloc_prob();
}

Menu::Menu(std::vector<Lottery> options) : options_(std::move(options)) {}

void Menu::add(Lottery option) { options_.push_back(std::move(option)); }

std::vector<double> Menu::payment_breakpoints() const {
    std::set<double> pts;
    for (const Lottery& L : options_) {
        if (const auto* b = std::get_if<BinaryLottery>(&L)) {
            pts.insert(b->p);
        } else {
            for (const auto& br : std::get<GeneralLottery>(L).branches()) {
                if (br.alloc == 1) pts.insert(br.payment);
            }
        }
    }
    return {pts.begin(), pts.end()};
}

double utility(const WeightingFunction& y, double v, const BinaryLottery& L) {
    // Concave two-piece closed form: slope 1 - y(1-x) below p, y(x) above.
    if (v >= L.p) return y(L.x) * (v - L.p);
    return (v - L.p) * (1.0 - y(1.0 - L.x));
}

double utility(const WeightingFunction& y, double v, const GeneralLottery& L) {
    OutcomeSet outcomes;
    outcomes.reserve(L.branches().size());
    for (const auto& b : L.branches()) {
        outcomes.push_back({v * b.alloc - b.payment, b.prob});
    }
    return rae_general(outcomes, y);
}

double utility(const WeightingFunction& y, double v, const Lottery& L) {
    return std::visit([&](const auto& l) { return utility(y, v, l); }, L);
}

Choice buyer_choice(const WeightingFunction& y, double v, const Menu& menu) {
    Choice best;  // null option: utility 0, payment 0
    for (std::size_t i = 0; i < menu.options().size(); ++i) {
        const Lottery& L = menu.options()[i];
        const double u = utility(y, v, L);
        const double pay = expected_payment(L);
        if (u > best.utility + kTieTol ||
            (u > best.utility - kTieTol && pay > best.expected_payment)) {
            best = {static_cast<int>(i), u, pay, alloc_prob(L)};
        }
    }
    return best;
}

namespace {

// Pairwise crossing points of the (linear-on-this-interval) utility curves,
// computed from endpoint values. Returns interior points of (a, b).
void collect_crossings(const std::vector<double>& ua,
                       const std::vector<double>& ub, double a, double b,
                       std::vector<double>& out) {
    const std::size_t k = ua.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double da = ua[i] - ua[j];
            const double db = ub[i] - ub[j];
            if ((da > 0.0 && db < 0.0) || (da < 0.0 && db > 0.0)) {
                const double t = da / (da - db);
                const double x = a + t * (b - a);
                if (x > a && x < b) out.push_back(x);
            }
        }
    }
}

std::vector<ChoiceRegion> merge_regions(std::vector<ChoiceRegion> regions) {
    std::vector<ChoiceRegion> merged;
    for (ChoiceRegion& r : regions) {
        if (!merged.empty() && merged.back().choice.index == r.choice.index) {
            merged.back().hi = r.hi;
        } else {
            merged.push_back(std::move(r));
        }
    }
    return merged;
}

}  // namespace

std::vector<ChoiceRegion> choice_regions(const Menu& menu,
                                         const WeightingFunction& y, double lo,
                                         double hi) {
    std::vector<ChoiceRegion> regions;
    const bool unbounded = !std::isfinite(hi);
    const std::vector<double> breaks = menu.payment_breakpoints();
    double fin_hi = hi;
    if (unbounded) {
        fin_hi = lo;
        for (double b : breaks) fin_hi = std::max(fin_hi, b);
        fin_hi = std::max(fin_hi, lo) + 1.0;
    }

    std::vector<double> knots{lo, fin_hi};
    for (double b : breaks) {
        if (b > lo && b < fin_hi) knots.push_back(b);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    const std::size_t k = menu.size() + 1;  // options + null
    auto evaluate_all = [&](double v) {
        std::vector<double> u(k, 0.0);
        for (std::size_t i = 0; i < menu.size(); ++i) {
            u[i] = utility(y, v, menu.options()[i]);
        }
        // u[k-1] stays 0: the null option.
        return u;
    };

    for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
        const double a = knots[seg];
        const double b = knots[seg + 1];
        const auto ua = evaluate_all(a);
        const auto ub = evaluate_all(b);
        std::vector<double> cuts{a, b};
        collect_crossings(ua, ub, a, b, cuts);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
            regions.push_back({cuts[c], cuts[c + 1], buyer_choice(y, mid, menu)});
        }
    }

    if (unbounded) {
        // Beyond the last payment every utility is linear; extend with the
        // crossings of those lines.
        const double base = fin_hi;
        const auto u0 = evaluate_all(base);
        const auto u1 = evaluate_all(base + 1.0);
        std::vector<double> cuts;
        const std::size_t kk = u0.size();
        for (std::size_t i = 0; i < kk; ++i) {
            for (std::size_t j = i + 1; j < kk; ++j) {
                const double d0 = u0[i] - u0[j];
                const double d1 = u1[i] - u1[j];
                const double slope = d1 - d0;
                if (slope != 0.0) {
                    const double t = -d0 / slope;
                    if (t > 0.0) cuts.push_back(base + t);
                }
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        double prev = base;
        for (double c : cuts) {
            regions.push_back({prev, c, buyer_choice(y, 0.5 * (prev + c), menu)});
            prev = c;
        }
        regions.push_back({prev, kInf, buyer_choice(y, prev + 1.0, menu)});
    }

    return merge_regions(std::move(regions));
}

double revenue(const Menu& menu, const WeightingFunction& y,
               const ValueDistribution& F) {
    if (menu.empty()) return 0.0;
    const auto regions = choice_regions(menu, y, F.support_lo(), F.support_hi());
    double total = 0.0;
    for (const ChoiceRegion& r : regions) {
        const double mass = F.cdf_continuous(r.hi) - F.cdf_continuous(r.lo);
        if (mass > 0.0) total += mass * r.choice.expected_payment;
    }
    for (const auto& [v, mass] : F.atoms()) {
        total += mass * buyer_choice(y, v, menu).expected_payment;
    }
    return total;
}

UtilityCurve utility_curve(const Menu& menu, const WeightingFunction& y,
                           double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("utility_curve needs n >= 2");
    UtilityCurve curve;
    curve.v = num::linspace(lo, hi, n);
    curve.u.resize(curve.v.size(), 0.0);
    for (std::size_t i = 0; i < curve.v.size(); ++i) {
        double best = -kInf;
        for (const Lottery& L : menu.options()) {
            best = std::max(best, utility(y, curve.v[i], L));
        }
        curve.u[i] = menu.empty() ? 0.0 : best;
    }
    return curve;
}

UtilityCurve lower_convex_envelope(const UtilityCurve& curve) {
    const auto hull = num::lower_hull_indices(curve.v, curve.u);
    UtilityCurve env;
    env.v = curve.v;
    env.u.resize(curve.v.size());
    std::size_t seg = 0;
    for (std::size_t i = 0; i < curve.v.size(); ++i) {
        while (seg + 1 < hull.size() && curve.v[hull[seg + 1]] <= curve.v[i]) ++seg;
        if (seg + 1 >= hull.size()) {
            env.u[i] = curve.u[hull.back()];
            continue;
        }
        const std::size_t a = hull[seg];
        const std::size_t b = hull[seg + 1];
        const double t = (curve.v[i] - curve.v[a]) / (curve.v[b] - curve.v[a]);
        env.u[i] = curve.u[a] + t * (curve.u[b] - curve.u[a]);
    }
    // Clip slopes into [0, 1]: kills floating-point noise only, valid curves
    // already satisfy the subgradient bounds.
    for (std::size_t i = 0; i + 1 < env.v.size(); ++i) {
        const double dv = env.v[i + 1] - env.v[i];
        const double du = std::clamp(env.u[i + 1] - env.u[i], 0.0, dv);
        env.u[i + 1] = env.u[i] + du;
    }
    return env;
}

Menu binarize(const Menu& menu, const WeightingFunction& y, double lo,
              double hi, int grid) {
    // The buyer's value function: utility of the best option, clamped at the
    // null option's 0.
    UtilityCurve curve = utility_curve(menu, y, lo, hi, grid);
    for (double& u : curve.u) u = std::max(u, 0.0);
    const auto hull = num::lower_hull_indices(curve.v, curve.u);

    Menu out;
    std::set<std::pair<long long, long long>> seen;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const std::size_t a = hull[s];
        const std::size_t b = hull[s + 1];
        const double m0 = (curve.u[b] - curve.u[a]) / (curve.v[b] - curve.v[a]);
        if (m0 <= 1e-12) continue;  // null option supports flat pieces
        if (m0 > 1.0 + 1e-9) {
            throw std::runtime_error(
                "binarize: envelope slope exceeds 1; invalid subgradient");
        }
        const double x = y.inverse(std::min(m0, 1.0));
        double p = curve.v[a] - curve.u[a] / m0;
        if (p < 0.0) {
            if (p < -1e-9) {
                throw std::runtime_error("binarize: negative supporting price");
            }
            p = 0.0;
        }
        const auto key = std::make_pair(std::llround(x * 1e12), std::llround(p * 1e12));
        if (seen.insert(key).second) {
            out.add(BinaryLottery{x, p});
        }
    }
    return out;
}

BinaryLottery dominate_binary(const GeneralLottery& L) {
    const double x = L.alloc_prob();
    const double ep = L.expected_payment();
    if (x <= 0.0) {
        if (ep > 0.0) {
            throw std::invalid_argument(
                "dominate_binary: zero allocation with positive expected payment");
        }
        return {0.0, 0.0};
    }
    return {x, ep / x};
}

double payment_identity_residual(const std::vector<double>& v_grid,
                                 const std::vector<double>& x_rule,
                                 const std::vector<double>& p_rule,
                                 const WeightingFunction& y) {
    const std::size_t n = v_grid.size();
    if (x_rule.size() != n || p_rule.size() != n || n < 2) {
        throw std::invalid_argument("payment_identity_residual: size mismatch");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (x_rule[i + 1] < x_rule[i] - 1e-12) {
            throw PreconditionError("payment identity requires a nondecreasing allocation rule");
        }
    }
    // Right-continuous step convention: x is constant on [v_i, v_{i+1});
    // below the grid it extends with x_rule[0].
    double residual = 0.0;
    double cum = y(x_rule[0]) * v_grid[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double w = y(x_rule[i]);
        const double lhs = w * p_rule[i];
        const double rhs = w * v_grid[i] - cum;
        residual = std::max(residual, std::abs(lhs - rhs));
        if (i + 1 < n) cum += w * (v_grid[i + 1] - v_grid[i]);
    }
    return residual;
}

Menu welfare_extraction_menu(double eps, double H, const WeightingFunction& y) {
    if (!(eps > 0.0 && eps < 1.0) || !(H > 1.0)) {
        throw std::invalid_argument("welfare_extraction_menu requires 0 < eps < 1 and H > 1");
    }
    if (y(1.0 - eps) > std::exp2(-H / eps) + 1e-15) {
        throw HypothesisViolationError(
            "welfare extraction requires y(1-eps) <= 2^{-H/eps}");
    }
    const int count = static_cast<int>(std::ceil(H / eps - 1e-9));
    Menu menu;
    for (int i = 1; i <= count; ++i) {
        const double x = y.inverse(std::exp2(-(i - 1)));
        const double p = std::max(H - i * eps, 0.0);
        menu.add(BinaryLottery{x, p});
    }
    return menu;
}

RevenuePair revenue_monotonicity_check(const Menu& menu,
                                       const WeightingFunction& y1,
                                       const WeightingFunction& y2,
                                       const ValueDistribution& F) {
    for (const Lottery& L : menu.options()) {
        if (!std::holds_alternative<BinaryLottery>(L)) {
            throw PreconditionError("revenue monotonicity applies to binary-lottery menus");
        }
    }
    WeightingFamily pair{{y1, y2}, {}};
    if (!family_is_non_crossing(pair).ok) {
        throw PreconditionError("revenue monotonicity requires a non-crossing pair");
    }
    if (!family_is_monotone(pair).ok) {
        throw PreconditionError("revenue monotonicity requires a monotone pair");
    }
    // Orientation: y1 must dominate y2.
    const auto xs = num::linspace(0.0, 1.0, 1 << 10);
    for (double x : xs) {
        if (y1(x) < y2(x) - 1e-12) {
            throw PreconditionError("revenue monotonicity expects y1 >= y2 pointwise");
        }
    }
    return {revenue(menu, y1, F), revenue(menu, y2, F)};
}

}  // namespace riskmech
