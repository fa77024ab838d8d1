#include "riskmech/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "riskmech/errors.hpp"

namespace riskmech {

double rae_oracle(const OutcomeSet& outcomes, const WeightingFunction& y) {
    validate_outcomes(outcomes);
    std::map<double, double> merged;
    for (const Outcome& o : outcomes) merged[o.value] += o.prob;
    std::vector<std::pair<double, double>> sorted(merged.begin(), merged.end());

    // Base value plus weighted increments: the jump from z_{i-1} to z_i is
    // earned with probability P[Z >= z_i].
    double total = sorted.front().first;
    double tail = 1.0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        tail -= sorted[i - 1].second;
        const double survival = std::clamp(tail, 0.0, 1.0);
        total += y(survival) * (sorted[i].first - sorted[i - 1].first);
    }
    return total;
}

namespace {

// Revenue of a binary-lottery menu against a discrete law by direct buyer
// simulation (mirrors buyer_choice tie-breaking exactly).
double discrete_revenue(const std::vector<BinaryLottery>& options,
                        const std::vector<std::pair<double, double>>& atoms,
                        std::vector<double>& weight_cache) {
    // weight_cache[i] = y(options[i].x) precomputed by the caller.
    double total = 0.0;
    for (const auto& [v, mass] : atoms) {
        double best_u = 0.0;
        double best_pay = 0.0;
        for (std::size_t i = 0; i < options.size(); ++i) {
            const BinaryLottery& L = options[i];
            const double u = v >= L.p
                                 ? weight_cache[i] * (v - L.p)
                                 : (v - L.p) * (1.0 - weight_cache[options.size() + i]);
            const double pay = L.x * L.p;
            if (u > best_u + 1e-12 || (u > best_u - 1e-12 && pay > best_pay)) {
                best_u = u;
                best_pay = pay;
            }
        }
        total += mass * best_pay;
    }
    return total;
}

struct Candidate {
    std::vector<BinaryLottery> options;
    double revenue = 0.0;
};

}  // namespace

OracleResult brute_force_opt(const ValueDistribution& F,
                             const WeightingFunction& y,
                             const OracleBudget& budget) {
    if (!F.is_discrete()) {
        throw PreconditionError("brute_force_opt requires a discrete distribution");
    }
    const auto& atoms = F.atoms();
    if (atoms.size() > 6) {
        throw PreconditionError("brute_force_opt is limited to 6 support points");
    }
    if (budget.x_grid < 2) {
        throw std::invalid_argument("oracle budget needs an x grid of at least 2");
    }

    // Allocation grid {i/G} and a value-derived price grid: support values,
    // midpoints, and extra subdivisions (optimal prices sit at indifference
    // points between adjacent types).
    std::vector<double> x_grid;
    for (int i = 1; i <= budget.x_grid; ++i) {
        x_grid.push_back(static_cast<double>(i) / budget.x_grid);
    }
    std::vector<double> p_grid;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        p_grid.push_back(atoms[i].first);
        if (i + 1 < atoms.size()) {
            for (int j = 1; j <= budget.p_extra; ++j) {
                const double t = static_cast<double>(j) / (budget.p_extra + 1);
                p_grid.push_back(atoms[i].first +
                                 t * (atoms[i + 1].first - atoms[i].first));
            }
        }
    }
    if (atoms.front().first > 0.0) p_grid.push_back(0.5 * atoms.front().first);
    std::sort(p_grid.begin(), p_grid.end());
    p_grid.erase(std::unique(p_grid.begin(), p_grid.end()), p_grid.end());

    const int k = budget.menu_size > 0 ? budget.menu_size
                                       : static_cast<int>(atoms.size());
    long evaluations = 0;

    auto evaluate = [&](const std::vector<BinaryLottery>& options) {
        ++evaluations;
        std::vector<double> cache(2 * options.size());
        for (std::size_t i = 0; i < options.size(); ++i) {
            cache[i] = y(options[i].x);
            cache[options.size() + i] = y(1.0 - options[i].x);
        }
        return discrete_revenue(options, atoms, cache);
    };

    // Beam search: grow menus one option at a time, keeping the best
    // `beam_width` prefixes (options canonically ordered by allocation).
    std::vector<Candidate> beam{{{}, 0.0}};
    Candidate best{{}, 0.0};
    for (int round = 0; round < k; ++round) {
        std::vector<Candidate> grown;
        for (const Candidate& base : beam) {
            const double x_min = base.options.empty() ? 0.0 : base.options.back().x;
            for (double x : x_grid) {
                if (x < x_min) continue;
                for (double p : p_grid) {
                    Candidate next = base;
                    next.options.push_back({x, p});
                    next.revenue = evaluate(next.options);
                    grown.push_back(std::move(next));
                }
            }
        }
        if (grown.empty()) break;
        std::sort(grown.begin(), grown.end(),
                  [](const Candidate& a, const Candidate& b) {
                      return a.revenue > b.revenue;
                  });
        if (static_cast<int>(grown.size()) > budget.beam_width) {
            grown.resize(static_cast<std::size_t>(budget.beam_width));
        }
        if (grown.front().revenue > best.revenue) best = grown.front();
        beam = std::move(grown);
    }

    // Coordinate descent with a shrinking pattern step on the incumbent.
    const double v_max = atoms.back().first;
    double step = 0.25;
    for (int round = 0; round < budget.refine_rounds; ++round) {
        bool improved = false;
        for (std::size_t i = 0; i < best.options.size(); ++i) {
            for (int coord = 0; coord < 2; ++coord) {
                for (double dir : {+1.0, -1.0}) {
                    Candidate trial = best;
                    BinaryLottery& L = trial.options[i];
                    if (coord == 0) {
                        L.x = std::clamp(L.x + dir * step, 0.0, 1.0);
                    } else {
                        L.p = std::clamp(L.p + dir * step * v_max, 0.0, v_max);
                    }
                    trial.revenue = evaluate(trial.options);
                    if (trial.revenue > best.revenue + 1e-15) {
                        best = std::move(trial);
                        improved = true;
                    }
                }
            }
        }
        if (!improved) step *= 0.5;
        if (step < 1e-10) break;
    }

    OracleResult result;
    std::vector<std::pair<double, double>> seen;
    for (const BinaryLottery& L : best.options) {
        if (L.x <= 0.0) continue;
        if (std::find(seen.begin(), seen.end(), std::make_pair(L.x, L.p)) != seen.end()) {
            continue;
        }
        seen.emplace_back(L.x, L.p);
        result.menu.add(L);
    }
    result.revenue = best.revenue;
    result.evaluations = evaluations;
    return result;
}

CounterexampleReport monotonicity_counterexample(double eps) {
    if (!(eps > 0.0 && eps < 0.1)) {
        throw std::invalid_argument("counterexample requires 0 < eps < 0.1");
    }
    CounterexampleReport report;
    report.eps = eps;

    // y1 = max(3x/2 - 1/2, x^2) is exactly the w_eps member at eps = 1/2.
    const WeightingFunction y1 = WeightingFunction::piecewise_linear_quadratic(0.5);
    const WeightingFunction y2 = WeightingFunction::power(2.0);
    const BinaryLottery first{1.0 - 2.0 * eps / 3.0, 0.75};
    const BinaryLottery second{0.5, eps};
    report.menu.add(first);
    report.menu.add(second);

    const ValueDistribution F = ValueDistribution::point_mass(1.0);
    report.revenue_y1 = revenue(report.menu, y1, F);
    report.revenue_y2 = revenue(report.menu, y2, F);
    report.indifference_residual =
        std::abs(y1(first.x) * (1.0 - first.p) - y1(second.x) * (1.0 - second.p));

    WeightingFamily family{{y1, y2}, {}};
    report.family_non_crossing = family_is_non_crossing(family).ok;
    report.family_monotone = false;
    if (report.family_non_crossing) {
        report.family_monotone = family_is_monotone(family).ok;
    }
    return report;
}

}  // namespace riskmech
