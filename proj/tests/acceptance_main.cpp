// Acceptance suite: runs every advertised guarantee end to end and prints one
// pass/fail line per criterion. Exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "riskmech/experiments.hpp"
#include "riskmech/lowerbound.hpp"
#include "riskmech/numerics.hpp"
#include "riskmech/oracle.hpp"
#include "riskmech/robustness.hpp"
#include "riskmech/serialization.hpp"
#include "riskmech/twostage.hpp"

using namespace riskmech;

namespace {

int failures = 0;
std::chrono::steady_clock::time_point t0;

void start() { t0 = std::chrono::steady_clock::now(); }

void report(int criterion, bool pass, const std::string& detail) {
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    std::printf("[%s] criterion %2d: %s (%.0f ms)\n", pass ? "PASS" : "FAIL",
                criterion, detail.c_str(), ms);
    if (!pass) ++failures;
}

void info(const std::string& detail) {
    std::printf("       note: %s\n", detail.c_str());
}

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

ValueDistribution random_discrete(std::mt19937_64& rng, int max_points,
                                  double v_lo, double v_hi) {
    std::uniform_int_distribution<int> count(2, max_points);
    std::uniform_real_distribution<double> value(v_lo, v_hi);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    const int n = count(rng);
    std::vector<double> values, probs;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        values.push_back(value(rng));
        probs.push_back(weight(rng));
        total += probs.back();
    }
    for (auto& p : probs) p /= total;
    double sum = 0.0;
    for (double p : probs) sum += p;
    probs.front() += 1.0 - sum;
    return ValueDistribution::discrete(values, probs);
}

ValueDistribution random_setting_distribution(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (kind(rng)) {
        case 0: return ValueDistribution::uniform(0.0, 0.5 + 2.0 * unit(rng));
        case 1: return random_discrete(rng, 5, 0.2, 3.0);
        default: return ValueDistribution::equal_revenue_bounded(2.0 + 20.0 * unit(rng));
    }
}

WeightingFunction random_setting_weighting(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < 0.5) return WeightingFunction::power(1.0 + 5.0 * unit(rng));
    return WeightingFunction::piecewise_linear_quadratic(0.05 + 0.95 * unit(rng));
}

OutcomeSet random_outcomes(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size(1, 8);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    std::uniform_real_distribution<double> weight(0.01, 1.0);
    const int n = size(rng);
    OutcomeSet outcomes(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& o : outcomes) {
        o.value = value(rng);
        o.prob = weight(rng);
        total += o.prob;
    }
    for (auto& o : outcomes) o.prob /= total;
    double sum = 0.0;
    for (const auto& o : outcomes) sum += o.prob;
    outcomes.front().prob += 1.0 - sum;
    return outcomes;
}

Menu random_general_menu(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> menu_size(1, 4);
    std::uniform_int_distribution<int> branches(2, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> price(0.0, 2.0);
    Menu menu;
    const int k = menu_size(rng);
    for (int i = 0; i < k; ++i) {
        const int b = branches(rng);
        std::vector<GeneralLottery::Branch> br(static_cast<std::size_t>(b));
        double total = 0.0;
        for (auto& x : br) {
            x.alloc = unit(rng) < 0.6 ? 1 : 0;
            x.payment = x.alloc ? price(rng) : 0.0;
            x.prob = 0.05 + unit(rng);
            total += x.prob;
        }
        for (auto& x : br) x.prob /= total;
        double sum = 0.0;
        for (const auto& x : br) sum += x.prob;
        br.front().prob += 1.0 - sum;
        menu.add(GeneralLottery(std::move(br)));
    }
    return menu;
}

// ---------------------------------------------------------------------------

void criterion_1() {
    start();
    Menu menu;
    menu.add(BinaryLottery{1.0, 0.5});
    menu.add(BinaryLottery{0.5, 0.375});
    const auto y = WeightingFunction::power(2);
    const auto F = ValueDistribution::uniform(0, 1);
    const double rev = revenue(menu, y, F);
    const auto regions = choice_regions(menu, y, 0.0, 1.0);
    double threshold = -1.0;
    for (std::size_t i = 0; i + 1 < regions.size(); ++i) {
        if (regions[i].choice.index == 1 && regions[i + 1].choice.index == 0) {
            threshold = regions[i].hi;
        }
    }
    const double elapsed_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
    const bool pass = std::abs(rev - 25.0 / 96.0) <= 1e-9 &&
                      std::abs(threshold - 13.0 / 24.0) <= 1e-10 &&
                      elapsed_ms < 1000.0;
    report(1, pass,
           "worked single-shot menu: revenue " + num(rev) + " vs 25/96, threshold " +
               num(threshold) + " vs 13/24");
}

void criterion_2() {
    start();
    const auto y = WeightingFunction::power(2);
    auto lottery_outcomes = [](double v) {
        return OutcomeSet{{0.0, 0.5}, {v - 1.0, 0.25}, {v - 2.0, 0.25}};
    };
    const double u1 = rae_general(lottery_outcomes(0.5), y);
    const double u2 = rae_general(lottery_outcomes(1.5), y);
    const double u3 = rae_general(lottery_outcomes(2.5), y);
    const bool pass = std::abs(u1 - (0.75 * 0.5 - 19.0 / 16.0)) <= 1e-12 &&
                      std::abs(u2 - (0.5 * 1.5 - 15.0 / 16.0)) <= 1e-12 &&
                      std::abs(u3 - (0.25 * 2.5 - 7.0 / 16.0)) <= 1e-12;
    report(2, pass,
           "three-outcome lottery utilities " + num(u1) + ", " + num(u2) + ", " +
               num(u3));
}

void criterion_3() {
    start();
    const TwoStageSetting setting{ValueDistribution::uniform(0, 1),
                                  ValueDistribution::uniform(0, 1),
                                  WeightingFunction::power(2), std::nullopt};
    const PostedPriceMenu menu(
        {{0.0, 1.0}, {1.0 / 6.0, 0.5}, {1.0 / 3.0, 0.0}});
    const double U1 = second_stage_utility(1.0, setting);
    const double U0 = second_stage_utility(0.0, setting);
    const double Uh = second_stage_utility(0.5, setting);
    bool regions_ok = true;
    bool middle_never = true;
    for (double v1 : num::linspace(0.0, 1.0, 10000)) {
        const auto c = buyer_choice_two_stage(v1, menu, setting);
        if (!c.purchased) {
            regions_ok = false;
            continue;
        }
        if (v1 < 1.0 / 3.0) {
            regions_ok &= c.p == 0.0 && c.l == 1.0;
        } else {
            regions_ok &= std::abs(c.p - 1.0 / 3.0) < 1e-12 && c.l == 0.0;
        }
        middle_never &= std::abs(c.p - 1.0 / 6.0) > 1e-9;
    }
    const bool pass = std::abs(U1) <= 1e-9 && std::abs(U0 - 1.0 / 3.0) <= 1e-9 &&
                      std::abs(Uh - 1.0 / 24.0) <= 1e-9 && regions_ok &&
                      middle_never;
    report(3, pass,
           "U(1)=" + num(U1) + " U(0)=" + num(U0) + " U(1/2)=" + num(Uh) +
               ", regions " + (regions_ok ? "ok" : "BAD") + ", middle option " +
               (middle_never ? "never chosen" : "CHOSEN"));
}

void criterion_4() {
    start();
    std::mt19937_64 rng(20260811);
    int violations = 0;
    double worst_margin = 1e300;
    for (int trial = 0; trial < 20; ++trial) {
        const TwoStageSetting setting{random_setting_distribution(rng),
                                      random_setting_distribution(rng),
                                      random_setting_weighting(rng), std::nullopt};
        const double ub = upper_bound(setting);
        const auto best = best_two_stage(setting);
        const double margin = best.revenue.total - (0.5 * ub - 1e-6);
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0.0) ++violations;
    }
    const double elapsed_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
    const bool pass = violations == 0 && elapsed_ms < 30000.0;
    report(4, pass,
           "20 settings, best two-stage vs half upper bound: " +
               std::to_string(violations) + " violations, worst margin " +
               num(worst_margin));
}

void criterion_5() {
    start();
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    double worst = -1e300;
    for (int trial = 0; trial < 200; ++trial) {
        TwoStageSetting setting{random_setting_distribution(rng),
                                random_setting_distribution(rng),
                                random_setting_weighting(rng), std::nullopt};
        if (trial % 4 == 0) {
            setting.default_second_price = setting.F2.myerson().price;
        }
        const int k = 1 + static_cast<int>(unit(rng) * 8);
        std::vector<double> ps, ls;
        for (int i = 0; i < k; ++i) {
            ps.push_back(3.0 * unit(rng));
            ls.push_back(4.0 * unit(rng));
        }
        std::sort(ps.begin(), ps.end());
        std::sort(ls.rbegin(), ls.rend());
        std::vector<PostedPriceMenu::Option> options;
        for (int i = 0; i < k; ++i) options.push_back({ps[i], ls[i]});
        const PostedPriceMenu menu(std::move(options));
        const double total = revenue_two_stage(menu, setting).total;
        const double ub = upper_bound(setting);
        worst = std::max(worst, total - ub);
        if (total > ub + 1e-6) ++violations;
    }
    report(5, violations == 0,
           "200 posted-price menus vs upper bound: " + std::to_string(violations) +
               " violations, worst excess " + num(worst));
}

void criterion_6() {
    start();
    std::mt19937_64 rng(660);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    double worst = 1e300;
    for (int trial = 0; trial < 50; ++trial) {
        WeightingFunction y = WeightingFunction::identity();
        switch (trial % 4) {
            case 0: y = WeightingFunction::power(1.0 + 6.0 * unit(rng)); break;
            case 1: y = WeightingFunction::piecewise_linear_quadratic(unit(rng)); break;
            case 2: y = WeightingFunction::extreme(0.2 + 0.3 * unit(rng),
                                                   1.5 + 2.0 * unit(rng)); break;
            default: y = WeightingFunction::identity(); break;
        }
        const auto F = random_discrete(rng, 5, 0.2, 4.0);
        const auto gap = myerson_robustness_gap(y, F);
        const double required = gap.beta * (1.0 - 0.02);
        worst = std::min(worst, gap.ratio - required);
        if (gap.ratio < required) ++violations;
    }
    report(6, violations == 0,
           "50 weighting/distribution pairs, Mye >= beta*OPT: " +
               std::to_string(violations) + " violations, worst margin " + num(worst));
}

void criterion_7() {
    start();
    const double eps = 0.25, H = 4.0;
    const auto y = WeightingFunction::extreme(eps, H);
    const Menu menu = welfare_extraction_menu(eps, H, y);
    const auto F = ValueDistribution::uniform(1.0, 4.0);
    const double rev = revenue(menu, y, F);
    const double welfare = F.expectation().value;
    const double bound = y.inverse(std::exp2(-(H / eps - 1.0))) * (welfare - 2 * eps);
    const bool meets_bound = rev >= bound - 1e-6;
    const bool meets_fraction = rev >= 0.70 * welfare - 1e-6;
    report(7, meets_bound && meets_fraction,
           "welfare extraction: revenue " + num(rev) + ", guaranteed floor " + num(bound) +
               " (" + (meets_bound ? "met" : "VIOLATED") + "), 0.70*E[v]=" +
               num(0.70 * welfare) + " (" + (meets_fraction ? "met" : "VIOLATED") + ")");
    if (!meets_fraction) {
        info("the piecewise-linear extreme weighting caps this menu at ~66.5% of "
             "welfare; the guaranteed floor above is met with margin");
    }
}

void criterion_8() {
    start();
    std::mt19937_64 rng(888);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Menu menu;
        const int k = 1 + static_cast<int>(3 * unit(rng));
        for (int i = 0; i < k; ++i) {
            menu.add(BinaryLottery{0.02 + 0.98 * unit(rng), 2.0 * unit(rng)});
        }
        double k1 = 1.0 + 6.0 * unit(rng);
        double k2 = 1.0 + 6.0 * unit(rng);
        if (k1 > k2) std::swap(k1, k2);
        const auto F = trial % 2 == 0
                           ? ValueDistribution::uniform(0.0, 1.0 + unit(rng))
                           : random_discrete(rng, 5, 0.1, 2.0);
        const auto pair = revenue_monotonicity_check(
            menu, WeightingFunction::power(k1), WeightingFunction::power(k2), F);
        if (pair.rev2 < pair.rev1 - 1e-9) ++violations;
    }
    const auto ce = monotonicity_counterexample(0.01);
    const bool ce_ok =
        std::abs(ce.revenue_y1 - (1.0 - 2.0 * 0.01 / 3.0) * 0.75) <= 1e-12 &&
        std::abs(ce.revenue_y2 - 0.005) <= 1e-12 && ce.family_non_crossing &&
        !ce.family_monotone;
    report(8, violations == 0 && ce_ok,
           "100 monotone pairs: " + std::to_string(violations) +
               " violations; counterexample revenues " + num(ce.revenue_y1) + " / " +
               num(ce.revenue_y2));
}

void criterion_9() {
    start();
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    double max_slope = 0.0;
    double worst = 1e300;
    for (int trial = 0; trial < 50; ++trial) {
        const Menu menu = random_general_menu(rng);
        const auto y = unit(rng) < 0.5
                           ? WeightingFunction::power(1.0 + 4.0 * unit(rng))
                           : WeightingFunction::piecewise_linear_quadratic(
                                 0.1 + 0.9 * unit(rng));
        const double hi = 2.5;
        const auto F = ValueDistribution::uniform(0.0, hi);

        UtilityCurve curve = utility_curve(menu, y, 0.0, hi, 1 << 12);
        for (double& u : curve.u) u = std::max(u, 0.0);
        const auto hull = num::lower_hull_indices(curve.v, curve.u);
        for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
            const double slope = (curve.u[hull[s + 1]] - curve.u[hull[s]]) /
                                 (curve.v[hull[s + 1]] - curve.v[hull[s]]);
            max_slope = std::max(max_slope, slope);
        }

        const Menu bin = binarize(menu, y, 0.0, hi, 1 << 12);
        const double margin = revenue(bin, y, F) - (revenue(menu, y, F) - 1e-4);
        worst = std::min(worst, margin);
        if (margin < 0.0) ++violations;
    }
    const bool pass = violations == 0 && max_slope <= 1.0 + 1e-9;
    report(9, pass,
           "50 general menus binarized: " + std::to_string(violations) +
               " revenue violations, max envelope slope " + num(max_slope));
}

void criterion_10() {
    start();
    // (a) forced pure-quadratic regime against the closed form, n = 10.
    LowerBoundConfig forced;
    forced.c = 2.0;
    forced.n = 10.0;
    forced.force_quadratic = true;
    const OdeTrajectory ftraj = integrate_ode(forced);
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < ftraj.p.size(); ++i) {
        if (ftraj.p[i] > 2.0) break;
        const double exact = 1.0 / (std::exp(-forced.n) + ftraj.p[i] - 1.0);
        worst_rel = std::max(worst_rel, std::abs(ftraj.l_bar[i] - exact) / exact);
    }
    const bool part_a = worst_rel <= 1e-6;

    // (b) closed form and lower bound for U_eps(0).
    bool part_b = true;
    for (double n : {5.0, 20.0, 80.0}) {
        for (double eps : {1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0}) {
            if (eps < std::exp(-n)) continue;
            const double value = u_eps(0.0, eps, n);
            const double closed = 2 * eps - std::exp(-n) + (1 + eps) * std::log(1 / eps);
            part_b &= std::abs(value - closed) <= 1e-10;
            part_b &= value >= std::min(std::log(1 / eps), n) - 1e-10;
        }
    }

    // (c) the contradiction verdict at the nominal scale c=2, n=2N.
    LowerBoundConfig nominal;
    nominal.c = 2.0;
    const double N = std::pow(2.0 / alpha_coefficient(2.0), 2.0);
    nominal.n = 2.0 * N;
    const ContradictionReport rep = check_contradiction(nominal);
    const bool part_c = rep.verdict == "CONTRADICTION";

    const double elapsed_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
    const bool pass = part_a && part_b && part_c && elapsed_ms < 60000.0;
    report(10, pass,
           "ODE: forced-regime rel err " + num(worst_rel) + "; U_eps closed form " +
               (part_b ? "ok" : "BAD") + "; verdict at n=2N: " + rep.verdict +
               " (p_cross " +
               (rep.p_cross_1 ? num(*rep.p_cross_1) : std::string("none")) +
               ", p0 " + num(rep.p0) + ")");
    if (!part_c) {
        info("honest equality-ODE: eps_p ~ 2e-9 already at p=1, so l_bar decays "
             "exponentially and crosses 1 near p ~ 21.1 >> p0 ~ 2.83 (see ledger)");
        LowerBoundConfig large;
        large.c = 2.0;
        large.n = 12000.0;
        const ContradictionReport big = check_contradiction(large);
        info("same construction at n=12000: verdict " + big.verdict + " (p_cross " +
             (big.p_cross_1 ? num(*big.p_cross_1) : std::string("none")) + " < p0 " +
             num(big.p0) + "), demonstrating the impossibility mechanics");
    }
}

void criterion_11() {
    start();
    std::mt19937_64 rng(1111);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> shift(-10.0, 10.0);
    double worst_additivity = 0.0;
    double worst_oracle = 0.0;
    bool symmetric_ok = true;
    double worst_identity = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const OutcomeSet outcomes = random_outcomes(rng);
        const WeightingFunction y =
            trial % 3 == 0 ? WeightingFunction::identity()
            : trial % 3 == 1
                ? WeightingFunction::power(1.0 + 5.0 * unit(rng))
                : WeightingFunction::piecewise_linear_quadratic(unit(rng));
        worst_additivity = std::max(
            worst_additivity, std::abs(rae_shift_check(outcomes, y, shift(rng))));
        worst_oracle = std::max(
            worst_oracle, std::abs(rae_general(outcomes, y) - rae_oracle(outcomes, y)));
        if (y.kind() == WeightKind::Identity) {
            double mean = 0.0;
            for (const auto& o : outcomes) mean += o.value * o.prob;
            worst_identity =
                std::max(worst_identity, std::abs(rae_general(outcomes, y) - mean));
        }
    }
    for (int trial = 0; trial < 500; ++trial) {
        OutcomeSet outcomes;
        double used = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double v = 0.1 + 5.0 * unit(rng);
            const double w = 0.01 + 0.15 * unit(rng);
            outcomes.push_back({v, w});
            outcomes.push_back({-v, w});
            used += 2 * w;
        }
        outcomes.push_back({0.0, 1.0 - used});
        const auto y = WeightingFunction::power(1.0 + 5.0 * unit(rng));
        symmetric_ok &= rae_general(outcomes, y) <= 1e-12;
    }
    const bool pass = worst_additivity <= 1e-12 && worst_oracle <= 1e-12 &&
                      symmetric_ok && worst_identity <= 1e-12;
    report(11, pass,
           "rae core on 10^4 random cases: additivity " + num(worst_additivity) +
               ", oracle gap " + num(worst_oracle) + ", identity gap " +
               num(worst_identity) + ", symmetric sets " +
               (symmetric_ok ? "nonpositive" : "VIOLATED"));
}

void criterion_12() {
    start();
    namespace fs = std::filesystem;
    const fs::path out = fs::temp_directory_path() / "riskmech_acceptance_12";
    fs::remove_all(out);
    const cli::json config{
        {"experiment", "two-stage"},
        {"f1", {{"kind", "uniform"}, {"a", 0}, {"b", 1}}},
        {"f2",
         {{"kind", "discrete"},
          {"values", {1.0, 2.0}},
          {"probabilities", {0.5, 0.5}}}},
        {"weighting", {{"kind", "power"}, {"k", 2}}},
        {"params", {{"best", true}}},
        {"composite",
         {{"v1", 4.0},
          {"x", 0.5},
          {"p", 1.0},
          {"mechanism", "free-giveaway"},
          {"reference", 23.0 / 16.0}}},
    };
    const auto result = cli::run_experiment(config, out.string());
    const auto& comp = result.summary["metrics"]["composite"];
    const double value = comp["utility"].get<double>();
    const OutcomeSet joint{{4.0 - 1.0 + 1.0, 0.25},
                           {4.0 - 1.0 + 2.0, 0.25},
                           {1.0, 0.25},
                           {2.0, 0.25}};
    const double oracle = rae_oracle(joint, WeightingFunction::power(2));
    const bool pass = std::abs(value - oracle) <= 1e-12 &&
                      std::abs(comp["reference"].get<double>() - 23.0 / 16.0) == 0.0 &&
                      comp["discrepancy"].get<bool>() && comp["flag"] == "DISCREPANCY";
    fs::remove_all(out);
    report(12, pass,
           "composite option: computed " + num(value) + " (= " + num(oracle) +
               " from the oracle), reference 23/16 recorded with DISCREPANCY flag");
}

}  // namespace

int main() {
    std::printf("riskmech acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("ACCEPTANCE: %d/12 criteria passed\n", 12 - failures);
    return failures;
}
