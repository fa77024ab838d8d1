#include "riskmech/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <stdexcept>

#include "riskmech/errors.hpp"
#include "riskmech/lowerbound.hpp"
#include "riskmech/numerics.hpp"
#include "riskmech/oracle.hpp"
#include "riskmech/robustness.hpp"
#include "riskmech/serialization.hpp"
#include "riskmech/twostage.hpp"

namespace riskmech::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// RFC-4180 field quoting; numeric output never needs it but headers or
// identifiers containing separators would.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        write_row(header);
    }

    void write_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_field(fields[i]);
        }
        out_ << "\r\n";
    }

private:
    std::ofstream out_;
};

struct ContractSink {
    json contracts = json::array();
    bool all_pass = true;

    void check(const std::string& name, double lhs, double rhs, bool pass) {
        contracts.push_back(
            {{"name", name}, {"lhs", lhs}, {"rhs", rhs}, {"pass", pass}});
        all_pass &= pass;
    }
    void check_le(const std::string& name, double lhs, double rhs) {
        check(name, lhs, rhs, lhs <= rhs);
    }
    void check_ge(const std::string& name, double lhs, double rhs) {
        check(name, lhs, rhs, lhs >= rhs);
    }
};

double param(const json& config, const std::string& key, double fallback) {
    if (config.contains("params") && config["params"].contains(key)) {
        return config["params"][key].get<double>();
    }
    return fallback;
}

json run_rae(const json& config, const fs::path& out, ContractSink& sink) {
    (void)out;
    const WeightingFunction y = weighting_from_json(config.at("weighting"));
    json metrics;
    if (config.contains("outcomes")) {
        const OutcomeSet outcomes = outcomes_from_json(config.at("outcomes"));
        const double value = rae_general(outcomes, y);
        const double oracle = rae_oracle(outcomes, y);
        metrics["value"] = value;
        metrics["oracle_value"] = oracle;
        sink.check_le("rae_oracle_agreement", std::abs(value - oracle), 1e-12);
        const double shift = param(config, "shift", 1.0);
        metrics["additivity_residual"] = rae_shift_check(outcomes, y, shift);
        sink.check_le("additivity_residual",
                      std::abs(metrics["additivity_residual"].get<double>()), 1e-12);
    } else {
        const ValueDistribution F = distribution_from_json(config.at("distribution"));
        metrics["value"] = rae_nonneg(F, y);
    }
    return metrics;
}

json run_single_shot(const json& config, const fs::path& out, ContractSink& sink) {
    const WeightingFunction y = weighting_from_json(config.at("weighting"));
    const ValueDistribution F = distribution_from_json(config.at("distribution"));
    const Menu menu = menu_from_json(config.at("menu"));

    const double rev = revenue(menu, y, F);
    json metrics;
    metrics["revenue"] = rev;
    metrics["myerson_price"] = F.myerson().price;
    metrics["myerson_revenue"] = F.myerson().revenue;

    const auto regions = choice_regions(menu, y, F.support_lo(), F.support_hi());
    json regions_json = json::array();
    for (const auto& r : regions) {
        regions_json.push_back({{"lo", r.lo},
                                {"hi", r.hi},
                                {"option", r.choice.index},
                                {"expected_payment", r.choice.expected_payment}});
    }
    metrics["regions"] = regions_json;

    const int points = static_cast<int>(param(config, "curve_points", 1025));
    const double lo = F.support_lo();
    const double hi = F.bounded() ? F.support_hi() : F.quantile(1.0 - 1e-6);
    CsvWriter csv(out / "utility_curve.csv",
                  {"v", "utility", "chosen_option_index", "expected_payment"});
    for (double v : num::linspace(lo, hi, points)) {
        const Choice c = buyer_choice(y, v, menu);
        csv.write_row({fmt17(v), fmt17(c.utility), std::to_string(c.index),
                       fmt17(c.expected_payment)});
    }

    const Menu binarized = binarize(menu, y, lo, hi);
    const double rev_bin = revenue(binarized, y, F);
    metrics["binarized_revenue"] = rev_bin;
    sink.check_ge("binarize_revenue_dominance", rev_bin, rev - 1e-4);
    if (config.contains("params") && config["params"].contains("expected_revenue")) {
        const double expected = config["params"]["expected_revenue"].get<double>();
        const double tol = param(config, "tolerance", 1e-9);
        sink.check_le("expected_revenue", std::abs(rev - expected), tol);
    }
    return metrics;
}

json run_envelope(const json& config, const fs::path& out, ContractSink& sink) {
    const WeightingFunction y = weighting_from_json(config.at("weighting"));
    const Menu menu = menu_from_json(config.at("menu"));
    const double lo = param(config, "lo", 0.0);
    const double hi = param(config, "hi", 1.0);
    const int points = static_cast<int>(param(config, "curve_points", 1025));

    const UtilityCurve curve = utility_curve(menu, y, lo, hi, points);
    const UtilityCurve env = lower_convex_envelope(curve);
    CsvWriter csv(out / "envelope.csv", {"v", "utility", "envelope"});
    double max_above = 0.0;
    double max_slope = 0.0;
    double min_slope = 0.0;
    for (std::size_t i = 0; i < curve.v.size(); ++i) {
        csv.write_row({fmt17(curve.v[i]), fmt17(curve.u[i]), fmt17(env.u[i])});
        max_above = std::max(max_above, env.u[i] - curve.u[i]);
        if (i + 1 < curve.v.size()) {
            max_slope = std::max(max_slope, env.slope(i));
            min_slope = std::min(min_slope, env.slope(i));
        }
    }
    sink.check_le("envelope_below_curve", max_above, 1e-12);
    sink.check_le("envelope_max_slope", max_slope, 1.0 + 1e-9);
    sink.check_ge("envelope_min_slope", min_slope, -1e-12);
    json metrics;
    metrics["max_slope"] = max_slope;
    metrics["min_slope"] = min_slope;
    return metrics;
}

json run_welfare_extract(const json& config, const fs::path& out,
                         ContractSink& sink) {
    const double eps = param(config, "eps", 0.25);
    const double H = param(config, "H", 4.0);
    const WeightingFunction y =
        config.contains("weighting") ? weighting_from_json(config.at("weighting"))
                                     : WeightingFunction::extreme(eps, H);
    const ValueDistribution F = distribution_from_json(config.at("distribution"));

    const Menu menu = welfare_extraction_menu(eps, H, y);
    const double rev = revenue(menu, y, F);
    const double count = std::ceil(H / eps - 1e-9);
    const double floor_alloc = y.inverse(std::exp2(-(count - 1.0)));
    const double welfare = F.expectation().value;
    const double bound = floor_alloc * (welfare - 2.0 * eps);

    json metrics;
    metrics["revenue"] = rev;
    metrics["bound"] = bound;
    metrics["welfare"] = welfare;
    metrics["options"] = menu.size();
    std::ofstream(out / "menu.json") << to_json(menu).dump(2) << "\n";

    sink.check_ge("revenue_meets_bound", rev, bound - 1e-6);
    if (config.contains("params") && config["params"].contains("welfare_fraction")) {
        const double frac = config["params"]["welfare_fraction"].get<double>();
        sink.check_ge("revenue_welfare_fraction", rev, frac * welfare - 1e-6);
    }
    return metrics;
}

json run_robust_myerson(const json& config, const fs::path& out,
                        ContractSink& sink) {
    const WeightingFunction y = weighting_from_json(config.at("weighting"));
    const ValueDistribution F = distribution_from_json(config.at("distribution"));
    const RobustnessGap gap = myerson_robustness_gap(y, F);
    json metrics;
    metrics["myerson_revenue"] = gap.myerson_revenue;
    metrics["oracle_opt"] = gap.oracle_opt;
    metrics["ratio"] = gap.ratio;
    metrics["beta"] = gap.beta;
    std::ofstream(out / "gap.json") << metrics.dump(2) << "\n";
    const double slack = param(config, "oracle_slack", 0.02);
    sink.check_ge("myerson_beta_bound", gap.ratio, gap.beta * (1.0 - slack));
    return metrics;
}

json run_loglog(const json& config, const fs::path& out, ContractSink& sink) {
    WeightingFamily family;
    for (const auto& item : config.at("family")) {
        family.members.push_back(weighting_from_json(item));
    }
    const ValueDistribution F = distribution_from_json(config.at("distribution"));
    const LogLogResult result = loglog_mechanism(family, F);
    const double slack = param(config, "oracle_slack", 0.02);

    json metrics;
    metrics["buckets"] = result.diagnostics.buckets;
    metrics["guarantee_factor"] = result.diagnostics.guarantee_factor;
    json members = json::array();
    bool all_ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < family.members.size(); ++m) {
        const double opt = result.diagnostics.member_opt[m];
        const double mix = mixture_revenue(result.mechanism, family.members[m], F);
        const double required =
            opt / result.diagnostics.guarantee_factor * (1.0 - slack);
        members.push_back({{"opt", opt},
                           {"mixture_revenue", mix},
                           {"bucket", result.diagnostics.member_bucket[m]},
                           {"required", required}});
        all_ok &= mix >= required;
        if (opt > 0.0) worst = std::min(worst, mix / opt);
    }
    metrics["members"] = members;
    metrics["worst_ratio"] = worst;
    sink.check("loglog_guarantee", worst,
               1.0 / result.diagnostics.guarantee_factor * (1.0 - slack), all_ok);

    // The randomized mechanism's revenue is the exact mixture average; the
    // seed only picks a sample menu for the artifact.
    const auto seed = static_cast<std::uint64_t>(param(config, "seed", 12345));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(
        0, result.mechanism.menus.size() - 1);
    const std::size_t sampled = pick(rng);
    json artifact;
    artifact["sampled_menu_index"] = sampled;
    artifact["menus"] = json::array();
    for (const Menu& menu : result.mechanism.menus) {
        artifact["menus"].push_back(to_json(menu));
    }
    std::ofstream(out / "mechanism.json") << artifact.dump(2) << "\n";
    return metrics;
}

json run_two_stage(const json& config, const fs::path& out, ContractSink& sink) {
    TwoStageSetting setting{distribution_from_json(config.at("f1")),
                            distribution_from_json(config.at("f2")),
                            weighting_from_json(config.at("weighting")),
                            std::nullopt};
    if (config.contains("params") &&
        config["params"].contains("default_second_price")) {
        setting.default_second_price =
            config["params"]["default_second_price"].get<double>();
    }

    json metrics;
    const double ub = upper_bound(setting);
    metrics["upper_bound"] = ub;
    metrics["u0"] = second_stage_utility(0.0, setting);

    const bool best_mode = config.contains("params") &&
                           config["params"].value("best", false);
    PostedPriceMenu menu;
    TwoStageSetting active = setting;
    if (best_mode) {
        BestTwoStage best = best_two_stage(setting);
        menu = std::move(best.menu);
        active = best.setting;
        metrics["used_half_approx"] = best.used_half_approx;
    } else {
        menu = posted_menu_from_json(config.at("menu"));
    }

    const TwoStageRevenue rev = revenue_two_stage(menu, active);
    metrics["stage1"] = rev.stage1;
    metrics["stage2"] = rev.stage2;
    metrics["total"] = rev.total;
    sink.check_le("revenue_upper_bound", rev.total, ub + 1e-6);
    if (best_mode) {
        sink.check_ge("half_approximation", rev.total, 0.5 * ub - 1e-6);
    }

    const int points = static_cast<int>(param(config, "sweep_points", 1025));
    const double lo = setting.F1.support_lo();
    const double hi = setting.F1.bounded() ? setting.F1.support_hi()
                                           : setting.F1.quantile(1.0 - 1e-6);
    CsvWriter csv(out / "two_stage_sweep.csv",
                  {"v1", "chosen_p", "chosen_l", "stage1_pay", "stage2_expected_pay"});
    for (double v1 : num::linspace(lo, hi, points)) {
        const TwoStageChoice c = buyer_choice_two_stage(v1, menu, active);
        if (c.purchased) {
            csv.write_row({fmt17(v1), fmt17(c.p), fmt17(c.l), fmt17(c.p),
                           fmt17(c.l * setting.F2.prob_geq(c.l))});
        } else {
            const double def_rev =
                active.default_second_price
                    ? *active.default_second_price *
                          setting.F2.prob_geq(*active.default_second_price)
                    : 0.0;
            csv.write_row({fmt17(v1), "", "", "0", fmt17(def_rev)});
        }
    }

    if (config.contains("composite")) {
        const json& comp = config["composite"];
        CompositeOption option;
        option.x = comp.at("x").get<double>();
        option.p = comp.at("p").get<double>();
        const std::string mech = comp.value("mechanism", "free-giveaway");
        if (mech == "free-giveaway") {
            option.mechanism = CompositeOption::SecondStage::FreeGiveaway;
        } else if (mech == "posted-price") {
            option.mechanism = CompositeOption::SecondStage::PostedPrice;
            option.p2 = comp.at("p2").get<double>();
        } else {
            throw std::invalid_argument("unsupported composite mechanism: " + mech);
        }
        const double v1 = comp.at("v1").get<double>();
        const double value = composite_option_utility(v1, option, setting);
        json block;
        block["utility"] = value;
        if (comp.contains("reference")) {
            const double reference = comp["reference"].get<double>();
            block["reference"] = reference;
            block["discrepancy"] = std::abs(value - reference) > 1e-9;
            if (block["discrepancy"].get<bool>()) {
                block["flag"] = "DISCREPANCY";
            }
        }
        metrics["composite"] = block;
    }
    return metrics;
}

json run_lb_ode(const json& config, const fs::path& out, ContractSink& sink) {
    LowerBoundConfig cfg;
    cfg.c = param(config, "c", 2.0);
    cfg.n = param(config, "n", 20.0);
    cfg.max_step = param(config, "max_step", 1e-2);
    cfg.force_quadratic = config.contains("params") &&
                          config["params"].value("force_quadratic", false);

    const ContradictionReport report = check_contradiction(cfg);
    const OdeTrajectory traj = integrate_ode(cfg);

    CsvWriter csv(out / "trajectory.csv", {"p", "l_bar", "eps_p"});
    for (std::size_t i = 0; i < traj.p.size(); ++i) {
        csv.write_row({fmt17(traj.p[i]), fmt17(traj.l_bar[i]), fmt17(traj.eps_p[i])});
    }

    json rj;
    rj["c"] = report.c;
    rj["n"] = report.n;
    rj["alpha_c"] = report.alpha_c;
    rj["eps_star"] = report.eps_star;
    rj["N"] = report.N;
    rj["p_eps_star"] = report.p_eps_star;
    rj["l_bar_at_2"] = report.l_bar_at_2;
    rj["p_cross_1"] = report.p_cross_1 ? json(*report.p_cross_1) : json();
    rj["p_0"] = report.p0;
    rj["verdict"] = report.verdict;
    std::ofstream(out / "report.json") << rj.dump(2) << "\n";

    if (cfg.force_quadratic) {
        // Closed-form check of the pure-quadratic regime.
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.p.size(); ++i) {
            if (traj.p[i] > 2.0) break;
            const double exact =
                1.0 / (std::exp(-cfg.n) + traj.p[i] - 1.0);
            worst = std::max(worst, std::abs(traj.l_bar[i] - exact) / exact);
        }
        sink.check_le("forced_quadratic_closed_form", worst, 1e-6);
    }
    if (config.contains("params") && config["params"].contains("expect_verdict")) {
        const std::string expected = config["params"]["expect_verdict"].get<std::string>();
        sink.check("verdict", report.contradiction ? 1.0 : 0.0,
                   expected == "CONTRADICTION" ? 1.0 : 0.0,
                   report.verdict == expected);
    }
    return rj;
}

json run_oracle(const json& config, const fs::path& out, ContractSink& sink) {
    const WeightingFunction y = weighting_from_json(config.at("weighting"));
    const ValueDistribution F = distribution_from_json(config.at("distribution"));
    OracleBudget budget;
    budget.x_grid = static_cast<int>(param(config, "x_grid", 32));
    budget.p_extra = static_cast<int>(param(config, "p_extra", 8));
    budget.menu_size = static_cast<int>(param(config, "menu_size", 0));

    const OracleResult result = brute_force_opt(F, y, budget);
    json metrics;
    metrics["revenue"] = result.revenue;
    metrics["evaluations"] = result.evaluations;
    metrics["myerson_revenue"] = F.myerson().revenue;
    json artifact;
    artifact["menu"] = to_json(result.menu);
    artifact["revenue"] = result.revenue;
    artifact["budget_used"] = result.evaluations;
    std::ofstream(out / "oracle.json") << artifact.dump(2) << "\n";
    sink.check_ge("oracle_at_least_myerson", result.revenue,
                  F.myerson().revenue - 1e-9);
    return metrics;
}

json run_counterexample(const json& config, const fs::path& out,
                        ContractSink& sink) {
    const double eps = param(config, "eps", 0.01);
    const CounterexampleReport report = monotonicity_counterexample(eps);
    json metrics;
    metrics["revenue_y1"] = report.revenue_y1;
    metrics["revenue_y2"] = report.revenue_y2;
    metrics["indifference_residual"] = report.indifference_residual;
    metrics["family_non_crossing"] = report.family_non_crossing;
    metrics["family_monotone"] = report.family_monotone;
    std::ofstream(out / "counterexample.json") << metrics.dump(2) << "\n";

    const double expect_rev1 = (1.0 - 2.0 * eps / 3.0) * 0.75;
    sink.check_le("revenue_y1", std::abs(report.revenue_y1 - expect_rev1), 1e-12);
    sink.check_le("revenue_y2", std::abs(report.revenue_y2 - eps / 2.0), 1e-12);
    sink.check_le("indifference", report.indifference_residual, 1e-12);
    sink.check("family_non_crossing", report.family_non_crossing ? 1.0 : 0.0, 1.0,
               report.family_non_crossing);
    sink.check("family_not_monotone", report.family_monotone ? 1.0 : 0.0, 0.0,
               !report.family_monotone);
    return metrics;
}

// Reads a dotted path out of a config document, rendered as a CSV field.
std::string value_at(const json& config, const std::string& path) {
    const json* node = &config;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (!node->is_object() || !node->contains(key)) return "";
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (node->is_number()) return fmt17(node->get<double>());
    if (node->is_string()) return node->get<std::string>();
    return node->dump();
}

}  // namespace

RunResult run_experiment(const json& config, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    const std::string kind = config.at("experiment").get<std::string>();
    const fs::path out(out_dir);
    fs::create_directories(out);

    ContractSink sink;
    json metrics;
    if (kind == "rae") metrics = run_rae(config, out, sink);
    else if (kind == "single-shot") metrics = run_single_shot(config, out, sink);
    else if (kind == "envelope") metrics = run_envelope(config, out, sink);
    else if (kind == "welfare-extract") metrics = run_welfare_extract(config, out, sink);
    else if (kind == "robust-myerson") metrics = run_robust_myerson(config, out, sink);
    else if (kind == "loglog") metrics = run_loglog(config, out, sink);
    else if (kind == "two-stage") metrics = run_two_stage(config, out, sink);
    else if (kind == "lb-ode") metrics = run_lb_ode(config, out, sink);
    else if (kind == "oracle") metrics = run_oracle(config, out, sink);
    else if (kind == "counterexample") metrics = run_counterexample(config, out, sink);
    else throw std::invalid_argument("unknown experiment kind: " + kind);

    const auto elapsed = std::chrono::steady_clock::now() - start;
    RunResult result;
    result.summary = {
        {"schema_version", 1},
        {"experiment", kind},
        {"params", config.contains("params") ? config["params"] : json::object()},
        {"metrics", metrics},
        {"contracts", sink.contracts},
        {"runtime_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()},
    };
    result.exit_code = sink.all_pass ? 0 : 2;
    std::ofstream(out / "summary.json") << result.summary.dump(2) << "\n";
    return result;
}

void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects key=value, got: " + assignment);
    }
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // plain string
    }
    json* node = &config;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) throw std::invalid_argument("empty key in --set path");
        if (dot == std::string::npos) {
            (*node)[key] = parsed;
            break;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

RunResult run_sweep(const json& config, const std::string& out_dir, int jobs) {
    if (!config.contains("sweep") || !config["sweep"].is_object()) {
        throw std::invalid_argument("sweep requires a 'sweep' object in the config");
    }
    const fs::path out(out_dir);
    fs::create_directories(out);

    // Cartesian product in sorted key order for determinism.
    std::vector<std::string> keys;
    std::vector<json> value_lists;
    for (const auto& [key, values] : config["sweep"].items()) {
        if (!values.is_array() || values.empty()) {
            throw std::invalid_argument("sweep entry must be a nonempty array: " + key);
        }
        keys.push_back(key);
        value_lists.push_back(values);
    }

    std::vector<json> points;
    std::vector<std::size_t> index(keys.size(), 0);
    bool exhausted = keys.empty();
    while (!exhausted) {
        json point = config;
        point.erase("sweep");
        for (std::size_t k = 0; k < keys.size(); ++k) {
            apply_override(point, keys[k] + "=" + value_lists[k][index[k]].dump());
        }
        points.push_back(std::move(point));
        std::size_t k = keys.size();
        while (k-- > 0) {
            if (++index[k] < value_lists[k].size()) break;
            index[k] = 0;
            if (k == 0) exhausted = true;
        }
    }

    struct PointOutcome {
        int exit_code = 1;
        json summary;
        std::string error;
    };
    std::vector<PointOutcome> outcomes(points.size());

    const int workers = std::max(1, jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            char name[32];
            std::snprintf(name, sizeof(name), "point_%04zu", i);
            try {
                const RunResult r = run_experiment(points[i], (out / name).string());
                outcomes[i].exit_code = r.exit_code;
                outcomes[i].summary = r.summary;
            } catch (const std::exception& e) {
                outcomes[i].exit_code = 1;
                outcomes[i].error = e.what();
            }
        }
    };
    std::vector<std::future<void>> futures;
    for (int w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, worker));
    }
    for (auto& f : futures) f.get();

    // Batch outputs in point order: flatten the union of numeric metrics.
    std::set<std::string> metric_keys;
    for (const auto& o : outcomes) {
        if (o.summary.contains("metrics")) {
            for (const auto& [k, v] : o.summary["metrics"].items()) {
                if (v.is_number()) metric_keys.insert(k);
            }
        }
    }
    std::vector<std::string> header{"point"};
    for (const auto& k : keys) header.push_back(k);
    header.push_back("exit_code");
    for (const auto& k : metric_keys) header.push_back(k);
    CsvWriter csv(out / "batch.csv", header);

    json batch = json::array();
    json failed = json::array();
    int exit_code = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::vector<std::string> row{std::to_string(i)};
        for (std::size_t k = 0; k < keys.size(); ++k) {
            json probe = points[i];
            row.push_back(value_at(probe, keys[k]));
        }
        row.push_back(std::to_string(outcomes[i].exit_code));
        for (const auto& mk : metric_keys) {
            if (outcomes[i].summary.contains("metrics") &&
                outcomes[i].summary["metrics"].contains(mk) &&
                outcomes[i].summary["metrics"][mk].is_number()) {
                row.push_back(fmt17(outcomes[i].summary["metrics"][mk].get<double>()));
            } else {
                row.push_back("");
            }
        }
        csv.write_row(row);
        json entry{{"point", i}, {"exit_code", outcomes[i].exit_code}};
        if (!outcomes[i].error.empty()) {
            entry["error"] = outcomes[i].error;
            failed.push_back(entry);
            exit_code = std::max(exit_code, 1);
        } else {
            entry["summary"] = outcomes[i].summary;
            if (outcomes[i].exit_code != 0) {
                failed.push_back(entry);
                exit_code = std::max(exit_code, 2);
            }
        }
        batch.push_back(std::move(entry));
    }

    RunResult result;
    result.summary = {{"schema_version", 1},
                      {"experiment", "sweep"},
                      {"points", points.size()},
                      {"failed", failed},
                      {"batch", batch}};
    result.exit_code = exit_code;
    std::ofstream(out / "batch.json") << result.summary.dump(2) << "\n";
    return result;
}

}  // namespace riskmech::cli
