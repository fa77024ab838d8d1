#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "riskmech/distribution.hpp"
#include "riskmech/weighting.hpp"

namespace riskmech {

// The two-stage environment: independent stage values and one weighting
// function. `default_second_price` is the posted price a non-purchasing buyer
// faces in the second stage; absent means no offer (outside utility 0).
struct TwoStageSetting {
    ValueDistribution F1;
    ValueDistribution F2;
    WeightingFunction y;
    std::optional<double> default_second_price;
};

// Risk-averse expected second-stage surplus from a posted price:
// U(p2) = integral over [p2, inf) of y(1 - F2). Exact closed forms for the
// built-in combinations, adaptive quadrature otherwise.
double second_stage_utility(double p2, const TwoStageSetting& setting);

// Smallest p2 with U(p2) = target (U is nonincreasing); bisection to 1e-10.
double second_stage_utility_inverse(double target, const TwoStageSetting& setting);

// A first-stage-price -> second-stage-price menu: an explicit option list,
// optionally backed by a functional schedule over [p_lo, p_hi] (the option
// list is then its discretization, used for display and serialization).
class PostedPriceMenu {
public:
    struct Option {
        double p = 0.0;  // first-stage price
        double l = 0.0;  // promised second-stage price
    };

    struct Schedule {
        std::function<double(double)> l_of_p;
        double p_lo = 0.0;
        double p_hi = 0.0;
        // All options share one effective price (the zero-discount schedule);
        // choice and revenue then admit exact continuum evaluation.
        bool uniform_effective = false;
    };

    PostedPriceMenu() = default;
    explicit PostedPriceMenu(std::vector<Option> options);
    static PostedPriceMenu functional(Schedule schedule, int resolution = 1 << 12);

    // Options sorted by first-stage price (functional menus discretized).
    const std::vector<Option>& options() const { return options_; }
    bool empty() const { return options_.empty(); }
    const std::optional<Schedule>& schedule() const { return schedule_; }

private:
    std::vector<Option> options_;
    std::optional<Schedule> schedule_;
};

double effective_price(double p, const PostedPriceMenu& menu,
                       const TwoStageSetting& setting);

// Removes options that can never be chosen (a cheaper option with a strictly
// smaller effective price dominates). Surviving effective prices are
// nonincreasing in p.
PostedPriceMenu prune_dominated(const PostedPriceMenu& menu,
                                const TwoStageSetting& setting);

struct TwoStageChoice {
    bool purchased = false;
    double p = 0.0;
    double l = 0.0;
    double effective = 0.0;
};

// Among affordable options (p <= v1) with utility at least the outside value,
// picks the minimal effective price; ties within 1e-12 go to the largest
// first-stage price.
TwoStageChoice buyer_choice_two_stage(double v1, const PostedPriceMenu& menu,
                                      const TwoStageSetting& setting);

struct TwoStageRevenue {
    double stage1 = 0.0;
    double stage2 = 0.0;
    double total = 0.0;
};

TwoStageRevenue revenue_two_stage(const PostedPriceMenu& menu,
                                  const TwoStageSetting& setting);

// Mye(F1) + Mye(F2) + E[min(v1, U(0))].
double upper_bound(const TwoStageSetting& setting);

// The all-zero-effective-price schedule l(p) = U^{-1}(p) on [0, U(0)].
// Throws std::invalid_argument when U(0) = 0.
PostedPriceMenu half_approx_menu(const TwoStageSetting& setting);

struct BestTwoStage {
    PostedPriceMenu menu;
    TwoStageRevenue revenue;
    bool used_half_approx = false;
    // The setting actually used for the winning candidate (the per-stage
    // Myerson candidate posts the stand-alone Myerson price to
    // non-purchasers; the schedule candidate makes no default offer).
    TwoStageSetting setting;
};

// The better of (i) per-stage Myerson prices and (ii) the U^{-1} schedule;
// guaranteed at least half of upper_bound.
BestTwoStage best_two_stage(const TwoStageSetting& setting);

// A first-stage option that allocates item 1 with probability x at price p
// and runs a fixed second-stage mechanism.
struct CompositeOption {
    enum class SecondStage { FreeGiveaway, PostedPrice };
    double x = 0.0;
    double p = 0.0;
    SecondStage mechanism = SecondStage::FreeGiveaway;
    double p2 = 0.0;  // used for PostedPrice
};

// Risk-averse utility of a composite option at first-stage value v1,
// enumerating the joint finite outcome space (requires discrete F2).
double composite_option_utility(double v1, const CompositeOption& option,
                                const TwoStageSetting& setting);

}  // namespace riskmech
