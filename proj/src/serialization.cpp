#include "riskmech/serialization.hpp"

#include <stdexcept>

namespace riskmech {

json to_json(const WeightingFunction& y) {
    switch (y.kind()) {
        case WeightKind::Identity:
            return {{"kind", "identity"}};
        case WeightKind::Power:
            return {{"kind", "power"}, {"k", y.param_k()}};
        case WeightKind::PiecewiseLinearQuadratic:
            return {{"kind", "piecewise-linear-quadratic"}, {"eps", y.param_eps()}};
        case WeightKind::Extreme:
            return {{"kind", "extreme"}, {"eps", y.param_eps()}, {"H", y.param_H()}};
        case WeightKind::Tabulated:
            return {{"kind", "tabulated"}, {"x", y.grid_x()}, {"y", y.grid_y()}};
    }
    throw std::logic_error("unknown weighting kind");
}

WeightingFunction weighting_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return WeightingFunction::identity();
    if (kind == "power") return WeightingFunction::power(j.at("k").get<double>());
    if (kind == "piecewise-linear-quadratic" || kind == "w_eps") {
        return WeightingFunction::piecewise_linear_quadratic(j.at("eps").get<double>());
    }
    if (kind == "extreme") {
        return WeightingFunction::extreme(j.at("eps").get<double>(),
                                          j.at("H").get<double>());
    }
    if (kind == "tabulated") {
        return WeightingFunction::tabulated(j.at("x").get<std::vector<double>>(),
                                            j.at("y").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown weighting kind: " + kind);
}

json to_json(const ValueDistribution& F) {
    switch (F.kind()) {
        case DistKind::Uniform:
            return {{"kind", "uniform"}, {"a", F.param_a()}, {"b", F.param_b()}};
        case DistKind::PointMass:
            return {{"kind", "point-mass"}, {"v", F.param_a()}};
        case DistKind::Discrete: {
            std::vector<double> values, probabilities;
            for (const auto& [v, p] : F.atoms()) {
                values.push_back(v);
                probabilities.push_back(p);
            }
            return {{"kind", "discrete"},
                    {"values", values},
                    {"probabilities", probabilities}};
        }
        case DistKind::EqualRevenueBounded:
            return {{"kind", "equal-revenue-bounded"}, {"H", F.param_H()}};
        case DistKind::EqualRevenueUnbounded:
            return {{"kind", "equal-revenue-unbounded"}};
        case DistKind::TabulatedCdf:
            return {{"kind", "tabulated"}, {"v", F.grid_v()}, {"F", F.grid_F()}};
    }
    throw std::logic_error("unknown distribution kind");
}

ValueDistribution distribution_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") {
        return ValueDistribution::uniform(j.at("a").get<double>(),
                                          j.at("b").get<double>());
    }
    if (kind == "point-mass") {
        return ValueDistribution::point_mass(j.at("v").get<double>());
    }
    if (kind == "discrete") {
        return ValueDistribution::discrete(
            j.at("values").get<std::vector<double>>(),
            j.at("probabilities").get<std::vector<double>>());
    }
    if (kind == "equal-revenue-bounded") {
        return ValueDistribution::equal_revenue_bounded(j.at("H").get<double>());
    }
    if (kind == "equal-revenue-unbounded") {
        return ValueDistribution::equal_revenue_unbounded();
    }
    if (kind == "tabulated") {
        return ValueDistribution::tabulated_cdf(j.at("v").get<std::vector<double>>(),
                                                j.at("F").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown distribution kind: " + kind);
}

json to_json(const OutcomeSet& outcomes) {
    json arr = json::array();
    for (const Outcome& o : outcomes) arr.push_back({o.value, o.prob});
    return arr;
}

OutcomeSet outcomes_from_json(const json& j) {
    OutcomeSet out;
    for (const auto& pair : j) {
        out.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    }
    validate_outcomes(out);
    return out;
}

json to_json(const Menu& menu) {
    json arr = json::array();
    for (const Lottery& L : menu.options()) {
        if (const auto* b = std::get_if<BinaryLottery>(&L)) {
            arr.push_back({{"type", "binary"}, {"x", b->x}, {"p", b->p}});
        } else {
            const auto& g = std::get<GeneralLottery>(L);
            json branches = json::array();
            for (const auto& br : g.branches()) {
                branches.push_back({br.alloc, br.payment, br.prob});
            }
            arr.push_back({{"type", "general"}, {"outcomes", branches}});
        }
    }
    return arr;
}

Menu menu_from_json(const json& j) {
    Menu menu;
    for (const auto& item : j) {
        const std::string type = item.at("type").get<std::string>();
        if (type == "binary") {
            menu.add(BinaryLottery{item.at("x").get<double>(),
                                   item.at("p").get<double>()});
        } else if (type == "general") {
            std::vector<GeneralLottery::Branch> branches;
            for (const auto& br : item.at("outcomes")) {
                branches.push_back({br.at(0).get<int>(), br.at(1).get<double>(),
                                    br.at(2).get<double>()});
            }
            menu.add(GeneralLottery::normalized(std::move(branches)));
        } else {
            throw std::invalid_argument("unknown lottery type: " + type);
        }
    }
    return menu;
}

json to_json(const PostedPriceMenu& menu) {
    json options = json::array();
    for (const auto& o : menu.options()) options.push_back({o.p, o.l});
    return {{"options", options}};
}

PostedPriceMenu posted_menu_from_json(const json& j) {
    std::vector<PostedPriceMenu::Option> options;
    for (const auto& o : j.at("options")) {
        options.push_back({o.at(0).get<double>(), o.at(1).get<double>()});
    }
    return PostedPriceMenu(std::move(options));
}

}  // namespace riskmech
