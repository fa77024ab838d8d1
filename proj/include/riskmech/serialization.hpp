#pragma once

#include <json.hpp>

#include "riskmech/distribution.hpp"
#include "riskmech/oracle.hpp"
#include "riskmech/singleshot.hpp"
#include "riskmech/twostage.hpp"
#include "riskmech/weighting.hpp"

namespace riskmech {

using json = nlohmann::json;

// Weighting functions: {"kind": ..., params}; tabulated carries "x"/"y".
json to_json(const WeightingFunction& y);
WeightingFunction weighting_from_json(const json& j);

// Distributions: {"kind": ..., params}; tabulated carries "v"/"F".
json to_json(const ValueDistribution& F);
ValueDistribution distribution_from_json(const json& j);

// Outcome sets serialize as arrays of [value, probability] pairs.
json to_json(const OutcomeSet& outcomes);
OutcomeSet outcomes_from_json(const json& j);

// Menus serialize as arrays of lottery objects (the null option implicit).
json to_json(const Menu& menu);
Menu menu_from_json(const json& j);

// Posted-price menus serialize as {"options": [[p, l], ...]}.
json to_json(const PostedPriceMenu& menu);
PostedPriceMenu posted_menu_from_json(const json& j);

}  // namespace riskmech
