#pragma once

// JSON schemas for trees with named leaf functions, piecewise power functions,
// power weights and S_alpha limit experiment configurations.
//
//   tree:      {"arity_children": [[...], ...], "measure": [...],
//               "leaf_values": {"name": [...]}}
//   piecewise: {"pieces": [{"lo": r, "hi": r, "terms": [{"c": r, "e": r}]}],
//               "nonneg": bool, "nonincreasing": bool}
//   power weight: {"k": r, "b": r, "p": r}
//   prop2:     {"p": r, "F": r, "f": r, "h": r, "z": r}

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "maxbell/extremal_lab.hpp"
#include "maxbell/measure_tree.hpp"
#include "maxbell/step_functions.hpp"
#include "maxbell/weight_theory.hpp"

namespace maxbell {

using Json = nlohmann::json;

struct TreeDocument {
  TreeHandle tree;
  std::map<std::string, LeafFunction> functions;
};

Json tree_to_json(const TreeSpace& tree,
                  const std::vector<std::pair<std::string, const LeafFunction*>>& functions = {});
TreeDocument tree_from_json(const Json& doc);

Json piecewise_to_json(const PiecewisePower& f);
PiecewisePower piecewise_from_json(const Json& doc);

Json power_weight_to_json(const PowerWeightSpec& spec);
PowerWeightSpec power_weight_from_json(const Json& doc);

Json prop2_config_to_json(const Prop2Config& cfg);
Prop2Config prop2_config_from_json(const Json& doc);

/// Shortest round-trip decimal text, '.' separator regardless of locale,
/// at most `digits` significant digits.
std::string format_number(double value, int digits = 15);

}  // namespace maxbell
