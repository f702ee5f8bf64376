#include "maxbell/io.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "maxbell/errors.hpp"

namespace maxbell {

namespace {

double number(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw DomainError(std::string("missing field \"") + key + "\"");
  }
  const Json& v = doc.at(key);
  if (!v.is_number()) throw DomainError(std::string("field \"") + key + "\" is not a number");
  return v.get<double>();
}

std::vector<double> numbers(const Json& arr, const char* what) {
  if (!arr.is_array()) throw DomainError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const Json& v : arr) {
    if (!v.is_number()) throw DomainError(std::string(what) + " holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Json tree_to_json(const TreeSpace& tree,
                  const std::vector<std::pair<std::string, const LeafFunction*>>& functions) {
  Json doc;
  doc["arity_children"] = tree.adjacency();
  Json measure = Json::array();
  for (NodeId id = 0; id < tree.node_count(); ++id) measure.push_back(tree.measure(id));
  doc["measure"] = std::move(measure);
  Json values = Json::object();
  for (const auto& [name, fn] : functions) {
    if (&fn->tree() != &tree) throw StructuralError("leaf function \"" + name + "\" lives on another tree");
    values[name] = std::vector<double>(fn->values().begin(), fn->values().end());
  }
  doc["leaf_values"] = std::move(values);
  return doc;
}

TreeDocument tree_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("arity_children") || !doc.contains("measure")) {
    throw StructuralError("tree document needs \"arity_children\" and \"measure\"");
  }
  std::vector<std::vector<NodeId>> children;
  const Json& adj = doc.at("arity_children");
  if (!adj.is_array()) throw StructuralError("\"arity_children\" must be an array");
  for (const Json& row : adj) {
    if (!row.is_array()) throw StructuralError("children rows must be arrays");
    auto& out = children.emplace_back();
    for (const Json& c : row) {
      if (!c.is_number_unsigned()) throw StructuralError("child indices must be unsigned integers");
      out.push_back(c.get<NodeId>());
    }
  }
  TreeDocument result;
  result.tree = std::make_shared<const TreeSpace>(std::move(children),
                                                  numbers(doc.at("measure"), "\"measure\""));
  if (doc.contains("leaf_values")) {
    const Json& values = doc.at("leaf_values");
    if (!values.is_object()) throw StructuralError("\"leaf_values\" must be an object");
    for (const auto& [name, arr] : values.items()) {
      const std::vector<double> v = numbers(arr, "leaf values");
      Eigen::VectorXd vec = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      result.functions.emplace(name, LeafFunction(result.tree, std::move(vec)));
    }
  }
  return result;
}

Json piecewise_to_json(const PiecewisePower& f) {
  Json pieces = Json::array();
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    Json terms = Json::array();
    for (const PowerTerm& t : f.terms(i)) terms.push_back({{"c", t.coeff}, {"e", t.exponent}});
    pieces.push_back({{"lo", f.lo(i)}, {"hi", f.hi(i)}, {"terms", std::move(terms)}});
  }
  return {{"pieces", std::move(pieces)},
          {"nonneg", f.flags().nonneg},
          {"nonincreasing", f.flags().nonincreasing}};
}

PiecewisePower piecewise_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("pieces") || !doc.at("pieces").is_array() ||
      doc.at("pieces").empty()) {
    throw DomainError("piecewise document needs a nonempty \"pieces\" array");
  }
  std::vector<double> bp{0.0};
  std::vector<std::vector<PowerTerm>> terms;
  for (const Json& piece : doc.at("pieces")) {
    const double lo = number(piece, "lo");
    const double hi = number(piece, "hi");
    if (lo != bp.back()) throw DomainError("pieces must be contiguous, starting at 0");
    bp.push_back(hi);
    auto& out = terms.emplace_back();
    if (!piece.contains("terms") || !piece.at("terms").is_array()) {
      throw DomainError("piece needs a \"terms\" array");
    }
    for (const Json& t : piece.at("terms")) out.push_back({number(t, "c"), number(t, "e")});
  }
  PiecewiseFlags flags;
  flags.nonneg = doc.value("nonneg", false);
  flags.nonincreasing = doc.value("nonincreasing", false);
  return PiecewisePower(std::move(bp), std::move(terms), flags);
}

Json power_weight_to_json(const PowerWeightSpec& spec) {
  return {{"k", spec.k}, {"b", spec.b}, {"p", spec.p}};
}

PowerWeightSpec power_weight_from_json(const Json& doc) {
  return {number(doc, "k"), number(doc, "b"), number(doc, "p")};
}

Json prop2_config_to_json(const Prop2Config& cfg) {
  return {{"p", cfg.p}, {"F", cfg.F}, {"f", cfg.f}, {"h", cfg.h}, {"z", cfg.z}};
}

Prop2Config prop2_config_from_json(const Json& doc) {
  return {number(doc, "p"), number(doc, "F"), number(doc, "f"), number(doc, "h"), number(doc, "z")};
}

std::string format_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  // Shortest form first; fall back to the fixed significant-digit form when
  // the shortest one needs more digits than allowed.
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string shortest(buf, res.ptr);
  std::size_t sig = 0;
  bool leading = true;
  for (char ch : shortest) {
    if (ch == 'e' || ch == 'E') break;
    if (ch < '0' || ch > '9') continue;
    if (leading && ch == '0') continue;
    leading = false;
    ++sig;
  }
  if (sig <= static_cast<std::size_t>(digits)) return shortest;
  res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

}  // namespace maxbell
