#pragma once

// Scenario bundle (h, E, psi, S, constraints, optional gradient / preimage /
// gap function) and its JSON document loader.

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seikit/expr.hpp"

namespace sei {

class ScenarioError : public Error {
 public:
  ScenarioError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// S = box ∩ {x : membership(x) <= 0}. When `box_clips` is false the box only
/// bounds the sampling window and membership alone decides set inclusion.
struct Region {
  std::vector<Interval> box;
  std::optional<Expression> membership;
  std::string description;
  bool box_clips = true;

  std::size_t dim() const { return box.size(); }

  /// Signed excess: <= 0 inside, > 0 outside by that amount.
  double violation(std::span<const double> x) const {
    if (x.size() != box.size()) throw Error("point dimension does not match region");
    double v = -std::numeric_limits<double>::infinity();
    if (box_clips)
      for (std::size_t i = 0; i < box.size(); ++i) v = std::max({v, box[i].lo - x[i], x[i] - box[i].hi});
    if (membership) v = std::max(v, membership->value(x));
    return v;
  }

  double diagonal() const {
    double d = 0.0;
    for (const auto& iv : box) d += (iv.hi - iv.lo) * (iv.hi - iv.lo);
    return std::sqrt(d);
  }
};

inline bool member(const Region& region, std::span<const double> x, double tol) {
  return region.violation(x) <= tol;
}

struct Scenario {
  std::string name;
  std::size_t dim = 0;
  Expression h;
  Expression e_map;
  Expression psi;
  Region region;
  std::vector<Expression> constraints;
  std::optional<Expression> grad_h;
  std::optional<Expression> e_preimage;
  std::optional<Expression> b_candidate;

  Point apply_e(std::span<const double> x) const { return e_map(x); }

  /// psi(first, second) with the argument order fixed as (first-point, second-point).
  Point apply_psi(std::span<const double> first, std::span<const double> second) const {
    Point joined(first.begin(), first.end());
    joined.insert(joined.end(), second.begin(), second.end());
    return psi(joined);
  }

  double apply_b(std::span<const double> first, std::span<const double> second) const {
    Point joined(first.begin(), first.end());
    joined.insert(joined.end(), second.begin(), second.end());
    return b_candidate->value(joined);
  }
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ScenarioError(key, "required field missing");
  return *it;
}

inline std::string string_field(const nlohmann::json& v, const std::string& path) {
  if (!v.is_string()) throw ScenarioError(path, "expected a string");
  return v.get<std::string>();
}

inline Expression scalar_field(const nlohmann::json& v, const std::string& path, std::size_t arity) {
  const std::string src = string_field(v, path);
  try {
    return parse(src, arity);
  } catch (const ParseError& e) {
    throw ScenarioError(path, e.what());
  }
}

inline Expression vector_field(const nlohmann::json& v, const std::string& path, std::size_t arity,
                               std::size_t components) {
  if (!v.is_array()) throw ScenarioError(path, "expected an array of expression strings");
  if (v.size() != components)
    throw ScenarioError(path, "expected " + std::to_string(components) + " components, found " + std::to_string(v.size()));
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < v.size(); ++i) sources.push_back(string_field(v[i], path + "[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < sources.size(); ++i) {
    try {
      (void)parse(sources[i], arity);
    } catch (const ParseError& e) {
      throw ScenarioError(path + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return parse_vector(sources, arity);
}

inline Region region_field(const nlohmann::json& v, std::size_t dim) {
  if (!v.is_object()) throw ScenarioError("region", "expected an object");
  for (const auto& [key, _] : v.items())
    if (key != "box" && key != "membership" && key != "description")
      throw ScenarioError("region." + key, "unknown field");
  auto it = v.find("box");
  if (it == v.end()) throw ScenarioError("region.box", "required field missing");
  const auto& box = *it;
  if (!box.is_array() || box.size() != dim)
    throw ScenarioError("region.box", "expected " + std::to_string(dim) + " [lo, hi] intervals");
  Region r;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::string path = "region.box[" + std::to_string(i) + "]";
    const auto& iv = box[i];
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw ScenarioError(path, "expected [lo, hi]");
    Interval interval{iv[0].get<double>(), iv[1].get<double>()};
    if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi) || !(interval.lo < interval.hi))
      throw ScenarioError(path, "interval must be finite with lo < hi");
    r.box.push_back(interval);
  }
  if (auto m = v.find("membership"); m != v.end()) r.membership = scalar_field(*m, "region.membership", dim);
  if (auto d = v.find("description"); d != v.end()) r.description = string_field(*d, "region.description");
  return r;
}

}  // namespace detail

/// Parses a scenario document (see README for the schema).
inline Scenario load_scenario(const nlohmann::json& doc) {
  using detail::require;
  if (!doc.is_object()) throw ScenarioError("", "scenario document must be a JSON object");
  static const std::set<std::string> known = {"dim", "h", "grad_h", "E", "psi", "region", "constraints",
                                              "e_preimage", "b", "name", "notes"};
  for (const auto& [key, _] : doc.items())
    if (!known.contains(key)) throw ScenarioError(key, "unknown field");

  const auto& dim_v = require(doc, "dim");
  if (!dim_v.is_number_integer() || dim_v.get<long long>() < 1) throw ScenarioError("dim", "expected a positive integer");
  Scenario sc;
  sc.dim = static_cast<std::size_t>(dim_v.get<long long>());
  const std::size_t n = sc.dim;

  sc.h = detail::scalar_field(require(doc, "h"), "h", n);
  sc.e_map = detail::vector_field(require(doc, "E"), "E", n, n);
  sc.psi = detail::vector_field(require(doc, "psi"), "psi", 2 * n, n);
  sc.region = detail::region_field(require(doc, "region"), n);

  const auto& cons = require(doc, "constraints");
  if (!cons.is_array()) throw ScenarioError("constraints", "expected an array of expression strings");
  for (std::size_t i = 0; i < cons.size(); ++i)
    sc.constraints.push_back(detail::scalar_field(cons[i], "constraints[" + std::to_string(i) + "]", n));

  if (auto it = doc.find("grad_h"); it != doc.end()) sc.grad_h = detail::vector_field(*it, "grad_h", n, n);
  if (auto it = doc.find("e_preimage"); it != doc.end()) sc.e_preimage = detail::vector_field(*it, "e_preimage", n, n);
  if (auto it = doc.find("b"); it != doc.end()) sc.b_candidate = detail::scalar_field(*it, "b", 2 * n);
  if (auto it = doc.find("name"); it != doc.end()) sc.name = detail::string_field(*it, "name");
  return sc;
}

inline Scenario load_scenario_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("", std::string("malformed JSON: ") + e.what());
  }
  return load_scenario(doc);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario sc = load_scenario_text(buf.str());
  if (sc.name.empty()) sc.name = path;
  return sc;
}

inline nlohmann::json to_json(const Region& r) {
  nlohmann::json box = nlohmann::json::array();
  for (const auto& iv : r.box) box.push_back({iv.lo, iv.hi});
  nlohmann::json out = {{"box", box}};
  out["membership"] = r.membership ? nlohmann::json(r.membership->to_string()) : nlohmann::json(nullptr);
  if (!r.description.empty()) out["description"] = r.description;
  if (!r.box_clips) out["box_is_window_only"] = true;
  return out;
}

}  // namespace sei
