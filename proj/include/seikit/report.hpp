#pragma once

// JSON documents for reports (same document grammar as scenario files).

#include <cmath>
#include <nlohmann/json.hpp>

#include "seikit/nlp.hpp"

namespace sei {

using json = nlohmann::json;

/// Non-finite doubles become null (JSON has no infinities).
inline json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json point_json(std::span<const double> x) {
  json a = json::array();
  for (double v : x) a.push_back(number_json(v));
  return a;
}

inline json to_json(const SampleTuple& tp) {
  return {{"s", point_json(tp.s)},
          {"t", point_json(tp.t)},
          {"alpha", tp.alpha},
          {"lambda", tp.lambda},
          {"origin", std::string(to_string(tp.origin))},
          {"index", tp.index}};
}

inline json to_json(const Witness& w) {
  json j = to_json(w.tuple);
  j["lhs"] = number_json(w.lhs);
  j["rhs"] = number_json(w.rhs);
  j["margin"] = number_json(w.margin);
  j["allowed"] = number_json(w.allowed);
  j["strict"] = w.strict;
  j["point"] = point_json(w.point);
  if (w.offsets) j["offsets"] = {(*w.offsets)[0], (*w.offsets)[1]};
  return j;
}

inline json to_json(const SkipCounts& s) {
  return {{"non_smooth", s.non_smooth},
          {"membership_failure", s.membership_failure},
          {"strictness_exclusion", s.strictness_exclusion},
          {"preimage_not_found", s.preimage_not_found},
          {"invalid_candidate", s.invalid_candidate}};
}

inline json to_json(const CheckReport& r) {
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = number_json(v);
  return {{"property", r.property},
          {"verdict", std::string(to_string(r.verdict))},
          {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
          {"samples_tested", r.samples_tested},
          {"vacuous", r.vacuous},
          {"violations", r.violations},
          {"skipped", to_json(r.skipped)},
          {"window", to_json(r.window)},
          {"tol", r.tol},
          {"diagnostics", diag},
          {"notes", r.notes}};
}

inline json to_json(const TheoremVerdict& v) {
  json hyps = json::array();
  for (const auto& h : v.hypotheses) hyps.push_back(to_json(h));
  json parts = json::array();
  for (const auto& p : v.parts) parts.push_back(to_json(p));
  return {{"theorem", v.id},
          {"hypotheses", hyps},
          {"conclusion", v.conclusion ? to_json(*v.conclusion) : json(nullptr)},
          {"consistent", v.consistent},
          {"notes", v.notes},
          {"parts", parts}};
}

inline json to_json(const StartRecord& s) {
  json trace = json::array();
  for (const auto& phase : s.trace) {
    json p = json::array();
    for (double v : phase) p.push_back(number_json(v));
    trace.push_back(p);
  }
  return {{"start", point_json(s.start)},
          {"point", point_json(s.point)},
          {"value", number_json(s.value)},
          {"residual", number_json(s.residual)},
          {"converged", s.converged},
          {"feasible", s.feasible},
          {"evals", s.evals},
          {"penalty_weights", s.weights},
          {"trace", trace}};
}

inline json to_json(const OptResult& r) {
  json starts = json::array();
  for (const auto& s : r.starts) starts.push_back(to_json(s));
  json values = json::array();
  for (double v : r.per_start_values) values.push_back(number_json(v));
  return {{"status", std::string(to_string(r.status))},
          {"point", point_json(r.point)},
          {"value", number_json(r.value)},
          {"constraint_residual", number_json(r.constraint_residual)},
          {"starts_converged", r.starts_converged},
          {"best_start", r.best_start},
          {"per_start_values", values},
          {"starts", starts}};
}

inline json to_json(const AlphaSolveResult& r) {
  return {{"alpha", r.alpha},
          {"t_star", to_json(r.t_star)},
          {"mapped", point_json(r.mapped)},
          {"mapped_value", number_json(r.mapped_value)},
          {"mapped_feasible", r.mapped_feasible},
          {"direct_value", number_json(r.direct.value)},
          {"ssep", to_json(r.ssep)},
          {"alpha_contraction", to_json(r.contraction)},
          {"asserted", r.asserted},
          {"consistent", r.consistent},
          {"notes", r.notes}};
}

inline json to_json(const OptimalSetEstimate& e) {
  json sample = json::array();
  for (const auto& x : e.x_opt_sample) sample.push_back(point_json(x));
  return {{"beta", number_json(e.beta)},
          {"x_opt_sample", sample},
          {"x_opt", to_json(e.x_opt)},
          {"ssep", to_json(e.hypothesis)},
          {"sei", to_json(e.sei_report)},
          {"trivial", e.trivial},
          {"asserted", e.asserted},
          {"consistent", e.consistent},
          {"notes", e.notes}};
}

inline json to_json(const LocalGlobalReport& r) {
  return {{"beta", number_json(r.beta)},
          {"local_equals_global", r.local_equals_global},
          {"worse_starts", r.worse_starts},
          {"ssep", to_json(r.ssep)},
          {"strict", to_json(r.strict)},
          {"uniqueness_applicable", r.uniqueness_applicable},
          {"clusters", r.clusters},
          {"unique", r.unique ? json(*r.unique) : json(nullptr)},
          {"consistent", r.consistent},
          {"notes", r.notes}};
}

inline json to_json(const SamplePlan& p) {
  json tuples = json::array();
  for (const auto& e : p.explicit_tuples)
    tuples.push_back({{"s", point_json(e.s)}, {"t", point_json(e.t)}, {"alpha", e.alpha}, {"lambda", e.lambda}});
  return {{"grid_per_dim", p.grid_per_dim},   {"alpha_grid", p.alpha_grid},
          {"lambda_grid", p.lambda_grid},     {"random_tuples", p.random_tuples},
          {"seed", p.seed},                   {"rejection_cap", p.rejection_cap},
          {"explicit_tuples", tuples}};
}

inline json to_json(const CheckOptions& o) {
  return {{"tol", o.tol}, {"strict_margin", o.strict_margin}, {"grad_tol", o.grad_tol}, {"fd_step", o.fd_step},
          {"preimage_budget", o.preimage_budget}};
}

inline json to_json(const SolverConfig& c) {
  return {{"starts", c.starts},
          {"max_evals_per_start", c.max_evals_per_start},
          {"penalty_weight", c.penalty_weight},
          {"penalty_growth", c.penalty_growth},
          {"penalty_max", c.penalty_max},
          {"step_init", c.step_init ? json(*c.step_init) : json("10% of box diagonal")},
          {"step_min", c.step_min},
          {"opt_cluster_radius", c.opt_cluster_radius},
          {"opt_value_tol", c.opt_value_tol},
          {"seed", c.seed}};
}

}  // namespace sei
