#pragma once

// Derived scenarios (combinations, suprema, compositions, feasible sets) and
// verdict-level cross-checks: premises holding on a plan must imply the
// conclusion holding on the same plan.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seikit/checks.hpp"

namespace sei {

struct TheoremVerdict {
  std::string id;
  std::vector<CheckReport> hypotheses;
  std::optional<CheckReport> conclusion;
  bool consistent = true;
  std::vector<std::string> notes;
  std::vector<TheoremVerdict> parts;  // sub-implications (e.g. both directions of an equivalence)
};

inline bool all_hold(std::span<const CheckReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.verdict == Verdict::Holds; });
}

/// consistent = false only when every hypothesis holds and the conclusion is violated.
inline TheoremVerdict settle(TheoremVerdict v) {
  const bool own_red = v.conclusion && all_hold(v.hypotheses) && v.conclusion->verdict == Verdict::Violated;
  v.consistent = !own_red;
  for (const auto& p : v.parts) v.consistent = v.consistent && p.consistent;
  if (own_red) v.notes.push_back("RED ALERT: premises hold on the plan but the conclusion is violated");
  if (v.conclusion && !all_hold(v.hypotheses)) v.notes.push_back("premises not all holding; conclusion not asserted");
  return v;
}

namespace detail {

inline CheckOptions scaled(CheckOptions opt, double factor) {
  opt.tol *= std::max(1.0, factor);
  return opt;
}

inline bool same_region(const Region& a, const Region& b) {
  if (a.box.size() != b.box.size() || a.box_clips != b.box_clips) return false;
  for (std::size_t i = 0; i < a.box.size(); ++i)
    if (a.box[i].lo != b.box[i].lo || a.box[i].hi != b.box[i].hi) return false;
  if (a.membership.has_value() != b.membership.has_value()) return false;
  return !a.membership || a.membership->to_string() == b.membership->to_string();
}

inline void require_shared_bundle(std::span<const Scenario> parts) {
  if (parts.empty()) throw Error("at least one scenario is required");
  const auto& first = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.dim != first.dim) throw Error("scenario " + std::to_string(i) + " differs in dimension");
    if (p.e_map.to_string() != first.e_map.to_string()) throw Error("scenario " + std::to_string(i) + " differs in E");
    if (p.psi.to_string() != first.psi.to_string()) throw Error("scenario " + std::to_string(i) + " differs in psi");
    if (!same_region(p.region, first.region)) throw Error("scenario " + std::to_string(i) + " differs in region");
  }
}

inline Scenario with_h(const Scenario& base, Expression h, std::string name) {
  Scenario out = base;
  out.h = std::move(h);
  out.grad_h.reset();
  out.name = std::move(name);
  return out;
}

inline std::vector<SampleTuple> tuples_of(const Scenario& sc, const SamplePlan& plan) {
  return enumerate(plan, sc.region).tuples;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Derived scenarios

/// h = sum_i weights[i] * h_i over a shared (E, psi, S) bundle.
inline Scenario combine_linear(std::span<const Scenario> parts, std::span<const double> weights) {
  detail::require_shared_bundle(parts);
  if (weights.size() != parts.size()) throw Error("combine_linear: one weight per scenario is required");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("combine_linear: weights must be finite and nonnegative");
  std::vector<Expression> hs;
  for (const auto& p : parts) hs.push_back(p.h);
  return detail::with_h(parts.front(), weighted_sum(hs, weights), "linear combination");
}

/// h = max_i h_i over a shared bundle.
inline Scenario combine_sup(std::span<const Scenario> parts) {
  if (parts.empty()) throw Error("combine_sup: empty list");
  detail::require_shared_bundle(parts);
  std::vector<Expression> hs;
  for (const auto& p : parts) hs.push_back(p.h);
  Scenario out = detail::with_h(parts.front(), pointwise_max(hs), "pointwise supremum");
  if (parts.size() == 1) out.grad_h = parts.front().grad_h;
  return out;
}

struct MonotoneScreen {
  std::vector<double> points;
  std::vector<double> scales;
  double tol = 1e-9;
};

inline MonotoneScreen default_monotone_screen() {
  MonotoneScreen m;
  m.points.push_back(1.0);
  for (int k = -40; k <= 40; ++k) m.points.push_back(0.25 * k);
  m.scales = {2.0, 0.1, 0.5, 3.0, 10.0};
  return m;
}

/// Throws unless g passes the sampled positive-homogeneity and monotonicity screen.
inline void screen_monotone(const Expression& g, const MonotoneScreen& screen = default_monotone_screen()) {
  if (g.arity() != 1 || !g.is_scalar()) throw Error("g must be a scalar expression in x1");
  auto at = [&](double x) { return g.value(std::span<const double>(&x, 1)); };
  auto fmt = [](double v) {
    char buf[32];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
  };
  for (double x : screen.points) {
    for (double c : screen.scales) {
      const double lhs = at(c * x);
      const double rhs = c * at(x);
      if (std::abs(lhs - rhs) > slack(screen.tol, rhs))
        throw Error("g is not positively homogeneous: g(" + fmt(c) + "*" + fmt(x) + ") = " + fmt(lhs) + " but " +
                    fmt(c) + "*g(" + fmt(x) + ") = " + fmt(rhs));
    }
  }
  std::vector<double> sorted = screen.points;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double lo = at(sorted[i - 1]);
    const double hi = at(sorted[i]);
    if (hi < lo - slack(screen.tol, lo))
      throw Error("g is not increasing: g(" + fmt(sorted[i]) + ") = " + fmt(hi) + " < g(" + fmt(sorted[i - 1]) +
                  ") = " + fmt(lo));
  }
}

/// h' = g(h) for a positively homogeneous increasing g (screened on samples).
inline Scenario compose_monotone(const Scenario& sc, const Expression& g) {
  screen_monotone(g);
  return detail::with_h(sc, compose(g, sc.h), "monotone composition");
}

/// X = {x : max_j h_j(x) <= 0}; the box only bounds sampling.
inline Region feasible_region(const Scenario& sc) {
  if (sc.constraints.empty()) throw Error("scenario has no constraints");
  Region x;
  x.box = sc.region.box;
  x.box_clips = false;
  x.membership = pointwise_max(sc.constraints);
  x.description = "feasible set of the constraints";
  return x;
}

// ---------------------------------------------------------------------------
// Conclusion checks that are not plain property templates

/// h(alpha*t + E(t)) <= h(t) on the tuples with lambda = 0 (the SSEP instance
/// that yields it). `need_equal_points` adds s = t, as required for SQSEP.
inline CheckReport check_alpha_contraction(const Scenario& sc, std::span<const SampleTuple> tuples,
                                           const CheckOptions& opt = {}, bool need_equal_points = false) {
  std::vector<SampleTuple> kept;
  std::size_t dropped = 0;
  for (const auto& tp : tuples) {
    if (tp.lambda == 0.0 && (!need_equal_points || tp.s == tp.t))
      kept.push_back(tp);
    else
      ++dropped;
  }
  auto rep = aggregate("ALPHA_CONTRACTION", sc.region, kept, opt.tol, [&](const SampleTuple& tp) {
    TupleOutcome o;
    o.point = detail::axpy(tp.alpha, tp.t, sc.apply_e(tp.t));
    o.lhs = sc.h.value(o.point);
    o.rhs = sc.h.value(tp.t);
    o.allowed = slack(opt.tol, o.rhs);
    return o;
  });
  rep.diagnostics["tuples_outside_lambda0"] = static_cast<double>(dropped);
  if (kept.empty()) rep.notes.push_back("plan has no lambda = 0 tuples to test");
  return rep;
}

/// h(E(x)) <= h(x) at both tuple points; with `converse_only`, only at t on
/// tuples with alpha = 0 and lambda = 0 (where SSEP itself reads h(Et) <= h(t)).
inline CheckReport check_e_dominance(const Scenario& sc, std::span<const SampleTuple> tuples,
                                     const CheckOptions& opt = {}, bool converse_only = false) {
  std::vector<SampleTuple> kept;
  for (const auto& tp : tuples)
    if (!converse_only || (tp.alpha == 0.0 && tp.lambda == 0.0)) kept.push_back(tp);
  auto rep = aggregate("E_DOMINANCE", sc.region, kept, opt.tol, [&](const SampleTuple& tp) {
    auto probe = [&](const Point& x) {
      TupleOutcome o;
      o.point = sc.apply_e(x);
      o.lhs = sc.h.value(o.point);
      o.rhs = sc.h.value(x);
      o.allowed = slack(opt.tol, o.rhs);
      return o;
    };
    TupleOutcome at_t = probe(tp.t);
    if (converse_only || at_t.violated()) return at_t;
    TupleOutcome at_s = probe(tp.s);
    return at_s.violated() ? at_s : at_t;
  });
  if (kept.empty()) rep.notes.push_back("plan has no alpha = 0, lambda = 0 tuples to test");
  return rep;
}

// ---------------------------------------------------------------------------
// Validators

inline TheoremVerdict validate_alpha_contraction_tuples(const Scenario& sc, std::span<const SampleTuple> tuples,
                                                        const CheckOptions& opt = {},
                                                        PropertyKind premise = PropertyKind::Ssep) {
  if (premise != PropertyKind::Ssep && premise != PropertyKind::Sqsep)
    throw Error("alpha-contraction premise must be SSEP or SQSEP");
  TheoremVerdict v;
  v.id = "alpha-contraction";
  v.hypotheses.push_back(check_tuples(sc, premise, tuples, opt));
  v.conclusion = check_alpha_contraction(sc, tuples, opt, premise == PropertyKind::Sqsep);
  if (premise == PropertyKind::Sqsep) v.notes.push_back("SQSEP premise: conclusion tested on tuples with s = t");
  return settle(std::move(v));
}

inline TheoremVerdict validate_alpha_contraction(const Scenario& sc, const SamplePlan& plan,
                                                 const CheckOptions& opt = {},
                                                 PropertyKind premise = PropertyKind::Ssep) {
  return validate_alpha_contraction_tuples(sc, detail::tuples_of(sc, plan), opt, premise);
}

inline TheoremVerdict validate_linear(std::span<const Scenario> parts, std::span<const double> weights,
                                      const SamplePlan& plan, const CheckOptions& opt = {}) {
  const Scenario combined = combine_linear(parts, weights);
  const auto tuples = detail::tuples_of(combined, plan);
  TheoremVerdict v;
  v.id = "linear";
  double total = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    v.hypotheses.push_back(check_tuples(parts[i], PropertyKind::Ssep, tuples, opt));
    total += weights[i];
  }
  v.conclusion = check_tuples(combined, PropertyKind::Ssep, tuples, detail::scaled(opt, total));
  v.notes.push_back("conclusion tolerance scaled by max(1, sum of weights)");
  return settle(std::move(v));
}

inline TheoremVerdict validate_sup(std::span<const Scenario> parts, const SamplePlan& plan,
                                   const CheckOptions& opt = {}) {
  const Scenario combined = combine_sup(parts);
  const auto tuples = detail::tuples_of(combined, plan);
  TheoremVerdict v;
  v.id = "sup";
  for (const auto& p : parts) v.hypotheses.push_back(check_tuples(p, PropertyKind::Ssep, tuples, opt));
  v.conclusion = check_tuples(combined, PropertyKind::Ssep, tuples, detail::scaled(opt, 2.0));
  return settle(std::move(v));
}

inline TheoremVerdict validate_compose(const Scenario& sc, const Expression& g, const SamplePlan& plan,
                                       const CheckOptions& opt = {}) {
  const Scenario composed = compose_monotone(sc, g);
  const auto tuples = detail::tuples_of(sc, plan);
  const double one = 1.0;
  const double minus_one = -1.0;
  const double gain = std::max(std::abs(g.value(std::span<const double>(&one, 1))),
                               std::abs(g.value(std::span<const double>(&minus_one, 1))));
  TheoremVerdict v;
  v.id = "compose";
  v.hypotheses.push_back(check_tuples(sc, PropertyKind::Ssep, tuples, opt));
  v.conclusion = check_tuples(composed, PropertyKind::Ssep, tuples, detail::scaled(opt, gain));
  v.notes.push_back("g = " + g.to_string());
  return settle(std::move(v));
}

/// SEP and h(Et) <= h(t)  <=>  SSEP, validated direction by direction.
inline TheoremVerdict validate_sep_ssep_bridge(const Scenario& sc, const SamplePlan& plan,
                                               const CheckOptions& opt = {}) {
  const auto tuples = detail::tuples_of(sc, plan);
  const auto sep = check_tuples(sc, PropertyKind::Sep, tuples, opt);
  const auto ssep = check_tuples(sc, PropertyKind::Ssep, tuples, opt);
  const auto dominance = check_e_dominance(sc, tuples, opt);

  TheoremVerdict forward;
  forward.id = "bridge/forward";
  forward.hypotheses = {sep, dominance};
  forward.conclusion = check_tuples(sc, PropertyKind::Ssep, tuples, detail::scaled(opt, 2.0));
  forward = settle(std::move(forward));

  TheoremVerdict converse;
  converse.id = "bridge/converse";
  converse.hypotheses = {ssep};
  converse.conclusion = check_e_dominance(sc, tuples, opt, true);
  converse = settle(std::move(converse));

  TheoremVerdict v;
  v.id = "bridge";
  v.hypotheses = {sep, dominance, ssep};
  const bool lhs = sep.verdict == Verdict::Holds && dominance.verdict == Verdict::Holds;
  const bool rhs = ssep.verdict == Verdict::Holds;
  if (lhs && rhs)
    v.notes.push_back("SEP, E-dominance and SSEP all hold: equivalence observed");
  else if (lhs != rhs)
    v.notes.push_back(std::string("equivalence not observed: [SEP and h(Et) <= h(t)] ") + (lhs ? "holds" : "fails") +
                      " while SSEP " + (rhs ? "holds" : "fails") + "; directions recorded separately");
  v.parts = {std::move(forward), std::move(converse)};
  return settle(std::move(v));
}

inline TheoremVerdict validate_ssep_implies_spsep(const Scenario& sc, const SamplePlan& plan,
                                                  const CheckOptions& opt = {}) {
  const auto tuples = detail::tuples_of(sc, plan);
  Scenario constructed = sc;
  constructed.b_candidate.reset();  // b(s, t) = h(t) - h(s)
  TheoremVerdict v;
  v.id = "spsep";
  v.hypotheses.push_back(check_tuples(sc, PropertyKind::Ssep, tuples, opt));
  v.conclusion = check_tuples(constructed, PropertyKind::Spsep, tuples, detail::scaled(opt, 2.0));
  v.notes.push_back("gap function b(s, t) = h(t) - h(s)");
  return settle(std::move(v));
}

/// SSEP restricted to tuples with h(s) <= h(t) yields SQSEP on those tuples.
inline TheoremVerdict validate_ssep_implies_sqsep(const Scenario& sc, const SamplePlan& plan,
                                                  const CheckOptions& opt = {}) {
  const auto all = detail::tuples_of(sc, plan);
  std::vector<SampleTuple> ordered;
  for (const auto& tp : all)
    if (sc.h.value(tp.s) <= sc.h.value(tp.t)) ordered.push_back(tp);
  TheoremVerdict v;
  v.id = "sqsep";
  v.hypotheses.push_back(check_tuples(sc, PropertyKind::Ssep, all, opt));
  v.conclusion = check_tuples(sc, PropertyKind::Sqsep, ordered, opt);
  v.notes.push_back("hypothesis h(s) <= h(t) applied per tuple (taken over all pairs it would force h constant)");
  return settle(std::move(v));
}

/// QSEP and h(Et) <= h(t) give SQSEP.
inline TheoremVerdict validate_quasi_bridge(const Scenario& sc, const SamplePlan& plan, const CheckOptions& opt = {}) {
  const auto tuples = detail::tuples_of(sc, plan);
  TheoremVerdict v;
  v.id = "quasi-bridge";
  v.hypotheses.push_back(check_tuples(sc, PropertyKind::Qsep, tuples, opt));
  v.hypotheses.push_back(check_e_dominance(sc, tuples, opt));
  v.conclusion = check_tuples(sc, PropertyKind::Sqsep, tuples, detail::scaled(opt, 2.0));
  return settle(std::move(v));
}

/// Levels used when none are given: quantiles of h over the plan grid.
inline std::vector<double> default_levels(const Scenario& sc, const SamplePlan& plan) {
  std::vector<double> values;
  for (const auto& x : grid_points(sc.region, plan.grid_per_dim)) values.push_back(sc.h.value(x));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) return {};
  std::vector<double> out;
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double v = values[static_cast<std::size_t>(std::round(q * static_cast<double>(values.size() - 1)))];
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

/// SSEP on an SEI set S gives SEI lower level sets K_r.
inline TheoremVerdict validate_level_sets(const Scenario& sc, const SamplePlan& plan, std::vector<double> levels = {},
                                          const CheckOptions& opt = {}) {
  const auto tuples = detail::tuples_of(sc, plan);
  if (levels.empty()) levels = default_levels(sc, plan);
  TheoremVerdict v;
  v.id = "level-set";
  const auto ssep = check_tuples(sc, PropertyKind::Ssep, tuples, opt);
  const auto sei = check_set_tuples(sc, PropertyKind::SeiSet, tuples, sc.region, opt);
  v.hypotheses = {ssep, sei};
  for (double r : levels) {
    TheoremVerdict part;
    part.id = "level-set/r";
    part.hypotheses = {ssep, sei};
    part.conclusion = check_level_set_tuples(sc, r, tuples, opt);
    v.parts.push_back(settle(std::move(part)));
  }
  return settle(std::move(v));
}

/// SSEP <=> strong G-invexity of the epigraph.
inline TheoremVerdict validate_epigraph(const Scenario& sc, const SamplePlan& plan, std::size_t value_margin_grid = 3,
                                        const CheckOptions& opt = {}) {
  const auto tuples = detail::tuples_of(sc, plan);
  const auto ssep = check_tuples(sc, PropertyKind::Ssep, tuples, opt);
  const auto epi = check_epigraph_tuples(sc, tuples, value_margin_grid, opt);

  TheoremVerdict forward;
  forward.id = "epigraph/forward";
  forward.hypotheses = {ssep};
  forward.conclusion = epi;
  TheoremVerdict converse;
  converse.id = "epigraph/converse";
  converse.hypotheses = {epi};
  converse.conclusion = ssep;

  TheoremVerdict v;
  v.id = "epigraph";
  v.parts = {settle(std::move(forward)), settle(std::move(converse))};
  return settle(std::move(v));
}

/// Constraints that are SSEP (or SQSEP) give an SEI feasible set X; s and t
/// range over sampled points of X.
inline TheoremVerdict validate_feasible_set_sei(const Scenario& sc, const SamplePlan& plan,
                                                const CheckOptions& opt = {},
                                                PropertyKind premise = PropertyKind::Ssep) {
  if (premise != PropertyKind::Ssep && premise != PropertyKind::Sqsep)
    throw Error("feasible-set premise must be SSEP or SQSEP");
  const Region x = feasible_region(sc);
  const auto all = detail::tuples_of(sc, plan);
  std::size_t dropped = 0;
  const auto inside = restrict_tuples(all, x, &dropped);
  if (inside.empty()) throw SamplingStarved("feasible set has no sampled point on the window");

  TheoremVerdict v;
  v.id = "feasible-sei";
  for (std::size_t j = 0; j < sc.constraints.size(); ++j) {
    Scenario cj = detail::with_h(sc, sc.constraints[j], "constraint " + std::to_string(j));
    auto rep = check_tuples(cj, premise, all, opt);
    rep.property += "[h" + std::to_string(j + 1) + "]";
    v.hypotheses.push_back(std::move(rep));
  }
  auto concl = check_set_tuples(sc, PropertyKind::SeiSet, inside, x, opt);
  concl.skipped.membership_failure += dropped;
  v.conclusion = std::move(concl);
  return settle(std::move(v));
}

inline const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids = {"alpha-contraction", "linear",       "sup",       "compose",
                                               "bridge",            "spsep",        "sqsep",     "quasi-bridge",
                                               "level-set",         "epigraph",     "feasible-sei"};
  return ids;
}

}  // namespace sei
