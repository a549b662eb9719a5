#pragma once

// Problem (P): minimize h over X = {x in S : h_j(x) <= 0} by multi-start
// penalized pattern search, its pulled-back variant (P_alpha), and empirical
// checks of the optimal-set structure results.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "seikit/theorems.hpp"

namespace sei {

struct SolverConfig {
  std::size_t starts = 16;
  std::size_t max_evals_per_start = 2000;
  double penalty_weight = 1e3;
  double penalty_growth = 10.0;
  double penalty_max = 1e9;
  std::optional<double> step_init;  // default: 10% of the box diagonal
  double step_min = 1e-10;
  double opt_cluster_radius = 1e-4;
  double opt_value_tol = 1e-6;
  std::uint64_t seed = 0;

  void validate(const Region& region) const {
    if (starts < 1) throw Error("solver needs at least one start");
    if (max_evals_per_start < 1) throw Error("max_evals_per_start must be positive");
    if (!(penalty_weight > 0.0) || !(penalty_growth > 1.0)) throw Error("penalty weight must be positive and grow");
    if (!(step_min < initial_step(region))) throw Error("step_min must be below step_init");
  }
  double initial_step(const Region& region) const { return step_init.value_or(0.1 * region.diagonal()); }
};

enum class OptStatus { OptimalCandidate, Infeasible, BudgetExhausted };

inline std::string_view to_string(OptStatus s) {
  switch (s) {
    case OptStatus::OptimalCandidate: return "optimal-candidate";
    case OptStatus::Infeasible: return "infeasible";
    case OptStatus::BudgetExhausted: return "budget-exhausted";
  }
  return "unknown";
}

struct StartRecord {
  Point start;
  Point point;
  double value = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool feasible = false;
  std::size_t evals = 0;
  std::vector<double> weights;             // penalty weight of each phase
  std::vector<std::vector<double>> trace;  // penalized objective per accepted move, per phase
};

struct OptResult {
  Point point;
  double value = std::numeric_limits<double>::infinity();
  double constraint_residual = std::numeric_limits<double>::infinity();
  std::size_t starts_converged = 0;
  std::vector<double> per_start_values;
  OptStatus status = OptStatus::Infeasible;
  std::size_t best_start = 0;
  std::vector<StartRecord> starts;
};

namespace detail {

/// Corners of the box, then its center, then seeded uniform fills.
inline std::vector<Point> start_layout(const Region& region, std::size_t count, std::uint64_t seed) {
  const std::size_t n = region.dim();
  std::vector<Point> out;
  const std::size_t corners = n < 20 ? (std::size_t{1} << n) : count;
  for (std::size_t mask = 0; mask < corners && out.size() < count; ++mask) {
    Point c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (mask >> (n - 1 - i)) & 1 ? region.box[i].hi : region.box[i].lo;
    out.push_back(std::move(c));
  }
  if (out.size() < count) {
    Point c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 * (region.box[i].lo + region.box[i].hi);
    out.push_back(std::move(c));
  }
  UniformSource rng(seed);
  while (out.size() < count) {
    Point r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = region.box[i].lo + rng.next() * (region.box[i].hi - region.box[i].lo);
    out.push_back(std::move(r));
  }
  return out;
}

/// Constraint list for X: scenario constraints plus the region membership.
inline std::vector<Expression> feasibility_constraints(const Scenario& sc) {
  std::vector<Expression> cons = sc.constraints;
  if (sc.region.membership) cons.push_back(*sc.region.membership);
  return cons;
}

inline double residual(std::span<const Expression> cons, std::span<const double> x) {
  double r = 0.0;
  for (const auto& c : cons) r = std::max(r, c.value(x));
  return r;
}

/// Multi-start penalized minimization of `objective` (a function of the
/// decision point) subject to `cons`.
template <class Objective>
OptResult minimize(Objective&& objective, std::span<const Expression> cons, const Region& region,
                   const SolverConfig& cfg) {
  cfg.validate(region);
  OptResult res;
  auto penalized = [&](double w) {
    return [&, w](const Point& x) {
      double pen = 0.0;
      for (const auto& c : cons) {
        const double v = std::max(0.0, c.value(x));
        pen += v * v;
      }
      return objective(x) + w * pen;
    };
  };
  for (const auto& start : start_layout(region, cfg.starts, cfg.seed)) {
    StartRecord rec;
    rec.start = start;
    Point x = start;
    double w = cfg.penalty_weight;
    for (;;) {
      PatternSearchOptions ps;
      ps.step_init = cfg.initial_step(region);
      ps.step_min = cfg.step_min;
      ps.max_evals = cfg.max_evals_per_start - rec.evals;
      auto run = pattern_search(penalized(w), x, region.box, ps);
      rec.evals += run.evals;
      rec.weights.push_back(w);
      rec.trace.push_back(std::move(run.trace));
      rec.converged = run.converged;
      x = std::move(run.x);
      double r = std::numeric_limits<double>::infinity();
      try {
        r = residual(cons, x);
      } catch (const EvalError&) {
      }
      rec.residual = r;
      if (r <= cfg.opt_value_tol || w * cfg.penalty_growth > cfg.penalty_max || rec.evals >= cfg.max_evals_per_start)
        break;
      w *= cfg.penalty_growth;
    }
    try {
      rec.value = objective(x);
    } catch (const EvalError&) {
      rec.value = std::numeric_limits<double>::infinity();
    }
    rec.point = std::move(x);
    rec.feasible = rec.residual <= cfg.opt_value_tol && std::isfinite(rec.value);
    res.per_start_values.push_back(rec.value);
    if (rec.feasible && rec.converged) ++res.starts_converged;
    res.starts.push_back(std::move(rec));
  }
  bool any_feasible = false;
  for (std::size_t i = 0; i < res.starts.size(); ++i) {
    const auto& rec = res.starts[i];
    if (!rec.feasible) continue;
    if (!any_feasible || rec.value < res.value) {
      any_feasible = true;
      res.value = rec.value;
      res.point = rec.point;
      res.constraint_residual = rec.residual;
      res.best_start = i;
    }
  }
  if (!any_feasible)
    res.status = OptStatus::Infeasible;
  else if (res.starts_converged == 0)
    res.status = OptStatus::BudgetExhausted;
  else
    res.status = OptStatus::OptimalCandidate;
  return res;
}

}  // namespace detail

/// min h(x) s.t. h_j(x) <= 0, x in S.
inline OptResult solve_p(const Scenario& sc, const SolverConfig& cfg = {}) {
  const auto cons = detail::feasibility_constraints(sc);
  return detail::minimize([&](const Point& x) { return sc.h.value(x); }, cons, sc.region, cfg);
}

struct AlphaSolveResult {
  double alpha = 0.0;
  OptResult t_star;
  Point mapped;
  double mapped_value = std::numeric_limits<double>::infinity();
  bool mapped_feasible = false;
  OptResult direct;               // solve_p on the same scenario
  CheckReport ssep;               // premises checked on the plan before asserting the reduction
  CheckReport contraction;
  bool asserted = false;          // both premises hold
  bool consistent = true;         // mapped_value <= direct value + opt_value_tol whenever asserted
  std::vector<std::string> notes;
};

/// min h(alpha*t + E(t)) over t in X; maps the minimizer forward.
inline AlphaSolveResult solve_p_alpha(const Scenario& sc, double alpha, const SolverConfig& cfg = {},
                                      const SamplePlan& plan = {}, const CheckOptions& opt = {}) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  AlphaSolveResult out;
  out.alpha = alpha;
  const auto cons = detail::feasibility_constraints(sc);
  auto pulled = [&](const Point& t) { return sc.h.value(detail::axpy(alpha, t, sc.apply_e(t))); };
  out.t_star = detail::minimize(pulled, cons, sc.region, cfg);
  out.direct = solve_p(sc, cfg);
  if (out.t_star.status != OptStatus::Infeasible) {
    out.mapped = detail::axpy(alpha, out.t_star.point, sc.apply_e(out.t_star.point));
    out.mapped_value = sc.h.value(out.mapped);
    out.mapped_feasible = member(sc.region, out.mapped, cfg.opt_value_tol) &&
                          detail::residual(sc.constraints, out.mapped) <= cfg.opt_value_tol;
  }
  const auto tuples = enumerate(plan, sc.region).tuples;
  out.ssep = check_tuples(sc, PropertyKind::Ssep, tuples, opt);
  out.contraction = check_alpha_contraction(sc, tuples, opt);
  out.asserted = out.ssep.verdict == Verdict::Holds && out.contraction.verdict == Verdict::Holds;
  if (out.asserted && out.t_star.status != OptStatus::Infeasible && out.direct.status != OptStatus::Infeasible)
    out.consistent = out.mapped_value <= out.direct.value + cfg.opt_value_tol;
  if (!out.asserted) out.notes.push_back("SSEP or h(alpha t + E t) <= h(t) fails on the plan; reduction not asserted");
  if (!out.mapped_feasible) out.notes.push_back("mapped point alpha t* + E t* is not feasible");
  return out;
}

struct OptimalSetEstimate {
  OptResult solve;
  double beta = std::numeric_limits<double>::infinity();
  std::vector<Point> x_opt_sample;
  Region x_opt;
  CheckReport hypothesis;  // SSEP of h
  CheckReport sei_report;
  bool trivial = false;
  bool asserted = false;
  bool consistent = true;
  std::vector<std::string> notes;
};

/// beta = min value, X_opt sampled from plan grid points and start endpoints,
/// SEI of X_opt checked with s, t over that sample.
inline OptimalSetEstimate estimate_optimal_set(const Scenario& sc, const SolverConfig& cfg = {},
                                               const SamplePlan& plan = {}, const CheckOptions& opt = {}) {
  OptimalSetEstimate out;
  out.solve = solve_p(sc, cfg);
  if (out.solve.status == OptStatus::Infeasible) throw Error("estimate_optimal_set: problem is infeasible");
  out.beta = out.solve.value;
  const auto cons = detail::feasibility_constraints(sc);

  std::vector<Expression> parts = cons;
  parts.push_back(affine(sc.h, 1.0, -(out.beta + cfg.opt_value_tol)));
  out.x_opt.box = sc.region.box;
  out.x_opt.membership = pointwise_max(parts);
  out.x_opt.description = "optimal set: feasible points with h <= beta + opt_value_tol";

  std::vector<Point> candidates = grid_points(sc.region, plan.grid_per_dim);
  for (const auto& rec : out.solve.starts) candidates.push_back(rec.point);
  for (const auto& x : candidates) {
    bool keep = false;
    try {
      keep = member(out.x_opt, x, 0.0);
    } catch (const EvalError&) {
    }
    if (keep && std::find(out.x_opt_sample.begin(), out.x_opt_sample.end(), x) == out.x_opt_sample.end())
      out.x_opt_sample.push_back(x);
  }

  std::vector<SampleTuple> tuples;
  const auto alphas = unit_grid(plan.alpha_grid);
  const auto lambdas = unit_grid(plan.lambda_grid);
  for (const auto& s : out.x_opt_sample)
    for (const auto& t : out.x_opt_sample)
      for (double a : alphas)
        for (double l : lambdas) tuples.push_back({s, t, a, l, Origin::Grid, tuples.size()});

  out.hypothesis = check_pointwise_inequality(sc, PropertyKind::Ssep, plan, opt);
  out.asserted = out.hypothesis.verdict == Verdict::Holds;
  if (out.x_opt_sample.size() < 2) {
    out.trivial = true;
    out.sei_report.property = "SEI_SET";
    out.sei_report.verdict = Verdict::Holds;
    out.sei_report.window = out.x_opt;
    out.sei_report.tol = opt.tol;
    out.sei_report.notes.push_back("trivial pass: fewer than two distinct optimal points sampled");
  } else {
    out.sei_report = check_set_tuples(sc, PropertyKind::SeiSet, tuples, out.x_opt, opt);
  }
  if (!out.asserted) out.notes.push_back("h is not SSEP on the plan; SEI of the optimal set is reported, not asserted");
  out.consistent = !(out.asserted && out.sei_report.verdict == Verdict::Violated);
  return out;
}

struct LocalGlobalReport {
  OptResult solve;
  double beta = std::numeric_limits<double>::infinity();
  bool local_equals_global = true;
  std::vector<std::size_t> worse_starts;  // converged feasible starts strictly above beta + tol
  CheckReport ssep;
  CheckReport strict;  // SSSEP, or SSQSEP when SSSEP does not hold
  bool uniqueness_applicable = false;
  std::size_t clusters = 0;
  std::optional<bool> unique;
  bool consistent = true;
  std::vector<std::string> notes;
};

/// (a) every converged feasible start reaches beta; (b) under a strict
/// hypothesis, all converged points lie in one cluster.
inline LocalGlobalReport check_local_global_uniqueness(const Scenario& sc, const SolverConfig& cfg = {},
                                                       const SamplePlan& plan = {}, const CheckOptions& opt = {}) {
  LocalGlobalReport out;
  out.solve = solve_p(sc, cfg);
  if (out.solve.status == OptStatus::Infeasible) throw Error("local/global check: problem is infeasible");
  if (out.solve.starts_converged < 2) throw Error("local/global check: fewer than two converged starts");
  out.beta = out.solve.value;

  std::vector<const StartRecord*> converged;
  for (std::size_t i = 0; i < out.solve.starts.size(); ++i) {
    const auto& rec = out.solve.starts[i];
    if (!rec.feasible || !rec.converged) continue;
    converged.push_back(&rec);
    if (rec.value > out.beta + cfg.opt_value_tol) {
      out.local_equals_global = false;
      out.worse_starts.push_back(i);
    }
  }

  const auto tuples = enumerate(plan, sc.region).tuples;
  out.ssep = check_tuples(sc, PropertyKind::Ssep, tuples, opt);
  out.strict = check_tuples(sc, PropertyKind::Sssep, tuples, opt);
  if (out.strict.verdict != Verdict::Holds) {
    auto quasi = check_tuples(sc, PropertyKind::Ssqsep, tuples, opt);
    if (quasi.verdict == Verdict::Holds) out.strict = std::move(quasi);
  }
  out.uniqueness_applicable = out.strict.verdict == Verdict::Holds;

  std::vector<Point> centers;
  for (const auto* rec : converged) {
    const bool near = std::any_of(centers.begin(), centers.end(), [&](const Point& c) {
      return detail::norm(detail::axpy(-1.0, c, rec->point)) <= cfg.opt_cluster_radius;
    });
    if (!near) centers.push_back(rec->point);
  }
  out.clusters = centers.size();
  if (out.uniqueness_applicable) {
    out.unique = out.clusters == 1;
  } else {
    out.notes.push_back("uniqueness not applicable: no strict hypothesis holds on the plan");
  }
  if (out.ssep.verdict != Verdict::Holds)
    out.notes.push_back("SSEP fails on the plan; local = global is reported, not asserted");
  out.notes.push_back("starred symbols in the local-global argument are read as E-images (s* = E(s))");
  const bool red_local = out.ssep.verdict == Verdict::Holds && !out.local_equals_global;
  const bool red_unique = out.uniqueness_applicable && out.unique == false;
  out.consistent = !red_local && !red_unique;
  if (red_local) out.notes.push_back("RED ALERT: SSEP holds but a converged start is strictly worse than beta");
  if (red_unique) out.notes.push_back("RED ALERT: " + out.strict.property + " holds but optimal points form several clusters");
  return out;
}

}  // namespace sei
