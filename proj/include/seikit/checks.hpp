#pragma once

// Sampled verification of the (semi) strongly E-convex / E-preinvex / E-invex
// property family. Every check walks a tuple stream in ordinal order and keeps
// the first violation as the canonical witness.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seikit/model.hpp"
#include "seikit/pattern_search.hpp"
#include "seikit/sampling.hpp"

namespace sei {

enum class PropertyKind {
  SeiSet,
  SecSet,
  Ssep,
  Sssep,
  Sqsep,
  Ssqsep,
  Sep,
  Qsep,
  SqsepStrictE,
  Ssec,
  Sssec,
  Sqsec,
  Ssqsec,
  Spsep,
  Psep,
  SeiDiff,
  Ssei,
  Sqsei,
  Spsei,
  ConditionA,
};

inline constexpr std::array<std::pair<PropertyKind, std::string_view>, 20> kPropertyTags = {{
    {PropertyKind::SeiSet, "SEI_SET"},
    {PropertyKind::SecSet, "SEC_SET"},
    {PropertyKind::Ssep, "SSEP"},
    {PropertyKind::Sssep, "SSSEP"},
    {PropertyKind::Sqsep, "SQSEP"},
    {PropertyKind::Ssqsep, "SSQSEP"},
    {PropertyKind::Sep, "SEP"},
    {PropertyKind::Qsep, "QSEP"},
    {PropertyKind::SqsepStrictE, "SQSEP_STRICT_E"},
    {PropertyKind::Ssec, "SSEC"},
    {PropertyKind::Sssec, "SSSEC"},
    {PropertyKind::Sqsec, "SQSEC"},
    {PropertyKind::Ssqsec, "SSQSEC"},
    {PropertyKind::Spsep, "SPSEP"},
    {PropertyKind::Psep, "PSEP"},
    {PropertyKind::SeiDiff, "SEI_DIFF"},
    {PropertyKind::Ssei, "SSEI"},
    {PropertyKind::Sqsei, "SQSEI"},
    {PropertyKind::Spsei, "SPSEI"},
    {PropertyKind::ConditionA, "CONDITION_A"},
}};

inline std::string_view tag(PropertyKind kind) {
  for (const auto& [k, name] : kPropertyTags)
    if (k == kind) return name;
  return "UNKNOWN";
}

/// Case-insensitive; '-' and '_' are interchangeable.
inline std::optional<PropertyKind> parse_property(std::string_view text) {
  std::string norm;
  for (char c : text) norm += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& [k, name] : kPropertyTags)
    if (name == norm) return k;
  return std::nullopt;
}

enum class Family { Set, Pointwise, Implication, ConditionA };

inline Family family(PropertyKind kind) {
  switch (kind) {
    case PropertyKind::SeiSet:
    case PropertyKind::SecSet: return Family::Set;
    case PropertyKind::Spsep:
    case PropertyKind::Psep:
    case PropertyKind::Sqsei:
    case PropertyKind::Spsei: return Family::Implication;
    case PropertyKind::ConditionA: return Family::ConditionA;
    default: return Family::Pointwise;
  }
}

inline bool uses_gradient(PropertyKind kind) {
  return kind == PropertyKind::SeiDiff || kind == PropertyKind::Ssei || kind == PropertyKind::Sqsei ||
         kind == PropertyKind::Spsei;
}

enum class Verdict { Holds, Violated, Inapplicable };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds-on-samples";
    case Verdict::Violated: return "violated";
    case Verdict::Inapplicable: return "inapplicable";
  }
  return "unknown";
}

inline std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "holds-on-samples" || text == "holds") return Verdict::Holds;
  if (text == "violated") return Verdict::Violated;
  if (text == "inapplicable") return Verdict::Inapplicable;
  return std::nullopt;
}

enum class SkipReason { NonSmooth, MembershipFailure, StrictnessExclusion, PreimageNotFound, InvalidCandidate };

struct SkipCounts {
  std::size_t non_smooth = 0;
  std::size_t membership_failure = 0;
  std::size_t strictness_exclusion = 0;
  std::size_t preimage_not_found = 0;
  std::size_t invalid_candidate = 0;

  std::size_t total() const {
    return non_smooth + membership_failure + strictness_exclusion + preimage_not_found + invalid_candidate;
  }

  void add(SkipReason r) {
    switch (r) {
      case SkipReason::NonSmooth: ++non_smooth; break;
      case SkipReason::MembershipFailure: ++membership_failure; break;
      case SkipReason::StrictnessExclusion: ++strictness_exclusion; break;
      case SkipReason::PreimageNotFound: ++preimage_not_found; break;
      case SkipReason::InvalidCandidate: ++invalid_candidate; break;
    }
  }
};

struct CheckOptions {
  double tol = 1e-9;             // absolute and relative inequality slack
  double strict_margin = 1e-12;  // strict variants need lhs < rhs - strict_margin
  double grad_tol = 1e-6;        // extra slack on gradient terms (relative to |lhs|)
  double fd_step = 1e-6;         // relative finite-difference step
  std::size_t preimage_budget = 200;
};

/// max(tol, tol * max(1, |ref|)).
inline double slack(double tol, double ref) { return std::max(tol, tol * std::max(1.0, std::abs(ref))); }

struct TupleOutcome {
  enum class Status { Evaluated, Vacuous, Skipped };
  Status status = Status::Evaluated;
  SkipReason reason = SkipReason::NonSmooth;
  double lhs = 0.0;
  double rhs = 0.0;
  double allowed = 0.0;  // non-strict: violation iff margin > allowed; strict: iff margin >= allowed
  bool strict = false;
  Point point;

  double margin() const { return lhs - rhs; }
  bool violated() const {
    if (status != Status::Evaluated) return false;
    return strict ? margin() >= allowed : margin() > allowed;
  }

  static TupleOutcome skipped(SkipReason r) {
    TupleOutcome o;
    o.status = Status::Skipped;
    o.reason = r;
    return o;
  }
  static TupleOutcome vacuous() {
    TupleOutcome o;
    o.status = Status::Vacuous;
    return o;
  }
};

struct Witness {
  SampleTuple tuple;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double allowed = 0.0;
  bool strict = false;
  Point point;
  std::optional<std::array<double, 2>> offsets;  // epigraph checks only
};

struct CheckReport {
  std::string property;
  Verdict verdict = Verdict::Holds;
  std::optional<Witness> witness;
  std::size_t samples_tested = 0;
  std::size_t vacuous = 0;
  std::size_t violations = 0;
  SkipCounts skipped;
  Region window;
  double tol = 0.0;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
};

/// Raised when an expression fails at some tuple; names the tuple.
class CheckAborted : public Error {
 public:
  CheckAborted(const SampleTuple& tuple, const std::string& cause)
      : Error("evaluation failed at tuple #" + std::to_string(tuple.index) + " (s=" + detail::format_point(tuple.s) +
              ", t=" + detail::format_point(tuple.t) + ", (alpha, lambda)=" +
              detail::format_point(std::array<double, 2>{tuple.alpha, tuple.lambda}) + "): " + cause),
        tuple_(tuple) {}
  const SampleTuple& tuple() const { return tuple_; }

 private:
  SampleTuple tuple_;
};

namespace detail {

inline double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline Point axpy(double alpha, std::span<const double> x, std::span<const double> y) {
  Point out(y.begin(), y.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * x[i];
  return out;
}

inline bool open_unit(double lambda) { return lambda > 0.0 && lambda < 1.0; }

}  // namespace detail

/// a = alpha*s + E(s), b = alpha*t + E(t).
struct Combination {
  Point a;
  Point b;
};

inline Combination combine(const Scenario& sc, const SampleTuple& tp) {
  return {detail::axpy(tp.alpha, tp.s, sc.apply_e(tp.s)), detail::axpy(tp.alpha, tp.t, sc.apply_e(tp.t))};
}

/// Invex combination b + lambda * psi(a, b).
inline Point invex_point(const Scenario& sc, const Combination& c, double lambda) {
  return detail::axpy(lambda, sc.apply_psi(c.a, c.b), c.b);
}

/// Convex combination lambda * a + (1 - lambda) * b.
inline Point convex_point(const Combination& c, double lambda) {
  Point out(c.a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda * c.a[i] + (1.0 - lambda) * c.b[i];
  return out;
}

/// Gradient of h at x: analytic when the scenario supplies grad_h, otherwise
/// central differences. nullopt when the finite-difference sample is non-smooth.
inline std::optional<Point> gradient_at(const Scenario& sc, std::span<const double> x, const CheckOptions& opt) {
  if (sc.grad_h) return (*sc.grad_h)(x);
  auto g = grad_fd(sc.h, x, opt.fd_step);
  if (g.non_smooth) return std::nullopt;
  return std::move(g.value);
}

namespace detail {

inline TupleOutcome set_outcome(const Scenario& sc, PropertyKind kind, const SampleTuple& tp, const Region& target,
                                const CheckOptions& opt) {
  const Combination c = combine(sc, tp);
  TupleOutcome o;
  o.point = kind == PropertyKind::SeiSet ? invex_point(sc, c, tp.lambda) : convex_point(c, tp.lambda);
  o.lhs = target.violation(o.point);
  o.rhs = 0.0;
  o.allowed = opt.tol;
  return o;
}

inline TupleOutcome pointwise_outcome(const Scenario& sc, PropertyKind kind, const SampleTuple& tp,
                                      const CheckOptions& opt) {
  using K = PropertyKind;
  const Combination c = combine(sc, tp);
  const double l = tp.lambda;
  auto h = [&](std::span<const double> x) { return sc.h.value(x); };

  TupleOutcome o;
  switch (kind) {
    case K::Sssep:
    case K::Sssec:
    case K::Ssqsec:
      if (!open_unit(l) || norm(axpy(-1.0, c.b, c.a)) <= opt.tol) return TupleOutcome::skipped(SkipReason::StrictnessExclusion);
      break;
    case K::Ssqsep:
      if (!open_unit(l) || std::abs(h(tp.s) - h(tp.t)) <= opt.tol)
        return TupleOutcome::skipped(SkipReason::StrictnessExclusion);
      break;
    case K::SqsepStrictE:
      if (!open_unit(l) || std::abs(h(sc.apply_e(tp.s)) - h(sc.apply_e(tp.t))) <= opt.tol)
        return TupleOutcome::skipped(SkipReason::StrictnessExclusion);
      break;
    default: break;
  }

  switch (kind) {
    case K::SeiDiff:
    case K::Ssei: {
      const Point et = sc.apply_e(tp.t);
      const auto grad = gradient_at(sc, et, opt);
      if (!grad) return TupleOutcome::skipped(SkipReason::NonSmooth);
      o.point = et;
      o.lhs = dot(*grad, sc.apply_psi(c.a, c.b));
      o.rhs = kind == K::Ssei ? h(tp.s) - h(tp.t) : h(sc.apply_e(tp.s)) - h(et);
      o.allowed = std::max(slack(opt.tol, o.rhs), opt.grad_tol * std::max(1.0, std::abs(o.lhs)));
      return o;
    }
    case K::Ssec:
    case K::Sssec:
    case K::Sqsec:
    case K::Ssqsec: o.point = convex_point(c, l); break;
    default: o.point = invex_point(sc, c, l); break;
  }
  o.lhs = h(o.point);

  switch (kind) {
    case K::Ssep:
    case K::Sssep:
    case K::Ssec:
    case K::Sssec: o.rhs = l * h(tp.s) + (1.0 - l) * h(tp.t); break;
    case K::Sqsep:
    case K::Ssqsep:
    case K::Sqsec:
    case K::Ssqsec: o.rhs = std::max(h(tp.s), h(tp.t)); break;
    case K::Sep: o.rhs = l * h(sc.apply_e(tp.s)) + (1.0 - l) * h(sc.apply_e(tp.t)); break;
    case K::Qsep:
    case K::SqsepStrictE: o.rhs = std::max(h(sc.apply_e(tp.s)), h(sc.apply_e(tp.t))); break;
    default: throw Error("property " + std::string(tag(kind)) + " is not a pointwise inequality");
  }

  switch (kind) {
    case K::Sssep:
    case K::Ssqsep:
    case K::SqsepStrictE:
    case K::Sssec:
    case K::Ssqsec:
      o.strict = true;
      o.allowed = -opt.strict_margin;
      break;
    default: o.allowed = slack(opt.tol, o.rhs); break;
  }
  return o;
}

inline TupleOutcome implication_outcome(const Scenario& sc, PropertyKind kind, const SampleTuple& tp,
                                        const CheckOptions& opt) {
  using K = PropertyKind;
  auto h = [&](std::span<const double> x) { return sc.h.value(x); };
  const Combination c = combine(sc, tp);
  TupleOutcome o;
  switch (kind) {
    case K::Sqsei: {
      const double hs = h(tp.s);
      const double ht = h(tp.t);
      if (!(hs <= ht + slack(opt.tol, ht))) return TupleOutcome::vacuous();
      const Point et = sc.apply_e(tp.t);
      const auto grad = gradient_at(sc, et, opt);
      if (!grad) return TupleOutcome::skipped(SkipReason::NonSmooth);
      o.point = et;
      o.lhs = dot(*grad, sc.apply_psi(c.a, c.b));
      o.rhs = 0.0;
      o.allowed = std::max(opt.tol, opt.grad_tol * std::max(1.0, std::abs(o.lhs)));
      return o;
    }
    case K::Spsei: {
      const Point et = sc.apply_e(tp.t);
      const auto grad = gradient_at(sc, et, opt);
      if (!grad) return TupleOutcome::skipped(SkipReason::NonSmooth);
      const double directional = dot(*grad, sc.apply_psi(c.a, c.b));
      if (!(directional >= -std::max(opt.tol, opt.grad_tol * std::max(1.0, std::abs(directional)))))
        return TupleOutcome::vacuous();
      // consequent h(s) >= h(t), tested as h(t) <= h(s)
      o.point = et;
      o.lhs = h(tp.t);
      o.rhs = h(tp.s);
      o.allowed = slack(opt.tol, o.rhs);
      return o;
    }
    case K::Spsep:
    case K::Psep: {
      const bool semi = kind == K::Spsep;
      const Point first = semi ? tp.s : sc.apply_e(tp.s);
      const Point second = semi ? tp.t : sc.apply_e(tp.t);
      const double h1 = h(first);
      const double h2 = h(second);
      if (!(h1 < h2)) return TupleOutcome::vacuous();
      const double b = sc.b_candidate ? sc.apply_b(first, second) : h2 - h1;
      if (!(b > 0.0)) return TupleOutcome::skipped(SkipReason::InvalidCandidate);
      o.point = invex_point(sc, c, tp.lambda);
      o.lhs = h(o.point);
      o.rhs = h2 + tp.lambda * (tp.lambda - 1.0) * b;
      o.allowed = slack(opt.tol, o.rhs);
      return o;
    }
    default: throw Error("property " + std::string(tag(kind)) + " is not an implication");
  }
}

/// Searches t_bar with E(t_bar) = target inside the region; nullopt if the
/// residual stays above the allowed slack.
inline std::optional<Point> find_preimage(const Scenario& sc, std::span<const double> target,
                                          std::span<const double> start, double allowed, const CheckOptions& opt) {
  auto residual = [&](std::span<const double> x) { return norm(axpy(-1.0, target, sc.apply_e(x))); };
  auto accept = [&](const Point& x) { return residual(x) <= allowed && member(sc.region, x, opt.tol); };
  if (sc.e_preimage) {
    Point guess = (*sc.e_preimage)(target);
    if (accept(guess)) return guess;
    return std::nullopt;
  }
  PatternSearchOptions ps;
  ps.step_init = 0.1 * sc.region.diagonal();
  ps.step_min = 1e-14 * std::max(1.0, sc.region.diagonal());
  ps.max_evals = opt.preimage_budget;
  auto objective = [&](const Point& x) {
    const Point d = axpy(-1.0, target, sc.apply_e(x));
    return dot(d, d);
  };
  auto found = pattern_search(objective, Point(start.begin(), start.end()), sc.region.box, ps);
  try {
    if (accept(found.x)) return found.x;
  } catch (const EvalError&) {
  }
  return std::nullopt;
}

struct ConditionAResiduals {
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Clause residuals as printed:
///   A1: psi(at+Et, a*tb+E*tb) + lambda*(a*tb + psi(as+Es, at+Et))
///   A2: psi(as+Es, a*tb+E*tb) - (1-lambda)*(a*tb + psi(as+Es, at+Et))
inline ConditionAResiduals condition_a_residuals(const Scenario& sc, const SampleTuple& tp, std::span<const double> tbar) {
  const Combination c = combine(sc, tp);
  const Point base = sc.apply_psi(c.a, c.b);
  const Point tb = axpy(tp.alpha, tbar, sc.apply_e(tbar));
  Point shifted(tbar.size());
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = tp.alpha * tbar[i] + base[i];
  const Point a1 = axpy(tp.lambda, shifted, sc.apply_psi(c.b, tb));
  const Point a2 = axpy(-(1.0 - tp.lambda), shifted, sc.apply_psi(c.a, tb));
  return {norm(a1), norm(a2)};
}

/// Condition C residual: the clauses with alpha = 0 and E = identity.
inline double condition_c_residual(const Scenario& sc, const SampleTuple& tp) {
  const Point base = sc.apply_psi(tp.s, tp.t);
  const Point moved = axpy(tp.lambda, base, tp.t);
  const Point c1 = axpy(tp.lambda, base, sc.apply_psi(tp.t, moved));
  const Point c2 = axpy(-(1.0 - tp.lambda), base, sc.apply_psi(tp.s, moved));
  return std::max(norm(c1), norm(c2));
}

inline TupleOutcome condition_a_outcome(const Scenario& sc, const SampleTuple& tp, const CheckOptions& opt) {
  const Combination c = combine(sc, tp);
  const Point target = invex_point(sc, c, tp.lambda);
  const double allowed = slack(opt.tol, max_abs(target));
  const auto tbar = find_preimage(sc, target, tp.t, allowed, opt);
  if (!tbar) return TupleOutcome::skipped(SkipReason::PreimageNotFound);
  const auto r = condition_a_residuals(sc, tp, *tbar);
  TupleOutcome o;
  o.point = *tbar;
  o.lhs = std::max(r.a1, r.a2);
  o.rhs = 0.0;
  o.allowed = allowed;
  return o;
}

}  // namespace detail

/// Evaluates one tuple for any property kind. Set properties test membership
/// in the scenario region.
inline TupleOutcome evaluate_tuple(const Scenario& sc, PropertyKind kind, const SampleTuple& tp,
                                   const CheckOptions& opt = {}) {
  switch (family(kind)) {
    case Family::Set: return detail::set_outcome(sc, kind, tp, sc.region, opt);
    case Family::Pointwise: return detail::pointwise_outcome(sc, kind, tp, opt);
    case Family::Implication: return detail::implication_outcome(sc, kind, tp, opt);
    case Family::ConditionA: return detail::condition_a_outcome(sc, tp, opt);
  }
  throw Error("unknown property family");
}

/// Generic aggregation: canonical witness is the violated tuple with the
/// smallest ordinal; evaluation errors abort with the tuple identified.
template <class Evaluate>
CheckReport aggregate(std::string property, const Region& window, std::span<const SampleTuple> tuples, double tol,
                      Evaluate&& evaluate) {
  CheckReport rep;
  rep.property = std::move(property);
  rep.window = window;
  rep.tol = tol;
  for (const auto& tp : tuples) {
    TupleOutcome o;
    try {
      o = evaluate(tp);
    } catch (const EvalError& e) {
      throw CheckAborted(tp, e.what());
    }
    switch (o.status) {
      case TupleOutcome::Status::Skipped: rep.skipped.add(o.reason); continue;
      case TupleOutcome::Status::Vacuous: ++rep.vacuous; continue;
      case TupleOutcome::Status::Evaluated: ++rep.samples_tested; break;
    }
    if (o.violated()) {
      ++rep.violations;
      if (!rep.witness) rep.witness = Witness{tp, o.lhs, o.rhs, o.margin(), o.allowed, o.strict, o.point, std::nullopt};
    }
  }
  if (rep.witness) {
    rep.verdict = Verdict::Violated;
  } else if (rep.samples_tested == 0) {
    rep.verdict = Verdict::Inapplicable;
  } else if (2 * rep.skipped.non_smooth > tuples.size()) {
    rep.verdict = Verdict::Inapplicable;
    rep.notes.push_back("more than half of the tuples were non-smooth");
  } else {
    rep.verdict = Verdict::Holds;
  }
  return rep;
}

/// Property check on a prepared tuple list (tuples must lie in the scenario region).
inline CheckReport check_tuples(const Scenario& sc, PropertyKind kind, std::span<const SampleTuple> tuples,
                                const CheckOptions& opt = {}) {
  auto rep = aggregate(std::string(tag(kind)), sc.region, tuples, opt.tol,
                       [&](const SampleTuple& tp) { return evaluate_tuple(sc, kind, tp, opt); });
  if (kind == PropertyKind::ConditionA) {
    double worst = 0.0;
    for (const auto& tp : tuples) worst = std::max(worst, detail::condition_c_residual(sc, tp));
    rep.diagnostics["condition_c_residual_max"] = worst;
    rep.notes.push_back(
        "clause A1 is evaluated as printed (with alpha*t_bar inside the bracket); condition_c_residual_max "
        "reports the alpha = 0, E = identity reduction for comparison");
  }
  return rep;
}

/// SEI_SET / SEC_SET closure test against an arbitrary target set.
inline CheckReport check_set_tuples(const Scenario& sc, PropertyKind kind, std::span<const SampleTuple> tuples,
                                    const Region& target, const CheckOptions& opt = {}, std::string label = {}) {
  if (family(kind) != Family::Set) throw Error("expected SEI_SET or SEC_SET");
  return aggregate(label.empty() ? std::string(tag(kind)) : std::move(label), target, tuples, opt.tol,
                   [&](const SampleTuple& tp) { return detail::set_outcome(sc, kind, tp, target, opt); });
}

inline CheckReport check_set_property(const Scenario& sc, PropertyKind kind, const SamplePlan& plan,
                                      const CheckOptions& opt = {}) {
  if (family(kind) != Family::Set) throw Error("check_set_property expects SEI_SET or SEC_SET");
  const auto stream = enumerate(plan, sc.region);
  return check_set_tuples(sc, kind, stream.tuples, sc.region, opt);
}

inline CheckReport check_pointwise_inequality(const Scenario& sc, PropertyKind kind, const SamplePlan& plan,
                                              const CheckOptions& opt = {}) {
  if (family(kind) != Family::Pointwise) throw Error(std::string(tag(kind)) + " is not a pointwise inequality");
  const auto stream = enumerate(plan, sc.region);
  return check_tuples(sc, kind, stream.tuples, opt);
}

inline CheckReport check_implication_property(const Scenario& sc, PropertyKind kind, const SamplePlan& plan,
                                              const CheckOptions& opt = {}) {
  if (family(kind) != Family::Implication) throw Error(std::string(tag(kind)) + " is not an implication property");
  const auto stream = enumerate(plan, sc.region);
  auto rep = check_tuples(sc, kind, stream.tuples, opt);
  if ((kind == PropertyKind::Spsep || kind == PropertyKind::Psep) && !sc.b_candidate)
    rep.notes.push_back("gap function b defaults to h(t) - h(s) on tuples with h(s) < h(t)");
  return rep;
}

inline CheckReport check_condition_a(const Scenario& sc, const SamplePlan& plan, const CheckOptions& opt = {}) {
  const auto stream = enumerate(plan, sc.region);
  return check_tuples(sc, PropertyKind::ConditionA, stream.tuples, opt);
}

/// Dispatches on the property family.
inline CheckReport check_property(const Scenario& sc, PropertyKind kind, const SamplePlan& plan,
                                  const CheckOptions& opt = {}) {
  switch (family(kind)) {
    case Family::Set: return check_set_property(sc, kind, plan, opt);
    case Family::Pointwise: return check_pointwise_inequality(sc, kind, plan, opt);
    case Family::Implication: return check_implication_property(sc, kind, plan, opt);
    case Family::ConditionA: return check_condition_a(sc, plan, opt);
  }
  throw Error("unknown property family");
}

/// Keeps tuples whose s and t both belong to `target`; dropped tuples are
/// counted as membership failures by the caller.
inline std::vector<SampleTuple> restrict_tuples(std::span<const SampleTuple> tuples, const Region& target,
                                                std::size_t* dropped = nullptr) {
  std::vector<SampleTuple> out;
  std::size_t skipped = 0;
  for (const auto& tp : tuples) {
    if (member(target, tp.s, 0.0) && member(target, tp.t, 0.0))
      out.push_back(tp);
    else
      ++skipped;
  }
  if (dropped) *dropped = skipped;
  return out;
}

/// K_r = {x in S : h(x) <= r + slack}.
inline Region level_set_region(const Scenario& sc, double r, const CheckOptions& opt = {}) {
  Region k = sc.region;
  const Expression excess = affine(sc.h, 1.0, -(r + slack(opt.tol, r)));
  if (sc.region.membership) {
    const Expression parts[] = {*sc.region.membership, excess};
    k.membership = pointwise_max(parts);
  } else {
    k.membership = excess;
  }
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, r).ptr;
  k.description = "lower level set h <= " + std::string(buf, end) +
                  (sc.region.description.empty() ? "" : " within " + sc.region.description);
  return k;
}

inline CheckReport check_level_set_tuples(const Scenario& sc, double r, std::span<const SampleTuple> tuples,
                                          const CheckOptions& opt = {}) {
  const Region k = level_set_region(sc, r, opt);
  std::vector<SampleTuple> kept;
  std::size_t dropped = 0;
  for (const auto& tp : tuples) {
    if (sc.h.value(tp.s) <= r && sc.h.value(tp.t) <= r)
      kept.push_back(tp);
    else
      ++dropped;
  }
  CheckOptions member_opt = opt;
  member_opt.tol = slack(opt.tol, r);
  auto rep = check_set_tuples(sc, PropertyKind::SeiSet, kept, k, member_opt, "LEVEL_SET_SEI");
  rep.skipped.membership_failure += dropped;
  rep.diagnostics["level"] = r;
  if (kept.empty()) rep.notes.push_back("level set is empty on the sampled window");
  return rep;
}

/// SEI_SET on the lower level set K_r; s and t restricted to K_r.
inline CheckReport check_level_set_sei(const Scenario& sc, double r, const SamplePlan& plan,
                                       const CheckOptions& opt = {}) {
  const auto stream = enumerate(plan, sc.region);
  return check_level_set_tuples(sc, r, stream.tuples, opt);
}

/// Offsets above h used for epigraph samples: {0, 1, 10, 100, ...}.
inline std::vector<double> epigraph_offsets(std::size_t count) {
  if (count == 0) throw Error("value_margin_grid must be at least 1");
  std::vector<double> out{0.0};
  double v = 1.0;
  while (out.size() < count) {
    out.push_back(v);
    v *= 10.0;
  }
  return out;
}

inline CheckReport check_epigraph_tuples(const Scenario& sc, std::span<const SampleTuple> tuples,
                                         std::size_t value_margin_grid, const CheckOptions& opt = {}) {
  const auto offsets = epigraph_offsets(value_margin_grid);
  CheckReport rep;
  rep.property = "EPIGRAPH_GINVEX";
  rep.window = sc.region;
  rep.tol = opt.tol;
  for (const auto& tp : tuples) {
    try {
      const Point p = invex_point(sc, combine(sc, tp), tp.lambda);
      const double lhs = sc.h.value(p);
      const double hs = sc.h.value(tp.s);
      const double ht = sc.h.value(tp.t);
      for (double os : offsets) {
        for (double ot : offsets) {
          const double rhs = tp.lambda * (hs + os) + (1.0 - tp.lambda) * (ht + ot);
          const double allowed = slack(opt.tol, rhs);
          ++rep.samples_tested;
          if (lhs - rhs > allowed) {
            ++rep.violations;
            if (!rep.witness)
              rep.witness = Witness{tp, lhs, rhs, lhs - rhs, allowed, false, p, std::array<double, 2>{os, ot}};
          }
        }
      }
    } catch (const EvalError& e) {
      throw CheckAborted(tp, e.what());
    }
  }
  rep.verdict = rep.witness ? Verdict::Violated : rep.samples_tested ? Verdict::Holds : Verdict::Inapplicable;
  rep.diagnostics["offset_count"] = static_cast<double>(offsets.size());
  return rep;
}

/// Strong G-invexity of epi(h): (P, lambda*p + (1-lambda)*q) must stay in epi(h)
/// for p = h(s) + offset, q = h(t) + offset'.
inline CheckReport check_epigraph_ginvex(const Scenario& sc, const SamplePlan& plan, std::size_t value_margin_grid = 3,
                                         const CheckOptions& opt = {}) {
  const auto stream = enumerate(plan, sc.region);
  return check_epigraph_tuples(sc, stream.tuples, value_margin_grid, opt);
}

}  // namespace sei
