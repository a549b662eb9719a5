#pragma once

// Box-constrained compass search: try +/- step along each axis, move to the
// best strict improvement, halve the step when none exists.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "seikit/model.hpp"

namespace sei {

struct PatternSearchOptions {
  double step_init = 0.1;
  double step_min = 1e-10;
  std::size_t max_evals = 2000;
};

struct PatternSearchResult {
  Point x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  bool converged = false;     // step fell below step_min before the budget ran out
  std::vector<double> trace;  // objective after each accepted move, starting with f(x0)
};

/// Objective failures (EvalError) count as +inf.
template <class Objective>
PatternSearchResult pattern_search(Objective&& f, Point x0, std::span<const Interval> box,
                                   const PatternSearchOptions& opt) {
  auto safe = [&](const Point& x) {
    try {
      const double v = f(x);
      return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    } catch (const EvalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  PatternSearchResult r;
  for (std::size_t i = 0; i < x0.size() && i < box.size(); ++i) x0[i] = std::clamp(x0[i], box[i].lo, box[i].hi);
  r.x = std::move(x0);
  r.value = safe(r.x);
  r.evals = 1;
  r.trace.push_back(r.value);
  double step = opt.step_init;
  Point trial;
  while (r.evals < opt.max_evals) {
    if (step < opt.step_min) {
      r.converged = true;
      break;
    }
    double best = r.value;
    Point best_x;
    for (std::size_t i = 0; i < r.x.size() && r.evals < opt.max_evals; ++i) {
      for (double dir : {-1.0, 1.0}) {
        if (r.evals >= opt.max_evals) break;
        trial = r.x;
        trial[i] = std::clamp(trial[i] + dir * step, box[i].lo, box[i].hi);
        if (trial[i] == r.x[i]) continue;
        const double v = safe(trial);
        ++r.evals;
        if (v < best) {
          best = v;
          best_x = trial;
        }
      }
    }
    if (!best_x.empty()) {
      r.x = std::move(best_x);
      r.value = best;
      r.trace.push_back(best);
    } else {
      step *= 0.5;
    }
  }
  if (!r.converged && step < opt.step_min) r.converged = true;
  return r;
}

}  // namespace sei
