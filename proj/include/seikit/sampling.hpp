#pragma once

// Deterministic (s, t, alpha, lambda) tuple streams over a region.

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "seikit/model.hpp"

namespace sei {

class SamplingStarved : public Error {
 public:
  using Error::Error;
};

/// One tuple requested verbatim (e.g. a known counterexample).
struct ExplicitTuple {
  Point s;
  Point t;
  double alpha = 0.0;
  double lambda = 0.0;
};

struct SamplePlan {
  std::size_t grid_per_dim = 9;
  std::size_t alpha_grid = 5;
  std::size_t lambda_grid = 5;
  std::size_t random_tuples = 10000;
  std::uint64_t seed = 0;
  std::size_t rejection_cap = 100;
  // When non-empty these replace the grid and random parts of the stream.
  std::vector<ExplicitTuple> explicit_tuples;
};

enum class Origin { Grid, Random, Explicit };

inline std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::Grid: return "grid";
    case Origin::Random: return "random";
    case Origin::Explicit: return "explicit";
  }
  return "unknown";
}

struct SampleTuple {
  Point s;
  Point t;
  double alpha = 0.0;
  double lambda = 0.0;
  Origin origin = Origin::Grid;
  std::size_t index = 0;
};

struct SampleStream {
  std::vector<SampleTuple> tuples;
  std::size_t grid_count = 0;
  std::size_t random_count = 0;
  std::size_t dropped = 0;  // random tuples abandoned after the rejection cap
};

/// count equispaced values on [0, 1]; count == 1 yields {0}.
inline std::vector<double> unit_grid(std::size_t count) {
  if (count == 0) throw Error("grid count must be at least 1");
  if (count == 1) return {0.0};
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  return out;
}

/// Lexicographic product grid over the box (first coordinate most
/// significant), filtered by membership at tolerance 0. One point per
/// coordinate sits at the interval midpoint.
inline std::vector<Point> grid_points(const Region& region, std::size_t per_dim) {
  if (per_dim == 0) throw Error("grid_per_dim must be at least 1");
  const std::size_t n = region.dim();
  std::vector<std::vector<double>> axes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& iv = region.box[i];
    if (per_dim == 1) {
      axes[i] = {0.5 * (iv.lo + iv.hi)};
      continue;
    }
    for (std::size_t k = 0; k < per_dim; ++k) {
      const double offset = (iv.hi - iv.lo) * static_cast<double>(k) / static_cast<double>(per_dim - 1);
      axes[i].push_back(k + 1 == per_dim ? iv.hi : iv.lo + offset);
    }
  }
  std::vector<Point> out;
  std::vector<std::size_t> idx(n, 0);
  Point x(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = axes[i][idx[i]];
    if (member(region, x, 0.0)) out.push_back(x);
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (++idx[d] < per_dim) break;
      idx[d] = 0;
      if (d == 0) return out;
    }
    if (n == 0) return out;
  }
}

namespace detail {

class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  // 53-bit uniform on [0, 1); mt19937_64's output sequence is fixed by the standard.
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

/// Grid tuples first in (s, t, alpha, lambda) lexicographic order, then
/// seeded random tuples rejection-sampled into the region.
inline SampleStream enumerate(const SamplePlan& plan, const Region& region) {
  SampleStream stream;
  const std::size_t n = region.dim();

  if (!plan.explicit_tuples.empty()) {
    for (const auto& e : plan.explicit_tuples) {
      if (e.s.size() != n || e.t.size() != n) throw Error("explicit tuple dimension does not match region");
      if (!member(region, e.s, 0.0) || !member(region, e.t, 0.0)) throw Error("explicit tuple point outside region");
      if (e.alpha < 0.0 || e.alpha > 1.0 || e.lambda < 0.0 || e.lambda > 1.0)
        throw Error("explicit tuple alpha and lambda must lie in [0, 1]");
      stream.tuples.push_back({e.s, e.t, e.alpha, e.lambda, Origin::Explicit, stream.tuples.size()});
    }
    return stream;
  }

  const auto points = grid_points(region, plan.grid_per_dim);
  const auto alphas = unit_grid(plan.alpha_grid);
  const auto lambdas = unit_grid(plan.lambda_grid);
  stream.tuples.reserve(points.size() * points.size() * alphas.size() * lambdas.size() + plan.random_tuples);
  for (const auto& s : points)
    for (const auto& t : points)
      for (double a : alphas)
        for (double l : lambdas) stream.tuples.push_back({s, t, a, l, Origin::Grid, stream.tuples.size()});
  stream.grid_count = stream.tuples.size();

  detail::UniformSource rng(plan.seed);
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  auto draw = [&](Point& x) {
    for (std::size_t k = 0; k < plan.rejection_cap; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto& iv = region.box[i];
        x[i] = iv.lo + rng.next() * (iv.hi - iv.lo);
      }
      ++attempts;
      const bool ok = member(region, x, 0.0);
      if (ok) ++accepted;
      if (attempts == 10000 && accepted * 100 < attempts)
        throw SamplingStarved("region acceptance rate below 1% over the first 10000 attempts");
      if (ok) return true;
    }
    return false;
  };
  Point s(n), t(n);
  for (std::size_t k = 0; k < plan.random_tuples; ++k) {
    const bool ok_s = draw(s);
    const bool ok_t = ok_s && draw(t);
    const double a = rng.next();
    const double l = rng.next();
    if (!ok_t) {
      ++stream.dropped;
      continue;
    }
    stream.tuples.push_back({s, t, a, l, Origin::Random, stream.tuples.size()});
    ++stream.random_count;
  }
  return stream;
}

}  // namespace sei
