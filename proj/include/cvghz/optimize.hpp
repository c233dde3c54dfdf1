#pragma once

// Derivative-free minimization (Nelder–Mead simplex).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace cvghz {

struct SimplexOptions {
  std::size_t max_evaluations = 10000;
  double initial_step = 0.5;
  double f_tolerance = 1e-16;  // stop when max f − min f over the simplex falls below this
  double x_tolerance = 1e-10;  // ... and the simplex diameter falls below this
};

struct SimplexResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  bool tolerance_reached = false;
};

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction ½, shrink ½).
/// The starting point is scored as the first vertex.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                 std::vector<double> start, const SimplexOptions& options) {
  const std::size_t dim = start.size();
  SimplexResult result;
  if (options.max_evaluations == 0) {
    result.x = std::move(start);
    return result;
  }

  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    double f = objective(x);
    if (!std::isfinite(f)) f = std::numeric_limits<double>::max();
    if (f < result.value) {
      result.value = f;
      result.x = x;
    }
    return f;
  };

  std::vector<std::vector<double>> vertices(dim + 1, start);
  std::vector<double> values(dim + 1);
  result.x = start;
  values[0] = eval(start);
  if (dim == 0) {
    result.tolerance_reached = true;
    return result;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (result.evaluations >= options.max_evaluations) return result;
    vertices[i + 1][i] += options.initial_step;
    values[i + 1] = eval(vertices[i + 1]);
  }

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](double t, std::vector<double>& out) {  // centroid + t·(centroid − worst)
    const auto& worst = vertices[order[dim]];
    for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + t * (centroid[k] - worst[k]);
  };

  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    const std::size_t best = order[0];
    const std::size_t worst = order[dim];

    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        diameter = std::max(diameter, std::abs(vertices[order[i]][k] - vertices[best][k]));
      }
    }
    if (values[worst] - values[best] <= options.f_tolerance && diameter <= options.x_tolerance) {
      result.tolerance_reached = true;
      return result;
    }
    if (diameter <= 1e-3 * options.x_tolerance) {  // collapsed simplex, no further progress possible
      result.tolerance_reached = true;
      return result;
    }
    if (result.evaluations >= options.max_evaluations) return result;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += vertices[order[i]][k];
    }
    for (auto& c : centroid) c /= static_cast<double>(dim);

    along(1.0, trial);
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      if (result.evaluations >= options.max_evaluations) {
        vertices[worst] = trial;
        values[worst] = f_reflect;
        continue;
      }
      along(2.0, trial2);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        vertices[worst] = trial2;
        values[worst] = f_expand;
      } else {
        vertices[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[order[dim - 1]]) {
      vertices[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    if (result.evaluations >= options.max_evaluations) continue;

    const bool outside = f_reflect < values[worst];
    along(outside ? 0.5 : -0.5, trial2);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      vertices[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }

    for (std::size_t i = 1; i <= dim; ++i) {
      if (result.evaluations >= options.max_evaluations) return result;
      auto& v = vertices[order[i]];
      for (std::size_t k = 0; k < dim; ++k) v[k] = vertices[best][k] + 0.5 * (v[k] - vertices[best][k]);
      values[order[i]] = eval(v);
    }
  }
}

}  // namespace cvghz
