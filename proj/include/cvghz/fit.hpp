#pragma once

// Inference of effective network parameters (squeezing, efficiencies, phase
// jitter) from measured noise levels in dB relative to vacuum.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cvghz/criteria.hpp"
#include "cvghz/homodyne.hpp"
#include "cvghz/network.hpp"
#include "cvghz/optimize.hpp"

namespace cvghz {

/// Names accepted as fit targets, in canonical order: single-mode quadratures
/// followed by the criteria combinations.
inline const std::vector<std::string>& target_names() {
  static const std::vector<std::string> names{"x1", "p1", "x2", "p2", "x3", "p3",
                                              "x1-x2", "x2-x3", "x3-x1", "p1+p2+p3"};
  return names;
}

inline bool is_target_name(const std::string& name) {
  for (const auto& n : target_names()) {
    if (n == name) return true;
  }
  return false;
}

/// The linear form measured by a named target.
inline QuadCombination target_combination(const std::string& name) {
  const std::size_t n = kGhzModes;
  if (name.size() == 2 && (name[0] == 'x' || name[0] == 'p') && name[1] >= '1' && name[1] <= '3') {
    const std::size_t mode = static_cast<std::size_t>(name[1] - '1');
    return name[0] == 'x' ? QuadCombination::x(n, mode) : QuadCombination::p(n, mode);
  }
  if (name == "x1-x2") return position_difference(Inequality::I);
  if (name == "x2-x3") return position_difference(Inequality::II);
  if (name == "x3-x1") return position_difference(Inequality::III);
  if (name == "p1+p2+p3") return weighted_momentum_sum(Inequality::I, 1.0);
  throw std::invalid_argument("unknown fit target '" + name + "'");
}

struct Target {
  std::string name;
  double measured_db = 0.0;
  double uncertainty_db = 0.0;  // 0 when none was reported
  std::optional<double> weight;  // default: 1/uncertainty² if reported, else 1

  double resolved_weight() const {
    if (weight) return *weight;
    return uncertainty_db > 0.0 ? 1.0 / (uncertainty_db * uncertainty_db) : 1.0;
  }

  friend bool operator==(const Target&, const Target&) = default;
};

struct FitTargets {
  std::vector<Target> targets;

  void validate() const {
    detail::require(!targets.empty(), "FitTargets: at least one target is required");
    double total = 0.0;
    for (const auto& t : targets) {
      detail::require(is_target_name(t.name), "FitTargets: unknown target '" + t.name + "'");
      detail::require(std::isfinite(t.measured_db), "FitTargets: non-finite value for '" + t.name + "'");
      detail::require(t.uncertainty_db >= 0.0, "FitTargets: negative uncertainty for '" + t.name + "'");
      const double w = t.resolved_weight();
      detail::require(std::isfinite(w) && w >= 0.0, "FitTargets: weights must be nonnegative");
      total += w;
    }
    detail::require(total > 0.0, "FitTargets: weights must not all be zero");
  }

  /// Measured noise levels of the three-squeezer tritter experiment: single-mode
  /// minimum (x) and maximum (p) levels, then the three relative positions and
  /// the total momentum, all in dB above the matching vacuum level.
  static FitTargets measured() {
    return FitTargets{{
        {"x1", 1.14, 0.25, std::nullopt},
        {"p1", 4.69, 0.26, std::nullopt},
        {"x2", 0.75, 0.27, std::nullopt},
        {"p2", 4.12, 0.27, std::nullopt},
        {"x3", 1.21, 0.29, std::nullopt},
        {"p3", 4.69, 0.21, std::nullopt},
        {"x1-x2", -1.95, 0.0, std::nullopt},
        {"x2-x3", -2.04, 0.0, std::nullopt},
        {"x3-x1", -1.78, 0.0, std::nullopt},
        {"p1+p2+p3", -1.75, 0.0, std::nullopt},
    }};
  }

  friend bool operator==(const FitTargets&, const FitTargets&) = default;
};

/// dB of each named target's variance against its vacuum reference
/// (1/4 single quadrature, 1/2 pairwise difference, 3/4 triple sum).
inline std::vector<double> predict_targets(const GaussianState& state, const std::vector<std::string>& names) {
  std::vector<double> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    const auto c = target_combination(name);
    out.push_back(noise_db(combination_variance(state, c), vacuum_reference(c)));
  }
  return out;
}

inline std::vector<double> predict_targets(const NetworkParams& params, const std::vector<std::string>& names) {
  return predict_targets(ghz_state(params), names);
}

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Box bounds on the nine fitted parameters. Set lo == hi to pin one.
struct SearchSpace {
  std::array<Bounds, 3> r{{{0.0, 2.0}, {0.0, 2.0}, {0.0, 2.0}}};
  std::array<Bounds, 3> efficiency{{{0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}}};
  std::array<Bounds, 3> phase_sigma{{{0.0, 0.3}, {0.0, 0.3}, {0.0, 0.3}}};

  static constexpr std::size_t kDimension = 9;  // r1..r3, η1..η3, σ1..σ3

  std::array<Bounds, kDimension> flat() const {
    return {r[0], r[1], r[2], efficiency[0], efficiency[1], efficiency[2], phase_sigma[0], phase_sigma[1],
            phase_sigma[2]};
  }

  void validate() const {
    for (const auto& b : flat()) {
      detail::require(std::isfinite(b.lo) && std::isfinite(b.hi), "SearchSpace: bounds must be finite");
      detail::require(b.lo <= b.hi, "SearchSpace: empty interval (lo > hi)");
    }
    for (const auto& b : efficiency) {
      detail::require(b.lo >= 0.0 && b.hi <= 1.0, "SearchSpace: efficiency bounds must lie within [0, 1]");
    }
    for (const auto& b : phase_sigma) detail::require(b.lo >= 0.0, "SearchSpace: phase sigma bounds must be >= 0");
  }

  NetworkParams to_params(const std::array<double, kDimension>& v) const {
    NetworkParams p;
    p.r1 = v[0];
    p.r2 = v[1];
    p.r3 = v[2];
    p.channel.efficiency = {v[3], v[4], v[5]};
    p.channel.phase_sigma = {v[6], v[7], v[8]};
    return p;
  }

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

struct FitOptions {
  std::size_t budget = 200000;  // local-search evaluations, shared evenly by the starts
  std::size_t starts = 16;
  std::uint64_t seed = 0;
  /// Called with every evaluated candidate and its residual (dB).
  std::function<void(const NetworkParams&, double)> on_evaluate;
};

struct StartResult {
  NetworkParams params;
  double residual = 0.0;
  bool converged = false;
};

struct FitResult {
  NetworkParams params;
  double residual = 0.0;                    // weighted RMS dB error
  std::vector<double> per_target_residuals;  // predicted − measured, target order
  bool converged = false;
  std::size_t evaluations = 0;
  std::vector<StartResult> starts;  // one per start, start order
};

namespace detail {

/// Maps unconstrained z onto [lo, hi] via lo + (hi − lo)(1 + sin z)/2.
inline double to_box(double z, const Bounds& b) { return b.lo + (b.hi - b.lo) * 0.5 * (1.0 + std::sin(z)); }

inline double from_box(double value, const Bounds& b) {
  if (b.hi == b.lo) return 0.0;
  const double s = std::clamp(2.0 * (value - b.lo) / (b.hi - b.lo) - 1.0, -1.0, 1.0);
  return std::asin(s);
}

}  // namespace detail

/// Multi-start Nelder–Mead on the weighted mean-square dB error. Start 0 is the
/// box centre, later starts are uniform in the box from seeded streams. Each
/// start restarts its simplex from the incumbent until a restart improves the
/// residual by less than 1e-8 dB (converged) or its budget share runs out.
inline FitResult fit(const FitTargets& targets, const SearchSpace& space = {}, const FitOptions& options = {}) {
  targets.validate();
  space.validate();
  detail::require(options.starts >= 1, "fit: need at least one start");

  std::vector<std::string> names;
  std::vector<double> measured, weights;
  double weight_total = 0.0;
  for (const auto& t : targets.targets) {
    names.push_back(t.name);
    measured.push_back(t.measured_db);
    weights.push_back(t.resolved_weight());
    weight_total += weights.back();
  }

  const auto bounds = space.flat();
  std::vector<std::size_t> free;
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (bounds[k].hi > bounds[k].lo) free.push_back(k);
  }

  std::size_t evaluations = 0;
  auto values_of = [&](const std::vector<double>& z) {
    std::array<double, SearchSpace::kDimension> v{};
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = bounds[k].lo;
    for (std::size_t i = 0; i < free.size(); ++i) v[free[i]] = detail::to_box(z[i], bounds[free[i]]);
    return v;
  };
  auto mean_square = [&](const NetworkParams& p) {
    const auto predicted = predict_targets(p, names);
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const double e = predicted[i] - measured[i];
      acc += weights[i] * e * e;
    }
    return acc / weight_total;
  };
  auto objective = [&](const std::vector<double>& z) {
    ++evaluations;
    const auto p = space.to_params(values_of(z));
    const double ms = mean_square(p);
    if (options.on_evaluate) options.on_evaluate(p, std::sqrt(ms));
    return ms;
  };

  FitResult result;
  result.residual = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < options.starts; ++s) {
    std::vector<double> z(free.size(), 0.0);
    if (s > 0) {
      NormalStream stream(derive_run_seed(options.seed, s));
      for (std::size_t i = 0; i < free.size(); ++i) {
        const auto& b = bounds[free[i]];
        z[i] = detail::from_box(b.lo + (b.hi - b.lo) * stream.uniform(), b);
      }
    }
    std::size_t share = options.budget / options.starts + (s < options.budget % options.starts ? 1 : 0);

    double current = objective(z);
    bool converged = false;
    while (share > 0) {
      SimplexOptions simplex;
      simplex.max_evaluations = share;
      const auto local = nelder_mead(objective, z, simplex);
      share -= std::min(share, local.evaluations);
      const double improvement = std::sqrt(current) - std::sqrt(std::min(current, local.value));
      if (local.value < current) {
        current = local.value;
        z = local.x;
      }
      if (improvement < 1e-8 && local.tolerance_reached) {
        converged = true;
        break;
      }
    }

    StartResult start{space.to_params(values_of(z)), std::sqrt(current), converged};
    if (start.residual < result.residual) {
      result.residual = start.residual;
      result.params = start.params;
      result.converged = converged;
    }
    result.starts.push_back(std::move(start));
  }

  result.evaluations = evaluations;
  const auto predicted = predict_targets(result.params, names);
  for (std::size_t i = 0; i < predicted.size(); ++i) result.per_target_residuals.push_back(predicted[i] - measured[i]);
  return result;
}

}  // namespace cvghz
