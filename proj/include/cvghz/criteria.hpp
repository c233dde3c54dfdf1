#pragma once

// Sum-variance inseparability criteria for three modes.
//
//   I.   Var(x₁ − x₂) + Var(p₁ + p₂ + g₃p₃) ≥ 1
//   II.  Var(x₂ − x₃) + Var(g₁p₁ + p₂ + p₃) ≥ 1
//   III. Var(x₃ − x₁) + Var(p₁ + g₂p₂ + p₃) ≥ 1
//
// Violating one inequality shows inseparability across one split; violating
// at least two shows full inseparability.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "cvghz/gaussian.hpp"
#include "cvghz/network.hpp"

namespace cvghz {

/// Weights on the third party's momentum in inequalities II, III, I (g₁, g₂, g₃).
struct GainSet {
  double g1 = 1.0;
  double g2 = 1.0;
  double g3 = 1.0;

  static GainSet unit() { return {}; }

  void validate() const {
    detail::require(std::isfinite(g1) && std::isfinite(g2) && std::isfinite(g3), "GainSet: gains must be finite");
  }

  friend bool operator==(const GainSet&, const GainSet&) = default;
};

enum class Inequality : std::size_t { I = 0, II = 1, III = 2 };

inline constexpr std::array<Inequality, 3> kInequalities{Inequality::I, Inequality::II, Inequality::III};

inline const char* to_string(Inequality which) {
  switch (which) {
    case Inequality::I: return "I";
    case Inequality::II: return "II";
    case Inequality::III: return "III";
  }
  return "?";
}

enum class Verdict { FullyInseparable, Undetermined };

inline const char* to_string(Verdict v) {
  return v == Verdict::FullyInseparable ? "fully-inseparable" : "undetermined";
}

/// Modes (0-based) entering the position difference of an inequality, and the
/// mode whose momentum carries the gain.
struct InequalityModes {
  std::size_t first;
  std::size_t second;
  std::size_t weighted;
};

inline constexpr InequalityModes modes_of(Inequality which) {
  switch (which) {
    case Inequality::I: return {0, 1, 2};
    case Inequality::II: return {1, 2, 0};
    case Inequality::III: return {2, 0, 1};
  }
  return {0, 1, 2};
}

inline double gain_for(const GainSet& gains, Inequality which) {
  switch (which) {
    case Inequality::I: return gains.g3;
    case Inequality::II: return gains.g1;
    case Inequality::III: return gains.g2;
  }
  return 1.0;
}

inline void set_gain(GainSet& gains, Inequality which, double g) {
  switch (which) {
    case Inequality::I: gains.g3 = g; break;
    case Inequality::II: gains.g1 = g; break;
    case Inequality::III: gains.g2 = g; break;
  }
}

/// xᵢ − xⱼ of the inequality.
inline QuadCombination position_difference(Inequality which) {
  const auto m = modes_of(which);
  return QuadCombination(kGhzModes).with_x(m.first, 1.0).with_x(m.second, -1.0);
}

/// Momentum sum with weight g on the inequality's gain mode.
inline QuadCombination weighted_momentum_sum(Inequality which, double g) {
  const auto m = modes_of(which);
  return QuadCombination(kGhzModes).with_p(m.first, 1.0).with_p(m.second, 1.0).with_p(m.weighted, g);
}

struct InequalityTerm {
  double position_variance = 0.0;  // Var(xᵢ − xⱼ)
  double momentum_variance = 0.0;  // Var(gain-weighted momentum sum)
  double lhs() const noexcept { return position_variance + momentum_variance; }
};

struct CriteriaReport {
  std::array<InequalityTerm, 3> terms{};
  GainSet gains;
  std::array<bool, 3> violated{};
  Verdict verdict = Verdict::Undetermined;

  double lhs(Inequality which) const { return terms[static_cast<std::size_t>(which)].lhs(); }
  bool is_violated(Inequality which) const { return violated[static_cast<std::size_t>(which)]; }
  int violation_count() const noexcept { return int(violated[0]) + int(violated[1]) + int(violated[2]); }
};

/// Strict violation rule and two-of-three verdict.
inline Verdict verdict_from(const std::array<double, 3>& lhs) {
  int count = 0;
  for (double v : lhs) count += v < 1.0 ? 1 : 0;
  return count >= 2 ? Verdict::FullyInseparable : Verdict::Undetermined;
}

inline CriteriaReport vlf_lhs(const GaussianState& state, const GainSet& gains = GainSet::unit()) {
  detail::require(state.n_modes() == kGhzModes, "vlf_lhs: state must have exactly three modes");
  gains.validate();
  CriteriaReport report;
  report.gains = gains;
  std::array<double, 3> lhs{};
  for (auto which : kInequalities) {
    const auto k = static_cast<std::size_t>(which);
    report.terms[k].position_variance = combination_variance(state, position_difference(which));
    report.terms[k].momentum_variance =
        combination_variance(state, weighted_momentum_sum(which, gain_for(gains, which)));
    lhs[k] = report.terms[k].lhs();
    report.violated[k] = lhs[k] < 1.0;
  }
  report.verdict = verdict_from(lhs);
  return report;
}

/// Closed-form optimal gain for r₂ = r₃:
///   g = (e^{2r₂} − e^{−2r₁}) / (e^{2r₂} + ½e^{−2r₁}).
inline double optimal_gain(double r1, double r2) {
  detail::require(std::isfinite(r1) && std::isfinite(r2), "optimal_gain: inputs must be finite");
  const double up = std::exp(2.0 * r2);
  const double down = std::exp(-2.0 * r1);
  return (up - down) / (up + 0.5 * down);
}

struct GainOptimum {
  double gain = 0.0;
  bool degenerate = false;
};

/// Minimizes the inequality's lhs over its gain. Only the momentum term
/// depends on g, and Var(s + g·pₖ) = Var(s) + 2g·Cov(s, pₖ) + g²Var(pₖ), so
/// g* = −Cov(s, pₖ) / Var(pₖ).
inline GainOptimum numeric_optimal_gain(const GaussianState& state, Inequality which) {
  detail::require(state.n_modes() == kGhzModes, "numeric_optimal_gain: state must have exactly three modes");
  const auto m = modes_of(which);
  const Vector base = weighted_momentum_sum(which, 0.0).coeffs();
  const Vector weighted = QuadCombination::p(kGhzModes, m.weighted).coeffs();
  const double quadratic = weighted.dot(state.cov() * weighted);
  const double linear = base.dot(state.cov() * weighted);
  if (quadratic < Tolerances::degenerate_quadratic) return {0.0, true};
  return {-linear / quadratic, false};
}

inline GainSet numeric_optimal_gains(const GaussianState& state) {
  GainSet gains;
  for (auto which : kInequalities) set_gain(gains, which, numeric_optimal_gain(state, which).gain);
  return gains;
}

/// 10·log₁₀(variance / reference). Zero variance gives −∞.
inline double noise_db(double variance, double reference) {
  detail::require(reference > 0.0 && std::isfinite(reference), "noise_db: reference must be positive");
  detail::require(variance >= 0.0, "noise_db: variance must be nonnegative");
  if (variance == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(variance / reference);
}

inline double db_to_variance(double db, double reference) {
  detail::require(reference > 0.0 && std::isfinite(reference), "db_to_variance: reference must be positive");
  return reference * std::pow(10.0, db / 10.0);
}

/// Vacuum reference of a combination: Σ cᵢ² / 4.
inline double vacuum_reference(const QuadCombination& c) { return kVacuumVariance * c.coeffs().squaredNorm(); }

}  // namespace cvghz
