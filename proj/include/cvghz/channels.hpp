#pragma once

// Experimental degradations: optical loss and residual phase jitter.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cvghz/gaussian.hpp"

namespace cvghz {

/// Per-mode loss and phase-jitter settings. An empty vector means "none".
struct ChannelSpec {
  std::vector<double> efficiency;   // η ∈ [0, 1]
  std::vector<double> phase_sigma;  // σ ≥ 0, radians

  static ChannelSpec lossless(std::size_t n_modes) {
    return ChannelSpec{std::vector<double>(n_modes, 1.0), std::vector<double>(n_modes, 0.0)};
  }

  void validate(std::size_t n_modes) const {
    detail::require(efficiency.empty() || efficiency.size() == n_modes,
                    "ChannelSpec: efficiency list must have one entry per mode");
    detail::require(phase_sigma.empty() || phase_sigma.size() == n_modes,
                    "ChannelSpec: phase_sigma list must have one entry per mode");
    for (double eta : efficiency) {
      detail::require(eta >= 0.0 && eta <= 1.0, "ChannelSpec: efficiency must lie in [0, 1]");
    }
    for (double sigma : phase_sigma) {
      detail::require(std::isfinite(sigma) && sigma >= 0.0, "ChannelSpec: phase sigma must be >= 0");
    }
  }

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

/// Pure loss of efficiency η on one mode (beam splitter with a vacuum ancilla,
/// ancilla discarded): the mode's block V → ηV + (1−η)/4·I, its cross-blocks
/// and mean scale by √η.
inline GaussianState loss(const GaussianState& state, std::size_t mode, double eta) {
  detail::require_mode(mode, state.n_modes(), "loss");
  detail::require(eta >= 0.0 && eta <= 1.0, "loss: efficiency must lie in [0, 1]");
  const double t = std::sqrt(eta);
  const auto x = detail::idx(x_index(mode));

  Vector mean = state.mean();
  mean.segment<2>(x) *= t;

  Matrix cov = state.cov();
  cov.middleRows<2>(x) *= t;
  cov.middleCols<2>(x) *= t;
  cov.block<2, 2>(x, x) += (1.0 - eta) * kVacuumVariance * Eigen::Matrix2d::Identity();
  return GaussianState(std::move(mean), std::move(cov));
}

/// Second-moment average over a random phase rotation θ ~ N(0, σ²) on one mode.
///
/// The averaged ensemble is not Gaussian; this returns the Gaussian state with
/// the same first and second moments. With E[cos2θ] = e^{−2σ²} and E[cosθ] =
/// e^{−σ²/2} (odd moments vanish), the mode block [[a, b], [b, d]] becomes
///   xx: (a+d)/2 + κ(a−d)/2,  pp: (a+d)/2 − κ(a−d)/2,  xp: κb   (κ = e^{−2σ²})
/// and cross-blocks and the mode's mean scale by e^{−σ²/2}.
inline GaussianState phase_jitter(const GaussianState& state, std::size_t mode, double sigma) {
  detail::require_mode(mode, state.n_modes(), "phase_jitter");
  detail::require(std::isfinite(sigma) && sigma >= 0.0, "phase_jitter: sigma must be >= 0");
  if (sigma == 0.0) return state;

  const double kappa = std::exp(-2.0 * sigma * sigma);
  const double first = std::exp(-0.5 * sigma * sigma);
  const auto x = detail::idx(x_index(mode));

  Vector mean = state.mean();
  mean.segment<2>(x) *= first;

  Matrix cov = state.cov();
  const Eigen::Matrix2d block = cov.block<2, 2>(x, x);
  cov.middleRows<2>(x) *= first;
  cov.middleCols<2>(x) *= first;
  const double a = block(0, 0);
  const double d = block(1, 1);
  const double b = block(0, 1);
  cov(x, x) = 0.5 * (a + d) + 0.5 * kappa * (a - d);
  cov(x + 1, x + 1) = 0.5 * (a + d) - 0.5 * kappa * (a - d);
  cov(x, x + 1) = kappa * b;
  cov(x + 1, x) = kappa * b;
  return GaussianState(std::move(mean), std::move(cov));
}

/// Applies the per-mode losses, then the per-mode phase jitter.
inline GaussianState apply_channel(GaussianState state, const ChannelSpec& channel) {
  channel.validate(state.n_modes());
  for (std::size_t k = 0; k < channel.efficiency.size(); ++k) {
    if (channel.efficiency[k] != 1.0) state = loss(state, k, channel.efficiency[k]);
  }
  for (std::size_t k = 0; k < channel.phase_sigma.size(); ++k) {
    if (channel.phase_sigma[k] != 0.0) state = phase_jitter(state, k, channel.phase_sigma[k]);
  }
  return state;
}

/// Interference visibility → effective power efficiency (η = v²).
inline double visibility_to_efficiency(double visibility) {
  detail::require(visibility >= 0.0 && visibility <= 1.0, "visibility_to_efficiency: visibility must lie in [0, 1]");
  return visibility * visibility;
}

}  // namespace cvghz
