#pragma once

// Tritter network turning three squeezed vacua into an approximate CV GHZ state.

#include <array>
#include <cmath>
#include <numbers>

#include "cvghz/channels.hpp"
#include "cvghz/gaussian.hpp"

namespace cvghz {

inline constexpr std::size_t kGhzModes = 3;

/// Squeezing parameters and output-side degradations of the tritter network.
///
/// r1 is applied as momentum squeezing to input 1; r2 and r3 as position
/// squeezing to inputs 2 and 3.
struct NetworkParams {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  ChannelSpec channel = ChannelSpec::lossless(kGhzModes);

  void validate() const {
    detail::require(std::isfinite(r1) && std::isfinite(r2) && std::isfinite(r3),
                    "NetworkParams: squeezing parameters must be finite");
    channel.validate(kGhzModes);
  }

  static NetworkParams symmetric(double r) { return NetworkParams{r, r, r, ChannelSpec::lossless(kGhzModes)}; }

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

/// B₂₃(π/4) · B₁₂(cos⁻¹(1/√3)): a T = 1/3 splitter on modes 1, 2 followed by a
/// 50/50 splitter on modes 2, 3.
inline SymplecticTransform build_tritter() {
  const double first = std::acos(1.0 / std::numbers::sqrt3);
  return beamsplitter(kGhzModes, 1, 2, std::numbers::pi / 4.0) * beamsplitter(kGhzModes, 0, 1, first);
}

/// Squeezed inputs through the tritter, then per-mode loss and phase jitter.
inline GaussianState ghz_state(const NetworkParams& params) {
  params.validate();
  GaussianState state = vacuum(kGhzModes);
  const SymplecticTransform inputs =
      squeezer(kGhzModes, 0, -params.r1) * squeezer(kGhzModes, 1, params.r2) * squeezer(kGhzModes, 2, params.r3);
  state = apply(state, build_tritter() * inputs);
  return apply_channel(std::move(state), params.channel);
}

/// Output covariance written directly from the Heisenberg-picture output
/// operators of the lossless network:
///   x̂₁ = e^{r₁}x̂₁⁽⁰⁾/√3 + √(2/3)e^{−r₂}x̂₂⁽⁰⁾
///   x̂₂ = e^{r₁}x̂₁⁽⁰⁾/√3 − e^{−r₂}x̂₂⁽⁰⁾/√6 + e^{−r₃}x̂₃⁽⁰⁾/√2
///   x̂₃ = e^{r₁}x̂₁⁽⁰⁾/√3 − e^{−r₂}x̂₂⁽⁰⁾/√6 − e^{−r₃}x̂₃⁽⁰⁾/√2
/// and likewise for p̂ with every exponent sign flipped. Independent of
/// build_tritter(); used as its oracle.
inline Matrix heisenberg_covariance(double r1, double r2, double r3) {
  const double a = 1.0 / std::sqrt(3.0);
  const double b = std::sqrt(2.0 / 3.0);
  const double c = 1.0 / std::sqrt(6.0);
  const double d = 1.0 / std::sqrt(2.0);
  const std::array<std::array<double, 3>, 3> mix{{{a, b, 0.0}, {a, -c, d}, {a, -c, -d}}};
  const std::array<double, 3> x_gain{std::exp(r1), std::exp(-r2), std::exp(-r3)};
  const std::array<double, 3> p_gain{std::exp(-r1), std::exp(r2), std::exp(r3)};

  // Rows: output quadratures; columns: input vacuum quadratures.
  Matrix heisenberg = Matrix::Zero(6, 6);
  for (int out = 0; out < 3; ++out) {
    for (int in = 0; in < 3; ++in) {
      heisenberg(2 * out, 2 * in) = mix[out][in] * x_gain[in];
      heisenberg(2 * out + 1, 2 * in + 1) = mix[out][in] * p_gain[in];
    }
  }
  return kVacuumVariance * heisenberg * heisenberg.transpose();
}

}  // namespace cvghz
