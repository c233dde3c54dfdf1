#pragma once

namespace cvghz {

/// Numerical tolerances shared by every module.
struct Tolerances {
  static constexpr double symmetry = 1e-12;
  static constexpr double uncertainty = 1e-10;  // min eigenvalue of cov + (i/4)Ω
  static constexpr double symplectic = 1e-10;   // elementwise |S Ω Sᵀ − Ω|
  static constexpr double degenerate_quadratic = 1e-14;
};

/// Vacuum variance of a single quadrature (ħ = 1/2).
inline constexpr double kVacuumVariance = 0.25;

}  // namespace cvghz
