#pragma once

// Multimode Gaussian states in the ħ = 1/2 convention ([x, p] = i/2, vacuum
// quadrature variance 1/4) and the symplectic maps acting on them.
//
// Quadratures are interleaved: (x₁, p₁, x₂, p₂, ..., xₙ, pₙ).

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "cvghz/tolerances.hpp"

namespace cvghz {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr std::size_t x_index(std::size_t mode) noexcept { return 2 * mode; }
constexpr std::size_t p_index(std::size_t mode) noexcept { return 2 * mode + 1; }

namespace detail {

inline Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

inline void require_mode(std::size_t mode, std::size_t n_modes, const char* what) {
  if (mode >= n_modes) {
    throw std::invalid_argument(std::string(what) + ": mode " + std::to_string(mode) +
                                " out of range for " + std::to_string(n_modes) + " modes");
  }
}

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace detail

/// Standard symplectic form Ω for interleaved ordering: block-diagonal [[0, 1], [−1, 0]].
inline Matrix symplectic_form(std::size_t n_modes) {
  Matrix omega = Matrix::Zero(detail::idx(2 * n_modes), detail::idx(2 * n_modes));
  for (std::size_t k = 0; k < n_modes; ++k) {
    omega(detail::idx(x_index(k)), detail::idx(p_index(k))) = 1.0;
    omega(detail::idx(p_index(k)), detail::idx(x_index(k))) = -1.0;
  }
  return omega;
}

/// First and second moments of an n-mode Gaussian state.
///
/// The covariance is symmetrized on construction, so every state produced by
/// this library is symmetric to round-off. Physicality (the uncertainty
/// relation) is not enforced here; use check_physicality().
class GaussianState {
 public:
  GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    detail::require(mean_.size() > 0 && mean_.size() % 2 == 0,
                    "GaussianState: mean length must be a positive even number");
    detail::require(cov_.rows() == mean_.size() && cov_.cols() == mean_.size(),
                    "GaussianState: covariance must be 2n x 2n matching the mean");
    detail::require(mean_.allFinite() && cov_.allFinite(), "GaussianState: non-finite moments");
    cov_ = detail::symmetrized(cov_);
  }

  std::size_t n_modes() const noexcept { return static_cast<std::size_t>(mean_.size()) / 2; }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& cov() const noexcept { return cov_; }

  /// 2×2 covariance block of one mode.
  Eigen::Matrix2d mode_block(std::size_t mode) const {
    detail::require_mode(mode, n_modes(), "mode_block");
    return cov_.block<2, 2>(detail::idx(x_index(mode)), detail::idx(x_index(mode)));
  }

 private:
  Vector mean_;
  Matrix cov_;
};

/// A real 2n×2n matrix S with S Ω Sᵀ = Ω.
class SymplecticTransform {
 public:
  explicit SymplecticTransform(Matrix matrix) : matrix_(std::move(matrix)) {
    detail::require(matrix_.rows() > 0 && matrix_.rows() % 2 == 0 && matrix_.rows() == matrix_.cols(),
                    "SymplecticTransform: matrix must be square with even dimension");
    detail::require(matrix_.allFinite(), "SymplecticTransform: non-finite entries");
    detail::require(symplectic_defect() <= Tolerances::symplectic,
                    "SymplecticTransform: matrix does not preserve the symplectic form");
  }

  static SymplecticTransform identity(std::size_t n_modes) {
    detail::require(n_modes >= 1, "identity: n_modes must be >= 1");
    return SymplecticTransform(Matrix::Identity(detail::idx(2 * n_modes), detail::idx(2 * n_modes)));
  }

  std::size_t n_modes() const noexcept { return static_cast<std::size_t>(matrix_.rows()) / 2; }
  const Matrix& matrix() const noexcept { return matrix_; }

  /// max |S Ω Sᵀ − Ω|.
  double symplectic_defect() const {
    const Matrix omega = symplectic_form(n_modes());
    return (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
  }

  /// Composition: (a * b) applies b first, then a.
  friend SymplecticTransform operator*(const SymplecticTransform& a, const SymplecticTransform& b) {
    detail::require(a.n_modes() == b.n_modes(), "SymplecticTransform: composition of mismatched sizes");
    return SymplecticTransform(a.matrix_ * b.matrix_);
  }

 private:
  Matrix matrix_;
};

/// Real linear form Σ hᵢxᵢ + kᵢpᵢ over the quadratures of an n-mode system.
class QuadCombination {
 public:
  explicit QuadCombination(std::size_t n_modes) : coeffs_(Vector::Zero(detail::idx(2 * n_modes))) {
    detail::require(n_modes >= 1, "QuadCombination: n_modes must be >= 1");
  }

  explicit QuadCombination(Vector coeffs) : coeffs_(std::move(coeffs)) {
    detail::require(coeffs_.size() > 0 && coeffs_.size() % 2 == 0,
                    "QuadCombination: coefficient vector length must be 2 * n_modes");
    detail::require(coeffs_.allFinite(), "QuadCombination: non-finite coefficient");
  }

  static QuadCombination x(std::size_t n_modes, std::size_t mode, double weight = 1.0) {
    return QuadCombination(n_modes).with_x(mode, weight);
  }
  static QuadCombination p(std::size_t n_modes, std::size_t mode, double weight = 1.0) {
    return QuadCombination(n_modes).with_p(mode, weight);
  }

  /// Copy with the x coefficient of `mode` increased by `weight`.
  QuadCombination with_x(std::size_t mode, double weight) const {
    detail::require_mode(mode, n_modes(), "QuadCombination::with_x");
    QuadCombination out = *this;
    out.coeffs_(detail::idx(x_index(mode))) += weight;
    return out;
  }
  QuadCombination with_p(std::size_t mode, double weight) const {
    detail::require_mode(mode, n_modes(), "QuadCombination::with_p");
    QuadCombination out = *this;
    out.coeffs_(detail::idx(p_index(mode))) += weight;
    return out;
  }

  std::size_t n_modes() const noexcept { return static_cast<std::size_t>(coeffs_.size()) / 2; }
  const Vector& coeffs() const noexcept { return coeffs_; }
  double x_coeff(std::size_t mode) const { return coeffs_(detail::idx(x_index(mode))); }
  double p_coeff(std::size_t mode) const { return coeffs_(detail::idx(p_index(mode))); }

  friend QuadCombination operator+(const QuadCombination& a, const QuadCombination& b) {
    detail::require(a.n_modes() == b.n_modes(), "QuadCombination: mismatched sizes");
    return QuadCombination(Vector(a.coeffs_ + b.coeffs_));
  }
  friend QuadCombination operator-(const QuadCombination& a, const QuadCombination& b) {
    detail::require(a.n_modes() == b.n_modes(), "QuadCombination: mismatched sizes");
    return QuadCombination(Vector(a.coeffs_ - b.coeffs_));
  }
  friend QuadCombination operator*(double s, const QuadCombination& a) {
    return QuadCombination(Vector(s * a.coeffs_));
  }
  friend bool operator==(const QuadCombination& a, const QuadCombination& b) {
    return a.coeffs_.size() == b.coeffs_.size() && a.coeffs_ == b.coeffs_;
  }

 private:
  Vector coeffs_;
};

/// n-mode vacuum: zero mean, covariance I/4.
inline GaussianState vacuum(std::size_t n_modes) {
  detail::require(n_modes >= 1, "vacuum: n_modes must be >= 1");
  const auto dim = detail::idx(2 * n_modes);
  return GaussianState(Vector::Zero(dim), kVacuumVariance * Matrix::Identity(dim, dim));
}

/// Single-mode squeezer: x → e^{−r}x, p → e^{+r}p on `mode`. Negative r squeezes p.
inline SymplecticTransform squeezer(std::size_t n_modes, std::size_t mode, double r) {
  detail::require(n_modes >= 1, "squeezer: n_modes must be >= 1");
  detail::require_mode(mode, n_modes, "squeezer");
  detail::require(std::isfinite(r), "squeezer: r must be finite");
  Matrix s = Matrix::Identity(detail::idx(2 * n_modes), detail::idx(2 * n_modes));
  s(detail::idx(x_index(mode)), detail::idx(x_index(mode))) = std::exp(-r);
  s(detail::idx(p_index(mode)), detail::idx(p_index(mode))) = std::exp(r);
  return SymplecticTransform(std::move(s));
}

/// Beam splitter between modes i and j:
///   aᵢ → aᵢ cosθ + aⱼ sinθ,   aⱼ → aᵢ sinθ − aⱼ cosθ,
/// applied identically to the x and p quadratures. Transmittance T = cos²θ.
/// Note θ = 0 leaves mode i alone and negates mode j.
inline SymplecticTransform beamsplitter(std::size_t n_modes, std::size_t i, std::size_t j, double theta) {
  detail::require(n_modes >= 2, "beamsplitter: needs at least two modes");
  detail::require_mode(i, n_modes, "beamsplitter");
  detail::require_mode(j, n_modes, "beamsplitter");
  detail::require(i != j, "beamsplitter: modes must differ");
  detail::require(std::isfinite(theta), "beamsplitter: theta must be finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix m = Matrix::Identity(detail::idx(2 * n_modes), detail::idx(2 * n_modes));
  for (std::size_t q = 0; q < 2; ++q) {  // q = 0: x block, q = 1: p block
    const auto ri = detail::idx(2 * i + q);
    const auto rj = detail::idx(2 * j + q);
    m(ri, ri) = c;
    m(ri, rj) = s;
    m(rj, ri) = s;
    m(rj, rj) = -c;
  }
  return SymplecticTransform(std::move(m));
}

/// Phase-space rotation [[cosφ, sinφ], [−sinφ, cosφ]] on one mode's (x, p).
inline SymplecticTransform phase_rotation(std::size_t n_modes, std::size_t mode, double phi) {
  detail::require(n_modes >= 1, "phase_rotation: n_modes must be >= 1");
  detail::require_mode(mode, n_modes, "phase_rotation");
  detail::require(std::isfinite(phi), "phase_rotation: phi must be finite");
  Matrix m = Matrix::Identity(detail::idx(2 * n_modes), detail::idx(2 * n_modes));
  const auto x = detail::idx(x_index(mode));
  const auto p = detail::idx(p_index(mode));
  m(x, x) = std::cos(phi);
  m(x, p) = std::sin(phi);
  m(p, x) = -std::sin(phi);
  m(p, p) = std::cos(phi);
  return SymplecticTransform(std::move(m));
}

/// mean → S·mean, cov → S·cov·Sᵀ.
inline GaussianState apply(const GaussianState& state, const SymplecticTransform& s) {
  detail::require(state.n_modes() == s.n_modes(), "apply: dimension mismatch between state and transform");
  const Matrix& m = s.matrix();
  return GaussianState(m * state.mean(), m * state.cov() * m.transpose());
}

/// Variance cᵀ·cov·c of a linear quadrature combination.
inline double combination_variance(const GaussianState& state, const QuadCombination& c) {
  detail::require(state.n_modes() == c.n_modes(), "combination_variance: dimension mismatch");
  const double v = c.coeffs().dot(state.cov() * c.coeffs());
  return v < 0.0 ? 0.0 : v;  // clamps −ε round-off; physical states give v ≥ 0
}

/// Expected value cᵀ·mean.
inline double combination_mean(const GaussianState& state, const QuadCombination& c) {
  detail::require(state.n_modes() == c.n_modes(), "combination_mean: dimension mismatch");
  return c.coeffs().dot(state.mean());
}

struct PhysicalityReport {
  bool physical = false;
  double min_eigenvalue = 0.0;  // of the Hermitian matrix cov + (i/4)Ω
  double asymmetry = 0.0;       // max |cov − covᵀ|

  explicit operator bool() const noexcept { return physical; }
};

inline PhysicalityReport check_physicality(const GaussianState& state) {
  const Matrix& cov = state.cov();
  PhysicalityReport report;
  report.asymmetry = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd h =
      cov.cast<std::complex<double>>() +
      std::complex<double>(0.0, 0.25) * symplectic_form(state.n_modes()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.physical =
      report.asymmetry <= Tolerances::symmetry && report.min_eigenvalue >= -Tolerances::uncertainty;
  return report;
}

}  // namespace cvghz
