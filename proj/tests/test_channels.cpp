#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "cvghz/channels.hpp"
#include "oracles.hpp"

using namespace cvghz;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

GaussianState squeezed_vacuum(double r) { return apply(vacuum(1), squeezer(1, 0, r)); }

}  // namespace

TEST(Loss, unit_efficiency_is_identity) {
  std::mt19937_64 rng(1);
  const auto s = oracle::random_physical_state(3, rng);
  const auto out = loss(s, 1, 1.0);
  EXPECT_EQ(out.cov(), s.cov());
  EXPECT_EQ(out.mean(), s.mean());
}

TEST(Loss, zero_efficiency_replaces_mode_with_vacuum) {
  std::mt19937_64 rng(2);
  const auto s = oracle::random_physical_state(3, rng);
  const auto out = loss(s, 2, 0.0);
  EXPECT_EQ(out.mode_block(2), Eigen::Matrix2d::Identity() * 0.25);
  EXPECT_EQ(out.cov().block(4, 0, 2, 4), Matrix::Zero(2, 4));
  EXPECT_EQ(out.mean().segment(4, 2), Vector::Zero(2));
  EXPECT_EQ(out.cov().topLeftCorner(4, 4), s.cov().topLeftCorner(4, 4));
}

TEST(Loss, squeezed_variance_formula) {
  const double r = 0.7;
  const double eta = 0.8;
  const auto out = loss(squeezed_vacuum(r), 0, eta);
  const double expected = eta * std::exp(-2 * r) / 4 + (1 - eta) / 4;
  EXPECT_NEAR(out.cov()(0, 0), expected, 1e-15);
  EXPECT_NEAR(oracle::loss_via_ancilla(squeezed_vacuum(r), 0, eta).cov()(0, 0), expected, 1e-12);
}

TEST(Loss, matches_ancilla_beam_splitter) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto s = oracle::random_physical_state(n, rng);
    const std::size_t mode = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const double eta = oracle::uniform(rng, 0.0, 1.0);
    const auto closed = loss(s, mode, eta);
    const auto oracle = oracle::loss_via_ancilla(s, mode, eta);
    EXPECT_LE(max_abs_diff(closed.cov(), oracle.cov()), 1e-12);
    EXPECT_LE((closed.mean() - oracle.mean()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Loss, composes_multiplicatively) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = oracle::random_physical_state(3, rng);
    const double a = oracle::uniform(rng, 0, 1);
    const double b = oracle::uniform(rng, 0, 1);
    EXPECT_LE(max_abs_diff(loss(loss(s, 1, a), 1, b).cov(), loss(s, 1, a * b).cov()), 1e-12);
  }
}

TEST(Loss, invalid_efficiency) {
  EXPECT_THROW(loss(vacuum(2), 0, -0.1), std::invalid_argument);
  EXPECT_THROW(loss(vacuum(2), 0, 1.1), std::invalid_argument);
  EXPECT_THROW(loss(vacuum(2), 2, 0.5), std::invalid_argument);
}

TEST(PhaseJitter, zero_sigma_is_identity) {
  std::mt19937_64 rng(5);
  const auto s = oracle::random_physical_state(3, rng);
  EXPECT_EQ(phase_jitter(s, 0, 0.0).cov(), s.cov());
}

TEST(PhaseJitter, large_sigma_symmetrises_squeezed_vacuum) {
  const double r = 0.6;
  const auto out = phase_jitter(squeezed_vacuum(r), 0, 10.0);
  const double expected = (std::exp(-2 * r) + std::exp(2 * r)) / 8;
  EXPECT_NEAR(out.cov()(0, 0), expected, 1e-12);
  EXPECT_NEAR(out.cov()(1, 1), expected, 1e-12);
}

TEST(PhaseJitter, cross_covariances_shrink_by_first_moment) {
  std::mt19937_64 rng(6);
  const auto s = oracle::random_physical_state(3, rng);
  const double sigma = 0.4;
  const auto out = phase_jitter(s, 1, sigma);
  const double factor = std::exp(-sigma * sigma / 2);
  EXPECT_LE(max_abs_diff(out.cov().block(2, 0, 2, 2), factor * s.cov().block(2, 0, 2, 2)), 1e-15);
  EXPECT_LE(max_abs_diff(out.cov().block(2, 4, 2, 2), factor * s.cov().block(2, 4, 2, 2)), 1e-15);
  EXPECT_EQ(out.cov().block(0, 4, 2, 2), s.cov().block(0, 4, 2, 2));
}

TEST(PhaseJitter, matches_monte_carlo_average) {
  std::mt19937_64 rng(8);
  const auto s = oracle::random_physical_state(2, rng);
  const double sigma = 0.3;
  const auto closed = phase_jitter(s, 0, sigma);
  const auto mc = oracle::jitter_by_sampling(s, 0, sigma, 200000, 99);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      EXPECT_LE(std::abs(closed.cov()(i, j) - mc.cov(i, j)), 3 * mc.standard_error(i, j) + 1e-12)
          << "entry (" << i << ", " << j << ")";
    }
  }
}

TEST(PhaseJitter, squeezed_variance_nondecreasing_in_sigma) {
  const auto sq = squeezed_vacuum(0.8);
  double previous = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double v = phase_jitter(sq, 0, 0.05 * k).cov()(0, 0);
    EXPECT_GE(v, previous);
    previous = v;
  }
}

TEST(PhaseJitter, negative_sigma) { EXPECT_THROW(phase_jitter(vacuum(1), 0, -0.1), std::invalid_argument); }

TEST(Channels, preserve_physicality) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const auto s = oracle::random_physical_state(n, rng);
    const std::size_t mode = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    EXPECT_TRUE(check_physicality(loss(s, mode, oracle::uniform(rng, 0, 1))));
    EXPECT_TRUE(check_physicality(phase_jitter(s, mode, oracle::uniform(rng, 0, 2))));
  }
}

TEST(Channels, apply_channel_validates_spec) {
  ChannelSpec bad{{1.0, 1.2, 1.0}, {}};
  EXPECT_THROW(apply_channel(vacuum(3), bad), std::invalid_argument);
  ChannelSpec wrong_size{{1.0}, {}};
  EXPECT_THROW(apply_channel(vacuum(3), wrong_size), std::invalid_argument);
}

TEST(Visibility, squares) {
  EXPECT_EQ(visibility_to_efficiency(1.0), 1.0);
  EXPECT_EQ(visibility_to_efficiency(0.0), 0.0);
  EXPECT_NEAR(visibility_to_efficiency(0.979), 0.958441, 1e-15);
  EXPECT_THROW(visibility_to_efficiency(1.01), std::invalid_argument);
  EXPECT_THROW(visibility_to_efficiency(-0.1), std::invalid_argument);
}
