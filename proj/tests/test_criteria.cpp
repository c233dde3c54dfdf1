#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "cvghz/criteria.hpp"
#include "cvghz/network.hpp"
#include "oracles.hpp"

using namespace cvghz;

namespace {

NetworkParams random_lossy_params(std::mt19937_64& rng) {
  NetworkParams p{oracle::uniform(rng, 0, 2), oracle::uniform(rng, 0, 2), oracle::uniform(rng, 0, 2)};
  for (int k = 0; k < 3; ++k) {
    p.channel.efficiency[k] = oracle::uniform(rng, 0.3, 1);
    p.channel.phase_sigma[k] = oracle::uniform(rng, 0, 0.5);
  }
  return p;
}

}  // namespace

TEST(Criteria, vacuum_lhs_is_five_quarters) {
  const auto report = vlf_lhs(vacuum(3));
  for (auto which : kInequalities) {
    EXPECT_NEAR(report.lhs(which), 1.25, 1e-15);
    EXPECT_FALSE(report.is_violated(which));
  }
  EXPECT_EQ(report.verdict, Verdict::Undetermined);
  EXPECT_EQ(report.violation_count(), 0);
}

TEST(Criteria, symmetric_lossless_law) {
  for (int k = 0; k <= 20; ++k) {
    const double r = 0.1 * k;
    const auto report = vlf_lhs(ghz_state(NetworkParams::symmetric(r)));
    for (auto which : kInequalities) EXPECT_NEAR(report.lhs(which), 1.25 * std::exp(-2 * r), 1e-12);
  }
}

TEST(Criteria, three_db_symmetric) {
  const double r = 3 * std::log(10.0) / 20;
  const auto report = vlf_lhs(ghz_state(NetworkParams::symmetric(r)));
  EXPECT_NEAR(report.lhs(Inequality::I), 0.6265, 1e-3);
  EXPECT_EQ(report.verdict, Verdict::FullyInseparable);
}

TEST(Criteria, violation_is_strict) {
  EXPECT_EQ(verdict_from({1.0, 1.0, 0.5}), Verdict::Undetermined);
  EXPECT_EQ(verdict_from({0.999, 1.0, 0.5}), Verdict::FullyInseparable);
  EXPECT_EQ(verdict_from({0.1, 2.0, 3.0}), Verdict::Undetermined);
}

TEST(Criteria, gain_routing) {
  GainSet g{0.1, 0.2, 0.3};
  EXPECT_EQ(gain_for(g, Inequality::I), 0.3);
  EXPECT_EQ(gain_for(g, Inequality::II), 0.1);
  EXPECT_EQ(gain_for(g, Inequality::III), 0.2);
  const auto c = weighted_momentum_sum(Inequality::II, 0.7);
  EXPECT_EQ(c.p_coeff(0), 0.7);
  EXPECT_EQ(c.p_coeff(1), 1.0);
  EXPECT_EQ(c.p_coeff(2), 1.0);
}

TEST(Criteria, wrong_mode_count) { EXPECT_THROW(vlf_lhs(vacuum(2)), std::invalid_argument); }

TEST(Criteria, inequality_terms_add_up) {
  std::mt19937_64 rng(31);
  const auto s = ghz_state(random_lossy_params(rng));
  const GainSet g{0.5, 0.8, 1.2};
  const auto report = vlf_lhs(s, g);
  for (auto which : kInequalities) {
    const double direct = combination_variance(s, position_difference(which)) +
                          combination_variance(s, weighted_momentum_sum(which, gain_for(g, which)));
    EXPECT_NEAR(report.lhs(which), direct, 1e-15);
  }
}

TEST(OptimalGain, endpoints_and_known_value) {
  EXPECT_NEAR(optimal_gain(0, 0), 0.0, 1e-15);
  EXPECT_GT(optimal_gain(3, 3), 0.995);
  EXPECT_NEAR(optimal_gain(0.5, 0.5), 0.809863, 1e-6);
}

TEST(OptimalGain, numeric_matches_closed_form_when_r2_equals_r3) {
  for (int k = 1; k <= 20; ++k) {
    const double r = 0.1 * k;
    const auto s = ghz_state(NetworkParams::symmetric(r));
    for (auto which : kInequalities) {
      const auto opt = numeric_optimal_gain(s, which);
      EXPECT_FALSE(opt.degenerate);
      EXPECT_NEAR(opt.gain, optimal_gain(r, r), 1e-6);
    }
  }
}

TEST(OptimalGain, beats_every_other_gain) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = ghz_state(random_lossy_params(rng));
    const auto best = vlf_lhs(s, numeric_optimal_gains(s));
    for (int probe = 0; probe < 5; ++probe) {
      const GainSet other{oracle::uniform(rng, -2, 2), oracle::uniform(rng, -2, 2), oracle::uniform(rng, -2, 2)};
      const auto report = vlf_lhs(s, other);
      for (auto which : kInequalities) EXPECT_LE(best.lhs(which), report.lhs(which) + 1e-12);
    }
  }
}

TEST(OptimalGain, degenerate_when_weighted_momentum_is_noiseless) {
  Matrix cov = 0.25 * Matrix::Identity(6, 6);
  cov(5, 5) = 0.0;  // p3 noiseless: not physical, but isolates the guard
  const GaussianState s(Vector::Zero(6), cov);
  const auto opt = numeric_optimal_gain(s, Inequality::I);
  EXPECT_TRUE(opt.degenerate);
  EXPECT_EQ(opt.gain, 0.0);
}

TEST(Threshold, unit_gain_violation_onset) {
  double lo = 0.0;
  double hi = 1.0;
  auto lhs = [](double r) { return vlf_lhs(ghz_state(NetworkParams::symmetric(r))).lhs(Inequality::I); };
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) < 1.0 ? hi : lo) = mid;
  }
  EXPECT_NEAR(hi, 0.5 * std::log(1.25), 1e-9);
}

TEST(NoiseDb, conversions) {
  EXPECT_NEAR(noise_db(0.25, 0.25), 0.0, 1e-15);
  EXPECT_NEAR(noise_db(0.5, 0.25), 10 * std::log10(2.0), 1e-15);
  EXPECT_EQ(noise_db(0.0, 0.25), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(noise_db(0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(noise_db(-0.1, 0.25), std::invalid_argument);
  EXPECT_NEAR(db_to_variance(4.69, 1.0), 2.9444, 1e-4);
  EXPECT_NEAR(db_to_variance(4.69, 0.25), 0.7361, 1e-4);
  EXPECT_NEAR(db_to_variance(-1.95, 0.5), 0.3191, 1e-4);
}

TEST(NoiseDb, round_trip) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const double db = oracle::uniform(rng, -20, 20);
    const double ref = oracle::uniform(rng, 0.1, 2);
    EXPECT_NEAR(noise_db(db_to_variance(db, ref), ref), db, 1e-12);
  }
}

TEST(NoiseDb, vacuum_references) {
  EXPECT_DOUBLE_EQ(vacuum_reference(QuadCombination::x(3, 0)), 0.25);
  EXPECT_DOUBLE_EQ(vacuum_reference(position_difference(Inequality::I)), 0.5);
  EXPECT_DOUBLE_EQ(vacuum_reference(weighted_momentum_sum(Inequality::I, 1.0)), 0.75);
}
