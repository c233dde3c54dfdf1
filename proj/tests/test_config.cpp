#include <random>

#include "gtest/gtest.h"

#include "cvghz/config.hpp"
#include "oracles.hpp"

using namespace cvghz;

TEST(Config, minimal_defaults) {
  const auto cfg = parse_config("[squeezing]\nr = 0.5\n");
  ASSERT_TRUE(cfg.squeezing);
  EXPECT_EQ(*cfg.squeezing, (std::array<double, 3>{0.5, 0.5, 0.5}));
  EXPECT_EQ(cfg.efficiency, (std::array<double, 3>{1, 1, 1}));
  EXPECT_EQ(cfg.phase_sigma, (std::array<double, 3>{0, 0, 0}));
  EXPECT_EQ(cfg.gains.mode, GainMode::Unit);
  EXPECT_FALSE(cfg.sampling);
  EXPECT_FALSE(cfg.targets);
}

TEST(Config, squeezing_in_db) {
  const auto cfg = parse_config("[squeezing]\nsqueezing_db = 3\n");
  EXPECT_NEAR((*cfg.squeezing)[0], 0.345388, 1e-6);
  EXPECT_NEAR(squeezing_to_db(db_to_squeezing(4.2)), 4.2, 1e-14);
}

TEST(Config, per_mode_values_and_visibility) {
  const auto cfg = parse_config(
      "# comment\n[squeezing]\nr1 = 0.1\nr2 = 0.2\nsqueezing_db3 = 1\n\n[channel]\nefficiency = 0.9\n"
      "visibility = 0.979, 0.971, 0.989\nphase_sigma = 0.1, 0.2, 0.3\n[gains]\nmode = 0.5, 0.6, 0.7\n");
  EXPECT_EQ((*cfg.squeezing)[1], 0.2);
  EXPECT_NEAR(cfg.network().channel.efficiency[0], 0.9 * 0.979 * 0.979, 1e-15);
  EXPECT_EQ(cfg.phase_sigma[2], 0.3);
  EXPECT_EQ(cfg.gains.mode, GainMode::Explicit);
  EXPECT_EQ(cfg.gains.explicit_gains, (GainSet{0.5, 0.6, 0.7}));
}

TEST(Config, duplicate_key_names_its_line) {
  try {
    parse_config("[squeezing]\nr = 0.5\nr = 0.6\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    ASSERT_FALSE(e.diagnostics().empty());
    EXPECT_EQ(e.diagnostics().front().line, 3u);
  }
}

TEST(Config, collects_every_error) {
  try {
    parse_config("[squeezing]\nr = abc\n[nonsense]\n[channel]\nefficiency = 1.5\nfoo = 1\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.diagnostics().size(), 3u);
  }
}

TEST(Config, rejects_missing_or_conflicting_squeezing) {
  EXPECT_THROW(parse_config("[channel]\nefficiency = 0.9\n"), ConfigError);
  EXPECT_THROW(parse_config("[squeezing]\nr1 = 0.5\n"), ConfigError);
  EXPECT_THROW(parse_config("[squeezing]\nr = 0.5\nsqueezing_db = 3\n"), ConfigError);
}

TEST(Config, targets_section) {
  const auto cfg = parse_config("[targets]\nx1 = 1.14 +/- 0.25\nx1-x2 = -1.95\n");
  ASSERT_TRUE(cfg.targets);
  ASSERT_EQ(cfg.targets->targets.size(), 2u);
  EXPECT_EQ(cfg.targets->targets[0].uncertainty_db, 0.25);
  EXPECT_EQ(cfg.targets->targets[1].measured_db, -1.95);
  EXPECT_THROW(parse_config("[targets]\n"), ConfigError);
  EXPECT_THROW(parse_config("[targets]\nx7 = 1\n"), ConfigError);
}

TEST(Config, emit_then_parse_is_identity) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    ExperimentConfig cfg;
    cfg.squeezing = std::array<double, 3>{oracle::uniform(rng, 0, 2), oracle::uniform(rng, 0, 2),
                                          oracle::uniform(rng, 0, 2)};
    for (int k = 0; k < 3; ++k) {
      cfg.efficiency[k] = oracle::uniform(rng, 0, 1);
      cfg.visibility[k] = oracle::uniform(rng, 0, 1);
      cfg.phase_sigma[k] = oracle::uniform(rng, 0, 1);
    }
    switch (trial % 3) {
      case 0: cfg.gains.mode = GainMode::Unit; break;
      case 1: cfg.gains.mode = GainMode::Optimal; break;
      default:
        cfg.gains.mode = GainMode::Explicit;
        cfg.gains.explicit_gains = {oracle::uniform(rng, -1, 2), oracle::uniform(rng, -1, 2),
                                    oracle::uniform(rng, -1, 2)};
    }
    if (trial % 2 == 0) cfg.sampling = SamplingConfig{static_cast<std::size_t>(trial + 2), 3, 99u + trial};
    if (trial % 4 == 0) {
      cfg.targets = FitTargets::measured();
      cfg.targets->targets[0].measured_db = oracle::uniform(rng, -3, 3);
      cfg.csv_path = "out.csv";
    }
    const double r_hi = oracle::uniform(rng, 1, 3);
    for (auto& b : cfg.fit.space.r) b = {0.0, r_hi};
    cfg.fit.seed = trial;
    EXPECT_EQ(parse_config(emit_config(cfg)), cfg) << emit_config(cfg);
  }
}
