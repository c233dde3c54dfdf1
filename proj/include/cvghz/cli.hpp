#pragma once

// Subcommand drivers behind the `cvghz` executable. Each returns the process
// exit status: 0 fully inseparable, 2 undetermined, 1 error.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cvghz/channels.hpp"
#include "cvghz/config.hpp"
#include "cvghz/criteria.hpp"
#include "cvghz/fit.hpp"
#include "cvghz/homodyne.hpp"
#include "cvghz/network.hpp"

namespace cvghz::cli {

inline constexpr int kExitInseparable = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndetermined = 2;

inline int exit_code(Verdict v) { return v == Verdict::FullyInseparable ? kExitInseparable : kExitUndetermined; }

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<GainChoice> gains;
  std::string csv_path;
  std::string fitted_config_path;
};

inline ExperimentConfig apply_overrides(ExperimentConfig cfg, const Overrides& o) {
  if (o.seed) {
    if (cfg.sampling) cfg.sampling->seed = *o.seed;
    cfg.fit.seed = *o.seed;
  }
  if (o.gains) cfg.gains = *o.gains;
  if (!o.csv_path.empty()) cfg.csv_path = o.csv_path;
  if (!o.fitted_config_path.empty()) cfg.fitted_config_path = o.fitted_config_path;
  return cfg;
}

/// Six significant digits, dot decimal separator regardless of locale.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace detail {

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string row(const std::vector<std::string>& cells, std::size_t width = 14) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += i + 1 < cells.size() ? pad(cells[i], width) : cells[i];
  return out;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

inline GaussianState physical_state(const NetworkParams& params) {
  GaussianState state = ghz_state(params);
  const auto phys = check_physicality(state);
  if (!phys) {
    throw std::runtime_error("configured state is unphysical (min eigenvalue of cov + iΩ/4 = " +
                             fmt(phys.min_eigenvalue) + ")");
  }
  return state;
}

inline std::string params_line(const NetworkParams& p) {
  const auto& c = p.channel;
  return "r = (" + fmt(p.r1) + ", " + fmt(p.r2) + ", " + fmt(p.r3) + ")  efficiency = (" + fmt(c.efficiency[0]) +
         ", " + fmt(c.efficiency[1]) + ", " + fmt(c.efficiency[2]) + ")  phase sigma = (" + fmt(c.phase_sigma[0]) +
         ", " + fmt(c.phase_sigma[1]) + ", " + fmt(c.phase_sigma[2]) + ")";
}

}  // namespace detail

inline GainSet resolve_gains(const GainChoice& choice, const GaussianState& state) {
  switch (choice.mode) {
    case GainMode::Unit: return GainSet::unit();
    case GainMode::Optimal: return numeric_optimal_gains(state);
    case GainMode::Explicit: return choice.explicit_gains;
  }
  return GainSet::unit();
}

inline const char* gain_mode_name(GainMode m) {
  switch (m) {
    case GainMode::Unit: return "unit";
    case GainMode::Optimal: return "optimal";
    case GainMode::Explicit: return "explicit";
  }
  return "?";
}

/// Text block for a criteria report: per-inequality variances, their dB
/// relative to vacuum, violation flags and the verdict.
inline void print_report(std::ostream& out, const CriteriaReport& report, GainMode mode) {
  const auto& g = report.gains;
  out << "gains (" << gain_mode_name(mode) << "): g1 = " << fmt(g.g1) << "  g2 = " << fmt(g.g2)
      << "  g3 = " << fmt(g.g3) << "\n\n";
  out << detail::row({"inequality", "var(x-diff)", "var(p-sum)", "lhs", "x-diff dB", "p-sum dB", "violated"}) << '\n';
  for (auto which : kInequalities) {
    const auto& t = report.terms[static_cast<std::size_t>(which)];
    const auto p = weighted_momentum_sum(which, gain_for(g, which));
    out << detail::row({to_string(which), fmt(t.position_variance), fmt(t.momentum_variance), fmt(t.lhs()),
                        fmt(noise_db(t.position_variance, 0.5)),
                        fmt(noise_db(t.momentum_variance, vacuum_reference(p))),
                        report.is_violated(which) ? "yes" : "no"})
        << '\n';
  }
  out << "\nverdict: " << to_string(report.verdict) << " (" << report.violation_count() << " of 3 violated)\n";
}

inline void write_report_csv(std::ostream& os, const CriteriaReport& report) {
  os << "inequality,position_variance,momentum_variance,lhs,position_db,momentum_db,violated\n";
  for (auto which : kInequalities) {
    const auto& t = report.terms[static_cast<std::size_t>(which)];
    const auto p = weighted_momentum_sum(which, gain_for(report.gains, which));
    os << to_string(which) << ',' << fmt(t.position_variance) << ',' << fmt(t.momentum_variance) << ','
       << fmt(t.lhs()) << ',' << fmt(noise_db(t.position_variance, 0.5)) << ','
       << fmt(noise_db(t.momentum_variance, vacuum_reference(p))) << ',' << (report.is_violated(which) ? 1 : 0)
       << '\n';
  }
}

inline int run_criteria(const ExperimentConfig& cfg, std::ostream& out) {
  const auto params = cfg.network();
  const auto state = detail::physical_state(params);
  const auto report = vlf_lhs(state, resolve_gains(cfg.gains, state));
  out << "state: " << detail::params_line(params) << '\n';
  print_report(out, report, cfg.gains.mode);
  if (!cfg.csv_path.empty()) {
    auto csv = detail::open_output(cfg.csv_path);
    write_report_csv(csv, report);
  }
  return exit_code(report.verdict);
}

/// The measured combinations: three position differences followed by the
/// distinct gain-weighted momentum sums.
inline std::vector<QuadCombination> measured_combinations(const GainSet& gains) {
  std::vector<QuadCombination> out;
  for (auto which : kInequalities) out.push_back(position_difference(which));
  for (auto which : kInequalities) {
    auto p = weighted_momentum_sum(which, gain_for(gains, which));
    bool seen = false;
    for (const auto& c : out) seen = seen || c == p;
    if (!seen) out.push_back(std::move(p));
  }
  return out;
}

/// Canonical target name when the combination is one, else describe().
inline std::string combination_name(const QuadCombination& c) {
  for (const auto& name : target_names()) {
    if (target_combination(name) == c) return name;
  }
  return describe(c);
}

inline void write_series_csv(std::ostream& os, const std::vector<SeriesResult>& series) {
  os << "combination,run,variance,standard_error,db\n";
  for (const auto& s : series) {
    const double ref = vacuum_reference(s.combination);
    for (std::size_t k = 0; k < s.runs.size(); ++k) {
      os << combination_name(s.combination) << ',' << k << ',' << fmt(s.runs[k].variance) << ','
         << fmt(s.runs[k].standard_error) << ',' << fmt(noise_db(s.runs[k].variance, ref)) << '\n';
    }
  }
}

inline int run_sample(const ExperimentConfig& cfg, std::ostream& out) {
  if (!cfg.sampling) throw std::runtime_error("sample: config has no [sampling] section");
  if (cfg.sampling->n < 2) throw std::runtime_error("sample: n must be >= 2 (variance undefined for one shot)");
  if (cfg.sampling->runs < 2) throw std::runtime_error("sample: runs must be >= 2");
  const auto params = cfg.network();
  const auto state = detail::physical_state(params);
  const GainSet gains = resolve_gains(cfg.gains, state);
  const auto combos = measured_combinations(gains);
  const auto series =
      measurement_series(state, combos, SeriesOptions{cfg.sampling->n, cfg.sampling->runs, cfg.sampling->seed, 0});

  out << "state: " << detail::params_line(params) << '\n';
  out << "shots per run: " << cfg.sampling->n << "  runs: " << cfg.sampling->runs << "  seed: " << cfg.sampling->seed
      << "\n\n";
  out << detail::row({"combination", "mean var", "sd", "analytic", "mean dB"}, 16) << '\n';
  for (const auto& s : series) {
    out << detail::row({combination_name(s.combination), fmt(s.mean), fmt(s.stddev),
                        fmt(combination_variance(state, s.combination)),
                        fmt(noise_db(s.mean, vacuum_reference(s.combination)))},
                       16)
        << '\n';
  }

  // Per-run inequality sums, summarised as mean ± sd across runs.
  auto find = [&](const QuadCombination& c) -> const SeriesResult& {
    for (const auto& s : series) {
      if (s.combination == c) return s;
    }
    throw std::logic_error("combination missing from series");
  };
  std::array<double, 3> mean_lhs{};
  out << '\n' << detail::row({"inequality", "lhs mean", "lhs sd"}, 16) << '\n';
  for (auto which : kInequalities) {
    const auto& x = find(position_difference(which));
    const auto& p = find(weighted_momentum_sum(which, gain_for(gains, which)));
    std::vector<double> sums;
    for (std::size_t k = 0; k < x.runs.size(); ++k) sums.push_back(x.runs[k].variance + p.runs[k].variance);
    double m = 0.0;
    for (double v : sums) m += v;
    m /= static_cast<double>(sums.size());
    double ss = 0.0;
    for (double v : sums) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(sums.size() - 1));
    mean_lhs[static_cast<std::size_t>(which)] = m;
    out << detail::row({to_string(which), fmt(m), fmt(sd)}, 16) << '\n';
  }
  const Verdict verdict = verdict_from(mean_lhs);
  out << "\nverdict (sampled means): " << to_string(verdict) << '\n';

  if (!cfg.csv_path.empty()) {
    auto csv = detail::open_output(cfg.csv_path);
    write_series_csv(csv, series);
  }
  return exit_code(verdict);
}

inline int run_predict(const ExperimentConfig& cfg, std::ostream& out) {
  const auto params = cfg.network();
  const auto state = detail::physical_state(params);
  const auto& names = target_names();
  const auto predicted = predict_targets(state, names);
  out << "state: " << detail::params_line(params) << "\n\n";
  out << detail::row({"target", "variance", "dB vs vacuum"}) << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << detail::row({names[i], fmt(combination_variance(state, target_combination(names[i]))), fmt(predicted[i])})
        << '\n';
  }
  const auto report = vlf_lhs(state, resolve_gains(cfg.gains, state));
  out << '\n';
  print_report(out, report, cfg.gains.mode);
  if (!cfg.csv_path.empty()) {
    auto csv = detail::open_output(cfg.csv_path);
    csv << "target,variance,db\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      csv << names[i] << ',' << fmt(combination_variance(state, target_combination(names[i]))) << ','
          << fmt(predicted[i]) << '\n';
    }
  }
  return exit_code(report.verdict);
}

/// Config holding the fitted parameters, reusable with the other subcommands.
inline ExperimentConfig fitted_config(const ExperimentConfig& source, const NetworkParams& fitted) {
  ExperimentConfig out = source;
  out.squeezing = std::array<double, 3>{fitted.r1, fitted.r2, fitted.r3};
  for (int k = 0; k < 3; ++k) {
    out.efficiency[k] = fitted.channel.efficiency[k];
    out.visibility[k] = 1.0;
    out.phase_sigma[k] = fitted.channel.phase_sigma[k];
  }
  out.targets.reset();
  out.fitted_config_path.clear();
  out.csv_path.clear();
  return out;
}

inline int run_fit(const ExperimentConfig& cfg, std::ostream& out) {
  if (!cfg.targets || cfg.targets->targets.empty()) {
    throw std::runtime_error("fit: config has no [targets] section");
  }
  FitOptions options;
  options.budget = cfg.fit.budget;
  options.starts = cfg.fit.starts;
  options.seed = cfg.fit.seed;
  const auto result = fit(*cfg.targets, cfg.fit.space, options);

  out << "fitted: " << detail::params_line(result.params) << '\n';
  out << "residual: " << fmt(result.residual) << " dB  converged: " << (result.converged ? "yes" : "no")
      << "  evaluations: " << result.evaluations << "\n\n";
  out << detail::row({"target", "measured dB", "fitted dB", "residual dB"}) << '\n';
  for (std::size_t i = 0; i < cfg.targets->targets.size(); ++i) {
    const auto& t = cfg.targets->targets[i];
    out << detail::row({t.name, fmt(t.measured_db), fmt(t.measured_db + result.per_target_residuals[i]),
                        fmt(result.per_target_residuals[i])})
        << '\n';
  }

  const auto state = detail::physical_state(result.params);
  const auto report = vlf_lhs(state, resolve_gains(cfg.gains, state));
  out << '\n';
  print_report(out, report, cfg.gains.mode);

  if (!cfg.fitted_config_path.empty()) {
    auto file = detail::open_output(cfg.fitted_config_path);
    file << "# fitted parameters (residual " << fmt(result.residual) << " dB)\n"
         << emit_config(fitted_config(cfg, result.params));
  }
  if (!cfg.csv_path.empty()) {
    auto csv = detail::open_output(cfg.csv_path);
    csv << "target,measured_db,fitted_db,residual_db\n";
    for (std::size_t i = 0; i < cfg.targets->targets.size(); ++i) {
      const auto& t = cfg.targets->targets[i];
      csv << t.name << ',' << fmt(t.measured_db) << ',' << fmt(t.measured_db + result.per_target_residuals[i]) << ','
          << fmt(result.per_target_residuals[i]) << '\n';
    }
  }
  return exit_code(report.verdict);
}

}  // namespace cvghz::cli
