#pragma once

// Line-oriented experiment configuration: `[section]` headers, `key = value`
// pairs, `#` comments.
//
//   [squeezing]          r1..r3 or squeezing_db1..3 (r / squeezing_db set all modes)
//   [channel]            efficiency, visibility, phase_sigma (one value or three, comma separated)
//   [gains]              mode = unit | optimal | g1, g2, g3
//   [sampling]           n, runs, seed
//   [output]             csv, fitted_config
//   [targets]            <name> = <dB> [+/- <uncertainty>]
//   [fit]                budget, starts, seed, r_min, r_max, efficiency_min,
//                        efficiency_max, phase_sigma_min, phase_sigma_max
//
// Squeezing of S dB means e^{−2r} = 10^{−S/10}, i.e. r = S·ln10/20.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cvghz/criteria.hpp"
#include "cvghz/fit.hpp"
#include "cvghz/network.hpp"

namespace cvghz {

inline double db_to_squeezing(double db) { return db * std::log(10.0) / 20.0; }
inline double squeezing_to_db(double r) { return 20.0 * r / std::log(10.0); }

enum class GainMode { Unit, Optimal, Explicit };

struct GainChoice {
  GainMode mode = GainMode::Unit;
  GainSet explicit_gains;  // used when mode == Explicit

  friend bool operator==(const GainChoice&, const GainChoice&) = default;
};

struct SamplingConfig {
  std::size_t n = 100000;
  std::size_t runs = 10;
  std::uint64_t seed = 0;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

struct FitConfig {
  std::size_t budget = 200000;
  std::size_t starts = 16;
  std::uint64_t seed = 0;
  SearchSpace space;

  friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

struct ExperimentConfig {
  std::optional<std::array<double, 3>> squeezing;  // r per mode
  std::array<double, 3> efficiency{1.0, 1.0, 1.0};
  std::array<double, 3> visibility{1.0, 1.0, 1.0};  // folded into efficiency as v²
  std::array<double, 3> phase_sigma{0.0, 0.0, 0.0};
  GainChoice gains;
  std::optional<SamplingConfig> sampling;
  std::string csv_path;
  std::string fitted_config_path;
  std::optional<FitTargets> targets;
  FitConfig fit;

  /// Network parameters with the effective per-mode efficiency η·v².
  NetworkParams network() const {
    detail::require(squeezing.has_value(), "config: no [squeezing] section");
    NetworkParams p;
    p.r1 = (*squeezing)[0];
    p.r2 = (*squeezing)[1];
    p.r3 = (*squeezing)[2];
    p.channel.efficiency.clear();
    for (int k = 0; k < 3; ++k) p.channel.efficiency.push_back(efficiency[k] * visibility_to_efficiency(visibility[k]));
    p.channel.phase_sigma.assign(phase_sigma.begin(), phase_sigma.end());
    return p;
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ConfigDiagnostic {
  std::size_t line = 0;  // 1-based; 0 for whole-file problems
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigDiagnostic> diagnostics)
      : std::runtime_error(render(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<ConfigDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string render(const std::vector<ConfigDiagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
      if (!out.empty()) out += '\n';
      out += d.line > 0 ? "line " + std::to_string(d.line) + ": " + d.message : d.message;
    }
    return out;
  }

  std::vector<ConfigDiagnostic> diagnostics_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> parse_unsigned(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::vector<double>> parse_list(std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    const auto v = parse_double(s.substr(0, comma));
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

inline std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses the `--gains` style value: unit | optimal | g1,g2,g3.
inline std::optional<GainChoice> parse_gain_choice(std::string_view text) {
  text = detail::trim(text);
  if (text == "unit") return GainChoice{GainMode::Unit, {}};
  if (text == "optimal") return GainChoice{GainMode::Optimal, {}};
  const auto list = detail::parse_list(text);
  if (!list || list->size() != 3) return std::nullopt;
  return GainChoice{GainMode::Explicit, GainSet{(*list)[0], (*list)[1], (*list)[2]}};
}

inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::vector<ConfigDiagnostic> errors;
  std::set<std::string> seen_sections;
  std::map<std::string, std::size_t> seen_keys;  // "section.key" → line
  std::array<std::optional<double>, 3> r_values;
  std::array<std::size_t, 3> r_lines{};
  FitTargets targets;

  const std::set<std::string> known_sections{"squeezing", "channel", "gains", "sampling", "output", "targets", "fit"};
  std::string section;
  std::size_t line_no = 0;

  std::istringstream input{std::string(text)};
  std::string raw_line;
  while (std::getline(input, raw_line)) {
    ++line_no;
    std::string_view raw = raw_line;
    auto fail = [&](std::string msg) { errors.push_back({line_no, std::move(msg)}); };

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = detail::trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        fail("malformed section header");
        continue;
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (!known_sections.count(section)) {
        fail("unknown section [" + section + "]");
      } else if (!seen_sections.insert(section).second) {
        fail("duplicate section [" + section + "]");
      }
      if (section == "sampling" && !cfg.sampling) cfg.sampling = SamplingConfig{};
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail("expected 'key = value'");
      continue;
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (section.empty()) {
      fail("key '" + key + "' outside of any section");
      continue;
    }
    if (key.empty()) {
      fail("empty key");
      continue;
    }
    const std::string qualified = section + "." + key;
    if (auto [it, inserted] = seen_keys.emplace(qualified, line_no); !inserted) {
      fail("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
      continue;
    }

    auto number = [&](auto setter) {
      if (const auto v = detail::parse_double(value)) {
        setter(*v);
      } else {
        fail("'" + key + "' expects a number, got '" + std::string(value) + "'");
      }
    };
    auto count = [&](auto setter) {
      if (const auto v = detail::parse_unsigned(value)) {
        setter(*v);
      } else {
        fail("'" + key + "' expects a nonnegative integer, got '" + std::string(value) + "'");
      }
    };
    auto per_mode = [&](std::array<double, 3>& out) {
      const auto list = detail::parse_list(value);
      if (!list || (list->size() != 1 && list->size() != 3)) {
        fail("'" + key + "' expects one number or three comma-separated numbers");
        return;
      }
      for (int k = 0; k < 3; ++k) out[k] = list->size() == 1 ? (*list)[0] : (*list)[k];
    };
    auto set_r = [&](int mode, double r) {
      if (r_values[mode]) {
        fail("squeezing of mode " + std::to_string(mode + 1) + " given twice (also on line " +
             std::to_string(r_lines[mode]) + ")");
        return;
      }
      r_values[mode] = r;
      r_lines[mode] = line_no;
    };

    if (section == "squeezing") {
      if (key == "r" || key == "squeezing_db") {
        number([&](double v) {
          for (int k = 0; k < 3; ++k) set_r(k, key == "r" ? v : db_to_squeezing(v));
        });
      } else if (key.size() == 2 && key[0] == 'r' && key[1] >= '1' && key[1] <= '3') {
        number([&](double v) { set_r(key[1] - '1', v); });
      } else if (key.size() == 13 && key.rfind("squeezing_db", 0) == 0 && key[12] >= '1' && key[12] <= '3') {
        number([&](double v) { set_r(key[12] - '1', db_to_squeezing(v)); });
      } else {
        fail("unknown key '" + key + "' in [squeezing]");
      }
    } else if (section == "channel") {
      if (key == "efficiency") {
        per_mode(cfg.efficiency);
      } else if (key == "visibility") {
        per_mode(cfg.visibility);
      } else if (key == "phase_sigma") {
        per_mode(cfg.phase_sigma);
      } else {
        fail("unknown key '" + key + "' in [channel]");
      }
    } else if (section == "gains") {
      if (key == "mode") {
        if (const auto g = parse_gain_choice(value)) {
          cfg.gains = *g;
        } else {
          fail("gains mode must be 'unit', 'optimal' or three comma-separated numbers");
        }
      } else {
        fail("unknown key '" + key + "' in [gains]");
      }
    } else if (section == "sampling") {
      if (key == "n") {
        count([&](std::uint64_t v) { cfg.sampling->n = v; });
      } else if (key == "runs") {
        count([&](std::uint64_t v) { cfg.sampling->runs = v; });
      } else if (key == "seed") {
        count([&](std::uint64_t v) { cfg.sampling->seed = v; });
      } else {
        fail("unknown key '" + key + "' in [sampling]");
      }
    } else if (section == "output") {
      if (key == "csv") {
        cfg.csv_path = std::string(value);
      } else if (key == "fitted_config") {
        cfg.fitted_config_path = std::string(value);
      } else {
        fail("unknown key '" + key + "' in [output]");
      }
    } else if (section == "targets") {
      if (!is_target_name(key)) {
        fail("unknown target '" + key + "'");
        continue;
      }
      Target t{key, 0.0, 0.0, std::nullopt};
      const auto pm = value.find("+/-");
      const auto measured = detail::parse_double(value.substr(0, pm));
      const auto uncertainty =
          pm == std::string_view::npos ? std::optional<double>(0.0) : detail::parse_double(value.substr(pm + 3));
      if (!measured || !uncertainty || *uncertainty < 0.0) {
        fail("target '" + key + "' expects '<dB>' or '<dB> +/- <uncertainty>'");
        continue;
      }
      t.measured_db = *measured;
      t.uncertainty_db = *uncertainty;
      targets.targets.push_back(std::move(t));
    } else if (section == "fit") {
      auto& space = cfg.fit.space;
      auto all = [&](auto member, bool lo) {
        number([&](double v) {
          for (auto& b : space.*member) (lo ? b.lo : b.hi) = v;
        });
      };
      if (key == "budget") {
        count([&](std::uint64_t v) { cfg.fit.budget = v; });
      } else if (key == "starts") {
        count([&](std::uint64_t v) { cfg.fit.starts = v; });
      } else if (key == "seed") {
        count([&](std::uint64_t v) { cfg.fit.seed = v; });
      } else if (key == "r_min") {
        all(&SearchSpace::r, true);
      } else if (key == "r_max") {
        all(&SearchSpace::r, false);
      } else if (key == "efficiency_min") {
        all(&SearchSpace::efficiency, true);
      } else if (key == "efficiency_max") {
        all(&SearchSpace::efficiency, false);
      } else if (key == "phase_sigma_min") {
        all(&SearchSpace::phase_sigma, true);
      } else if (key == "phase_sigma_max") {
        all(&SearchSpace::phase_sigma, false);
      } else {
        fail("unknown key '" + key + "' in [fit]");
      }
    }
  }

  if (seen_sections.count("squeezing")) {
    for (int k = 0; k < 3; ++k) {
      if (!r_values[k]) errors.push_back({0, "[squeezing] does not set mode " + std::to_string(k + 1)});
    }
    if (r_values[0] && r_values[1] && r_values[2]) cfg.squeezing = {*r_values[0], *r_values[1], *r_values[2]};
  }
  if (!seen_sections.count("squeezing") && !seen_sections.count("targets")) {
    errors.push_back({0, "missing required section [squeezing] (or [targets] for fitting)"});
  }
  if (seen_sections.count("targets")) {
    if (targets.targets.empty()) {
      errors.push_back({0, "[targets] section is empty"});
    } else {
      cfg.targets = std::move(targets);
    }
  }

  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back({0, msg});
  };
  for (int k = 0; k < 3; ++k) {
    check(cfg.efficiency[k] >= 0.0 && cfg.efficiency[k] <= 1.0, "[channel] efficiency must lie in [0, 1]");
    check(cfg.visibility[k] >= 0.0 && cfg.visibility[k] <= 1.0, "[channel] visibility must lie in [0, 1]");
    check(cfg.phase_sigma[k] >= 0.0, "[channel] phase_sigma must be >= 0");
  }
  if (errors.empty()) {
    try {
      cfg.fit.space.validate();
    } catch (const std::invalid_argument& e) {
      errors.push_back({0, std::string("[fit] ") + e.what()});
    }
  }
  if (cfg.fit.starts == 0) errors.push_back({0, "[fit] starts must be >= 1"});

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

/// Writes a config that parse_config() reads back to an equal value.
inline std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  auto triple = [](const std::array<double, 3>& v) {
    return detail::format_exact(v[0]) + ", " + detail::format_exact(v[1]) + ", " + detail::format_exact(v[2]);
  };
  if (cfg.squeezing) {
    os << "[squeezing]\n";
    for (int k = 0; k < 3; ++k) os << 'r' << (k + 1) << " = " << detail::format_exact((*cfg.squeezing)[k]) << '\n';
    os << '\n';
  }
  os << "[channel]\n"
     << "efficiency = " << triple(cfg.efficiency) << '\n'
     << "visibility = " << triple(cfg.visibility) << '\n'
     << "phase_sigma = " << triple(cfg.phase_sigma) << "\n\n";

  os << "[gains]\nmode = ";
  switch (cfg.gains.mode) {
    case GainMode::Unit: os << "unit"; break;
    case GainMode::Optimal: os << "optimal"; break;
    case GainMode::Explicit:
      os << triple({cfg.gains.explicit_gains.g1, cfg.gains.explicit_gains.g2, cfg.gains.explicit_gains.g3});
      break;
  }
  os << "\n\n";

  if (cfg.sampling) {
    os << "[sampling]\nn = " << cfg.sampling->n << "\nruns = " << cfg.sampling->runs
       << "\nseed = " << cfg.sampling->seed << "\n\n";
  }
  if (!cfg.csv_path.empty() || !cfg.fitted_config_path.empty()) {
    os << "[output]\n";
    if (!cfg.csv_path.empty()) os << "csv = " << cfg.csv_path << '\n';
    if (!cfg.fitted_config_path.empty()) os << "fitted_config = " << cfg.fitted_config_path << '\n';
    os << '\n';
  }
  if (cfg.targets) {
    os << "[targets]\n";
    for (const auto& t : cfg.targets->targets) {
      os << t.name << " = " << detail::format_exact(t.measured_db);
      if (t.uncertainty_db > 0.0) os << " +/- " << detail::format_exact(t.uncertainty_db);
      os << '\n';
    }
    os << '\n';
  }

  // Per-mode bounds are not expressible in the file format; the first mode's
  // bounds stand for all three.
  const auto& s = cfg.fit.space;
  os << "[fit]\nbudget = " << cfg.fit.budget << "\nstarts = " << cfg.fit.starts << "\nseed = " << cfg.fit.seed
     << "\nr_min = " << detail::format_exact(s.r[0].lo) << "\nr_max = " << detail::format_exact(s.r[0].hi)
     << "\nefficiency_min = " << detail::format_exact(s.efficiency[0].lo)
     << "\nefficiency_max = " << detail::format_exact(s.efficiency[0].hi)
     << "\nphase_sigma_min = " << detail::format_exact(s.phase_sigma[0].lo)
     << "\nphase_sigma_max = " << detail::format_exact(s.phase_sigma[0].hi) << '\n';
  return os.str();
}

}  // namespace cvghz
