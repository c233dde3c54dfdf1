#pragma once

// Homodyne sampling of quadrature combinations and variance estimation.
//
// Generator contract (reproducible across implementations):
//   * engine: std::mt19937_64 seeded with the 64-bit seed;
//   * uniforms: u = (word >> 11) · 2⁻⁵³;
//   * normals: Box–Muller on consecutive uniform pairs (u₁, u₂) with
//     ρ = √(−2 ln(1 − u₁)), emitting ρ·cos(2πu₂) then ρ·sin(2πu₂);
//   * run k of a measurement series uses seed splitmix64(seed ⊕ k).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cvghz/gaussian.hpp"

namespace cvghz {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_run_seed(std::uint64_t seed, std::uint64_t run) { return splitmix64(seed ^ run); }

/// Standard-normal stream with a pinned algorithm (see file header).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rho = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = rho * std::sin(angle);
    has_spare_ = true;
    return rho * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t n() const noexcept { return values.size(); }
};

/// Rejects combinations that need x and p of the same mode in one shot.
inline void require_homodyne_compatible(const QuadCombination& c) {
  for (std::size_t k = 0; k < c.n_modes(); ++k) {
    if (c.x_coeff(k) != 0.0 && c.p_coeff(k) != 0.0) {
      throw std::invalid_argument("sample_combination: mode " + std::to_string(k + 1) +
                                  " mixes x and p; a homodyne detector measures one quadrature per shot");
    }
  }
}

namespace detail {

inline void fill_samples(NormalStream& stream, double mean, double stddev, std::size_t n, std::vector<double>& out) {
  out.resize(n);
  for (auto& v : out) v = mean + stddev * stream.next();
}

}  // namespace detail

/// n shots of the linear form: draws from N(cᵀ·mean, cᵀ·cov·c).
inline SampleBatch sample_combination(const GaussianState& state, const QuadCombination& c, std::size_t n,
                                      std::uint64_t seed) {
  detail::require(n > 0, "sample_combination: n must be >= 1");
  require_homodyne_compatible(c);
  SampleBatch batch;
  batch.seed = seed;
  NormalStream stream(seed);
  detail::fill_samples(stream, combination_mean(state, c), std::sqrt(combination_variance(state, c)), n,
                       batch.values);
  return batch;
}

struct VarianceEstimate {
  double variance = 0.0;
  double standard_error = 0.0;
};

/// Unbiased sample variance (Welford) and its Gaussian standard error
/// variance·√(2/(n−1)).
inline VarianceEstimate estimate_variance(std::span<const double> values) {
  detail::require(values.size() >= 2, "estimate_variance: need at least two samples");
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(values.size());
  const double variance = m2 / (n - 1.0);
  return {variance, variance * std::sqrt(2.0 / (n - 1.0))};
}

inline VarianceEstimate estimate_variance(const SampleBatch& batch) { return estimate_variance(batch.values); }

struct SeriesResult {
  QuadCombination combination;
  std::vector<VarianceEstimate> runs;  // indexed by run
  double mean = 0.0;                   // mean of the per-run variance estimates
  double stddev = 0.0;                 // sample standard deviation across runs
};

struct SeriesOptions {
  std::size_t n_per_run = 0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// Repeats the measurement of every combination `runs` times. Run k owns the
/// stream derive_run_seed(seed, k) and draws the combinations in order, n
/// shots each, so results do not depend on the worker count.
inline std::vector<SeriesResult> measurement_series(const GaussianState& state,
                                                    const std::vector<QuadCombination>& combinations,
                                                    const SeriesOptions& options) {
  detail::require(options.runs >= 2, "measurement_series: runs must be >= 2");
  detail::require(options.n_per_run >= 2, "measurement_series: n_per_run must be >= 2");
  detail::require(!combinations.empty(), "measurement_series: no combinations given");
  for (const auto& c : combinations) {
    detail::require(c.n_modes() == state.n_modes(), "measurement_series: dimension mismatch");
    require_homodyne_compatible(c);
  }

  std::vector<std::vector<VarianceEstimate>> per_run(options.runs,
                                                     std::vector<VarianceEstimate>(combinations.size()));
  auto do_run = [&](std::size_t run) {
    NormalStream stream(derive_run_seed(options.seed, run));
    std::vector<double> shots;
    for (std::size_t j = 0; j < combinations.size(); ++j) {
      detail::fill_samples(stream, combination_mean(state, combinations[j]),
                           std::sqrt(combination_variance(state, combinations[j])), options.n_per_run, shots);
      per_run[run][j] = estimate_variance(shots);
    }
  };

  unsigned workers = options.workers != 0 ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, options.runs));
  if (workers <= 1) {
    for (std::size_t run = 0; run < options.runs; ++run) do_run(run);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t run = w; run < options.runs; run += workers) do_run(run);
      });
    }
  }

  std::vector<SeriesResult> results;
  results.reserve(combinations.size());
  for (std::size_t j = 0; j < combinations.size(); ++j) {
    SeriesResult r{combinations[j], {}, 0.0, 0.0};
    r.runs.reserve(options.runs);
    for (std::size_t run = 0; run < options.runs; ++run) r.runs.push_back(per_run[run][j]);
    double sum = 0.0;
    for (const auto& e : r.runs) sum += e.variance;
    r.mean = sum / static_cast<double>(options.runs);
    double ss = 0.0;
    for (const auto& e : r.runs) ss += (e.variance - r.mean) * (e.variance - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(options.runs - 1));
    results.push_back(std::move(r));
  }
  return results;
}

/// FNV-1a over the moments printed with 17 significant digits.
inline std::uint64_t state_hash(const GaussianState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g;", v);
    for (int i = 0; i < len; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index i = 0; i < state.mean().size(); ++i) mix(state.mean()(i));
  for (Eigen::Index i = 0; i < state.cov().rows(); ++i) {
    for (Eigen::Index j = 0; j < state.cov().cols(); ++j) mix(state.cov()(i, j));
  }
  return h;
}

/// Human-readable form such as "x1-x2" or "p1+p2+0.9p3".
inline std::string describe(const QuadCombination& c) {
  std::string out;
  auto term = [&out](double w, char q, std::size_t mode) {
    if (w == 0.0) return;
    if (w < 0.0) {
      out += '-';
    } else if (!out.empty()) {
      out += '+';
    }
    const double mag = std::abs(w);
    if (mag != 1.0) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", mag);
      out += buf;
    }
    out += q;
    out += std::to_string(mode + 1);
  };
  for (std::size_t k = 0; k < c.n_modes(); ++k) term(c.x_coeff(k), 'x', k);
  for (std::size_t k = 0; k < c.n_modes(); ++k) term(c.p_coeff(k), 'p', k);
  return out.empty() ? std::string("0") : out;
}

/// Single-column CSV; the first line is a comment carrying the provenance.
inline void write_batch_csv(std::ostream& os, const SampleBatch& batch, const GaussianState& state,
                            const QuadCombination& c) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(state_hash(state)));
  os << "# state_hash=" << hash << " combination=" << describe(c) << " n=" << batch.n() << " seed=" << batch.seed
     << '\n';
  os << "value\n";
  char buf[32];
  for (double v : batch.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << '\n';
  }
}

}  // namespace cvghz
