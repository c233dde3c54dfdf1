// Walks through the tritter experiment end to end: ideal state, the effect of
// loss and phase jitter, and a fit to the measured noise levels.

#include <cstdio>

#include "cvghz/cvghz.hpp"

using namespace cvghz;

namespace {

void print_lhs(const char* label, const CriteriaReport& r) {
  std::printf("%-34s I = %.4f  II = %.4f  III = %.4f  -> %s\n", label, r.lhs(Inequality::I), r.lhs(Inequality::II),
              r.lhs(Inequality::III), to_string(r.verdict));
}

}  // namespace

int main() {
  const double r = 0.6;
  print_lhs("vacuum", vlf_lhs(vacuum(3)));
  print_lhs("lossless, r = 0.6, unit gains", vlf_lhs(ghz_state(NetworkParams::symmetric(r))));

  const auto ideal = ghz_state(NetworkParams::symmetric(r));
  print_lhs("lossless, r = 0.6, optimal gains", vlf_lhs(ideal, numeric_optimal_gains(ideal)));
  std::printf("closed-form optimal gain at r = 0.6: %.6f\n\n", optimal_gain(r, r));

  NetworkParams lossy = NetworkParams::symmetric(r);
  lossy.channel.efficiency = {visibility_to_efficiency(0.979), visibility_to_efficiency(0.971),
                              visibility_to_efficiency(0.989)};
  print_lhs("homodyne visibilities only", vlf_lhs(ghz_state(lossy)));
  lossy.channel.phase_sigma = {0.1, 0.1, 0.1};
  print_lhs("... plus 0.1 rad phase jitter", vlf_lhs(ghz_state(lossy)));

  std::printf("\nfitting the measured noise levels...\n");
  const auto result = fit(FitTargets::measured());
  const auto& p = result.params;
  std::printf("r = (%.3f, %.3f, %.3f)  eta = (%.3f, %.3f, %.3f)  sigma = (%.3f, %.3f, %.3f)\n", p.r1, p.r2, p.r3,
              p.channel.efficiency[0], p.channel.efficiency[1], p.channel.efficiency[2], p.channel.phase_sigma[0],
              p.channel.phase_sigma[1], p.channel.phase_sigma[2]);
  std::printf("residual %.4f dB over %zu evaluations\n", result.residual, result.evaluations);
  print_lhs("fitted state, unit gains", vlf_lhs(ghz_state(p)));
  return 0;
}
