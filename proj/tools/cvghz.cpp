// cvghz: simulate the three-squeezer tritter state, check the sum-variance
// inseparability criteria, sample homodyne records and fit measured noise levels.
//
// Exit status: 0 fully inseparable, 2 undetermined, 1 error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cvghz/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tripartite CV entanglement simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string csv_path;
  std::string out_path;
  std::string gains_text;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--csv", csv_path, "Write CSV output to this path");
    sub->add_option("--seed", seed, "Override the config's seeds");
    sub->add_option("--gains", gains_text, "unit | optimal | g1,g2,g3");
  };

  auto* criteria = app.add_subcommand("criteria", "Evaluate the three inequalities on the configured state");
  auto* sample = app.add_subcommand("sample", "Monte Carlo homodyne measurement series");
  auto* fit = app.add_subcommand("fit", "Fit network parameters to measured dB targets");
  auto* predict = app.add_subcommand("predict", "Predicted noise levels (dB vs vacuum) of the configured state");
  for (auto* sub : {criteria, sample, fit, predict}) add_common(sub);
  fit->add_option("--out", out_path, "Write the fitted parameters as a config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cvghz::cli::kExitError;
  }

  try {
    cvghz::cli::Overrides overrides;
    auto* active = app.get_subcommands().front();
    if (active->count("--seed") > 0) overrides.seed = seed;
    if (!gains_text.empty()) {
      overrides.gains = cvghz::parse_gain_choice(gains_text);
      if (!overrides.gains) throw std::runtime_error("--gains must be 'unit', 'optimal' or g1,g2,g3");
    }
    overrides.csv_path = csv_path;
    overrides.fitted_config_path = out_path;
    const auto cfg = cvghz::cli::apply_overrides(cvghz::parse_config(read_file(config_path)), overrides);

    if (*criteria) return cvghz::cli::run_criteria(cfg, std::cout);
    if (*sample) return cvghz::cli::run_sample(cfg, std::cout);
    if (*fit) return cvghz::cli::run_fit(cfg, std::cout);
    return cvghz::cli::run_predict(cfg, std::cout);
  } catch (const cvghz::ConfigError& e) {
    std::cerr << config_path << ":\n" << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return cvghz::cli::kExitError;
}
