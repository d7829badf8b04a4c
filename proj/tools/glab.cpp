// Command-line front end: run experiments, plot their CSV output, and run
// the invariant suites.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "glab/glab.hpp"

namespace {

std::optional<std::uint64_t> env_seed() { return glab::parse_seed_override(std::getenv("GLAB_MASTER_SEED")); }

int cmd_run(const std::string& config_path, std::optional<unsigned> workers, std::optional<std::string> out) {
  glab::RunOptions options;
  options.workers = workers;
  options.output_dir = std::move(out);
  glab::Config config;
  try {
    options.master_seed = env_seed();
    config = glab::Config::load(config_path);
  } catch (const glab::Error& e) {
    std::cerr << "glab: " << glab::to_string(e.code()) << ": " << e.what() << "\n";
    return glab::exit_code(e.code());
  }
  const auto record = glab::run(std::move(config), options);
  if (record.exit_code != 0) {
    std::cerr << "glab: " << record.status << ": " << record.error_message << "\n";
  } else {
    std::cout << record.experiment << " ok, config " << record.config_hash.substr(0, 12) << ", outputs in "
              << record.output_dir << "\n";
    for (const auto& o : record.outputs) std::cout << "  " << o.name << "  " << o.sha256 << "\n";
  }
  return record.exit_code;
}

int cmd_plot(const std::string& csv, const std::string& spec_text) {
  try {
    const auto written = glab::emit_plot(csv, glab::parse_plot_spec(spec_text));
    std::cout << written << "\n";
    return 0;
  } catch (const glab::Error& e) {
    std::cerr << "glab: " << glab::to_string(e.code()) << ": " << e.what() << "\n";
    return glab::exit_code(e.code());
  }
}

int cmd_verify(const std::string& suite, unsigned workers, int trials, std::optional<std::uint64_t> seed) {
  try {
    glab::SuiteOptions opt;
    opt.workers = workers;
    opt.trials = trials;
    const auto override_seed = env_seed();
    opt.seed = override_seed ? *override_seed : seed.value_or(0);
    glab::default_trials(suite);
    const auto result = glab::run_suite(suite, opt);
    for (const auto& c : result.checks) {
      std::printf("%s %s/%s: %llu trials, %llu failures%s%s\n", c.failures ? "FAIL" : "PASS", result.suite.c_str(),
                  c.name.c_str(), static_cast<unsigned long long>(c.trials),
                  static_cast<unsigned long long>(c.failures), c.failures ? ", first at " : "",
                  c.first_failure.c_str());
    }
    return result.passed() ? 0 : glab::exit_code(glab::ErrorCode::invariant);
  } catch (const glab::Error& e) {
    std::cerr << "glab: " << glab::to_string(e.code()) << ": " << e.what() << "\n";
    return glab::exit_code(e.code());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glab: directed percolation and LCS experiments"};
  app.set_version_flag("--version", std::string(glab::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<unsigned> run_workers;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--workers", run_workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (overrides the config)");

  std::string csv_path, spec;
  auto* plot = app.add_subcommand("plot", "render a results CSV as SVG");
  plot->add_option("csv", csv_path, "results CSV")->required();
  plot->add_option("--spec", spec, "preset name, inline spec (preset;key=value;...) or spec file")->required();

  std::string suite;
  unsigned verify_workers = 1;
  int trials = 0;
  std::optional<std::uint64_t> seed;
  auto* verify = app.add_subcommand("verify", "run an invariant suite (oracle-suite, resample-suite, partition-suite)");
  verify->add_option("suite", suite, "suite name")->required();
  verify->add_option("--workers", verify_workers, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--trials", trials, "seeds or instances per check (0: suite default)")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", seed, "master seed (GLAB_MASTER_SEED takes precedence)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) return cmd_run(config_path, run_workers, out_dir);
  if (*plot) return cmd_plot(csv_path, spec);
  return cmd_verify(suite, verify_workers, trials, seed);
}
