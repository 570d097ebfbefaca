// slevel: run solver experiments from an INI config, or the verification suite.
//
//   slevel run --config PATH [--seed N] [--jobs K] [--out DIR] [--set section.key=value]...
//   slevel verify --level quick|full [--fault entropy_floor_zero] [--jobs K] [--report PATH]
//
// Exit codes: 0 success, 1 solver error or failed criterion, 2 bad config/usage.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <thread>

#include "slevel/acceptance.hpp"
#include "slevel/config.hpp"
#include "slevel/errors.hpp"
#include "slevel/experiment.hpp"

namespace {

constexpr int kUsageError = 2;

int run_command(const std::string& config_path, const std::vector<std::string>& overrides,
                std::optional<std::uint64_t> seed, std::size_t jobs, std::string out_dir) {
  slevel::RunConfig config;
  try {
    config = slevel::load_run_config(config_path, overrides);
  } catch (const slevel::Error& e) {
    std::cerr << "config error in " << config_path << ": " << e.what() << '\n';
    return kUsageError;
  }
  if (seed) config.seeds = {*seed};
  if (out_dir.empty()) out_dir = config.output;
  try {
    return slevel::run_experiment(config, out_dir, jobs, std::cout);
  } catch (const slevel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int verify_command(const std::string& level, const std::string& fault, std::size_t jobs,
                   const std::string& report) {
  slevel::VerifyOptions opt;
  opt.level = level == "quick" ? slevel::VerifyLevel::quick : slevel::VerifyLevel::full;
  opt.jobs = jobs;
  if (fault == "entropy_floor_zero") opt.entropy_floor = 0.0;
  const auto results = slevel::run_acceptance(opt, [](const slevel::CriterionResult& r) {
    std::cout << slevel::format_result(r) << std::endl;
  });
  if (!report.empty()) {
    std::ofstream out(report);
    if (!out) {
      std::cerr << "cannot write report " << report << '\n';
      return 1;
    }
    out << slevel::results_json(results) << '\n';
  }
  std::string failed;
  for (const auto& r : results) {
    if (!r.pass) failed += (failed.empty() ? "" : ",") + std::to_string(r.id);
  }
  if (!failed.empty()) {
    std::cout << "FAILED criteria: " << failed << '\n';
    return 1;
  }
  std::cout << "all " << results.size() << " criteria passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasible level-set solvers for expectation-constrained problems"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a solver experiment from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string out_dir;
  run->add_option("--config", config_path, "INI config file")->required();
  run->add_option("--seed", seed, "run this single seed instead of the configured list");
  run->add_option("--jobs", jobs, "parallel seeds (capped by SLEVEL_THREADS)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (default: run.output)");
  run->add_option("--set", overrides, "override a config key, section.key=value");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  std::string level = "quick";
  std::string fault;
  std::size_t verify_jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string report;
  verify->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--fault", fault, "inject a known fault")
      ->check(CLI::IsMember({"entropy_floor_zero"}));
  verify->add_option("--jobs", verify_jobs, "worker threads for seed sweeps")
      ->check(CLI::PositiveNumber);
  verify->add_option("--report", report, "write a JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  if (*run) return run_command(config_path, overrides, seed, jobs, out_dir);
  return verify_command(level, fault, verify_jobs, report);
}
