#pragma once

// Run configuration: an INI file with [problem], [solver] and [run]
// sections. Unknown sections or keys are rejected. See README for the keys.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace slevel {

struct ProblemConfig {
  std::string type;  // toy1d | toy2d | np | fairness | alp
  double noise = 0.0;
  // Neyman-Pearson: synthetic Gaussian classes unless data_path is set.
  std::size_t classes = 3;
  std::size_t points = 3000;
  double spread = 1.0;
  double radius = 5.0;
  std::uint64_t data_seed = 7;
  std::string data_path;
  // Fairness: three LIBSVM files, or synthetic data when they are empty.
  double kappa = 0.95;
  std::string labeled_path;
  std::string group_m_path;
  std::string group_f_path;
  // ALP.
  std::size_t samples = 50;
  std::size_t frozen_demand = 0;
  double c_h = 2.0;
  double c_d = 10.0;
  double c_b = 10.0;
};

struct SolverConfig {
  std::string name = "sfls";  // sfls | dfls | ovsmd
  double theta = 1.1;
  std::size_t iterations = 1000;       // T per oracle call
  std::optional<double> step_constant;  // absent: use the probe estimate of M
  std::size_t batch = 1000;
  double delta = 0.1;
  std::string r0_mode = "margin";  // explicit | margin
  double r0 = 0.0;
  double r0_margin = 0.0;  // r0 = f0(start) + margin
  std::size_t outer_limit = 20;
  std::optional<double> eps_opt;
  std::optional<double> pass_budget;
};

struct RunConfig {
  ProblemConfig problem;
  SolverConfig solver;
  std::vector<std::uint64_t> seeds{1};
  std::string output = "slevel_out";
  std::optional<double> fstar;  // reported units
  std::size_t saa_samples = 10000;
  double feasibility_tolerance = 0.0;
};

// Overrides are "section.key=value" strings applied after the file.
RunConfig parse_run_config(std::istream& in, const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

// "1,2,5" or "1..50" (inclusive), or a mix separated by commas.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace slevel
