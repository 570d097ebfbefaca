#pragma once

// Turns a RunConfig into problems and solver runs, and writes per-seed trace
// CSVs plus a JSON summary.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "slevel/config.hpp"
#include "slevel/dataset.hpp"
#include "slevel/levelset.hpp"
#include "slevel/soec.hpp"

namespace slevel {

struct BuiltProblem {
  std::shared_ptr<const SoecProblem> problem;
  Vector start;          // feasible start point used for r0 and references
  double start_value;    // f0(start) in minimization units
};

BuiltProblem build_problem(const ProblemConfig& config, const EvalPolicy& eval);

// Synthetic datasets used when no files are configured.
DatasetMatrix synthetic_np_dataset(std::size_t classes, std::size_t points, double spread,
                                   std::uint64_t seed);

struct SeedOutcome {
  std::uint64_t seed = 0;
  LevelTrace trace;
  bool feasible_path = false;
  double step_constant = 0.0;
  std::string csv_path;
  std::string error;
};

// Runs one seed of the configured solver on an already built problem.
SeedOutcome run_seed(const RunConfig& config, const BuiltProblem& built, std::uint64_t seed);

// Whole experiment; returns the process exit code (0 ok, 1 solver error).
int run_experiment(const RunConfig& config, const std::string& out_dir, std::size_t jobs,
                   std::ostream& log);

// Worker count after applying SLEVEL_THREADS and the task count.
std::size_t effective_jobs(std::size_t requested, std::size_t tasks);

}  // namespace slevel
