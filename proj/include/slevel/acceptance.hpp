#pragma once

// Self-checking verification suite. Each criterion builds its own small
// instance and reports a pass/fail line with the numbers it measured. Going
// over the time limit counts as a failure.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace slevel {

enum class VerifyLevel { quick, full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::full;
  // Floor used by the entropy prox checks. Setting it to 0 is the injected
  // fault the suite must catch.
  double entropy_floor = 1e-12;
  std::size_t jobs = 1;  // worker threads for the seed sweeps
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

// Criterion ids run at each level. Quick leaves out everything that sweeps
// seeds or step counts.
std::vector<int> criteria_for(VerifyLevel level);

CriterionResult run_criterion(int id, const VerifyOptions& options);

// Runs every criterion of the level; `on_result` (if set) sees each result
// as soon as it is available.
std::vector<CriterionResult> run_acceptance(
    const VerifyOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS [ 3] name (1.23 s / 10 s): detail"
std::string format_result(const CriterionResult& r);

// JSON document listing every result and the ids that failed.
std::string results_json(const std::vector<CriterionResult>& results);

}  // namespace slevel
