// Runs the full verification suite and prints one line per criterion.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <cstring>
#include <iostream>
#include <thread>

#include "slevel/acceptance.hpp"

int main(int argc, char** argv) {
  slevel::VerifyOptions opt;
  opt.jobs = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) opt.level = slevel::VerifyLevel::quick;
  }
  const auto results = slevel::run_acceptance(opt, [](const slevel::CriterionResult& r) {
    std::cout << slevel::format_result(r) << std::endl;
  });
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
