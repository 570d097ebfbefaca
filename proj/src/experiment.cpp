#include "slevel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "slevel/errors.hpp"
#include "slevel/geometry.hpp"
#include "slevel/oracle.hpp"
#include "slevel/problems.hpp"
#include "slevel/report.hpp"

namespace slevel {

namespace fs = std::filesystem;

DatasetMatrix synthetic_np_dataset(std::size_t classes, std::size_t points, double spread,
                                   std::uint64_t seed) {
  if (classes < 2) throw InvalidArgument("need at least two classes");
  std::vector<Vector> means;
  std::vector<std::size_t> counts;
  for (std::size_t c = 0; c < classes; ++c) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(classes);
    means.push_back({2.0 * std::cos(ang), 2.0 * std::sin(ang)});
    counts.push_back(points / classes + (c < points % classes ? 1 : 0));
  }
  return make_gaussian_classes(seed, means, spread, counts);
}

namespace {

std::shared_ptr<const DatasetMatrix> load_or(const std::string& path,
                                             std::shared_ptr<const DatasetMatrix> fallback) {
  if (path.empty()) return fallback;
  return std::make_shared<const DatasetMatrix>(load_libsvm(path));
}

// Two Gaussian clusters relabeled to +1 / -1.
DatasetMatrix signed_pair(std::uint64_t seed, std::size_t n, double spread) {
  const DatasetMatrix raw =
      make_gaussian_classes(seed, {{1.0, 1.0}, {-1.0, -1.0}}, spread, {n / 2, n - n / 2});
  DatasetMatrix out;
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    out.add_row(raw.label(r) == 0 ? 1.0 : -1.0, raw.row_indices(r), raw.row_values(r));
  }
  return out;
}

}  // namespace

BuiltProblem build_problem(const ProblemConfig& c, const EvalPolicy& eval) {
  BuiltProblem b;
  if (c.type == "toy1d" || c.type == "toy2d") {
    b.problem = std::make_shared<const SoecProblem>(
        build_analytic_toy(c.type == "toy1d" ? ToyVariant::one_d : ToyVariant::two_d, c.noise));
  } else if (c.type == "np") {
    std::shared_ptr<const DatasetMatrix> data =
        c.data_path.empty()
            ? std::make_shared<const DatasetMatrix>(
                  synthetic_np_dataset(c.classes, c.points, c.spread, c.data_seed))
            : std::make_shared<const DatasetMatrix>(load_libsvm(c.data_path));
    b.problem = std::make_shared<const SoecProblem>(build_np_multiclass({data, c.radius}));
  } else if (c.type == "fairness") {
    const std::size_t n = c.points;
    FairnessSpec spec;
    spec.labeled = load_or(c.labeled_path, std::make_shared<const DatasetMatrix>(
                                               signed_pair(c.data_seed, n, c.spread)));
    spec.group_m = load_or(c.group_m_path,
                           std::make_shared<const DatasetMatrix>(make_gaussian_classes(
                               c.data_seed + 1, {{0.5, 0.0}}, c.spread, {n / 2})));
    spec.group_f = load_or(c.group_f_path,
                           std::make_shared<const DatasetMatrix>(make_gaussian_classes(
                               c.data_seed + 2, {{-0.5, 0.0}}, c.spread, {n / 4 + 1})));
    spec.kappa = c.kappa;
    spec.radius = c.radius;
    b.problem = std::make_shared<const SoecProblem>(build_fairness(spec));
  } else if (c.type == "alp") {
    AlpSpec spec;
    spec.samples = c.samples;
    spec.seed = c.data_seed;
    spec.frozen_demand = c.frozen_demand;
    spec.mdp.c_h = c.c_h;
    spec.mdp.c_d = c.c_d;
    spec.mdp.c_b = c.c_b;
    b.problem = std::make_shared<const SoecProblem>(build_alp(spec).problem);
  } else {
    throw ConfigError("problem.type", "unknown problem '" + c.type + "'");
  }
  const SoecProblem& p = *b.problem;
  b.start = start_point(p);
  b.start_value = evaluate_components(p, b.start, metrics_mode(p, eval)).values[0];
  return b;
}

SeedOutcome run_seed(const RunConfig& config, const BuiltProblem& built, std::uint64_t seed) {
  const SoecProblem& p = *built.problem;
  const SolverConfig& s = config.solver;
  const GeometrySpec geo = make_geometry(p);

  SflsConfig sc;
  sc.r0 = s.r0_mode == "explicit" ? s.r0 : built.start_value + s.r0_margin;
  sc.theta = s.theta;
  sc.outer_limit = s.name == "ovsmd" ? 1 : s.outer_limit;
  sc.delta = s.delta;
  sc.eps_opt = s.eps_opt;
  sc.pass_budget = s.pass_budget;
  sc.oracle.iterations = s.iterations;
  sc.oracle.batch = s.batch;
  sc.oracle.delta = s.delta;
  sc.oracle.seed = seed;
  sc.eval.saa_samples = config.saa_samples;
  sc.refs.fstar = config.fstar;
  sc.refs.objective_at_start = p.objective_sign() * built.start_value;
  if (s.step_constant) {
    sc.oracle.step_constant = *s.step_constant;
  } else {
    const ProbeEstimate est = estimate_constants(SaddleFunction{&p, sc.r0}, geo, seed);
    sc.oracle.step_constant = est.m > 0.0 ? est.m : 1.0;
  }

  SeedOutcome out;
  out.seed = seed;
  out.step_constant = sc.oracle.step_constant;
  out.trace = s.name == "dfls" ? dfls_solve(p, geo, sc) : sfls_solve(p, geo, sc);
  out.feasible_path = std::all_of(
      out.trace.entries.begin(), out.trace.entries.end(), [&](const TraceEntry& e) {
        return e.metrics.max_violation <= config.feasibility_tolerance;
      });
  return out;
}

std::size_t effective_jobs(std::size_t requested, std::size_t tasks) {
  std::size_t jobs = std::max<std::size_t>(requested, 1);
  if (const char* env = std::getenv("SLEVEL_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) jobs = std::min<std::size_t>(jobs, cap);
  }
  return std::min(jobs, std::max<std::size_t>(tasks, 1));
}

namespace {

nlohmann::json seed_json(const SeedOutcome& o) {
  nlohmann::json j;
  j["seed"] = o.seed;
  if (!o.error.empty()) {
    j["error"] = o.error;
    return j;
  }
  const TraceEntry& last = o.trace.entries.back();
  j["csv"] = o.csv_path;
  j["outerIterations"] = o.trace.entries.size();
  j["halted"] = o.trace.halted;
  j["feasiblePath"] = o.feasible_path;
  j["stepConstant"] = o.step_constant;
  j["final"] = {{"r", last.r},
                {"uHat", last.u_hat},
                {"objective", last.metrics.objective},
                {"maxViolation", last.metrics.max_violation},
                {"dataPasses", last.data_passes},
                {"gradIters", last.grad_iters}};
  if (last.metrics.relative_gap) j["final"]["relativeGap"] = *last.metrics.relative_gap;
  if (last.metrics.saa_samples) j["final"]["saaSamples"] = *last.metrics.saa_samples;
  j["warnings"] = o.trace.warnings;
  return j;
}

}  // namespace

int run_experiment(const RunConfig& config, const std::string& out_dir, std::size_t jobs,
                   std::ostream& log) {
  EvalPolicy eval;
  eval.saa_samples = config.saa_samples;
  const BuiltProblem built = build_problem(config.problem, eval);
  fs::create_directories(out_dir);

  std::vector<SeedOutcome> results(config.seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&]() {
    for (std::size_t k = next++; k < config.seeds.size(); k = next++) {
      const std::uint64_t seed = config.seeds[k];
      SeedOutcome o;
      try {
        o = run_seed(config, built, seed);
        o.csv_path = (fs::path(out_dir) / ("trace_seed" + std::to_string(seed) + ".csv")).string();
        write_metrics_csv(o.trace, o.csv_path);
      } catch (const std::exception& e) {
        o.seed = seed;
        o.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lock(log_mu);
        if (o.error.empty()) {
          log << "seed " << seed << ": " << o.trace.entries.size() << " outer iterations, "
              << (o.feasible_path ? "feasible path" : "infeasible iterate seen") << '\n';
        } else {
          log << "seed " << seed << ": error: " << o.error << '\n';
        }
      }
      results[k] = std::move(o);
    }
  };
  const std::size_t n = effective_jobs(jobs, config.seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::size_t ok = 0;
  std::size_t feasible = 0;
  nlohmann::json summary;
  summary["problem"] = config.problem.type;
  summary["solver"] = config.solver.name;
  summary["seeds"] = nlohmann::json::array();
  for (const SeedOutcome& o : results) {
    summary["seeds"].push_back(seed_json(o));
    if (o.error.empty()) {
      ++ok;
      if (o.feasible_path) ++feasible;
    }
  }
  summary["completedSeeds"] = ok;
  summary["feasiblePathFrequency"] =
      ok == 0 ? 0.0 : static_cast<double>(feasible) / static_cast<double>(ok);
  const fs::path summary_path = fs::path(out_dir) / "summary.json";
  std::ofstream sj(summary_path);
  if (!sj) throw Error("cannot write " + summary_path.string());
  sj << summary.dump(2) << '\n';
  log << "feasible path frequency: " << summary["feasiblePathFrequency"].get<double>() << " over "
      << ok << " seeds\n";
  return ok == results.size() ? 0 : 1;
}

}  // namespace slevel
