#include "slevel/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "slevel/errors.hpp"

namespace slevel {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"problem",
       {"type", "noise", "classes", "points", "spread", "radius", "data_seed", "data_path",
        "kappa", "labeled_path", "group_m_path", "group_f_path", "samples", "frozen_demand",
        "c_h", "c_d", "c_b"}},
      {"solver",
       {"name", "theta", "iterations", "step_constant", "batch", "delta", "r0_mode", "r0",
        "r0_margin", "outer_limit", "eps_opt", "pass_budget"}},
      {"run", {"seeds", "output", "fstar", "saa_samples", "feasibility_tolerance"}},
  };
  return s;
}

template <class T>
T get_value(const pt::ptree& tree, const std::string& path, T fallback) {
  const auto node = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'));
  if (!node) return fallback;
  std::istringstream in(*node);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) throw ConfigError(path, "cannot parse value '" + *node + "'");
  return v;
}

template <>
std::string get_value<std::string>(const pt::ptree& tree, const std::string& path,
                                   std::string fallback) {
  const auto node = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'));
  return node ? *node : fallback;
}

std::optional<double> get_optional(const pt::ptree& tree, const std::string& path) {
  if (!tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return std::nullopt;
  return get_value<double>(tree, path, 0.0);
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    try {
      const auto dots = item.find("..");
      if (dots == std::string::npos) {
        std::size_t used = 0;
        out.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        const auto lo = std::stoull(item.substr(0, dots));
        const auto hi = std::stoull(item.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument(item);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("run.seeds", "bad seed entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("run.seeds", "no seeds given");
  return out;
}

RunConfig parse_run_config(std::istream& in, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || o.substr(0, eq).find('.') == std::string::npos) {
      throw ConfigError(o, "override must look like section.key=value");
    }
    tree.put(pt::ptree::path_type(o.substr(0, eq), '.'), o.substr(eq + 1));
  }

  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(section, "unknown section");
    if (!body.data().empty()) throw ConfigError(section, "expected a section, got a value");
    for (const auto& [key, unused] : body) {
      (void)unused;
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }

  RunConfig c;
  ProblemConfig& p = c.problem;
  p.type = get_value<std::string>(tree, "problem.type", "");
  static const std::set<std::string> kTypes{"toy1d", "toy2d", "np", "fairness", "alp"};
  if (!kTypes.count(p.type)) throw ConfigError("problem.type", "unknown problem '" + p.type + "'");
  p.noise = get_value(tree, "problem.noise", p.noise);
  if (!(p.noise >= 0.0)) throw ConfigError("problem.noise", "must be nonnegative");
  p.classes = get_value(tree, "problem.classes", p.classes);
  p.points = get_value(tree, "problem.points", p.points);
  p.spread = get_value(tree, "problem.spread", p.spread);
  p.radius = get_value(tree, "problem.radius", p.radius);
  require_positive(p.radius, "problem.radius");
  p.data_seed = get_value(tree, "problem.data_seed", p.data_seed);
  p.data_path = get_value<std::string>(tree, "problem.data_path", "");
  p.kappa = get_value(tree, "problem.kappa", p.kappa);
  if (!(p.kappa > 0.0 && p.kappa <= 1.0)) throw ConfigError("problem.kappa", "must lie in (0, 1]");
  p.labeled_path = get_value<std::string>(tree, "problem.labeled_path", "");
  p.group_m_path = get_value<std::string>(tree, "problem.group_m_path", "");
  p.group_f_path = get_value<std::string>(tree, "problem.group_f_path", "");
  p.samples = get_value(tree, "problem.samples", p.samples);
  p.frozen_demand = get_value(tree, "problem.frozen_demand", p.frozen_demand);
  p.c_h = get_value(tree, "problem.c_h", p.c_h);
  p.c_d = get_value(tree, "problem.c_d", p.c_d);
  p.c_b = get_value(tree, "problem.c_b", p.c_b);

  SolverConfig& s = c.solver;
  s.name = get_value<std::string>(tree, "solver.name", s.name);
  if (s.name != "sfls" && s.name != "dfls" && s.name != "ovsmd") {
    throw ConfigError("solver.name", "unknown solver '" + s.name + "'");
  }
  s.theta = get_value(tree, "solver.theta", s.theta);
  if (!(s.theta > 1.0)) throw ConfigError("solver.theta", "theta must be greater than 1");
  s.iterations = get_value(tree, "solver.iterations", s.iterations);
  if (s.iterations == 0) throw ConfigError("solver.iterations", "must be at least 1");
  s.step_constant = get_optional(tree, "solver.step_constant");
  if (s.step_constant) require_positive(*s.step_constant, "solver.step_constant");
  s.batch = get_value(tree, "solver.batch", s.batch);
  if (s.batch == 0) throw ConfigError("solver.batch", "must be at least 1");
  s.delta = get_value(tree, "solver.delta", s.delta);
  if (!(s.delta > 0.0 && s.delta < 1.0)) throw ConfigError("solver.delta", "must lie in (0, 1)");
  s.r0_mode = get_value<std::string>(tree, "solver.r0_mode", s.r0_mode);
  if (s.r0_mode != "explicit" && s.r0_mode != "margin") {
    throw ConfigError("solver.r0_mode", "expected explicit or margin");
  }
  s.r0 = get_value(tree, "solver.r0", s.r0);
  if (s.r0_mode == "explicit" && !tree.get_optional<std::string>(pt::ptree::path_type("solver.r0", '.'))) {
    throw ConfigError("solver.r0", "required when r0_mode is explicit");
  }
  s.r0_margin = get_value(tree, "solver.r0_margin", s.r0_margin);
  s.outer_limit = get_value(tree, "solver.outer_limit", s.outer_limit);
  if (s.outer_limit == 0) throw ConfigError("solver.outer_limit", "must be at least 1");
  s.eps_opt = get_optional(tree, "solver.eps_opt");
  if (s.eps_opt) require_positive(*s.eps_opt, "solver.eps_opt");
  s.pass_budget = get_optional(tree, "solver.pass_budget");
  if (s.pass_budget) require_positive(*s.pass_budget, "solver.pass_budget");

  if (const auto seeds = tree.get_optional<std::string>(pt::ptree::path_type("run.seeds", '.'))) {
    c.seeds = parse_seed_list(*seeds);
  }
  c.output = get_value<std::string>(tree, "run.output", c.output);
  c.fstar = get_optional(tree, "run.fstar");
  c.saa_samples = get_value(tree, "run.saa_samples", c.saa_samples);
  if (c.saa_samples == 0) throw ConfigError("run.saa_samples", "must be at least 1");
  c.feasibility_tolerance = get_value(tree, "run.feasibility_tolerance", c.feasibility_tolerance);
  return c;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  return parse_run_config(in, overrides);
}

}  // namespace slevel
