#include <doctest.h>

#include <sstream>

#include "slevel/config.hpp"
#include "slevel/dataset.hpp"
#include "slevel/errors.hpp"
#include "slevel/report.hpp"

using namespace slevel;

namespace {

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_libsvm(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

RunConfig parse_cfg(const std::string& text, const std::vector<std::string>& overrides = {}) {
  std::istringstream in(text);
  return parse_run_config(in, overrides);
}

}  // namespace

TEST_CASE("LIBSVM parser reads sparse rows") {
  std::istringstream in("2 1:0.5 4:-1\n");
  const DatasetMatrix d = parse_libsvm(in);
  CHECK(d.rows() == 1);
  CHECK(d.feature_dim() == 4);
  CHECK(d.nonzeros() == 2);
  CHECK(d.original_label(d.label(0)) == 2.0);
  CHECK(d.dense_row(0) == std::vector<double>{0.5, 0.0, 0.0, -1.0});
}

TEST_CASE("explicit zeros, comments and blank lines") {
  std::istringstream in("# comment\n1 1:0 3:2 # tail\n\n-1 2:1\n");
  const DatasetMatrix d = parse_libsvm(in);
  CHECK(d.rows() == 2);
  CHECK(d.nonzeros() == 3);
  CHECK(d.row_values(0)[0] == 0.0);
  CHECK(d.num_classes() == 2);
  CHECK(d.label(0) == 0);
  CHECK(d.label(1) == 1);
}

TEST_CASE("declared feature dimension") {
  std::istringstream in("1 2:1\n");
  CHECK(parse_libsvm(in, 10).feature_dim() == 10);
  std::istringstream small("1 12:1\n");
  CHECK_THROWS_AS(parse_libsvm(small, 10), ParseError);
}

TEST_CASE("malformed lines report their line number") {
  CHECK(error_line("1 1:0.5\n-1 2:1.0\n1 3:abc\n") == 3);
  CHECK(error_line("# header\n1 4:1 2:1\n") == 2);
  CHECK(error_line("1 1:1\n\n1 0:2\n") == 3);
  CHECK(error_line("x 1:1\n") == 1);
  CHECK(error_line("1 1:1 2\n") == 1);
  CHECK(error_line("1 1:1 1:2\n") == 1);
}

TEST_CASE("serialization round-trips bit for bit") {
  DatasetMatrix d;
  const std::vector<std::int32_t> idx{1, 5, 9};
  const std::vector<double> val{0.1, -1e-300, 123456789.123456789};
  d.add_row(-1.0, idx, val);
  d.add_row(3.0, std::vector<std::int32_t>{}, std::vector<double>{});
  std::stringstream s;
  serialize_libsvm(d, s);
  const DatasetMatrix back = parse_libsvm(s);
  REQUIRE(back.rows() == 2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.row_values(0)[i] == val[i]);
  CHECK(back.original_label(back.label(1)) == 3.0);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("class partition and subsets") {
  std::istringstream in("5 1:1\n7 1:2\n5 1:3\n");
  const DatasetMatrix d = parse_libsvm(in);
  const auto parts = d.class_partition();
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == std::vector<std::size_t>{0, 2});
  const std::vector<std::size_t> ids{1};
  const DatasetMatrix sub = d.subset(ids);
  CHECK(sub.rows() == 1);
  CHECK(sub.original_label(0) == 7.0);
}

TEST_CASE("metrics CSV layout") {
  LevelTrace tr;
  TraceEntry e;
  e.outer = 0;
  e.grad_iters = 10;
  e.data_passes = 20;
  e.r = 2.0;
  e.u_hat = -0.5;
  e.metrics.objective = 1.5;
  e.metrics.max_violation = -0.5;
  tr.entries.push_back(e);
  std::ostringstream out;
  write_metrics_csv(tr, out);
  const std::string text = out.str();
  CHECK(text.rfind(std::string(kMetricsCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("0,10,20,2,-0.5,1.5,-0.5,,") != std::string::npos);

  tr.entries[0].metrics.relative_gap = 0.25;
  std::ostringstream with_gap;
  write_metrics_csv(tr, with_gap);
  CHECK(with_gap.str().find(",-0.5,0.25,") != std::string::npos);

  CHECK_THROWS_AS(write_metrics_csv(LevelTrace{}, out), InvalidArgument);
}

TEST_CASE("minimal config falls back to defaults") {
  const RunConfig c = parse_cfg("[problem]\ntype = toy1d\n");
  CHECK(c.problem.type == "toy1d");
  CHECK(c.solver.name == "sfls");
  CHECK(c.solver.theta == 1.1);
  CHECK_FALSE(c.solver.step_constant.has_value());
  CHECK(c.seeds == std::vector<std::uint64_t>{1});
  CHECK(c.saa_samples == 10000);
}

TEST_CASE("config validation names the offending key") {
  try {
    parse_cfg("[problem]\ntype = toy1d\n[solver]\ntheta = 0.9\n");
    FAIL("theta below 1 accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "solver.theta");
  }
  CHECK_THROWS_AS(parse_cfg("[problem]\ntype = cube\n"), ConfigError);
  CHECK_THROWS_AS(parse_cfg("[problem]\ntype = toy1d\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_cfg("[problem]\ntype = toy1d\n[extra]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_cfg("[problem]\ntype = toy1d\n[solver]\nname = newton\n"), ConfigError);
  CHECK_THROWS_AS(parse_cfg("[problem]\ntype = toy1d\n[solver]\nr0_mode = explicit\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_cfg("[problem]\ntype = toy1d\n[solver]\nbatch = many\n"), ConfigError);
}

TEST_CASE("seed lists and overrides") {
  const RunConfig c = parse_cfg("[problem]\ntype = toy1d\n[run]\nseeds = 1..50\n");
  CHECK(c.seeds.size() == 50);
  CHECK(c.seeds.back() == 50);
  CHECK(parse_seed_list("3, 1..2,9") == std::vector<std::uint64_t>{3, 1, 2, 9});
  CHECK_THROWS_AS(parse_seed_list("5..2"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list(""), ConfigError);

  const RunConfig o = parse_cfg("[problem]\ntype = toy1d\n",
                                {"solver.theta=1.5", "run.seeds=4", "solver.step_constant=2"});
  CHECK(o.solver.theta == 1.5);
  CHECK(o.seeds == std::vector<std::uint64_t>{4});
  CHECK(*o.solver.step_constant == 2.0);
  CHECK_THROWS_AS(parse_cfg("[problem]\ntype = toy1d\n", {"theta"}), ConfigError);
}

TEST_CASE("shipped example configs load") {
  for (const char* name : {"toy1d.ini", "toy2d.ini", "np_synthetic.ini", "fairness_synthetic.ini",
                           "alp_inventory.ini"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_run_config(std::string(SLEVEL_CONFIG_DIR) + "/" + name));
  }
  CHECK_THROWS_AS(load_run_config(std::string(SLEVEL_CONFIG_DIR) + "/missing.ini"), Error);
}
