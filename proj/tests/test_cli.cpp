#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

// Fresh scratch directory, removed when the test ends.
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("slevel_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string("\"") + SLEVEL_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// CSV text without the trailing wall-clock column.
std::string strip_wall(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

const char* kToyConfig =
    "[problem]\ntype = toy1d\n"
    "[solver]\nname = sfls\niterations = 300\nbatch = 1\nstep_constant = 1\n"
    "r0_mode = explicit\nr0 = 2\nouter_limit = 5\n"
    "[run]\nseeds = 1\nfstar = 1\n";

}  // namespace

TEST_CASE("unknown solver exits with a usage error and writes nothing") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "bad.ini";
  write_file(cfg, "[problem]\ntype = toy1d\n[solver]\nname = newton\n");
  const fs::path out = tmp.path / "out";
  CHECK(run_cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"",
                tmp.path / "log.txt") == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(read_file(tmp.path / "log.txt").find("solver.name") != std::string::npos);
}

TEST_CASE("missing arguments are usage errors") {
  TempDir tmp;
  CHECK(run_cli("run", tmp.path / "log.txt") == 2);
  CHECK(run_cli("", tmp.path / "log.txt") == 2);
  CHECK(run_cli("verify --level medium", tmp.path / "log.txt") == 2);
}

TEST_CASE("toy run writes a trace and a summary") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "toy.ini";
  write_file(cfg, kToyConfig);
  const fs::path out = tmp.path / "out";
  REQUIRE(run_cli("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"",
                  tmp.path / "log.txt") == 0);
  CHECK(fs::exists(out / "trace_seed1.csv"));
  const auto summary = nlohmann::json::parse(read_file(out / "summary.json"));
  CHECK(summary["seeds"].size() == 1);
  CHECK(summary["feasiblePathFrequency"].get<double>() == 1.0);
}

TEST_CASE("same seed gives the same trace") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "toy.ini";
  write_file(cfg, kToyConfig);
  const std::string base = "run --config \"" + cfg.string() + "\" --seed 3 --set solver.batch=4";
  REQUIRE(run_cli(base + " --out \"" + (tmp.path / "a").string() + "\"", tmp.path / "l1") == 0);
  REQUIRE(run_cli(base + " --out \"" + (tmp.path / "b").string() + "\"", tmp.path / "l2") == 0);
  const std::string a = read_file(tmp.path / "a" / "trace_seed3.csv");
  CHECK_FALSE(a.empty());
  CHECK(strip_wall(a) == strip_wall(read_file(tmp.path / "b" / "trace_seed3.csv")));
}

TEST_CASE("quick verification passes and the injected fault is caught") {
  TempDir tmp;
  const fs::path report = tmp.path / "report.json";
  CHECK(run_cli("verify --level quick --report \"" + report.string() + "\"", tmp.path / "ok") == 0);
  const auto j = nlohmann::json::parse(read_file(report));
  CHECK(j["failed"].empty());

  const fs::path faulty = tmp.path / "fault.json";
  CHECK(run_cli("verify --level quick --fault entropy_floor_zero --report \"" + faulty.string() +
                    "\"",
                tmp.path / "bad") == 1);
  const auto f = nlohmann::json::parse(read_file(faulty));
  CHECK(f["failed"] == nlohmann::json::array({2}));
}
