#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ottail/io.hpp"

using namespace ot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ottail_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(OTTAIL_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

}  // namespace

TEST_CASE("solve: identical measures give zero cost and exit 0") {
  TempDir tmp;
  const auto mu = make_discrete({{0.0}, {1.0}, {2.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  io::write_measure(tmp.path / "mu.json", mu);
  const int rc = run("solve --mu " + (tmp.path / "mu.json").string() + " --nu " +
                     (tmp.path / "mu.json").string() + " --out " +
                     (tmp.path / "pi.csv").string());
  CHECK(rc == 0);
  const std::string summary = slurp(tmp.path / "pi.csv.summary.json");
  CHECK(summary.find("\"cost\": 0") != std::string::npos);
  CHECK(summary.find("\"monotonicity\": \"pass\"") != std::string::npos);
}

TEST_CASE("solve: three-atom fixture reproduces the oracle cost 5/3") {
  TempDir tmp;
  io::write_measure(tmp.path / "mu.json",
                    make_discrete({{0.0}, {1.0}, {2.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
  io::write_measure(tmp.path / "nu.json",
                    make_discrete({{0.0}, {2.0}, {4.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
  const int rc = run("solve --mu " + (tmp.path / "mu.json").string() + " --nu " +
                     (tmp.path / "nu.json").string() + " --out " +
                     (tmp.path / "pi.csv").string() + " --summary " +
                     (tmp.path / "s.json").string());
  CHECK(rc == 0);
  const std::string summary = slurp(tmp.path / "s.json");
  CHECK(summary.find("1.6666666666666") != std::string::npos);

  const auto pi = io::read_coupling_csv(tmp.path / "pi.csv");
  CHECK(transport_cost(pi) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("solve: unbalanced masses exit 2") {
  TempDir tmp;
  io::write_measure(tmp.path / "mu.json", make_discrete({{0.0}}, {1.0}));
  io::write_measure(tmp.path / "nu.json", make_discrete({{1.0}}, {2.0}));
  const int rc = run("solve --mu " + (tmp.path / "mu.json").string() + " --nu " +
                     (tmp.path / "nu.json").string() + " --out " +
                     (tmp.path / "pi.csv").string());
  CHECK(rc == 2);
}

TEST_CASE("verify: solver output passes, swapped coupling exits 4, garbage exits 2") {
  TempDir tmp;
  io::write_measure(tmp.path / "mu.json",
                    make_discrete({{0.0}, {1.0}, {2.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
  io::write_measure(tmp.path / "nu.json",
                    make_discrete({{0.0}, {2.0}, {4.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
  REQUIRE(run("solve --mu " + (tmp.path / "mu.json").string() + " --nu " +
              (tmp.path / "nu.json").string() + " --out " + (tmp.path / "pi.csv").string()) ==
          0);
  CHECK(run("verify --coupling " + (tmp.path / "pi.csv").string()) == 0);

  write_text(tmp.path / "swapped.csv",
             "i,j,mass,x1,y1\n0,1,0.5,0,1\n1,0,0.5,1,0\n");
  CHECK(run("verify --coupling " + (tmp.path / "swapped.csv").string()) == 4);

  write_text(tmp.path / "garbage.csv", "not,a,coupling\n1,2\n");
  CHECK(run("verify --coupling " + (tmp.path / "garbage.csv").string()) == 2);
}

TEST_CASE("tail-study: bundled example config produces a complete artifact directory") {
  TempDir tmp;
  const fs::path cfg = fs::path(OTTAIL_BIN).parent_path().parent_path().parent_path() /
                       "configs" / "pareto_identity_1d.json";
  REQUIRE(fs::exists(cfg));
  // shrink the bundled config so the test stays fast
  auto base = io::read_study_config(cfg, true);
  base.n = 2000;
  base.k = 400;
  base.t_grid = {5.0, 20.0};
  const fs::path small = tmp.path / "cfg.json";
  write_text(small, R"({"schema": 1, "alpha1": 1.0, "alpha2": 1.0, "dim": 1,
    "angular": "fixed-direction", "n": 2000, "k": 400, "t_grid": [5, 20],
    "lambdas": [1.5, 2.0], "windows": [[1, 4]], "fit_window": [0.4, 4],
    "seed": 11, "b_mode": "analytic", "same_measure": true})");

  const fs::path out1 = tmp.path / "run1";
  CHECK(run("tail-study --config " + small.string() + " --out " + out1.string()) == 0);
  CHECK(fs::exists(out1 / "manifest.json"));
  int files = 0;
  for (const auto& e : fs::directory_iterator(out1))
    if (e.path().extension() == ".csv") ++files;
  CHECK(files >= 4);

  // determinism: identical CSV bytes on a second run
  const fs::path out2 = tmp.path / "run2";
  CHECK(run("tail-study --config " + small.string() + " --out " + out2.string()) == 0);
  for (const auto& e : fs::directory_iterator(out1)) {
    if (e.path().extension() != ".csv") continue;
    CHECK(slurp(e.path()) == slurp(out2 / e.path().filename()));
  }
}

TEST_CASE("tail-study: t beyond the quantile range exits 2") {
  TempDir tmp;
  write_text(tmp.path / "cfg.json", R"({"schema": 1, "n": 500, "k": 100,
    "t_grid": [100], "windows": [[1, 4]], "seed": 1})");
  CHECK(run("tail-study --config " + (tmp.path / "cfg.json").string() + " --out " +
            (tmp.path / "out").string()) == 2);
}

TEST_CASE("tail-study: strict mode rejects unknown config fields") {
  TempDir tmp;
  write_text(tmp.path / "cfg.json", R"({"schema": 1, "n": 500, "k": 100,
    "t_grid": [10], "windows": [[1, 4]], "seed": 1, "mystery": 3})");
  CHECK(run("tail-study --strict --config " + (tmp.path / "cfg.json").string() + " --out " +
            (tmp.path / "out").string()) == 2);
}
