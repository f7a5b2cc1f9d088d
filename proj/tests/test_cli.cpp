#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = CAVESIM_CLI;
const fs::path kScenarios = CAVESIM_SCENARIOS;

int cli(const std::string& args) {
  const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cavesim_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("run twice gives byte-identical outputs, and the manifest reproduces them") {
  const fs::path a = scratch("a"), b = scratch("b"), c = scratch("c");
  const std::string scen = (kScenarios / "rectangle_gusty.yaml").string();
  REQUIRE(cli("run --scenario " + scen + " --seed 3 --out " + a.string()) == 0);
  REQUIRE(cli("run --scenario " + scen + " --seed 3 --out " + b.string()) == 0);
  const std::string trial = slurp(a / "trial.csv");
  CHECK_FALSE(trial.empty());
  CHECK(trial == slurp(b / "trial.csv"));
  CHECK(slurp(a / "manifest.yaml") == slurp(b / "manifest.yaml"));

  REQUIRE(cli("run --scenario " + (a / "manifest.yaml").string() + " --out " + c.string()) == 0);
  CHECK(slurp(c / "trial.csv") == trial);
}

TEST_CASE("overrides land in the manifest") {
  const fs::path out = scratch("overrides");
  REQUIRE(cli("run --seed 11 --dt 0.01 --camera-period 0.5 --gains-heading 2,0.4 "
              "--gains-depth 500,0,1 --out " + out.string()) == 0);
  const std::string m = slurp(out / "manifest.yaml");
  CHECK(m.find("seed: 11") != std::string::npos);
  CHECK(m.find("dt: 0.01") != std::string::npos);
  CHECK(m.find("camera_period: 0.5") != std::string::npos);
}

TEST_CASE("frame dumps are binary graymaps") {
  const fs::path out = scratch("frames");
  const fs::path scen = out / "short.yaml";
  write(scen, "duration: 1\n");
  REQUIRE(cli("run --scenario " + scen.string() + " --dump-frames --out " + out.string()) == 0);
  int n = 0;
  for (const auto& e : fs::directory_iterator(out / "frames")) {
    CHECK(slurp(e.path()).rfind("P5\n480 384\n255\n", 0) == 0);
    ++n;
  }
  CHECK(n == 6);
}

TEST_CASE("config errors exit with status 2") {
  const fs::path out = scratch("config");
  CHECK(cli("run --scenario /nonexistent.yaml --out " + out.string()) == 2);
  const fs::path bad = out / "bad.yaml";
  write(bad, "durration: 3\n");
  CHECK(cli("run --scenario " + bad.string() + " --out " + out.string()) == 2);
  CHECK(cli("run --dt 0.5 --out " + out.string()) == 2);
  CHECK(cli("run --gains-heading 1 --out " + out.string()) == 2);
  CHECK(cli("run --gains-heading a,b --out " + out.string()) == 2);
  CHECK(cli("run --bogus") == 2);
  CHECK(cli("") == 2);
  CHECK(cli("grid --target sideways --out " + out.string()) == 2);
}

TEST_CASE("blackout aborts with status 4") {
  const fs::path out = scratch("blackout");
  CHECK(cli("run --scenario " + (kScenarios / "blackout.yaml").string() + " --out " + out.string()) == 4);
  CHECK(fs::exists(out / "trial.csv"));
}

TEST_CASE("unwritable output exits with status 5") {
  const fs::path file = scratch("blocker");
  write(file / "x", "");
  CHECK(cli("run --scenario " + (kScenarios / "blackout.yaml").string() + " --out " +
            (file / "x" / "sub").string()) == 5);
}

TEST_CASE("plotdata from a run and from a trial file agree") {
  const fs::path run = scratch("plot_run"), plot = scratch("plot_in"), direct = scratch("plot_direct");
  const fs::path scen = run / "short.yaml";
  write(scen, "duration: 20\n");
  REQUIRE(cli("run --scenario " + scen.string() + " --out " + run.string()) == 0);
  REQUIRE(cli("plotdata --in " + (run / "trial.csv").string() + " --out " + plot.string()) == 0);
  REQUIRE(cli("plotdata --scenario " + scen.string() + " --out " + direct.string()) == 0);
  CHECK(slurp(plot / "depth_vs_t.csv") == slurp(direct / "depth_vs_t.csv"));
  CHECK(slurp(plot / "tracking_vs_t.csv") == slurp(direct / "tracking_vs_t.csv"));
  CHECK(cli("plotdata --in /nonexistent.csv --out " + plot.string()) == 2);
}

TEST_CASE("grid writes a summary and per-trial logs") {
  const fs::path out = scratch("grid");
  const fs::path scen = out / "grid.yaml";
  write(scen, "duration: 15\ntiming: {warmup: 5}\ngrid:\n  heading_pairs: [[1, 0], [3.4, 0.9]]\n  repeats: 2\n");
  REQUIRE(cli("grid --scenario " + scen.string() + " --workers 2 --out " + out.string()) == 0);
  const std::string summary = slurp(out / "grid_summary.csv");
  CHECK(summary.rfind("kp,kd,mean_cm,std_cm,failures\n", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
  int logs = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(out / "logs")) ++logs;
  CHECK(logs == 4);
}
