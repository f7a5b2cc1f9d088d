// cavesim: run trials, gain grids and plot exports from scenario files.
//
// Exit status: 0 ok, 2 bad configuration, 3 simulation fault, 4 mission
// aborted after a failed recovery spin, 5 output not writable.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "cavesim/errors.hpp"
#include "cavesim/scenario.hpp"
#include "cavesim/sim.hpp"
#include "cavesim/telemetry.hpp"
#include "cavesim/tuning.hpp"

namespace fs = std::filesystem;
using namespace cavesim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFault = 3;
constexpr int kExitAborted = 4;
constexpr int kExitOutput = 5;

struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string scenario;
  std::string out{"out"};
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> camera_period;
  std::string gains_heading;
  std::string gains_depth;
  bool dump_frames{false};
};

PidGains parse_gains(const std::string& text, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": not a number: '" + field + "'");
    }
  }
  if (v.size() < 2 || v.size() > 3) {
    throw ConfigError(std::string(flag) + " expects kp,kd[,ki]");
  }
  return {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
}

SimConfig resolve(const CommonOptions& o) {
  SimConfig c = o.scenario.empty() ? SimConfig{} : load_scenario(o.scenario);
  if (o.seed) c.scenario.seed = *o.seed;
  if (o.dt) c.timing.dt = *o.dt;
  if (o.camera_period) c.timing.camera_period = *o.camera_period;
  if (!o.gains_heading.empty()) c.control.heading = parse_gains(o.gains_heading, "--gains-heading");
  if (!o.gains_depth.empty()) c.control.depth = parse_gains(o.gains_depth, "--gains-depth");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw OutputError("cannot write " + file.string());
  return f;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create " + dir.string() + ": " + ec.message());
}

void write_log(const fs::path& file, const TrialLog& log) {
  auto f = open_out(file);
  write_trial_csv(f, log);
  if (!f) throw OutputError("write failed: " + file.string());
}

int cmd_run(const CommonOptions& o) {
  const SimConfig config = resolve(o);
  const fs::path out = o.out;
  make_dir(out);
  FrameSink sink;
  if (o.dump_frames) {
    make_dir(out / "frames");
    sink = [&](int index, double, const SegmentationMap& map) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06d.pgm", index);
      auto f = open_out(out / "frames" / name);
      write_pgm(f, map);
    };
  }
  {
    auto manifest = open_out(out / "manifest.yaml");
    manifest << to_yaml(config);
  }
  const TrialResult r = run_simulation(config, sink);
  write_log(out / "trial.csv", r.log);

  std::cout << "outcome " << to_string(r.outcome) << ", " << r.log.size() << " rows, progress "
            << r.path_progress << " m\n";
  try {
    const TrialSummary s = summarize(r.log, config.warmup_s);
    if (s.delta) std::cout << "delta mean " << s.delta->mean * 100 << " cm, std " << s.delta->std * 100 << " cm\n";
    std::cout << "depth error mean " << s.depth.mean * 100 << " cm\n";
  } catch (const std::invalid_argument&) {
    std::cout << "trial ended before warmup\n";
  }
  return r.outcome == TrialOutcome::kAborted ? kExitAborted : 0;
}

int cmd_grid(const CommonOptions& o, const std::string& target_name, int repeats, unsigned workers) {
  const SimConfig config = resolve(o);
  GridTarget target;
  if (target_name == "heading") {
    target = GridTarget::kHeading;
  } else if (target_name == "depth") {
    target = GridTarget::kDepth;
  } else {
    throw ConfigError("--target must be heading or depth");
  }
  GridSpec spec;
  spec.base = config;
  spec.pairs = target == GridTarget::kHeading ? config.grid.heading_pairs : config.grid.depth_pairs;
  spec.repeats = repeats > 0 ? repeats : config.grid.repeats;
  spec.metric = config.grid.metric;
  spec.workers = workers;
  spec.keep_logs = true;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const fs::path out = o.out;
  make_dir(out / "logs");
  {
    auto manifest = open_out(out / "manifest.yaml");
    manifest << to_yaml(config);
  }
  const auto rows = grid_search(spec, target);
  {
    auto f = open_out(out / "grid_summary.csv");
    write_grid_csv(f, rows);
  }
  for (const auto& row : rows) {
    for (std::size_t r = 0; r < row.logs.size(); ++r) {
      const std::string name = "kp" + format_double(row.kp) + "_kd" + format_double(row.kd) +
                               "_r" + std::to_string(r) + ".csv";
      write_log(out / "logs" / name, row.logs[r]);
    }
  }
  write_grid_csv(std::cout, rows);
  return 0;
}

int cmd_plotdata(const CommonOptions& o, const std::string& input) {
  TrialLog log;
  if (!input.empty()) {
    std::ifstream f(input);
    if (!f) throw ConfigError("cannot read " + input);
    try {
      log = read_trial_csv(f);
    } catch (const std::runtime_error& e) {
      throw ConfigError(input + ": " + e.what());
    }
  } else {
    log = run_simulation(resolve(o)).log;
  }
  if (log.empty()) throw ConfigError("log has no rows");
  make_dir(o.out);
  const PlotFiles files = export_plotdata(log, o.out);
  std::cout << files.depth.string() << '\n' << files.tracking.string() << '\n';
  return 0;
}

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--scenario", o.scenario, "Scenario YAML file (built-in rectangle loop if omitted)");
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
  app->add_option("--seed", o.seed, "Override the scenario seed");
  app->add_option("--dt", o.dt, "Physics/control step, seconds");
  app->add_option("--camera-period", o.camera_period, "Camera and servo period, seconds");
  app->add_option("--gains-heading", o.gains_heading, "Heading PID gains kp,kd[,ki]");
  app->add_option("--gains-depth", o.gains_depth, "Depth PID gains kp,kd[,ki]");
  app->add_flag("--dump-frames", o.dump_frames, "Write every segmentation frame as PGM");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caveline-following AUV simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one trial");
  add_common(run, run_opts);

  CommonOptions grid_opts;
  std::string target = "heading";
  int repeats = 0;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* grid = app.add_subcommand("grid", "Grid-search controller gains");
  add_common(grid, grid_opts);
  grid->add_option("--target", target, "heading or depth")->capture_default_str();
  grid->add_option("--repeats", repeats, "Trials per pair (scenario value if omitted)");
  grid->add_option("--workers", workers, "Parallel trials")->capture_default_str();

  CommonOptions plot_opts;
  std::string input;
  auto* plot = app.add_subcommand("plotdata", "Export depth and tracking series for plotting");
  add_common(plot, plot_opts);
  plot->add_option("--in", input, "Existing trial.csv (runs the scenario if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*grid) return cmd_grid(grid_opts, target, repeats, workers);
    return cmd_plotdata(plot_opts, input);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SimulationFault& e) {
    std::cerr << "simulation fault: " << e.what() << '\n';
    return kExitFault;
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitOutput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}
