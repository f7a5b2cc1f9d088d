#include "cavesim/telemetry.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cavesim {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number in CSV: '" + s + "'");
  }
  return v;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

ServoMode parse_mode(const std::string& s) {
  if (s == "TRACKING") return ServoMode::kTracking;
  if (s == "LOST") return ServoMode::kLost;
  if (s == "ABORTED") return ServoMode::kAborted;
  throw std::runtime_error("bad servo mode in CSV: '" + s + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_trial_csv(std::ostream& out, const TrialLog& log) {
  out << kTrialCsvHeader << '\n';
  for (const auto& r : log) {
    out << format_double(r.t) << ',' << format_double(r.position.x()) << ','
        << format_double(r.position.y()) << ',' << format_double(r.position.z()) << ','
        << format_double(r.attitude.roll) << ',' << format_double(r.attitude.pitch) << ','
        << format_double(r.attitude.yaw) << ',' << format_double(r.psi) << ','
        << optional_field(r.delta_pipeline) << ',' << format_double(r.delta_oracle) << ','
        << format_double(r.depth_error) << ',' << to_string(r.mode) << ','
        << optional_field(r.delta_pipeline_signed) << '\n';
  }
}

TrialLog read_trial_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrialCsvHeader) {
    throw std::runtime_error("trial CSV header mismatch");
  }
  TrialLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 13) throw std::runtime_error("trial CSV row has wrong field count");
    TrialRow r;
    r.t = parse_double(f[0]);
    r.position = {parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
    r.attitude = {parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
    r.psi = parse_double(f[7]);
    if (!f[8].empty()) r.delta_pipeline = parse_double(f[8]);
    r.delta_oracle = parse_double(f[9]);
    r.depth_error = parse_double(f[10]);
    r.mode = parse_mode(f[11]);
    if (!f[12].empty()) r.delta_pipeline_signed = parse_double(f[12]);
    log.push_back(r);
  }
  return log;
}

PlotFiles export_plotdata(const TrialLog& log, const std::filesystem::path& out_dir) {
  if (log.empty()) throw std::invalid_argument("export_plotdata: empty log");
  std::filesystem::create_directories(out_dir);
  PlotFiles files{out_dir / "depth_vs_t.csv", out_dir / "tracking_vs_t.csv"};

  std::ofstream depth(files.depth);
  std::ofstream tracking(files.tracking);
  if (!depth || !tracking) throw std::runtime_error("cannot write plot data to " + out_dir.string());
  depth << "t,depth,depth_error\n";
  tracking << "t,delta\n";
  for (const auto& r : log) {
    depth << format_double(r.t) << ',' << format_double(r.position.z()) << ','
          << format_double(r.depth_error) << '\n';
    tracking << format_double(r.t) << ',' << optional_field(r.delta_pipeline) << '\n';
  }
  return files;
}

}  // namespace cavesim
