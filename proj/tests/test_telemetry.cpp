#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cavesim/telemetry.hpp"
#include "test_support.hpp"

using namespace cavesim;
using test::uniform;

namespace {

TrialLog random_log(int n) {
  TrialLog log;
  for (int i = 0; i < n; ++i) {
    TrialRow r;
    r.t = i / 0.6;
    r.position = test::random_vec(-3, 3);
    r.attitude = test::random_attitude();
    r.psi = uniform(-3, 3);
    if (i % 4 != 0) {
      r.delta_pipeline = uniform(0, 0.5);
      r.delta_pipeline_signed = -*r.delta_pipeline;
    }
    r.delta_oracle = uniform(0, 1) * 1e-7;
    r.depth_error = uniform(-0.1, 0.1);
    r.mode = static_cast<ServoMode>(i % 3);
    log.push_back(r);
  }
  return log;
}

std::vector<std::string> lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-1.5e-9) == "-1.5e-09");
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform(-1e3, 1e3) * std::pow(10.0, test::uniform_int(-12, 12));
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("trial csv round trips exactly") {
  const TrialLog log = random_log(200);
  std::stringstream s;
  write_trial_csv(s, log);
  const std::string text = s.str();
  CHECK(text.substr(0, text.find('\n')) == kTrialCsvHeader);
  const TrialLog back = read_trial_csv(s);
  CHECK(back == log);

  std::stringstream again;
  write_trial_csv(again, back);
  CHECK(again.str() == text);
}

TEST_CASE("read_trial_csv rejects malformed input") {
  std::stringstream bad_header("t,x\n");
  CHECK_THROWS_AS(read_trial_csv(bad_header), std::runtime_error);
  std::stringstream short_row(std::string(kTrialCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_trial_csv(short_row), std::runtime_error);
  std::stringstream bad_mode(std::string(kTrialCsvHeader) + "\n0,0,0,0,0,0,0,0,,0,0,SLEEPING,\n");
  CHECK_THROWS_AS(read_trial_csv(bad_mode), std::runtime_error);
  std::stringstream bad_number(std::string(kTrialCsvHeader) + "\n0,0,zero,0,0,0,0,0,,0,0,LOST,\n");
  CHECK_THROWS_AS(read_trial_csv(bad_number), std::runtime_error);
}

TEST_CASE("export_plotdata writes one row per log row") {
  const auto dir = std::filesystem::temp_directory_path() / "cavesim_plotdata_test";
  std::filesystem::remove_all(dir);
  const TrialLog log = random_log(37);
  const PlotFiles files = export_plotdata(log, dir);
  const auto depth = lines(files.depth);
  const auto tracking = lines(files.tracking);
  REQUIRE(depth.size() == 38);
  REQUIRE(tracking.size() == 38);
  CHECK(depth[0] == "t,depth,depth_error");
  CHECK(tracking[0] == "t,delta");
  for (std::size_t i = 0; i < log.size(); ++i) {
    const std::string& row = tracking[i + 1];
    CHECK(row.substr(0, row.find(',')) == format_double(log[i].t));
    if (log[i].delta_pipeline) {
      CHECK(row == format_double(log[i].t) + "," + format_double(*log[i].delta_pipeline));
    } else {
      CHECK(row == format_double(log[i].t) + ",");
    }
    CHECK(depth[i + 1] == format_double(log[i].t) + "," + format_double(log[i].position.z()) + "," +
                              format_double(log[i].depth_error));
  }
  CHECK_THROWS_AS(export_plotdata({}, dir), std::invalid_argument);
  std::filesystem::remove_all(dir);
}
