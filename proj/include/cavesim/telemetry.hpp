#ifndef CAVESIM_TELEMETRY_HPP
#define CAVESIM_TELEMETRY_HPP

// CSV outputs. Numbers use the shortest decimal form that reads back to the
// same double; a missing tracking measurement is an empty field.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cavesim/evaluation.hpp"

namespace cavesim {

inline constexpr const char* kTrialCsvHeader =
    "t,x,y,z,roll,pitch,yaw,psi,delta_pipeline,delta_oracle,depth_error,mode,"
    "delta_pipeline_signed";

std::string format_double(double value);

void write_trial_csv(std::ostream& out, const TrialLog& log);
/// Throws std::runtime_error on a malformed file.
TrialLog read_trial_csv(std::istream& in);

struct PlotFiles {
  std::filesystem::path depth;
  std::filesystem::path tracking;
};

/// Writes depth_vs_t.csv (t, depth, depth_error) and tracking_vs_t.csv
/// (t, delta), one data row per log row. Ticks without a tracking measurement
/// keep their time with an empty delta, which plotting tools draw as a gap.
/// Throws std::invalid_argument on an empty log.
PlotFiles export_plotdata(const TrialLog& log, const std::filesystem::path& out_dir);

}  // namespace cavesim

#endif  // CAVESIM_TELEMETRY_HPP
