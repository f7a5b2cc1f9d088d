#ifndef CAVESIM_SIM_HPP
#define CAVESIM_SIM_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "cavesim/evaluation.hpp"
#include "cavesim/scenario.hpp"

namespace cavesim {

enum class TrialOutcome { kCompleted, kAborted, kSurfaced };

const char* to_string(TrialOutcome outcome);

struct TrialResult {
  TrialLog log;
  TrialOutcome outcome{TrialOutcome::kCompleted};
  VehicleState final_state;
  double path_progress{0};  // signed arc length travelled along the path, meters
  Vec3 start_projection = Vec3::Zero();
  double max_cross_track{0};
  double max_corner_cross_track{0};
  int lost_episodes{0};
  /// Measured (unwrapped) yaw turned during the most recent LOST episode.
  double last_lost_yaw_turned{0};
  bool resumed_after_lost{false};
  std::vector<double> setpoint_times;  // camera ticks at which servo setpoints were refreshed
  int saturated_steps{0};              // steps where thruster mixing clipped a command
};

/// Called on every camera frame with (frame index, time, map); used for frame dumps.
using FrameSink = std::function<void(int, double, const SegmentationMap&)>;

/// One fixed-step trial: every camera tick render + corrupt + servo, every dt
/// controllers + mixing + physics, every eval tick a log row. Throws
/// SimulationFault if the physics blows up.
TrialResult run_simulation(const SimConfig& config, const FrameSink& frames = {});

/// Seed for repeat `index` of a trial family; independent of anything else.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace cavesim

#endif  // CAVESIM_SIM_HPP
