#include "cavesim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cavesim/errors.hpp"

namespace cavesim {

void PidGains::validate() const {
  if (!std::isfinite(kp) || !std::isfinite(kd) || !std::isfinite(ki)) {
    throw std::invalid_argument("PID gains must be finite");
  }
  if (ki < 0) throw std::invalid_argument("ki must be non-negative");
}

PidResult pid_update(const PidGains& gains, const PidState& pid, double error, double dt,
                     double integral_limit) {
  if (!(dt > 0)) throw std::invalid_argument("pid_update: dt must be positive");
  if (!std::isfinite(error)) throw SimulationFault("pid_update: non-finite error");

  PidState next = pid;
  next.integral =
      std::clamp(pid.integral + gains.ki * error * dt, -integral_limit, integral_limit);
  const double derivative = pid.initialized ? (error - pid.prev_error) / dt : 0.0;
  next.prev_error = error;
  next.initialized = true;
  return {gains.kp * error + next.integral + gains.kd * derivative, next};
}

PidResult heading_controller(double psi, const PidGains& gains, const PidState& pid, double dt) {
  auto r = pid_update(gains, pid, -psi, dt);
  r.output = std::clamp(r.output, -1.0, 1.0);
  return r;
}

PidResult depth_controller(double current_depth, double target_depth, const PidGains& gains,
                           const PidState& pid, double dt) {
  auto r = pid_update(gains, pid, target_depth - current_depth, dt);
  r.output = std::clamp(r.output, -1.0, 1.0);
  return r;
}

}  // namespace cavesim
