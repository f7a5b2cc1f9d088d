#ifndef CAVESIM_ERRORS_HPP
#define CAVESIM_ERRORS_HPP

#include <stdexcept>

namespace cavesim {

/// A non-finite value reached the physics or a controller; the trial cannot continue.
class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario file or command-line override.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cavesim

#endif  // CAVESIM_ERRORS_HPP
