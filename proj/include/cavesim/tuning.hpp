#ifndef CAVESIM_TUNING_HPP
#define CAVESIM_TUNING_HPP

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cavesim/scenario.hpp"
#include "cavesim/sim.hpp"

namespace cavesim {

/// Gain grid over one controller. The counterpart controller keeps the gains
/// already in `base`.
struct GridSpec {
  SimConfig base;
  std::vector<std::pair<double, double>> pairs;  // (kp, kd)
  int repeats{5};
  DeltaSource metric{DeltaSource::kOracle};
  unsigned workers{1};
  bool keep_logs{false};

  /// Cartesian product of kp_values x kd_values, in that order.
  static std::vector<std::pair<double, double>> product(const std::vector<double>& kp_values,
                                                        const std::vector<double>& kd_values);
  void validate() const;
};

struct GridRow {
  double kp{0};
  double kd{0};
  /// Over post-warmup samples pooled across repeats. Infinite if any repeat
  /// aborted or produced no sample.
  double mean{0};
  double std{0};
  int failures{0};
  int samples{0};
  std::vector<TrialLog> logs;  // one per repeat, only when keep_logs
};

/// Seed of repeat `r`; shared by every pair so that pairs face the same
/// disturbances.
std::uint64_t repeat_seed(std::uint64_t base_seed, int repeat);

/// Runs every pair `repeats` times. Heading grids rank by tracking error,
/// depth grids by |depth error|. Sorted ascending by mean, ties by (kp, kd).
std::vector<GridRow> grid_search(const GridSpec& spec, GridTarget target);

/// Header: kp,kd,mean_cm,std_cm,failures
void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows);

}  // namespace cavesim

#endif  // CAVESIM_TUNING_HPP
