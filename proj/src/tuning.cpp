#include "cavesim/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cavesim/telemetry.hpp"

namespace cavesim {

namespace {

struct TrialSlot {
  std::size_t pair;
  int repeat;
};

struct TrialOut {
  bool failed{false};
  std::vector<double> samples;
  TrialLog log;
};

SimConfig config_for(const GridSpec& spec, GridTarget target, std::pair<double, double> gains,
                     int repeat) {
  SimConfig c = spec.base;
  auto& pid = target == GridTarget::kHeading ? c.control.heading : c.control.depth;
  pid.kp = gains.first;
  pid.kd = gains.second;
  pid.ki = 0.0;
  c.scenario.seed = repeat_seed(spec.base.scenario.seed, repeat);
  return c;
}

TrialOut run_one(const GridSpec& spec, GridTarget target, const TrialSlot& slot) {
  const SimConfig c = config_for(spec, target, spec.pairs[slot.pair], slot.repeat);
  TrialResult r = run_simulation(c);
  TrialOut out;
  out.failed = r.outcome != TrialOutcome::kCompleted;
  for (const auto& row : r.log) {
    if (row.t < c.warmup_s) continue;
    if (target == GridTarget::kDepth) {
      out.samples.push_back(std::abs(row.depth_error));
    } else if (spec.metric == DeltaSource::kOracle) {
      out.samples.push_back(row.delta_oracle);
    } else if (row.delta_pipeline) {
      out.samples.push_back(*row.delta_pipeline);
    }
  }
  if (out.samples.empty()) out.failed = true;
  if (spec.keep_logs) out.log = std::move(r.log);
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> GridSpec::product(const std::vector<double>& kp_values,
                                                         const std::vector<double>& kd_values) {
  std::vector<std::pair<double, double>> out;
  for (double kp : kp_values) {
    for (double kd : kd_values) out.emplace_back(kp, kd);
  }
  return out;
}

void GridSpec::validate() const {
  base.validate();
  if (pairs.empty()) throw std::invalid_argument("grid: no gain pairs");
  if (repeats < 1) throw std::invalid_argument("grid: repeats must be >= 1");
  if (workers < 1) throw std::invalid_argument("grid: workers must be >= 1");
  for (const auto& [kp, kd] : pairs) {
    if (!std::isfinite(kp) || !std::isfinite(kd)) {
      throw std::invalid_argument("grid: gains must be finite");
    }
  }
}

std::uint64_t repeat_seed(std::uint64_t base_seed, int repeat) {
  return repeat == 0 ? base_seed : derive_seed(base_seed, static_cast<std::uint64_t>(repeat));
}

std::vector<GridRow> grid_search(const GridSpec& spec, GridTarget target) {
  spec.validate();
  std::vector<TrialSlot> slots;
  for (std::size_t p = 0; p < spec.pairs.size(); ++p) {
    for (int r = 0; r < spec.repeats; ++r) slots.push_back({p, r});
  }
  std::vector<TrialOut> outs(slots.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= slots.size()) return;
      try {
        outs[i] = run_one(spec, target, slots[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = slots.size();
      }
    }
  };
  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(spec.workers, static_cast<unsigned>(slots.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<GridRow> rows;
  for (std::size_t p = 0; p < spec.pairs.size(); ++p) {
    GridRow row;
    row.kp = spec.pairs[p].first;
    row.kd = spec.pairs[p].second;
    std::vector<double> pooled;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].pair != p) continue;
      if (outs[i].failed) ++row.failures;
      pooled.insert(pooled.end(), outs[i].samples.begin(), outs[i].samples.end());
      if (spec.keep_logs) row.logs.push_back(std::move(outs[i].log));
    }
    row.samples = static_cast<int>(pooled.size());
    if (row.failures > 0 || pooled.empty()) {
      row.mean = std::numeric_limits<double>::infinity();
      row.std = std::numeric_limits<double>::infinity();
    } else {
      const Stats s = compute_stats(pooled);
      row.mean = s.mean;
      row.std = s.std;
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
    if (a.mean != b.mean) return a.mean < b.mean;
    if (a.kp != b.kp) return a.kp < b.kp;
    return a.kd < b.kd;
  });
  return rows;
}

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows) {
  out << "kp,kd,mean_cm,std_cm,failures\n";
  for (const auto& r : rows) {
    out << format_double(r.kp) << ',' << format_double(r.kd) << ','
        << format_double(r.mean * 100.0) << ',' << format_double(r.std * 100.0) << ','
        << r.failures << '\n';
  }
}

}  // namespace cavesim
