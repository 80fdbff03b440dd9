#pragma once

// Window and matching performance metrics, the resize heuristic and the
// execution-window cutoff.

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "npdw/task_model.hpp"

namespace npdw {

struct PerfConstants {
  double alpha1 = 0.5;  // weight of operating throughput
  double alpha2 = 0.5;  // weight of utilization throughput

  void validate() const;
};

struct WindowTuning {
  double amp_floor = 1e-6;
  double min_size = 0.01;
  double max_size = 30.0;
  double hold_tolerance = 1e-9;

  void validate() const;
};

/// Mean of c2 over the cores.
double utilization_throughput(std::span<const CoreState> cores);
/// Mean of c1 / c_msp over the cores.
double operating_throughput(std::span<const CoreState> cores);
double window_performance(std::span<const CoreState> cores, const PerfConstants& k = {});
/// Same combination applied to already averaged UT and OT.
double window_performance(double ut, double ot, const PerfConstants& k = {});

/// Mean waiting time at matching time `t`; 0 for an empty matching.
double matching_performance(std::span<const double> arrival_times, double t);

enum class ResizeDirection { Continue, Hold, Reverse };
std::string_view to_string(ResizeDirection d);

double resize_ratio(double awp_prev, double awp_cur, double amp_prev, double amp_cur, const WindowTuning& tuning = {});
ResizeDirection resize_direction(double awp_prev, double awp_cur, double amp_prev, double amp_cur,
                                 const WindowTuning& tuning = {});

/// Next accumulation window size, clamped to [min_size, max_size].
double next_window_size(double dt_prev, double dt_cur, double awp_prev, double awp_cur, double amp_prev,
                        double amp_cur, const WindowTuning& tuning = {});

/// Linear-interpolation quantile on the sorted sample, h = (n - 1) q.
double quantile_inclusive(std::span<const double> sorted, double q);

class CutoffStats {
 public:
  static constexpr double kNoCutoff = std::numeric_limits<double>::infinity();
  static constexpr std::size_t kMinSamples = 4;

  void add(double duration);
  std::size_t size() const noexcept { return history_.size(); }
  const std::vector<double>& history() const noexcept { return history_; }
  double q1() const;
  double q3() const;

 private:
  std::vector<double> history_;  // kept sorted
};

/// Q3 + 3 (Q3 - Q1), or CutoffStats::kNoCutoff with fewer than 4 samples.
double execution_cutoff(const CutoffStats& stats);

struct ExecutionSample {
  double wp = 0.0;
  double mp = 0.0;
  double end = 0.0;
};

struct Folded {
  double awp = 0.0;
  double amp = 0.0;
  std::size_t count = 0;
};

/// Means over the windows ending no later than `first_end`. The first
/// execution window must be among them.
Folded fold_awp_amp(std::span<const ExecutionSample> windows, double first_end);

struct WindowRecord {
  std::size_t index = 0;
  double size = 0.0;
  double awp = 0.0;
  double amp = 0.0;
  std::size_t executions_counted = 0;
  double start = 0.0;
  double end = 0.0;
  ResizeDirection direction = ResizeDirection::Hold;

  friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

}  // namespace npdw
