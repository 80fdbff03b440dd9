#pragma once

// Evaluation metrics over simulator traces and scheduler comparison tables.

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "npdw/schedulers.hpp"
#include "npdw/sim.hpp"

namespace npdw::metrics {

/// All standard deviations are population standard deviations.
struct TrialMetrics {
  double load_stddev = 0.0;      // percentage points, across per-core mean loads
  double avg_utilization = 0.0;  // percent
  double thermal_stddev = 0.0;   // degrees C, cross-core per sample, time-averaged
  double avg_temperature = 0.0;  // degrees C
  double waiting_cv = 0.0;       // stddev / mean of waiting times

  friend bool operator==(const TrialMetrics&, const TrialMetrics&) = default;
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double mean(std::span<const double> xs);
double pstdev(std::span<const double> xs);

/// Throws MetricsError naming every failed precondition.
TrialMetrics compute_metrics(const sim::SimTrace& trace);

struct TrialRow {
  std::string trial;
  std::map<SchedulerKind, TrialMetrics> by_scheduler;
};

enum class TableFormat { Csv, Text, Json };
TableFormat parse_format(std::string_view name);

/// One table per metric, rows = trials, columns = schedulers in report
/// order. Throws std::invalid_argument on empty input or on rows that do not
/// cover the same schedulers.
std::string render_comparison(std::span<const TrialRow> rows, TableFormat format);

/// Writes comparison.csv, comparison.txt and comparison.json into `dir`.
/// Validates before touching the filesystem.
void write_comparison(std::span<const TrialRow> rows, const std::filesystem::path& dir);

}  // namespace npdw::metrics
