#pragma once

// Runs every scheduler on the same workload and collects the metrics.

#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "npdw/config.hpp"
#include "npdw/metrics.hpp"

namespace npdw {

struct TrialResult {
  metrics::TrialRow row;
  std::map<SchedulerKind, sim::SimTrace> traces;
};

TrialResult run_comparison_trial(const std::string& name, std::span<const sim::WorkloadRecord> workload,
                                 const RunConfig& cfg, std::span<const SchedulerKind> kinds = kAllSchedulers);

/// Writes <dir>/<scheduler>/ trace directories for one trial.
void write_trial(const std::filesystem::path& dir, const TrialResult& trial, const RunConfig& cfg);

}  // namespace npdw
