#pragma once

// Run configuration loaded from a small TOML subset:
//
//   # comment
//   [section]
//   key = 1.5            # numbers, true/false, "strings", [1, 2] arrays
//
// Sections: sim, credit, affinity, window, analyzer, workload. Unknown
// sections or keys are errors.

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "npdw/asm_analyzer.hpp"
#include "npdw/schedulers.hpp"
#include "npdw/sim.hpp"
#include "npdw/workload.hpp"

namespace npdw {

struct RunConfig {
  sim::SimConfig sim;
  SchedulerConfig scheduler;
  analysis::CategoryThresholds analyzer;
  sim::WorkloadSpec workload;

  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies the settings in `text` on top of `base`.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace npdw
