#pragma once

// Poisson workloads over a fixed mix of program profiles.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npdw/sim.hpp"
#include "npdw/task_model.hpp"

namespace npdw::sim {

struct ProgramProfile {
  std::string id;
  int p1 = 1;
  int p2 = 1;
  double base_duration = 1.0;  // seconds at c_msp
};

/// The thirteen benchmark programs as (p1, p2, base duration) triples.
std::span<const ProgramProfile> builtin_programs();
const ProgramProfile& find_program(std::string_view id);

struct WorkloadRecord {
  double arrival_time = 0.0;
  std::string program;
  std::optional<double> deadline;  // absolute

  friend bool operator==(const WorkloadRecord&, const WorkloadRecord&) = default;
};

struct WorkloadSpec {
  double rate = 1.0;      // arrivals per second
  double horizon = 520.0;  // seconds
  std::uint64_t seed = 1;
  double deadline_probability = 0.5;
  double slack_min = 2.0;  // deadline = arrival + slack * base duration
  double slack_max = 6.0;

  void validate() const;
};

std::vector<WorkloadRecord> generate_workload(const WorkloadSpec& spec);

void write_workload(std::ostream& os, std::span<const WorkloadRecord> records);
void write_workload(const std::filesystem::path& path, std::span<const WorkloadRecord> records);
std::vector<WorkloadRecord> read_workload(std::istream& is);
std::vector<WorkloadRecord> read_workload(const std::filesystem::path& path);

/// Turns workload records into simulator tasks with ids 1..n. Durations are
/// log-normal around each program's base with unit mean factor, drawn in
/// arrival order from `seed`, so every scheduler sees the same tasks.
std::vector<SimTask> materialize_tasks(std::span<const WorkloadRecord> records, const SimConfig& sim,
                                       const CreditConfig& credit);

}  // namespace npdw::sim
