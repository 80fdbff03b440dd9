#pragma once

// Tick-driven chip-multiprocessor simulator with a linear thermal model.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "npdw/matching.hpp"
#include "npdw/task_model.hpp"
#include "npdw/windowing.hpp"

namespace npdw::sim {

struct SimConfig {
  int num_cores = 4;
  double c_msp = 2400.0;  // MHz
  double tick = 0.01;     // virtual seconds
  double ambient = 40.0;  // degrees C
  double heating = 1.25;  // degrees C per second per unit of power intensity
  double cooling = 0.05;  // 1/s, Newtonian
  bool throttle_enabled = true;
  double throttle_threshold = 70.0;
  double throttle_factor = 0.6;
  std::array<double, 2> temp_boundaries{50.0, 65.0};  // c3 = 1 | 2 | 3
  double load_window = 1.0;           // trailing window for c2
  double sample_interval = 1.0;       // core trace samples
  double wp_sample_interval = 0.1;    // samples feeding window performance
  double duration_sigma = 0.25;       // log-normal spread of task durations
  double duration_scale = 0.75;       // multiplies every program's base duration
  double stall_limit = 3600.0;        // give up this long after the last arrival
  std::uint64_t seed = 1;

  void validate() const;
  std::int64_t ticks_per(double seconds) const;
};

/// Maps a temperature to the category {1, 2, 3}.
int temp_category(double raw_temp, const std::array<double, 2>& boundaries) noexcept;

struct SimTask {
  TaskProfile profile;
  std::string program;
  double duration = 0.0;  // seconds of work at c_msp
  double power_intensity = 1.0;
};

struct Completion {
  TaskId task;
  CoreId core;
  double start = 0.0;
  double finish = 0.0;
};

struct CoreSample {
  double time = 0.0;
  std::uint32_t core = 0;
  double speed_mhz = 0.0;
  double load = 0.0;
  double temp = 0.0;

  friend bool operator==(const CoreSample&, const CoreSample&) = default;
};

struct TaskRecord {
  std::uint64_t id = 0;
  std::string program;
  int p1 = 1;
  int p2 = 1;
  std::optional<double> deadline;
  double arrival = 0.0;
  std::optional<double> matched;
  std::optional<double> start;
  std::optional<double> finish;
  double charged = 0.0;
  std::optional<std::uint32_t> core;
  double duration = 0.0;

  std::optional<double> waiting() const {
    if (!matched) return std::nullopt;
    return *matched - arrival;
  }

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

struct SimTrace {
  std::string scheduler;
  std::uint64_t seed = 0;
  std::vector<CoreSample> cores;
  std::vector<TaskRecord> tasks;
  std::vector<WindowRecord> windows;
  double end_time = 0.0;
  bool completed = true;  // false when the stall limit cut the run short

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

/// UT and OT averaged over the fine samples in a time interval.
struct ThroughputSample {
  double time = 0.0;
  double ut = 0.0;
  double ot = 0.0;
};

class World {
 public:
  /// `tasks` must be ordered by arrival time.
  World(SimConfig cfg, std::vector<SimTask> tasks);

  const SimConfig& config() const noexcept { return cfg_; }
  std::int64_t tick_index() const noexcept { return tick_; }
  double now() const noexcept { return time_at(tick_); }
  double time_at(std::int64_t tick) const noexcept { return static_cast<double>(tick) * cfg_.tick; }

  /// Moves every task whose arrival time has been reached into the waiting
  /// set. Returns how many arrived.
  std::size_t inject_arrivals();

  std::span<TaskProfile> waiting() noexcept { return waiting_; }
  std::span<const TaskProfile> waiting() const noexcept { return waiting_; }
  const TaskProfile* find_waiting(TaskId id) const;

  std::vector<CoreId> idle_cores() const;
  bool is_idle(CoreId core) const;
  std::vector<CoreState> snapshot_cores() const;
  std::vector<CoreState> snapshot_idle_cores() const;

  /// Binds every matched task to its core and spends its credit against
  /// |U| = `waiting_set_size`. Throws std::logic_error if a core is busy or a
  /// task is not waiting; the world is left untouched in that case.
  void dispatch(const Matching& matching, std::size_t waiting_set_size);

  /// Advances one tick and returns the tasks that completed during it.
  std::vector<Completion> step();

  std::size_t task_count() const noexcept { return pending_.size(); }
  bool all_arrived() const noexcept { return next_arrival_ >= pending_.size(); }
  bool finished() const noexcept;
  std::size_t running_count() const noexcept;
  std::optional<double> next_arrival_time() const;
  double last_arrival_time() const;

  std::span<const ThroughputSample> throughput_samples() const noexcept { return fine_; }
  /// Mean UT and OT over fine samples with time in (t0, t1]. Falls back to
  /// the instantaneous values when the interval holds no sample.
  ThroughputSample throughput_between(double t0, double t1) const;

  SimTrace take_trace(std::string scheduler_name);
  std::span<const TaskRecord> records() const noexcept { return records_; }

 private:
  struct Core {
    CoreId id;
    double speed = 0.0;
    double temp = 0.0;
    std::optional<TaskId> task;
    double remaining = 0.0;
    double power = 0.0;
    double started = 0.0;
    std::vector<std::uint8_t> busy_ring;  // busy flag of the last load_ticks_ ticks
    std::int64_t busy_count = 0;
  };

  double load_of(const Core& c) const;
  void sample(double t);

  SimConfig cfg_;
  std::int64_t tick_ = 0;
  std::vector<SimTask> pending_;
  std::size_t next_arrival_ = 0;
  std::vector<TaskProfile> waiting_;
  std::vector<Core> cores_;
  std::vector<TaskRecord> records_;
  std::unordered_map<std::uint64_t, std::size_t> record_index_;
  std::vector<CoreSample> samples_;
  std::vector<ThroughputSample> fine_;
  std::int64_t sample_every_ = 100;
  std::int64_t fine_every_ = 10;
  std::int64_t load_ticks_ = 100;
};

}  // namespace npdw::sim
