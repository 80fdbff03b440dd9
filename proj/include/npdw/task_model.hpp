#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>

namespace npdw {

template <typename Tag, typename Rep>
class StrongId {
 public:
  using rep_type = Rep;

  constexpr StrongId() = default;
  constexpr explicit StrongId(Rep v) : value_(v) {}

  constexpr Rep value() const noexcept { return value_; }

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
  friend std::ostream& operator<<(std::ostream& os, StrongId id) { return os << +id.value_; }

 private:
  Rep value_{};
};

using TaskId = StrongId<struct TaskIdTag, std::uint64_t>;
using CoreId = StrongId<struct CoreIdTag, std::uint32_t>;

/// A schedulable task instance: (p0, p1, p2, p3, p_c) plus bookkeeping.
struct TaskProfile {
  TaskId id;                       // p0
  int p1 = 1;                      // time-cost category
  int p2 = 1;                      // power category
  std::optional<double> deadline;  // p3, absolute virtual seconds
  double credit = 0.0;             // p_c
  double arrival_time = 0.0;
  int windows_waited = 0;
  bool force_schedule = false;

  /// Throws std::invalid_argument if a field is out of range.
  void validate() const;
};

/// A core snapshot: (c0, c1, c2, c3, c_msp) plus the raw temperature.
struct CoreState {
  CoreId id;                 // c0
  double speed_mhz = 0.0;    // c1
  double load = 0.0;         // c2, busy fraction in [0, 1]
  int temp_category = 1;     // c3
  double max_speed_mhz = 0;  // c_msp
  double raw_temp = 0.0;     // degrees C

  void validate() const;
};

struct CreditConfig {
  double base_credit = 10.0;  // b
  double gain_rate = 1.0;     // c, credit per virtual second
  int max_rounds = 16;

  void validate() const;
};

/// A fresh task instance starts with the base credit.
TaskProfile make_task(TaskId id, int p1, int p2, std::optional<double> deadline, double arrival_time,
                      const CreditConfig& cfg);

/// p_c <- c * elapsed + p_c, and one more window waited. Sets force_schedule
/// once the task has been passed over max_rounds times.
TaskProfile accumulate_credit(TaskProfile task, double elapsed_in_window, const CreditConfig& cfg);

struct SpendResult {
  TaskProfile task;
  double charged = 0.0;
};

/// Charges p_c * (1 - 1/|U|), where |U| counts the dispatched task itself.
SpendResult spend_credit(TaskProfile task, std::size_t waiting_set_size);

}  // namespace npdw

template <typename Tag, typename Rep>
struct std::hash<npdw::StrongId<Tag, Rep>> {
  std::size_t operator()(npdw::StrongId<Tag, Rep> id) const noexcept { return std::hash<Rep>{}(id.value()); }
};
