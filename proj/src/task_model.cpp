#include "npdw/task_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace npdw {

namespace {

bool is_category(int v) { return v >= 1 && v <= 3; }

}  // namespace

void TaskProfile::validate() const {
  if (!is_category(p1) || !is_category(p2))
    throw std::invalid_argument("task " + std::to_string(id.value()) + ": p1/p2 must be in {1,2,3}");
  if (!(credit >= 0.0) || !std::isfinite(credit))
    throw std::invalid_argument("task " + std::to_string(id.value()) + ": credit must be finite and >= 0");
  if (windows_waited < 0) throw std::invalid_argument("task windows_waited must be >= 0");
}

void CoreState::validate() const {
  if (!(max_speed_mhz > 0.0)) throw std::invalid_argument("core max speed must be > 0");
  if (!(speed_mhz > 0.0) || speed_mhz > max_speed_mhz)
    throw std::invalid_argument("core speed must lie in (0, c_msp]");
  if (!(load >= 0.0 && load <= 1.0)) throw std::invalid_argument("core load must lie in [0, 1]");
  if (!is_category(temp_category)) throw std::invalid_argument("core temperature category must be in {1,2,3}");
}

void CreditConfig::validate() const {
  if (!(base_credit >= 0.0)) throw std::invalid_argument("credit.base_credit must be >= 0");
  if (!(gain_rate > 0.0)) throw std::invalid_argument("credit.gain_rate must be > 0");
  if (max_rounds < 1) throw std::invalid_argument("credit.max_rounds must be >= 1");
}

TaskProfile make_task(TaskId id, int p1, int p2, std::optional<double> deadline, double arrival_time,
                      const CreditConfig& cfg) {
  TaskProfile t;
  t.id = id;
  t.p1 = p1;
  t.p2 = p2;
  t.deadline = deadline;
  t.credit = cfg.base_credit;
  t.arrival_time = arrival_time;
  t.validate();
  return t;
}

TaskProfile accumulate_credit(TaskProfile task, double elapsed_in_window, const CreditConfig& cfg) {
  if (!(elapsed_in_window >= 0.0)) throw std::invalid_argument("accumulate_credit: elapsed time must be >= 0");
  task.credit += cfg.gain_rate * elapsed_in_window;
  ++task.windows_waited;
  if (task.windows_waited >= cfg.max_rounds) task.force_schedule = true;
  return task;
}

SpendResult spend_credit(TaskProfile task, std::size_t waiting_set_size) {
  if (waiting_set_size == 0)
    throw std::invalid_argument("spend_credit: waiting set must include the dispatched task");
  // Computing the remainder first keeps p_c - charged exact and nonnegative.
  const double remaining = task.credit / static_cast<double>(waiting_set_size);
  const double charged = task.credit - remaining;
  task.credit = remaining;
  return {task, charged};
}

}  // namespace npdw
