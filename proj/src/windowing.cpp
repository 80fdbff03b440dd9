#include "npdw/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace npdw {

void PerfConstants::validate() const {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw std::invalid_argument("window.alpha1/alpha2 must be > 0");
  if (std::abs(alpha1 + alpha2 - 1.0) > 1e-12) throw std::invalid_argument("window.alpha1 + alpha2 must equal 1");
}

void WindowTuning::validate() const {
  if (!(amp_floor > 0.0)) throw std::invalid_argument("window.amp_floor must be > 0");
  if (!(min_size > 0.0) || !(max_size >= min_size))
    throw std::invalid_argument("window bounds must satisfy 0 < min_size <= max_size");
  if (!(hold_tolerance >= 0.0)) throw std::invalid_argument("window.hold_tolerance must be >= 0");
}

double utilization_throughput(std::span<const CoreState> cores) {
  if (cores.empty()) throw std::invalid_argument("utilization_throughput: empty core set");
  double sum = 0.0;
  for (const auto& c : cores) sum += c.load;
  return sum / static_cast<double>(cores.size());
}

double operating_throughput(std::span<const CoreState> cores) {
  if (cores.empty()) throw std::invalid_argument("operating_throughput: empty core set");
  double sum = 0.0;
  for (const auto& c : cores) sum += c.speed_mhz / c.max_speed_mhz;
  return sum / static_cast<double>(cores.size());
}

double window_performance(std::span<const CoreState> cores, const PerfConstants& k) {
  return window_performance(utilization_throughput(cores), operating_throughput(cores), k);
}

double window_performance(double ut, double ot, const PerfConstants& k) { return k.alpha2 * ut + k.alpha1 * ot; }

double matching_performance(std::span<const double> arrival_times, double t) {
  if (arrival_times.empty()) return 0.0;
  double sum = 0.0;
  for (double a : arrival_times) {
    if (a > t) throw std::invalid_argument("matching_performance: matching time precedes an arrival");
    sum += t - a;
  }
  return sum / static_cast<double>(arrival_times.size());
}

std::string_view to_string(ResizeDirection d) {
  switch (d) {
    case ResizeDirection::Continue: return "continue";
    case ResizeDirection::Hold: return "hold";
    case ResizeDirection::Reverse: return "reverse";
  }
  return "";
}

double resize_ratio(double awp_prev, double awp_cur, double amp_prev, double amp_cur, const WindowTuning& tuning) {
  if (!(awp_prev > 0.0) || !(awp_cur > 0.0)) throw std::invalid_argument("resize: AWP must be > 0");
  amp_prev = std::max(amp_prev, tuning.amp_floor);
  amp_cur = std::max(amp_cur, tuning.amp_floor);
  return 0.5 * (awp_cur / awp_prev + amp_prev / amp_cur);
}

ResizeDirection resize_direction(double awp_prev, double awp_cur, double amp_prev, double amp_cur,
                                 const WindowTuning& tuning) {
  const double r = resize_ratio(awp_prev, awp_cur, amp_prev, amp_cur, tuning);
  if (std::abs(r - 1.0) <= tuning.hold_tolerance) return ResizeDirection::Hold;
  return r > 1.0 ? ResizeDirection::Continue : ResizeDirection::Reverse;
}

double next_window_size(double dt_prev, double dt_cur, double awp_prev, double awp_cur, double amp_prev,
                        double amp_cur, const WindowTuning& tuning) {
  if (!(dt_prev > 0.0) || !(dt_cur > 0.0)) throw std::invalid_argument("next_window_size: sizes must be > 0");
  if (!(awp_prev > 0.0) || !(awp_cur > 0.0)) throw std::invalid_argument("next_window_size: AWP must be > 0");
  amp_prev = std::max(amp_prev, tuning.amp_floor);
  amp_cur = std::max(amp_cur, tuning.amp_floor);
  const double next = dt_cur >= dt_prev ? dt_cur / 2.0 * (awp_cur / awp_prev + amp_prev / amp_cur)
                                        : dt_cur / 2.0 * (awp_prev / awp_cur + amp_cur / amp_prev);
  return std::clamp(next, tuning.min_size, tuning.max_size);
}

double quantile_inclusive(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void CutoffStats::add(double duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw std::invalid_argument("cutoff: invalid duration");
  history_.insert(std::upper_bound(history_.begin(), history_.end(), duration), duration);
}

double CutoffStats::q1() const { return quantile_inclusive(history_, 0.25); }
double CutoffStats::q3() const { return quantile_inclusive(history_, 0.75); }

double execution_cutoff(const CutoffStats& stats) {
  if (stats.size() < CutoffStats::kMinSamples) return CutoffStats::kNoCutoff;
  const double q1 = stats.q1();
  const double q3 = stats.q3();
  return q3 + 3.0 * (q3 - q1);
}

Folded fold_awp_amp(std::span<const ExecutionSample> windows, double first_end) {
  if (windows.empty()) throw std::invalid_argument("fold_awp_amp: no execution windows");
  Folded f;
  for (const auto& w : windows) {
    if (w.end > first_end) continue;
    f.awp += w.wp;
    f.amp += w.mp;
    ++f.count;
  }
  if (f.count == 0) throw std::invalid_argument("fold_awp_amp: the first execution window is missing");
  f.awp /= static_cast<double>(f.count);
  f.amp /= static_cast<double>(f.count);
  return f;
}

}  // namespace npdw
