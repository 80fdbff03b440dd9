#include <doctest.h>

#include <random>
#include <stdexcept>

#include "npdw/task_model.hpp"

using namespace npdw;

namespace {

CreditConfig credit(double b, double c, int rounds = 16) {
  CreditConfig cfg;
  cfg.base_credit = b;
  cfg.gain_rate = c;
  cfg.max_rounds = rounds;
  return cfg;
}

}  // namespace

TEST_CASE("a new task starts with the base credit") {
  auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, credit(10, 1));
  CHECK(t.credit == 10.0);
  CHECK(t.windows_waited == 0);
  CHECK_FALSE(t.force_schedule);
}

TEST_CASE("credit accumulation examples") {
  auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, credit(10, 2));
  CHECK(accumulate_credit(t, 3.0, credit(10, 2)).credit == 16.0);

  // Unrolled by hand: f_n = c * dt + f_{n-1}, f_0 = b.
  const auto cfg = credit(0, 1);
  auto u = make_task(TaskId{2}, 1, 1, std::nullopt, 0.0, cfg);
  double oracle = cfg.base_credit;
  for (int n = 0; n < 3; ++n) {
    u = accumulate_credit(u, 1.0, cfg);
    oracle = cfg.gain_rate * 1.0 + oracle;
  }
  CHECK(u.credit == 3.0);
  CHECK(u.credit == oracle);
  CHECK(u.windows_waited == 3);
}

TEST_CASE("negative elapsed time is rejected") {
  const auto cfg = credit(10, 1);
  auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, cfg);
  CHECK_THROWS_AS(accumulate_credit(t, -0.5, cfg), std::invalid_argument);
}

TEST_CASE("a task passed over max_rounds times is force-scheduled") {
  const auto cfg = credit(10, 1, 3);
  auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, cfg);
  t = accumulate_credit(t, 1.0, cfg);
  t = accumulate_credit(t, 1.0, cfg);
  CHECK_FALSE(t.force_schedule);
  t = accumulate_credit(t, 1.0, cfg);
  CHECK(t.force_schedule);
}

TEST_CASE("credit spending examples") {
  auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, credit(50, 1));
  auto one = spend_credit(t, 1);
  CHECK(one.charged == 0.0);
  CHECK(one.task.credit == 50.0);

  t.credit = 100;
  auto two = spend_credit(t, 2);
  CHECK(two.charged == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(two.task.credit == doctest::Approx(50.0).epsilon(1e-12));

  t.credit = 90;
  auto three = spend_credit(t, 3);
  CHECK(three.charged == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(three.task.credit == doctest::Approx(30.0).epsilon(1e-12));

  CHECK_THROWS_AS(spend_credit(t, 0), std::invalid_argument);
}

TEST_CASE("property: proportional fairness of the charge") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> credit_of(0.1, 1000.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t u = 1 + rng() % 50;
    const double expected = 1.0 - 1.0 / static_cast<double>(u);
    for (int k = 0; k < 5; ++k) {
      TaskProfile t;
      t.id = TaskId{static_cast<std::uint64_t>(k + 1)};
      t.credit = credit_of(rng);
      const auto r = spend_credit(t, u);
      REQUIRE(r.charged / t.credit == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: credit never goes negative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dt(0.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto cfg = credit(static_cast<double>(rng() % 20), 0.1 + static_cast<double>(rng() % 30) / 10.0, 100);
    auto t = make_task(TaskId{1}, 1, 1, std::nullopt, 0.0, cfg);
    for (int step = 0; step < 20; ++step) {
      if (rng() % 2) {
        const double before = t.credit;
        t = accumulate_credit(t, dt(rng), cfg);
        REQUIRE(t.credit >= before);
      } else {
        t = spend_credit(t, 1 + rng() % 8).task;
      }
      REQUIRE(t.credit >= 0.0);
    }
  }
}

TEST_CASE("property: charge is nondecreasing in the waiting set size") {
  TaskProfile t;
  t.credit = 40.0;
  double prev = -1.0;
  for (std::size_t u = 1; u <= 10000; u *= 2) {
    const double charged = spend_credit(t, u).charged;
    CHECK(charged >= prev);
    prev = charged;
  }
  CHECK(prev == doctest::Approx(40.0).epsilon(1e-3));
}

TEST_CASE("validation rejects out of range fields") {
  TaskProfile t;
  t.p1 = 4;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  CreditConfig c;
  c.gain_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CoreState core;
  core.id = CoreId{1};
  core.max_speed_mhz = 2400;
  core.speed_mhz = 2500;
  CHECK_THROWS_AS(core.validate(), std::invalid_argument);
}
