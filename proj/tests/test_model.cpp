#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "nuledf/model.hpp"
#include "nuledf/reference_case.hpp"

using namespace nuledf;

namespace {

Task valid_task(int id) {
  Task t;
  t.id = id;
  t.arrival = 10;
  t.exec = 50;
  t.dline = 100;
  t.quant = 10;
  t.ctot = 4;
  t.cur = 10;
  return t;
}

}  // namespace

TEST_CASE("the reference task set validates cleanly") {
  CHECK(validate(reference_taskset(), reference_platform()).empty());
}

TEST_CASE("a deadline at the arrival time is reported against the task") {
  TaskSet ts;
  Task t = valid_task(9);
  t.dline = t.arrival;
  ts.tasks.push_back(t);
  const auto v = validate(ts, Platform{4, {}});
  REQUIRE(v.size() == 1);
  CHECK(v[0].task_id == 9);
  CHECK(v[0].message.find("deadline") != std::string::npos);
}

TEST_CASE("duplicate ids are a violation") {
  TaskSet ts;
  ts.tasks.push_back(valid_task(3));
  ts.tasks.push_back(valid_task(3));
  const auto v = validate(ts, Platform{2, {}});
  REQUIRE(v.size() == 1);
  CHECK(v[0].task_id == 3);
  CHECK(v[0].message.find("duplicate") != std::string::npos);
}

TEST_CASE("each broken field is reported") {
  Platform pf{4, {}};

  TaskSet quant_too_big;
  Task t = valid_task(1);
  t.quant = t.exec + 1;
  quant_too_big.tasks.push_back(t);
  REQUIRE(validate(quant_too_big, pf).size() == 1);

  TaskSet zero_exec;
  t = valid_task(2);
  t.exec = 0;
  zero_exec.tasks.push_back(t);
  // exec = 0 also breaks quant <= exec
  CHECK(!validate(zero_exec, pf).empty());

  TaskSet negative_arrival;
  t = valid_task(3);
  t.arrival = -1;
  negative_arrival.tasks.push_back(t);
  CHECK(!validate(negative_arrival, pf).empty());

  TaskSet bad_id;
  t = valid_task(0);
  bad_id.tasks.push_back(t);
  CHECK(!validate(bad_id, pf).empty());
}

TEST_CASE("pinned assignments must land on existing cores") {
  TaskSet ts;
  ts.tasks.push_back(valid_task(1));
  Platform pf{2, {{1, 3}}};
  const auto v = validate(ts, pf);
  REQUIRE(v.size() == 1);
  CHECK(v[0].message.find("pinned") != std::string::npos);

  Platform ok{2, {{1, 2}}};
  CHECK(validate(ts, ok).empty());
}

TEST_CASE("a platform needs at least one core") {
  CHECK(!validate(TaskSet{}, Platform{0, {}}).empty());
}

TEST_CASE("validate is idempotent and order-insensitive") {
  TaskSet ts;
  for (int id : {4, 1, 7, 7, 2}) {
    Task t = valid_task(id);
    if (id == 2) t.dline = t.arrival;  // one more violation
    ts.tasks.push_back(t);
  }
  Platform pf{4, {}};
  auto messages = [&](const TaskSet& s) {
    std::vector<std::string> out;
    for (const Violation& v : validate(s, pf)) out.push_back(v.message);
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto base = messages(ts);
  CHECK(base == messages(ts));  // idempotent

  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    TaskSet shuffled = ts;
    std::shuffle(shuffled.tasks.begin(), shuffled.tasks.end(), rng);
    CHECK(messages(shuffled) == base);
  }
}

TEST_CASE("task lookup and derived window") {
  const TaskSet ts = reference_taskset();
  REQUIRE(ts.find(5) != nullptr);
  CHECK(ts.find(5)->dline == 500);
  CHECK(ts.find(99) == nullptr);
  CHECK(ts.max_deadline() == 500);
  CHECK(ts.find(1)->window() == 125);
}
