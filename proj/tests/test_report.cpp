#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "nuledf/report.hpp"

using namespace nuledf;
using Catch::Matchers::WithinAbs;

TEST_CASE("improvement percentages follow the reporting convention") {
  CHECK_THAT(improvement_pct(71, 95), WithinAbs(33.8028, 5e-4));
  CHECK(improvement_display(improvement_pct(71, 95)) == 34);
  CHECK_THAT(improvement_pct(3468, 4800), WithinAbs(38.4083, 5e-4));
  CHECK(improvement_display(improvement_pct(3468, 4800)) == 38);
  CHECK(improvement_pct(50, 50) == 0.0);
  CHECK(improvement_pct(0, 10) == 0.0);  // undefined base reported as zero
}

TEST_CASE("compare runs both policies per sweep value and appends an average row") {
  SweepSpec sweep;
  sweep.values = {5, 10, 15};
  GenParams params;
  params.arrival_span = 500;
  params.seed = 7;
  Platform pf{3, {}};
  const auto rows = compare(sweep, params, pf, SimConfig{});

  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < 3; ++i) {
    const ComparisonRow& r = rows[i];
    CHECK(r.axis_value == sweep.values[i]);
    CHECK(!r.is_average);
    CHECK(r.edf_scheduled + r.edf_missed == r.axis_value);
    CHECK(r.nul_scheduled + r.nul_missed == r.axis_value);
  }
  const ComparisonRow& avg = rows.back();
  CHECK(avg.is_average);
  double mean_sched = 0, mean_imp = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    mean_sched += rows[i].edf_scheduled / 3.0;
    mean_imp += rows[i].improvement_pct / 3.0;
  }
  CHECK(std::abs(avg.edf_scheduled - mean_sched) <= 0.5 + 1e-9);
  CHECK_THAT(avg.improvement_pct, WithinAbs(mean_imp, 1e-9));

  // deterministic given the seed
  const auto again = compare(sweep, params, pf, SimConfig{});
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].edf_scheduled == rows[i].edf_scheduled);
    CHECK(again[i].nul_scheduled == rows[i].nul_scheduled);
    CHECK(again[i].edf_util == rows[i].edf_util);
  }
}

TEST_CASE("compare validates its sweep") {
  GenParams params;
  Platform pf{2, {}};
  CHECK_THROWS_AS(compare(SweepSpec{SweepAxis::Tasks, {}}, params, pf, SimConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare(SweepSpec{SweepAxis::Tasks, {10, 5}}, params, pf, SimConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(compare(SweepSpec{SweepAxis::Tasks, {0}}, params, pf, SimConfig{}),
                  std::invalid_argument);
}

TEST_CASE("a cores sweep reports utilisation improvement") {
  SweepSpec sweep;
  sweep.axis = SweepAxis::Cores;
  sweep.values = {3, 6};
  GenParams params;
  params.n = 30;
  params.arrival_span = 600;
  const auto rows = compare(sweep, params, Platform{1, {}}, SimConfig{});
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rows[i].edf_scheduled + rows[i].edf_missed == params.n);
    CHECK(rows[i].nul_scheduled + rows[i].nul_missed == params.n);
  }
  const std::string csv = comparison_csv(rows, sweep.axis);
  CHECK(csv.rfind("n_cores,", 0) == 0);
  CHECK(csv.find("average,") != std::string::npos);
}

TEST_CASE("the comparison csv has one line per row plus a header") {
  SweepSpec sweep;
  sweep.values = {4, 8};
  GenParams params;
  params.arrival_span = 300;
  const auto rows = compare(sweep, params, Platform{2, {}}, SimConfig{});
  const std::string csv = comparison_csv(rows, SweepAxis::Tasks);
  int newlines = 0;
  for (char c : csv) newlines += c == '\n';
  CHECK(newlines == static_cast<int>(rows.size()) + 1);
  CHECK(csv.rfind("n_tasks,edf_scheduled,", 0) == 0);
}

TEST_CASE("an empty trace exports as a header-only document") {
  const SimResult r = run(PolicyId::Edf, TaskSet{}, Platform{2, {}}, SimConfig{});
  CHECK(export_trace_events(r) == "time,kind,task_id,core,nlax,detail\n");
  CHECK(export_trace_gantt(r) == "core,task_id,start,end\n");
}

TEST_CASE("contiguous quanta merge into one gantt bar") {
  TaskSet ts;
  ts.tasks.push_back({1, 0, 80, 200, 10, 7, 0});
  const SimResult r = run(PolicyId::Edf, ts, Platform{1, {}}, SimConfig{});
  const auto bars = gantt_intervals(r);
  REQUIRE(bars.size() == 1);
  CHECK(bars[0].core == 1);
  CHECK(bars[0].task_id == 1);
  CHECK(bars[0].start == 0);
  CHECK(bars[0].end == 80);
  CHECK(export_trace_gantt(r) == "core,task_id,start,end\n1,1,0,80\n");
}

TEST_CASE("reference-scenario gantt bars are disjoint and account for all work") {
  SimConfig cfg;
  cfg.frozen_u1 = 1.68;
  const TaskSet ts = reference_taskset();
  const SimResult r = run(PolicyId::NulEdf, ts, reference_platform(), cfg);
  const auto bars = gantt_intervals(r);

  std::map<int, Tick> core_cursor;
  std::map<int, Tick> executed;
  for (const GanttInterval& g : bars) {
    CHECK(g.start < g.end);
    if (core_cursor.count(g.core) != 0) CHECK(g.start >= core_cursor[g.core]);
    core_cursor[g.core] = g.end;
    executed[g.task_id] += g.end - g.start;
  }
  REQUIRE(r.final_states.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Task& t = ts.tasks[i];
    CHECK(executed[t.id] == t.exec - r.final_states[i].remaining);
  }
  // six bars over four cores: every task shows up exactly once here
  CHECK(bars.size() == 6);
}

TEST_CASE("event export is byte-stable across repeated runs") {
  GenParams params;
  params.n = 60;
  params.arrival_span = 900;
  params.seed = 31;
  const TaskSet ts = generate(params);
  for (PolicyId policy : {PolicyId::Edf, PolicyId::NulEdf}) {
    const std::string a = export_trace_events(run(policy, ts, Platform{4, {}}, SimConfig{}));
    const std::string b = export_trace_events(run(policy, ts, Platform{4, {}}, SimConfig{}));
    CHECK(a == b);
    CHECK(a.rfind("time,kind,task_id,core,nlax,detail\n", 0) == 0);
  }
}

TEST_CASE("the reference example check suite passes end to end") {
  const ExampleReport rep = run_reference_example();
  for (const ExampleCheck& c : rep.checks) {
    INFO(c.name << " expected " << c.expected << " got " << c.actual);
    CHECK(c.pass);
  }
  CHECK(rep.ok);
  CHECK(rep.checks.size() == 37);
  CHECK(rep.text.find("u_max = 0.32") != std::string::npos);
  CHECK(rep.text.find("modification factor U1 = 1.68") != std::string::npos);
  CHECK(rep.text.find("schedulability bound L(4) = 2.528") != std::string::npos);
}
