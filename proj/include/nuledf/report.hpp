#pragma once

#include <cmath>
#include <cstdio>
#include <future>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuledf/engine.hpp"
#include "nuledf/reference_case.hpp"
#include "nuledf/workload.hpp"

namespace nuledf {

enum class SweepAxis { Tasks, Cores };

struct SweepSpec {
  SweepAxis axis = SweepAxis::Tasks;
  std::vector<int> values;
};

/// One row of a policy-comparison report. The headline improvement is on
/// scheduled counts for task sweeps and on average utilisation for core
/// sweeps.
struct ComparisonRow {
  int axis_value = 0;
  bool is_average = false;
  int edf_scheduled = 0;
  int edf_missed = 0;
  int nul_scheduled = 0;
  int nul_missed = 0;
  double edf_util = 0.0;
  double nul_util = 0.0;
  double improvement_pct = 0.0;
};

inline double improvement_pct(double edf_metric, double nul_metric) {
  if (edf_metric <= 0.0) return 0.0;
  return (nul_metric - edf_metric) / edf_metric * 100.0;
}

/// Integer display convention for improvement columns.
inline long improvement_display(double raw) { return std::lround(raw); }

/// Runs both policies on the identical generated task set for every sweep
/// value and appends a trailing average row. Sweep points are independent
/// simulations and run concurrently; rows come back in sweep order.
inline std::vector<ComparisonRow> compare(const SweepSpec& sweep, const GenParams& params,
                                          const Platform& platform, const SimConfig& config) {
  if (sweep.values.empty()) throw std::invalid_argument("compare: empty sweep");
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    if (sweep.values[i] <= 0) throw std::invalid_argument("compare: sweep values must be positive");
    if (i > 0 && sweep.values[i] <= sweep.values[i - 1]) {
      throw std::invalid_argument("compare: sweep values must be ascending");
    }
  }

  auto run_point = [&sweep, &params, &platform, &config](int value) -> ComparisonRow {
    try {
      GenParams p = params;
      Platform pf = platform;
      if (sweep.axis == SweepAxis::Tasks) {
        p.n = value;
      } else {
        pf.cores = value;
      }
      // One seed per sweep point so both policies see the identical set.
      p.seed = params.seed + static_cast<std::uint64_t>(value);
      const TaskSet ts = generate(p);
      const SimResult edf = run(PolicyId::Edf, ts, pf, config);
      const SimResult nul = run(PolicyId::NulEdf, ts, pf, config);

      ComparisonRow row;
      row.axis_value = value;
      row.edf_scheduled = edf.scheduled_count;
      row.edf_missed = edf.missed_count;
      row.nul_scheduled = nul.scheduled_count;
      row.nul_missed = nul.missed_count;
      row.edf_util = edf.avg_util;
      row.nul_util = nul.avg_util;
      row.improvement_pct =
          sweep.axis == SweepAxis::Tasks
              ? improvement_pct(edf.scheduled_count, nul.scheduled_count)
              : improvement_pct(edf.avg_util, nul.avg_util);
      return row;
    } catch (const std::exception& e) {
      throw std::runtime_error("compare: sweep value " + std::to_string(value) + ": " + e.what());
    }
  };

  std::vector<std::future<ComparisonRow>> futures;
  futures.reserve(sweep.values.size());
  for (int value : sweep.values) {
    futures.push_back(std::async(std::launch::async, run_point, value));
  }
  std::vector<ComparisonRow> rows;
  rows.reserve(sweep.values.size() + 1);
  for (auto& f : futures) rows.push_back(f.get());

  ComparisonRow avg;
  avg.is_average = true;
  double es = 0, em = 0, ns = 0, nm = 0, eu = 0, nu = 0, imp = 0;
  for (const ComparisonRow& r : rows) {
    es += r.edf_scheduled;
    em += r.edf_missed;
    ns += r.nul_scheduled;
    nm += r.nul_missed;
    eu += r.edf_util;
    nu += r.nul_util;
    imp += r.improvement_pct;
  }
  const double k = static_cast<double>(rows.size());
  avg.edf_scheduled = static_cast<int>(std::lround(es / k));
  avg.edf_missed = static_cast<int>(std::lround(em / k));
  avg.nul_scheduled = static_cast<int>(std::lround(ns / k));
  avg.nul_missed = static_cast<int>(std::lround(nm / k));
  avg.edf_util = eu / k;
  avg.nul_util = nu / k;
  avg.improvement_pct = imp / k;
  rows.push_back(avg);
  return rows;
}

namespace detail {

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace detail

inline const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::Release: return "release";
    case EventKind::AdmitHolding: return "admit_holding";
    case EventKind::AdmitExecution: return "admit_execution";
    case EventKind::StartQuantum: return "start_quantum";
    case EventKind::EndQuantum: return "end_quantum";
    case EventKind::Complete: return "complete";
    case EventKind::Miss: return "miss";
    case EventKind::Migrate: return "migrate";
  }
  return "unknown";
}

inline const char* miss_reason_name(MissReason r) {
  switch (r) {
    case MissReason::DeadlinePassed: return "deadline_passed";
    case MissReason::BoundExceeded: return "bound_exceeded";
    case MissReason::AdmissionRejected: return "admission_rejected";
    case MissReason::HorizonExceeded: return "horizon_exceeded";
  }
  return "unknown";
}

inline const char* admit_source_name(AdmitSource s) {
  switch (s) {
    case AdmitSource::Admission: return "admission";
    case AdmitSource::Classification: return "classification";
    case AdmitSource::IdlePull: return "idle_pull";
    case AdmitSource::ZeroLaxityUrgent: return "zero_laxity_urgent";
    case AdmitSource::ZeroLaxityNextCore: return "zero_laxity_next_core";
  }
  return "unknown";
}

/// One record per event, comma separated.
inline std::string export_trace_events(const SimResult& result) {
  std::string out = "time,kind,task_id,core,nlax,detail\n";
  for (const Event& e : result.trace) {
    out += std::to_string(e.time);
    out += ',';
    out += kind_name(e.kind);
    out += ',';
    out += std::to_string(e.task_id);
    out += ',';
    if (e.core) out += std::to_string(*e.core);
    out += ',';
    if (e.nlax_at_event) out += detail::fmt("%.6g", *e.nlax_at_event);
    out += ',';
    if (e.miss_reason) {
      out += miss_reason_name(*e.miss_reason);
    } else if (e.admit_source) {
      out += admit_source_name(*e.admit_source);
    }
    out += '\n';
  }
  return out;
}

struct GanttInterval {
  int core = 0;
  int task_id = 0;
  Tick start = 0;
  Tick end = 0;  // half-open
};

/// Per-core execution intervals, with back-to-back quanta of the same task
/// merged into one bar.
inline std::vector<GanttInterval> gantt_intervals(const SimResult& result) {
  std::vector<GanttInterval> out;
  std::vector<std::pair<int, Tick>> open(static_cast<std::size_t>(result.cores) + 1, {0, 0});
  for (const Event& e : result.trace) {
    if (!e.core) continue;
    const std::size_t c = static_cast<std::size_t>(*e.core);
    if (e.kind == EventKind::StartQuantum) {
      open[c] = {e.task_id, e.time};
    } else if (e.kind == EventKind::EndQuantum && open[c].first == e.task_id) {
      if (!out.empty() && out.back().core == *e.core && out.back().task_id == e.task_id &&
          out.back().end == open[c].second) {
        out.back().end = e.time;
      } else {
        out.push_back({*e.core, e.task_id, open[c].second, e.time});
      }
      open[c] = {0, 0};
    }
  }
  std::sort(out.begin(), out.end(), [](const GanttInterval& a, const GanttInterval& b) {
    if (a.core != b.core) return a.core < b.core;
    if (a.start != b.start) return a.start < b.start;
    return a.task_id < b.task_id;
  });
  // Merge again after sorting: interleaved cores can split a task's bars.
  std::vector<GanttInterval> merged;
  for (const GanttInterval& g : out) {
    if (!merged.empty() && merged.back().core == g.core && merged.back().task_id == g.task_id &&
        merged.back().end == g.start) {
      merged.back().end = g.end;
    } else {
      merged.push_back(g);
    }
  }
  return merged;
}

inline std::string export_trace_gantt(const SimResult& result) {
  std::string out = "core,task_id,start,end\n";
  for (const GanttInterval& g : gantt_intervals(result)) {
    out += std::to_string(g.core) + ',' + std::to_string(g.task_id) + ',' +
           std::to_string(g.start) + ',' + std::to_string(g.end) + '\n';
  }
  return out;
}

enum class TraceFormat { Events, Gantt };

inline std::string export_trace(const SimResult& result, TraceFormat format) {
  return format == TraceFormat::Events ? export_trace_events(result) : export_trace_gantt(result);
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows, SweepAxis axis) {
  std::string out = axis == SweepAxis::Tasks ? "n_tasks" : "n_cores";
  out += ",edf_scheduled,edf_missed,nul_scheduled,nul_missed,edf_util,nul_util,"
         "improvement_pct,improvement_pct_raw\n";
  for (const ComparisonRow& r : rows) {
    out += r.is_average ? std::string("average") : std::to_string(r.axis_value);
    out += ',' + std::to_string(r.edf_scheduled) + ',' + std::to_string(r.edf_missed);
    out += ',' + std::to_string(r.nul_scheduled) + ',' + std::to_string(r.nul_missed);
    out += ',' + detail::fmt("%.4f", r.edf_util) + ',' + detail::fmt("%.4f", r.nul_util);
    out += ',' + std::to_string(improvement_display(r.improvement_pct));
    out += ',' + detail::fmt("%.2f", r.improvement_pct);
    out += '\n';
  }
  return out;
}

struct ExampleCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExampleReport {
  std::vector<ExampleCheck> checks;
  std::string text;
  bool ok = true;
};

/// Reproduces the bundled reference scenario end to end: the per-task metric
/// table, the derived factors and bounds, both pinned schedules, and the
/// aggregation of the reference per-core averages. Every value is checked
/// against its expected cell.
inline ExampleReport run_reference_example() {
  ExampleReport rep;
  auto check = [&rep](const std::string& name, double expected, double actual, double tol) {
    const bool pass = std::abs(actual - expected) <= tol;
    rep.checks.push_back({name, expected, actual, tol, pass});
    rep.ok = rep.ok && pass;
    return pass;
  };

  const TaskSet ts = reference_taskset();
  const Platform pf = reference_platform();
  std::ostringstream text;
  text << "Reference scenario: " << ts.size() << " tasks on " << pf.cores << " cores\n\n";
  text << "task,weight,laxity,nlax,utilisation,nlax_over_deadline\n";

  double u_norm_max_raw = 0.0;
  for (const ReferenceMetricsRow& expect : reference_metrics()) {
    const Task& t = *ts.find(expect.id);
    const double w = weight(t.quant, t.exec, t.ctot);
    const double lax = laxity(t.dline, t.cur, t.exec);
    const double nlax = non_uniform_laxity(lax, w);
    const double u = utilisation(t.exec, t.window());
    const double u_norm = laxity_normalized_utilisation(nlax, t.dline);
    u_norm_max_raw = std::max(u_norm_max_raw, u_norm);

    const std::string label = "T" + std::to_string(t.id);
    check(label + " weight", expect.weight, display_round2(w), 0.005);
    check(label + " laxity", expect.lax, display_round2(lax), 0.005);
    check(label + " nlax", expect.nlax, display_round2(nlax), 0.005);
    check(label + " utilisation", expect.util, display_round2(u), 0.005);
    check(label + " nlax/deadline", expect.util_norm, display_round2(u_norm), 0.005);
    text << label << ',' << detail::fmt("%.2f", display_round2(w)) << ','
         << detail::fmt("%.0f", lax) << ',' << detail::fmt("%.2f", display_round2(nlax)) << ','
         << detail::fmt("%.2f", display_round2(u)) << ','
         << detail::fmt("%.2f", display_round2(u_norm)) << '\n';
  }

  const double u_max = display_round2(u_norm_max_raw);
  const double factor = modification_factor(u_max);
  const double bound4 = schedulability_bound(pf.cores);
  const double two_core = two_core_bound(2);
  check("u_max", kReferenceUMax, u_max, 1e-9);
  check("modification factor", kReferenceFactor, factor, 1e-9);
  check("schedulability bound (4 cores)", kReferenceBoundFourCores, bound4, 1e-3);
  check("two-core bound", kReferenceTwoCoreBound, two_core, 0.0);
  text << "\nu_max = " << detail::fmt("%.2f", u_max)
       << "\nmodification factor U1 = " << detail::fmt("%.2f", factor)
       << "\nschedulability bound L(4) = " << detail::fmt("%.3f", bound4)
       << "\ntwo-core bound (z=2) = " << detail::fmt("%.2f", two_core) << "\n";

  SimConfig cfg;
  cfg.frozen_u1 = factor;
  const SimResult edf = run(PolicyId::Edf, ts, pf, cfg);
  const SimResult nul = run(PolicyId::NulEdf, ts, pf, cfg);
  check("nul-edf tasks missed", 0.0, static_cast<double>(nul.missed_count), 0.0);
  text << "\npinned EDF run: scheduled " << edf.scheduled_count << ", missed " << edf.missed_count
       << "\npinned NUL-EDF run: scheduled " << nul.scheduled_count << ", missed "
       << nul.missed_count << "\n";

  const std::vector<int> all_active = {1, 1, 1, 1};
  const auto& edf_avgs = reference_edf_core_averages();
  const auto& nul_avgs = reference_nul_core_averages();
  const double edf_avg = mean_over_active_cores({edf_avgs.begin(), edf_avgs.end()}, all_active);
  const double nul_avg = mean_over_active_cores({nul_avgs.begin(), nul_avgs.end()}, all_active);
  check("edf average utilisation", kReferenceEdfAvgUtil, display_round2(edf_avg), 0.005);
  check("nul-edf average utilisation", kReferenceNulAvgUtil, display_round2(nul_avg), 0.005);
  text << "\nEDF per-core averages ";
  for (double v : edf_avgs) text << detail::fmt("%.2f", v) << ' ';
  text << "-> average utilisation " << detail::fmt("%.2f", display_round2(edf_avg));
  text << "\nNUL-EDF per-core averages ";
  for (double v : nul_avgs) text << detail::fmt("%.2f", v) << ' ';
  text << "-> average utilisation " << detail::fmt("%.2f", display_round2(nul_avg)) << "\n";

  int failed = 0;
  for (const ExampleCheck& c : rep.checks) {
    if (!c.pass) ++failed;
  }
  text << "\nchecks: " << (rep.checks.size() - failed) << '/' << rep.checks.size() << " passed\n";
  rep.text = text.str();
  return rep;
}

}  // namespace nuledf
