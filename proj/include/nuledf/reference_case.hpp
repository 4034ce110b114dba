#pragma once

#include <array>

#include "nuledf/model.hpp"

namespace nuledf {

/// The bundled six-task reference scenario on four cores. All tasks are on
/// hand at time zero; `cur` carries the per-task snapshot instant at which
/// the reference metric table is evaluated.
inline TaskSet reference_taskset() {
  TaskSet ts;
  //                id  arr  exec dline quant ctot  cur
  ts.tasks.push_back({1, 0, 80, 125, 10, 7, 0});
  ts.tasks.push_back({2, 0, 100, 140, 15, 6, 0});
  ts.tasks.push_back({3, 0, 120, 200, 20, 5, 75});
  ts.tasks.push_back({4, 0, 140, 260, 30, 4, 100});
  ts.tasks.push_back({6, 0, 160, 300, 25, 5, 125});
  ts.tasks.push_back({5, 0, 210, 500, 28, 6, 250});
  return ts;
}

/// Known-good task-to-core placement for the reference scenario.
inline Platform reference_platform() {
  Platform pf;
  pf.cores = 4;
  pf.pinned = {{1, 1}, {4, 1}, {2, 2}, {3, 3}, {6, 3}, {5, 4}};
  return pf;
}

/// Expected per-task metric cells (two-decimal display values) for the
/// reference scenario, evaluated at each task's stored snapshot time with
/// the full execution budget remaining.
struct ReferenceMetricsRow {
  int id;
  double weight;
  double lax;
  double nlax;
  double util;
  double util_norm;
};

inline const std::array<ReferenceMetricsRow, 6>& reference_metrics() {
  static const std::array<ReferenceMetricsRow, 6> rows = {{
      {1, 0.88, 45.0, 39.38, 0.64, 0.32},
      {2, 0.90, 40.0, 36.00, 0.71, 0.26},
      {3, 0.83, 5.0, 4.17, 0.60, 0.02},
      {4, 0.86, 20.0, 17.14, 0.54, 0.07},
      {6, 0.78, 15.0, 11.72, 0.53, 0.04},
      {5, 0.80, 40.0, 32.00, 0.42, 0.06},
  }};
  return rows;
}

inline constexpr double kReferenceUMax = 0.32;
inline constexpr double kReferenceFactor = 1.68;
inline constexpr double kReferenceBoundFourCores = 2.528;
inline constexpr double kReferenceTwoCoreBound = 1.5;

/// Per-core average utilisations of the two reference schedules, used to
/// exercise the aggregation arithmetic.
inline const std::array<double, 4>& reference_edf_core_averages() {
  static const std::array<double, 4> v = {0.44, 0.47, 0.43, 0.16};
  return v;
}

inline const std::array<double, 4>& reference_nul_core_averages() {
  static const std::array<double, 4> v = {0.98, 1.19, 0.57, 0.89};
  return v;
}

inline constexpr double kReferenceEdfAvgUtil = 0.38;
inline constexpr double kReferenceNulAvgUtil = 0.91;

}  // namespace nuledf
