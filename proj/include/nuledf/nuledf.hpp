#pragma once

#include "nuledf/engine.hpp"
#include "nuledf/metrics.hpp"
#include "nuledf/model.hpp"
#include "nuledf/policies.hpp"
#include "nuledf/reference_case.hpp"
#include "nuledf/report.hpp"
#include "nuledf/workload.hpp"
