#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gradplay/census.hpp"
#include "gradplay/cycles.hpp"
#include "gradplay/dynamics.hpp"
#include "gradplay/equilibria.hpp"

namespace gradplay::io {

// Reports: eigenvalues as [re, im] pairs, flags as booleans.
nlohmann::json ToJson(const CriticalPointReport& report);
nlohmann::json ToJson(const CycleReport& report);
nlohmann::json ToJson(const AvoidanceResult& result, bool include_trials = false);
nlohmann::json ToJson(const lq::CensusResult& result);
nlohmann::json ToJson(const lq::CensusRecord& record);

/// Batch census row: x_1..x_m, min/max eigenvalue real parts, flags.
std::string ReportCsvHeader(int dimension);
std::string ReportCsvRow(const CriticalPointReport& report);

/// `t,x_1,...,x_m` followed by one row per stored iterate.
void WriteTrajectoryCsv(std::ostream& out, const Trajectory& traj);
nlohmann::json TrajectorySidecar(const Trajectory& traj, const nlohmann::json& config);

void WriteAvoidanceCsv(std::ostream& out, const AvoidanceResult& result);

/// `grid_value,mean_frequency,ci_low,ci_high,failures`
void WriteSweepCsv(std::ostream& out, const std::vector<lq::SweepPoint>& points);

/// Shortest round-trip decimal form of a double.
std::string FormatDouble(double v);

}  // namespace gradplay::io
