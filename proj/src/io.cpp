#include "gradplay/io.hpp"

#include <charconv>
#include <cmath>

namespace gradplay::io {

namespace {

nlohmann::json Pair(const Complex& c) { return nlohmann::json::array({c.real(), c.imag()}); }

nlohmann::json Pairs(const std::vector<Complex>& cs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cs) out.push_back(Pair(c));
  return out;
}

nlohmann::json VectorJson(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

nlohmann::json ToJson(const CriticalPointReport& r) {
  const auto& f = r.flags;
  return {
      {"point", VectorJson(r.point.values())},
      {"omega_norm", r.omega_norm},
      {"eigenvalues", Pairs(r.eigenvalues)},
      {"block_definiteness", r.block_definiteness},
      {"det_jacobian", r.det_jacobian},
      {"tol", r.tol},
      {"zero_threshold", r.zero_threshold},
      {"flags",
       {{"critical", f.is_critical},
        {"dne", f.is_dne},
        {"nddne", f.is_nddne},
        {"lase", f.is_lase},
        {"strict_saddle", f.is_strict_saddle},
        {"non_nash_attractor", f.is_nash_candidate_violation},
        {"degenerate", f.is_degenerate}}},
  };
}

nlohmann::json ToJson(const CycleReport& r) {
  return {
      {"period", r.period},
      {"anchor_point", VectorJson(r.anchor_point.values())},
      {"multipliers", Pairs(r.multipliers)},
      {"trivial_multiplier", Pair(r.trivial_multiplier)},
      {"characteristic_multipliers", Pairs(r.characteristic_multipliers)},
      {"classification", CycleStabilityName(r.classification)},
  };
}

nlohmann::json ToJson(const AvoidanceResult& r, bool include_trials) {
  nlohmann::json j = {
      {"avoidance_rate", r.avoidance_rate},
      {"trials", r.trials},
      {"escaped", r.escaped},
      {"escape_iterations",
       {{"mean", r.escape_iter_mean},
        {"median", r.escape_iter_median},
        {"max", r.escape_iter_max}}},
  };
  if (include_trials) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : r.per_trial) {
      rows.push_back({{"trial", t.trial},
                      {"seed", t.seed},
                      {"status", TerminationName(t.status)},
                      {"iterations", t.iterations},
                      {"final_distance", t.final_distance},
                      {"escaped", t.escaped}});
    }
    j["per_trial"] = std::move(rows);
  }
  return j;
}

nlohmann::json ToJson(const lq::CensusResult& r) {
  return {
      {"q", r.q},
      {"r", r.r},
      {"samples", r.samples},
      {"seed", r.seed},
      {"counts",
       {{"strict_saddle", r.strict_saddle},
        {"lase", r.lase},
        {"degenerate", r.degenerate},
        {"failed", r.failed},
        {"degenerate_or_failed", r.degenerate_or_failed()}}},
      {"frequency", r.frequency()},
  };
}

nlohmann::json ToJson(const lq::CensusRecord& rec) {
  nlohmann::json j = {
      {"index", rec.index},
      {"A", {{rec.A(0, 0), rec.A(0, 1)}, {rec.A(1, 0), rec.A(1, 1)}}},
      {"outcome", lq::OutcomeName(rec.outcome)},
      {"min_real", rec.min_real},
      {"max_real", rec.max_real},
  };
  if (rec.method) {
    j["method"] = *rec.method == lq::NashMethod::kBestResponse ? "best_response"
                                                               : "newton_polish";
  }
  if (!rec.failure.empty()) j["failure"] = rec.failure;
  return j;
}

std::string ReportCsvHeader(int dimension) {
  std::string out;
  for (int k = 1; k <= dimension; ++k) out += "x_" + std::to_string(k) + ",";
  return out + "min_re,max_re,critical,dne,nddne,lase,strict_saddle,degenerate";
}

std::string ReportCsvRow(const CriticalPointReport& r) {
  std::string out;
  for (double v : r.point.values()) out += FormatDouble(v) + ",";
  const auto& f = r.flags;
  auto b = [](bool v) { return v ? "1" : "0"; };
  out += FormatDouble(r.min_real()) + "," + FormatDouble(r.max_real()) + ",";
  out += std::string(b(f.is_critical)) + "," + b(f.is_dne) + "," + b(f.is_nddne) +
         "," + b(f.is_lase) + "," + b(f.is_strict_saddle) + "," + b(f.is_degenerate);
  return out;
}

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (int k = 1; k <= traj.dims.total(); ++k) out << ",x_" << k;
  out << "\n";
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    out << traj.steps[i];
    for (double v : traj.points[i]) out << "," << FormatDouble(v);
    out << "\n";
  }
}

nlohmann::json TrajectorySidecar(const Trajectory& traj, const nlohmann::json& config) {
  return {{"status", TerminationName(traj.status)},
          {"iterations", traj.iterations},
          {"seed", traj.seed},
          {"final_point", VectorJson(traj.final_point())},
          {"config", config}};
}

void WriteAvoidanceCsv(std::ostream& out, const AvoidanceResult& result) {
  out << "trial,seed,status,iterations,final_distance,escaped\n";
  for (const auto& t : result.per_trial) {
    out << t.trial << "," << t.seed << "," << TerminationName(t.status) << ","
        << t.iterations << "," << FormatDouble(t.final_distance) << ","
        << (t.escaped ? 1 : 0) << "\n";
  }
}

void WriteSweepCsv(std::ostream& out, const std::vector<lq::SweepPoint>& points) {
  out << "grid_value,mean_frequency,ci_low,ci_high,failures\n";
  for (const auto& p : points) {
    out << FormatDouble(p.grid_value) << "," << FormatDouble(p.mean_frequency) << ","
        << FormatDouble(p.ci_low) << "," << FormatDouble(p.ci_high) << ","
        << p.failures << "\n";
  }
}

}  // namespace gradplay::io
