#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "check_suite.hpp"
#include "gradplay/census.hpp"
#include "gradplay/cycles.hpp"
#include "gradplay/dynamics.hpp"
#include "gradplay/equilibria.hpp"
#include "gradplay/errors.hpp"
#include "gradplay/families.hpp"
#include "gradplay/io.hpp"

namespace gradplay::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

// Raised when a command finishes but produced non-finite numbers.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

std::vector<double> ParseList(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string token; std::getline(ss, token, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) {
      throw UsageError("--" + what + ": bad number '" + token + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--" + what + ": empty list");
  return out;
}

Vector ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Config JSON values become argv tokens placed before the user's flags, so
// explicit flags win (options take the last value).
std::vector<std::string> ConfigTokens(const json& config) {
  std::vector<std::string> tokens;
  for (const auto& [key, value] : config.items()) {
    if (key == "config" || key == "command") continue;
    if (value.is_null()) continue;
    if (key == "game" && value.is_object()) {
      tokens.push_back("--game-json=" + value.dump());
      continue;
    }
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back("--" + key);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (const auto& v : value) {
        if (!text.empty()) text += ",";
        text += v.is_number() ? io::FormatDouble(v.get<double>()) : v.get<std::string>();
      }
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      text = value.dump();
    } else if (value.is_number()) {
      text = io::FormatDouble(value.get<double>());
    } else if (value.is_string()) {
      text = value.get<std::string>();
    } else {
      text = value.dump();
    }
    // key=value keeps values such as "-1,0" from reading as flags.
    tokens.push_back("--" + key + "=" + text);
  }
  return tokens;
}

json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Resolved option values of a subcommand, typed where possible.
json EchoOptions(const CLI::App& sub) {
  json echo = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "out") continue;
    if (opt->get_type_size() == 0) {
      echo[name] = opt->count() > 0;
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
      if (value.empty()) continue;
    }
    if (name == "game-json") {
      echo["game"] = json::parse(value);
      continue;
    }
    char* end = nullptr;
    const double number = std::strtod(value.c_str(), &end);
    if (end && *end == '\0' && !value.empty() && value.find(',') == std::string::npos &&
        std::isfinite(number)) {
      if (value.find_first_of(".eE") == std::string::npos && std::abs(number) < 9e15) {
        echo[name] = std::stoll(value);
      } else {
        echo[name] = number;
      }
    } else {
      echo[name] = value;
    }
  }
  return echo;
}

struct Options {
  std::string config;
  std::string out_dir = "gradplay-out";
  // game
  std::string family;
  std::string params;
  std::string game_file;
  std::string game_json;
  // classify
  double tol = 1e-9;
  std::string seed_grid = "-2:2:5";
  std::string point;
  // dynamics
  std::string x0;
  std::string gamma = "0.1";
  double lipschitz = 0.0;
  std::int64_t max_iters = 10000;
  double conv_tol = 1e-10;
  double blowup = 1e6;
  std::int64_t stride = 1;
  std::string schedule = "power";
  double c1 = 1.0;
  double eta = 0.75;
  std::string noise;
  double sigma = 0.1;
  std::uint64_t seed = 0;
  // avoidance
  std::string saddle;
  double radius = 0.1;
  int trials = 1000;
  double escape_factor = 10.0;
  // cycle
  double dt = 1e-3;
  double t_max = 200.0;
  double t_transient = 0.0;
  double anchor_tol = 1e-4;
  // lq
  double q = 0.01;
  double r = 0.1;
  int samples = 1000;
  int repeats = 10;
  double h = 1e-5;
  std::string z0 = "identity";
  std::string vary = "r";
  std::string grid = "0.05:1.0:10";
  bool records = false;
  // check
  bool deep = false;
};

class Command {
 public:
  Command(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  Game LoadGame(const Options& o) const {
    const int sources = !o.family.empty() + !o.game_file.empty() + !o.game_json.empty();
    if (sources != 1) {
      throw UsageError("give exactly one of --family, --game-file, --game-json");
    }
    if (!o.family.empty()) {
      try {
        return MakeFamily(o.family, ParseFamilyParams(o.params));
      } catch (const InvalidParameter& e) {
        throw UsageError(std::string("--params: ") + e.what());
      }
    }
    json j;
    if (!o.game_file.empty()) {
      j = LoadJsonFile(o.game_file);
    } else {
      try {
        j = json::parse(o.game_json);
      } catch (const json::exception& e) {
        throw UsageError(std::string("--game-json: ") + e.what());
      }
    }
    return GameFromJson(j);
  }

  StrategyProfile ParsePoint(const Game& game, const std::string& text,
                             const std::string& what) const {
    const auto values = ParseList(text, what);
    if (static_cast<int>(values.size()) != game.dimension()) {
      throw UsageError("--" + what + ": expected " + std::to_string(game.dimension()) +
                       " coordinates");
    }
    return game.profile(ToVector(values));
  }

  std::string Write(const std::string& name, const std::string& contents) {
    fs::create_directories(out_dir_);
    const fs::path path = fs::path(out_dir_) / name;
    std::ofstream f(path, std::ios::binary);
    f << contents;
    f.close();
    if (!f) throw UsageError("cannot write '" + path.string() + "'");
    outputs_.push_back(name);
    return path.string();
  }

  void set_out_dir(std::string dir) { out_dir_ = std::move(dir); }
  const std::string& out_dir() const { return out_dir_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  json& summary() { return summary_; }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::string out_dir_;
  std::vector<std::string> outputs_;
  json summary_ = json::object();
};

void RequireSeed(const CLI::App& sub) {
  if (sub.get_option("--seed")->count() == 0) {
    throw UsageError("--seed is required for stochastic commands");
  }
}

int RunClassify(Command& cmd, const Options& o) {
  if (!(o.tol > 0.0)) throw UsageError("--tol must be > 0");
  const Game game = cmd.LoadGame(o);
  std::vector<StrategyProfile> points;
  if (!o.point.empty()) {
    points.push_back(cmd.ParsePoint(game, o.point, "point"));
  } else {
    std::stringstream ss(o.seed_grid);
    std::vector<std::string> parts;
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("--seed-grid must be lo:hi:count");
    const double lo = ParseList(parts[0], "seed-grid")[0];
    const double hi = ParseList(parts[1], "seed-grid")[0];
    const double n = ParseList(parts[2], "seed-grid")[0];
    if (n < 1 || n != std::floor(n)) throw UsageError("--seed-grid count must be >= 1");
    CriticalPointSearchConfig search;
    search.seeds = GridSeeds(game, lo, hi, static_cast<int>(n));
    points = FindCriticalPoints(game, search);
  }

  json reports = json::array();
  std::string csv = io::ReportCsvHeader(game.dimension()) + "\n";
  for (const auto& p : points) {
    const CriticalPointReport report = Classify(game, p, o.tol);
    reports.push_back(io::ToJson(report));
    csv += io::ReportCsvRow(report) + "\n";
    const auto& f = report.flags;
    cmd.out() << "point (";
    for (int k = 0; k < p.size(); ++k) cmd.out() << (k ? "," : "") << io::FormatDouble(p[k]);
    cmd.out() << "): critical=" << f.is_critical << " dne=" << f.is_dne
              << " nddne=" << f.is_nddne << " lase=" << f.is_lase
              << " strict_saddle=" << f.is_strict_saddle
              << " non_nash_attractor=" << f.is_nash_candidate_violation
              << " degenerate=" << f.is_degenerate << "\n";
  }
  if (points.empty()) cmd.out() << "no critical points found\n";
  cmd.Write("classify.json",
            json{{"game", GameToJson(game)}, {"tol", o.tol}, {"reports", reports}}.dump(2) +
                "\n");
  cmd.Write("classify.csv", csv);
  cmd.summary()["critical_points"] = points.size();
  return kOk;
}

std::optional<NoiseModel> ParseNoise(const Options& o) {
  if (o.noise.empty() || o.noise == "none") return std::nullopt;
  if (o.noise == "gaussian") return NoiseModel::Gaussian(o.sigma);
  if (o.noise == "sphere") return NoiseModel::Sphere(o.sigma);
  if (o.noise == "bandit") return NoiseModel::OnePointBandit(o.sigma);
  throw UsageError("--noise must be none, gaussian, sphere or bandit");
}

StepSchedule ParseSchedule(const Options& o) {
  if (o.schedule == "power") return StepSchedule::Power(o.c1, o.eta);
  if (o.schedule == "constant") {
    const auto g = ParseList(o.gamma, "gamma");
    if (g.size() != 1) throw UsageError("--gamma: stochastic runs share a single rate");
    return StepSchedule::Constant(g[0]);
  }
  throw UsageError("--schedule must be constant or power");
}

LearningRates ParseRates(const Game& game, const Options& o) {
  const auto g = ParseList(o.gamma, "gamma");
  std::optional<double> L;
  if (o.lipschitz > 0.0) L = o.lipschitz;
  if (g.size() == 1) return LearningRates(Vector::Constant(game.players(), g[0]), L);
  if (static_cast<int>(g.size()) != game.players()) {
    throw UsageError("--gamma: give one rate or one per player");
  }
  return LearningRates(ToVector(g), L);
}

int RunSimulate(Command& cmd, const Options& o, const CLI::App& sub) {
  const Game game = cmd.LoadGame(o);
  if (o.x0.empty()) throw UsageError("--x0 is required");
  const StrategyProfile x0 = cmd.ParsePoint(game, o.x0, "x0");
  SimulationOptions sim;
  sim.max_iters = o.max_iters;
  sim.conv_tol = o.conv_tol;
  sim.blowup = o.blowup;
  sim.record_stride = o.stride;

  const auto noise = ParseNoise(o);
  Trajectory traj;
  if (noise) {
    RequireSeed(sub);
    traj = SimulateStochastic(game, x0, ParseSchedule(o), *noise, sim, o.seed);
  } else {
    traj = SimulateDeterministic(game, x0, ParseRates(game, o), sim);
  }
  std::ostringstream csv;
  io::WriteTrajectoryCsv(csv, traj);
  cmd.Write("trajectory.csv", csv.str());
  cmd.Write("trajectory.json",
            io::TrajectorySidecar(traj, EchoOptions(sub)).dump(2) + "\n");
  cmd.out() << "status=" << TerminationName(traj.status)
            << " iterations=" << traj.iterations << "\n";
  cmd.summary()["status"] = TerminationName(traj.status);
  if (!traj.final_point().allFinite()) {
    throw NumericalFailure("trajectory produced non-finite values");
  }
  return kOk;
}

int RunAvoidance(Command& cmd, const Options& o, const CLI::App& sub) {
  RequireSeed(sub);
  const Game game = cmd.LoadGame(o);
  AvoidanceConfig config;
  config.saddle = o.saddle.empty() ? game.profile(Vector::Zero(game.dimension()))
                                   : cmd.ParsePoint(game, o.saddle, "saddle");
  config.radius = o.radius;
  config.trials = o.trials;
  config.seed = o.seed;
  config.escape_factor = o.escape_factor;
  config.max_iters = o.max_iters;
  config.blowup = o.blowup;
  config.noise = ParseNoise(o);
  if (config.noise) {
    config.step = ParseSchedule(o);
  } else {
    config.step = ParseRates(game, o);
  }
  const AvoidanceResult result = SaddleAvoidanceExperiment(game, config);
  json j = io::ToJson(result);
  j["seed"] = o.seed;
  j["config"] = EchoOptions(sub);
  cmd.Write("avoidance.json", j.dump(2) + "\n");
  std::ostringstream csv;
  io::WriteAvoidanceCsv(csv, result);
  cmd.Write("avoidance_trials.csv", csv.str());
  cmd.out() << "avoidance_rate=" << io::FormatDouble(result.avoidance_rate)
            << " trials=" << result.trials << "\n";
  cmd.summary()["avoidance_rate"] = result.avoidance_rate;
  return kOk;
}

int RunCycle(Command& cmd, const Options& o) {
  const Game game = cmd.LoadGame(o);
  if (o.x0.empty()) throw UsageError("--x0 is required");
  CycleOptions options;
  options.dt = o.dt;
  options.t_max = o.t_max;
  options.t_transient = o.t_transient;
  options.anchor_tol = o.anchor_tol;
  const auto report = DetectLimitCycle(game, cmd.ParsePoint(game, o.x0, "x0"), options);
  json j = {{"detected", report.has_value()}};
  if (report) {
    j["cycle"] = io::ToJson(*report);
    cmd.out() << "cycle detected: period=" << io::FormatDouble(report->period)
              << " classification=" << CycleStabilityName(report->classification) << "\n";
  } else {
    j["cycle"] = nullptr;
    cmd.out() << "no cycle detected\n";
  }
  cmd.Write("cycle.json", j.dump(2) + "\n");
  cmd.summary()["detected"] = report.has_value();
  return kOk;
}

lq::Mat2 ParseZ0(const std::string& text) {
  if (text == "identity") return lq::Mat2::Identity();
  const auto v = ParseList(text, "z0");
  if (v.size() != 4) throw UsageError("--z0 must be 'identity' or four numbers");
  lq::Mat2 m;
  m << v[0], v[1], v[2], v[3];
  return m;
}

lq::CensusConfig BaseCensus(const Options& o) {
  lq::CensusConfig c;
  c.q = o.q;
  c.r = o.r;
  c.samples = o.samples;
  c.seed = o.seed;
  c.h = o.h;
  c.Z0 = ParseZ0(o.z0);
  c.keep_records = o.records;
  return c;
}

std::string RecordsJsonl(const lq::CensusResult& result, const json& prefix) {
  std::string out;
  for (const auto& rec : result.records) {
    json j = prefix;
    j.update(io::ToJson(rec));
    out += j.dump() + "\n";
  }
  return out;
}

int RunLqCensus(Command& cmd, const Options& o, const CLI::App& sub) {
  RequireSeed(sub);
  const lq::CensusResult result = lq::SampleCensus(BaseCensus(o));
  json j = io::ToJson(result);
  j["config"] = EchoOptions(sub);
  cmd.Write("census.json", j.dump(2) + "\n");
  if (o.records) cmd.Write("census_records.jsonl", RecordsJsonl(result, json::object()));
  cmd.out() << "strict_saddle=" << result.strict_saddle << " lase=" << result.lase
            << " degenerate=" << result.degenerate << " failed=" << result.failed
            << " frequency=" << io::FormatDouble(result.frequency()) << "\n";
  cmd.summary()["frequency"] = result.frequency();
  cmd.summary()["failed"] = result.failed;
  return kOk;
}

int RunLqSweep(Command& cmd, const Options& o, const CLI::App& sub) {
  RequireSeed(sub);
  lq::SweepConfig sweep;
  if (o.vary == "q") {
    sweep.vary = lq::SweepAxis::kQ;
    sweep.fixed_other = o.r;
  } else if (o.vary == "r") {
    sweep.vary = lq::SweepAxis::kR;
    sweep.fixed_other = o.q;
  } else {
    throw UsageError("--vary must be q or r");
  }
  try {
    sweep.grid = lq::ParseGrid(o.grid);
  } catch (const InvalidParameter& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
  sweep.samples = o.samples;
  sweep.repeats = o.repeats;
  sweep.seed = o.seed;
  sweep.base = BaseCensus(o);
  const auto points = lq::CensusSweep(sweep);

  std::ostringstream csv;
  io::WriteSweepCsv(csv, points);
  cmd.Write("sweep.csv", csv.str());
  json runs = json::array();
  std::string records;
  int failures = 0;
  for (const auto& p : points) {
    json jp = {{"grid_value", p.grid_value},
               {"mean_frequency", p.mean_frequency},
               {"ci_low", p.ci_low},
               {"ci_high", p.ci_high},
               {"failures", p.failures},
               {"runs", json::array()}};
    for (std::size_t k = 0; k < p.runs.size(); ++k) {
      jp["runs"].push_back(io::ToJson(p.runs[k]));
      if (o.records) {
        records += RecordsJsonl(p.runs[k], {{"grid_value", p.grid_value}, {"repeat", k}});
      }
    }
    failures += p.failures;
    runs.push_back(std::move(jp));
    cmd.out() << o.vary << "=" << io::FormatDouble(p.grid_value)
              << " mean_frequency=" << io::FormatDouble(p.mean_frequency) << " ci=["
              << io::FormatDouble(p.ci_low) << "," << io::FormatDouble(p.ci_high)
              << "] failures=" << p.failures << "\n";
  }
  cmd.Write("sweep.json", json{{"points", runs}, {"config", EchoOptions(sub)}}.dump(2) + "\n");
  if (o.records) cmd.Write("sweep_records.jsonl", records);
  cmd.summary()["failures"] = failures;
  return kOk;
}

int RunCheck(Command& cmd, const Options& o) {
  if (!(o.tol > 0.0)) throw UsageError("--tol must be > 0");
  const auto results = RunCheckSuite(o.tol, o.deep);
  json rows = json::array();
  bool all = true;
  for (const auto& r : results) {
    cmd.out() << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) cmd.out() << "  (" << r.detail << ")";
    cmd.out() << "\n";
    rows.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
  }
  cmd.Write("check.json", json{{"checks", rows}, {"all_passed", all}}.dump(2) + "\n");
  cmd.summary()["all_passed"] = all;
  if (!all) throw NumericalFailure("self-check failed");
  return kOk;
}

std::string Timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

}  // namespace

std::string FileSha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> commands = {"classify", "simulate",  "avoidance", "cycle",
                                             "lq-census", "lq-sweep", "check"};
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    out << "usage: gradplay <command> [options]\ncommands:";
    for (const auto& c : commands) out << " " << c;
    out << "\nrun 'gradplay <command> --help' for command options\n";
    return args.empty() ? kUsage : kOk;
  }
  if (args[0] == "--version") {
    out << "gradplay " << kToolVersion << "\n";
    return kOk;
  }
  const std::string command = args[0];
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    err << "error: unknown command '" << command << "'\n";
    return kUsage;
  }

  Options o;
  Command cmd(out, err);
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = Timestamp();
  json echo = json::object();
  int code = kOk;
  std::string message;

  try {
    // Config file values go first so explicit flags override them.
    std::vector<std::string> tokens;
    for (std::size_t k = 1; k < args.size(); ++k) {
      if (args[k] == "--config" && k + 1 < args.size()) {
        json config = LoadJsonFile(args[k + 1]);
        if (config.contains("config") && config.contains("tool")) {
          if (config.value("command", command) != command) {
            throw UsageError("--config: manifest is for '" +
                             config["command"].get<std::string>() + "', not '" + command +
                             "'");
          }
          config = config["config"];
        }
        if (!config.is_object()) throw UsageError("--config must hold a JSON object");
        tokens = ConfigTokens(config);
      }
    }
    for (std::size_t k = 1; k < args.size(); ++k) tokens.push_back(args[k]);

    CLI::App app{"gradplay " + command};
    app.set_help_flag("--help", "Print command options");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.option_defaults()->always_capture_default();
    CLI::App& sub = app;
    sub.add_option("--config", o.config, "JSON config; flags override its fields");
    sub.add_option("--out", o.out_dir, "Output directory");

    auto add_game = [&] {
      sub.add_option("--family", o.family, "Built-in family name");
      sub.add_option("--params", o.params, "Family parameters, e.g. a=1,b=2,c=1");
      sub.add_option("--game-file", o.game_file, "Game JSON file");
      sub.add_option("--game-json", o.game_json, "Inline game JSON");
    };
    auto add_dynamics = [&] {
      sub.add_option("--gamma", o.gamma, "Learning rate(s), one or one per player");
      sub.add_option("--lipschitz", o.lipschitz, "Lipschitz bound L; enforces gamma < 1/L");
      sub.add_option("--max-iters", o.max_iters);
      sub.add_option("--blowup", o.blowup);
      sub.add_option("--schedule", o.schedule, "constant or power (stochastic runs)");
      sub.add_option("--c1", o.c1);
      sub.add_option("--eta", o.eta);
      sub.add_option("--noise", o.noise, "none, gaussian, sphere or bandit");
      sub.add_option("--sigma", o.sigma, "Noise scale / sphere radius / bandit delta");
      sub.add_option("--seed", o.seed);
    };
    auto add_census = [&] {
      sub.add_option("--q", o.q);
      sub.add_option("--r", o.r);
      sub.add_option("--samples", o.samples);
      sub.add_option("--seed", o.seed);
      sub.add_option("--h", o.h, "Finite-difference step for the game Jacobian");
      sub.add_option("--z0", o.z0, "'identity' or four numbers (row-major)");
      sub.add_flag("--records", o.records, "Write per-game JSONL records");
    };

    if (command == "classify") {
      add_game();
      sub.add_option("--tol", o.tol);
      sub.add_option("--seed-grid", o.seed_grid, "Newton seeds lo:hi:count per axis");
      sub.add_option("--point", o.point, "Classify this point instead of searching");
    } else if (command == "simulate") {
      add_game();
      add_dynamics();
      sub.add_option("--x0", o.x0);
      sub.add_option("--conv-tol", o.conv_tol);
      sub.add_option("--stride", o.stride);
    } else if (command == "avoidance") {
      add_game();
      add_dynamics();
      sub.add_option("--saddle", o.saddle, "Saddle point (default: origin)");
      sub.add_option("--radius", o.radius);
      sub.add_option("--trials", o.trials);
      sub.add_option("--escape-factor", o.escape_factor);
    } else if (command == "cycle") {
      add_game();
      sub.add_option("--x0", o.x0);
      sub.add_option("--dt", o.dt);
      sub.add_option("--t-max", o.t_max);
      sub.add_option("--t-transient", o.t_transient);
      sub.add_option("--anchor-tol", o.anchor_tol);
    } else if (command == "lq-census") {
      add_census();
    } else if (command == "lq-sweep") {
      add_census();
      sub.add_option("--vary", o.vary, "q or r");
      sub.add_option("--grid", o.grid, "lo:hi:count (half-open) or a comma list");
      sub.add_option("--repeats", o.repeats);
    } else if (command == "check") {
      sub.add_option("--tol", o.tol);
      sub.add_flag("--deep", o.deep, "Add the Monte-Carlo suites");
    }

    std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      throw UsageError(e.what());
    }
    cmd.set_out_dir(o.out_dir);
    echo = EchoOptions(sub);

    if (command == "classify") code = RunClassify(cmd, o);
    else if (command == "simulate") code = RunSimulate(cmd, o, sub);
    else if (command == "avoidance") code = RunAvoidance(cmd, o, sub);
    else if (command == "cycle") code = RunCycle(cmd, o);
    else if (command == "lq-census") code = RunLqCensus(cmd, o, sub);
    else if (command == "lq-sweep") code = RunLqSweep(cmd, o, sub);
    else code = RunCheck(cmd, o);
  } catch (const UsageError& e) {
    code = kUsage;
    message = e.what();
  } catch (const InvalidParameter& e) {
    code = kUsage;
    message = e.what();
  } catch (const DimensionError& e) {
    code = kUsage;
    message = e.what();
  } catch (const SolverFailure& e) {
    code = kSolverFailure;
    message = std::string(e.what()) + " (residual " + io::FormatDouble(e.residual()) + ")";
  } catch (const Error& e) {
    code = kNumericalFailure;
    message = e.what();
  } catch (const fs::filesystem_error& e) {
    code = kUsage;
    message = e.what();
  }
  if (!message.empty()) err << "error: " << message << "\n";

  if (!cmd.out_dir().empty()) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json digests = json::object();
    for (const auto& name : cmd.outputs()) {
      digests[name] = FileSha256((fs::path(cmd.out_dir()) / name).string());
    }
    const json manifest = {
        {"tool", "gradplay"},
        {"version", kToolVersion},
        {"command", command},
        {"config", echo},
        {"out_dir", cmd.out_dir()},
        {"started_at", started_at},
        {"duration_seconds", seconds},
        {"exit_code", code},
        {"error", message},
        {"summary", cmd.summary()},
        {"outputs", digests},
    };
    try {
      fs::create_directories(cmd.out_dir());
      std::ofstream f(fs::path(cmd.out_dir()) / "manifest.json");
      f << manifest.dump(2) << "\n";
    } catch (const std::exception& e) {
      err << "error: cannot write manifest: " << e.what() << "\n";
      if (code == kOk) code = kUsage;
    }
  }
  return code;
}

}  // namespace gradplay::cli
