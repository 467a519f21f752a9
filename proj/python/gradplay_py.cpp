#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gradplay/census.hpp"
#include "gradplay/cycles.hpp"
#include "gradplay/dynamics.hpp"
#include "gradplay/equilibria.hpp"
#include "gradplay/errors.hpp"
#include "gradplay/families.hpp"
#include "gradplay/io.hpp"
#include "gradplay/lq_game.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace gradplay;
using io::ToJson;

namespace {

py::object ToPython(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

StrategyProfile At(const Game& g, const Vector& x) { return g.profile(x); }

py::dict TrajectoryDict(const Trajectory& t) {
  Matrix pts(static_cast<Eigen::Index>(t.points.size()), t.dims.total());
  for (std::size_t k = 0; k < t.points.size(); ++k)
    pts.row(static_cast<Eigen::Index>(k)) = t.points[k].transpose();
  return py::dict("steps"_a = t.steps, "points"_a = pts,
                  "status"_a = TerminationName(t.status), "iterations"_a = t.iterations);
}

}  // namespace

PYBIND11_MODULE(gradplay, m) {
  m.doc() = "Gradient play in continuous games";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ConditioningError>(m, "ConditioningError", PyExc_ArithmeticError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

  py::class_<Game>(m, "Game")
      .def_property_readonly("players", &Game::players)
      .def_property_readonly("dimension", &Game::dimension)
      .def_property_readonly("label", &Game::label)
      .def("cost", [](const Game& g, int i, const Vector& x) { return g.cost(i, At(g, x)); },
           "player"_a, "x"_a)
      .def("omega", [](const Game& g, const Vector& x) { return g.omega(At(g, x)); }, "x"_a)
      .def("jacobian", [](const Game& g, const Vector& x) { return g.jacobian(At(g, x)); },
           "x"_a)
      .def("to_json", [](const Game& g) { return ToPython(GameToJson(g)); })
      .def("__repr__", [](const Game& g) { return "<Game " + g.label() + ">"; });

  m.def("families", &FamilyNames);
  m.def("family", [](const std::string& spec) { return MakeFamilyFromSpec(spec); }, "spec"_a,
        "Game from a spec such as \"potential-quadratic:a=1,b=2,c=1\".");
  m.def("quadratic_general_sum", &MakeQuadraticGeneralSum, "a"_a, "b"_a, "c"_a, "d"_a);
  m.def("quadratic_zero_sum", &MakeQuadraticZeroSum, "a"_a, "b"_a, "c"_a);
  m.def("quadratic_potential", &MakeQuadraticPotential, "a"_a, "b"_a, "c"_a);
  m.def("morse_smale_chain", &MakeMorseSmaleChain, "n"_a);
  m.def("van_der_pol", &MakeVanDerPolGame, "mu"_a);
  m.def("game_from_json", [](const py::object& obj) {
    const std::string text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return GameFromJson(nlohmann::json::parse(text));
  });

  m.def("classify",
        [](const Game& g, const Vector& x, double tol) {
          return ToPython(ToJson(Classify(g, At(g, x), tol)));
        },
        "game"_a, "x"_a, "tol"_a = 1e-9);

  m.def("simulate",
        [](const Game& g, const Vector& x0, double gamma, std::int64_t max_iters,
           double conv_tol) {
          SimulationOptions opt;
          opt.max_iters = max_iters;
          opt.conv_tol = conv_tol;
          return TrajectoryDict(SimulateDeterministic(
              g, At(g, x0), LearningRates::Uniform(g.players(), gamma), opt));
        },
        "game"_a, "x0"_a, "gamma"_a = 0.1, "max_iters"_a = 10000, "conv_tol"_a = 1e-10);

  m.def("simulate_stochastic",
        [](const Game& g, const Vector& x0, std::uint64_t seed, double c1, double eta,
           double sigma, std::int64_t max_iters, double conv_tol) {
          SimulationOptions opt;
          opt.max_iters = max_iters;
          opt.conv_tol = conv_tol;
          return TrajectoryDict(SimulateStochastic(g, At(g, x0), StepSchedule::Power(c1, eta),
                                                   NoiseModel::Gaussian(sigma), opt, seed));
        },
        "game"_a, "x0"_a, "seed"_a, "c1"_a = 1.0, "eta"_a = 0.75, "sigma"_a = 0.1,
        "max_iters"_a = 10000, "conv_tol"_a = 0.0);

  m.def("avoidance",
        [](const Game& g, const Vector& saddle, std::uint64_t seed, double radius,
           double gamma, int trials) {
          AvoidanceConfig cfg;
          cfg.saddle = At(g, saddle);
          cfg.radius = radius;
          cfg.step = LearningRates::Uniform(g.players(), gamma);
          cfg.trials = trials;
          cfg.seed = seed;
          return ToPython(ToJson(SaddleAvoidanceExperiment(g, cfg)));
        },
        "game"_a, "saddle"_a, "seed"_a, "radius"_a = 0.1, "gamma"_a = 0.1,
        "trials"_a = 1000);

  m.def("detect_cycle",
        [](const Game& g, const Vector& x0, double t_max) -> py::object {
          CycleOptions opt;
          opt.t_max = t_max;
          const auto r = DetectLimitCycle(g, At(g, x0), opt);
          if (!r) return py::none();
          return ToPython(ToJson(*r));
        },
        "game"_a, "x0"_a, "t_max"_a = 200.0);

  m.def("lyapunov_iterations",
        [](const lq::Mat2& A, double q, double r) {
          const auto s = lq::LyapunovIterations(lq::MakeCensusGame(A, q, r));
          return py::dict("K1"_a = Eigen::RowVector2d(s.policy.K1),
                          "K2"_a = Eigen::RowVector2d(s.policy.K2), "P1"_a = s.P1,
                          "P2"_a = s.P2,
                          "method"_a = s.method == lq::NashMethod::kBestResponse
                                           ? "best_response"
                                           : "newton_polish",
                          "iterations"_a = s.iterations, "residuals"_a = s.residuals,
                          "gradient_norm"_a = s.gradient_norm,
                          "closed_loop_radius"_a = s.closed_loop_radius);
        },
        "A"_a, "q"_a = 0.01, "r"_a = 0.1,
        "Feedback Nash gains of the census game with dynamics matrix A.");

  m.def("sample_census",
        [](double q, double r, int samples, std::uint64_t seed) {
          lq::CensusConfig cfg;
          cfg.q = q;
          cfg.r = r;
          cfg.samples = samples;
          cfg.seed = seed;
          return ToPython(ToJson(lq::SampleCensus(cfg)));
        },
        "q"_a = 0.01, "r"_a = 0.1, "samples"_a = 1000, "seed"_a = 0);
}
