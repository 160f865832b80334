#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "cirlab/experiments.hpp"
#include "cirlab/model.hpp"
#include "cirlab/paths.hpp"
#include "cirlab/sampling.hpp"
#include "cirlab/schemes.hpp"

namespace py = pybind11;
using namespace cirlab;

PYBIND11_MODULE(cirlab, m) {
  m.doc() = "Monte Carlo laboratory for strong approximation of CIR / squared Bessel processes";

  // model ---------------------------------------------------------------
  py::class_<CirParams>(m, "CirParams")
      .def(py::init<double, double, double, double, double>(), py::arg("a"), py::arg("b"),
           py::arg("sigma"), py::arg("x0"), py::arg("T"))
      .def_readonly("a", &CirParams::a)
      .def_readonly("b", &CirParams::b)
      .def_readonly("sigma", &CirParams::sigma)
      .def_readonly("x0", &CirParams::x0)
      .def_readonly("T", &CirParams::T)
      .def("__repr__", [](const CirParams& p) {
        return "CirParams(a=" + std::to_string(p.a) + ", b=" + std::to_string(p.b) +
               ", sigma=" + std::to_string(p.sigma) + ", x0=" + std::to_string(p.x0) +
               ", T=" + std::to_string(p.T) + ")";
      });

  py::class_<BesselParams>(m, "BesselParams")
      .def(py::init<double, double, double>(), py::arg("delta"), py::arg("b"), py::arg("z0"))
      .def_readonly("delta", &BesselParams::delta)
      .def_readonly("b", &BesselParams::b)
      .def_readonly("z0", &BesselParams::z0)
      .def("__repr__", [](const BesselParams& p) {
        return "BesselParams(delta=" + std::to_string(p.delta) + ", b=" + std::to_string(p.b) +
               ", z0=" + std::to_string(p.z0) + ")";
      });

  py::enum_<FellerClass>(m, "FellerClass")
      .value("HitsZeroAlmostSurely", FellerClass::HitsZeroAlmostSurely)
      .value("NeverHitsZero", FellerClass::NeverHitsZero);

  py::class_<BesselTransform>(m, "BesselTransform")
      .def_readonly("params", &BesselTransform::params)
      .def_readonly("space_scale", &BesselTransform::space_scale)
      .def_readonly("time_scale", &BesselTransform::time_scale);

  m.def("delta_of", &delta_of, py::arg("cir"));
  m.def("to_bessel", &to_bessel, py::arg("cir"));
  m.def("to_cir", &to_cir, py::arg("transform"));
  m.def("mean_at", &mean_at, py::arg("params"), py::arg("t"));
  m.def("cir_mean_at", &cir_mean_at, py::arg("params"), py::arg("t"));
  m.def("l1_distance_exact", &l1_distance_exact, py::arg("z1"), py::arg("z2"), py::arg("b"),
        py::arg("t"));
  m.def("feller_class", &feller_class, py::arg("delta"));
  m.def("chi_moment", &chi_moment, py::arg("delta"));
  m.def("hitting_tail_shape", &hitting_tail_shape, py::arg("z"), py::arg("r"), py::arg("delta"));

  // sampling ------------------------------------------------------------
  py::class_<SeedSpec>(m, "SeedSpec")
      .def(py::init([](std::uint64_t root, std::uint64_t stream, std::uint64_t rep) {
             return SeedSpec{root, stream, rep};
           }),
           py::arg("root_seed") = 0, py::arg("stream_id") = 0, py::arg("replication_index") = 0)
      .def_readonly("root_seed", &SeedSpec::root_seed)
      .def_readonly("stream_id", &SeedSpec::stream_id)
      .def_readonly("replication_index", &SeedSpec::replication_index);

  py::class_<Generator>(m, "Generator")
      .def(py::init<const SeedSpec&>(), py::arg("seed"))
      .def("next_u64", &Generator::next_u64)
      .def("uniform01", &Generator::uniform01);

  m.def("derive", &derive, py::arg("seed"));
  m.def("std_normal", &std_normal, py::arg("generator"));
  m.def("gamma", &cirlab::gamma, py::arg("generator"), py::arg("shape"));
  m.def("poisson", &poisson, py::arg("generator"), py::arg("mean"));
  m.def("noncentral_chisq", &noncentral_chisq, py::arg("generator"), py::arg("df"),
        py::arg("noncentrality"));
  m.def("exact_bessel_transition", &exact_bessel_transition, py::arg("generator"), py::arg("z"),
        py::arg("params"), py::arg("dt"));

  // paths ----------------------------------------------------------------
  py::class_<GridPath>(m, "GridPath")
      .def(py::init([](double t0, double dt, std::vector<double> values) {
             return GridPath{t0, dt, std::move(values)};
           }),
           py::arg("t0") = 0.0, py::arg("dt") = 1.0, py::arg("values") = std::vector<double>{0.0})
      .def_readonly("t0", &GridPath::t0)
      .def_readonly("dt", &GridPath::dt)
      .def_readonly("values", &GridPath::values)
      .def("n_steps", &GridPath::n_steps)
      .def("time", &GridPath::time, py::arg("i"))
      .def("terminal", &GridPath::terminal);

  py::class_<BridgePath>(m, "BridgePath")
      .def(py::init([](std::vector<double> values) { return BridgePath{std::move(values)}; }),
           py::arg("values"))
      .def_readonly("values", &BridgePath::values)
      .def("n_steps", &BridgePath::n_steps);

  py::enum_<CellMarker>(m, "CellMarker")
      .value("Triangle", CellMarker::Triangle)
      .value("Box", CellMarker::Box);

  m.def("sample_bm", &sample_bm, py::arg("generator"), py::arg("n_steps"), py::arg("dt"));
  m.def("bridge_cov", &bridge_cov, py::arg("s"), py::arg("t"), py::arg("T"));
  m.def("sample_bridge", &sample_bridge, py::arg("generator"), py::arg("n_steps"));
  m.def("bm_from_bridge", &bm_from_bridge, py::arg("w_T"), py::arg("bridge"), py::arg("T"));
  m.def(
      "grid_ceil_offsets",
      [](std::size_t n, double t) {
        const GridOffsets o = grid_ceil_offsets(n, t);
        return py::make_tuple(o.tau1, o.tau2);
      },
      py::arg("n"), py::arg("t"));
  m.def("perturb_first_cell", &perturb_first_cell, py::arg("w"), py::arg("f"), py::arg("n"),
        py::arg("marker"));
  m.def("concat_with_cell", &concat_with_cell, py::arg("r"), py::arg("w1"), py::arg("w_tri"),
        py::arg("w2"), py::arg("f"), py::arg("n"), py::arg("marker"));
  m.def("refine", &refine, py::arg("generator"), py::arg("w"), py::arg("factor"));
  m.def("scale_path", &scale_path, py::arg("w"), py::arg("c"));

  // schemes ---------------------------------------------------------------
  py::enum_<SchemeKind>(m, "SchemeKind")
      .value("EulerFullTruncation", SchemeKind::EulerFullTruncation)
      .value("DriftImplicitSqrt", SchemeKind::DriftImplicitSqrt)
      .value("TruncatedMilstein", SchemeKind::TruncatedMilstein)
      .value("ExactTransition", SchemeKind::ExactTransition);

  py::class_<SdeCoeffs>(m, "SdeCoeffs")
      .def(py::init<double, double, double>(), py::arg("a"), py::arg("b"), py::arg("sigma"))
      .def_static("of_bessel", [](const BesselParams& p) { return SdeCoeffs::of(p); })
      .def_static("of_cir", [](const CirParams& p) { return SdeCoeffs::of(p); })
      .def_readonly("a", &SdeCoeffs::a)
      .def_readonly("b", &SdeCoeffs::b)
      .def_readonly("sigma", &SdeCoeffs::sigma);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("terminal_value", &SolveResult::terminal_value)
      .def_readonly("path", &SolveResult::path)
      .def_readonly("zero_hit_time", &SolveResult::zero_hit_time);

  m.def("validate_scheme", &validate_scheme, py::arg("kind"), py::arg("coeffs"));
  m.def("step", &step, py::arg("kind"), py::arg("coeffs"), py::arg("x"), py::arg("dW"),
        py::arg("dt"));
  m.def("exact_step", &exact_step, py::arg("generator"), py::arg("coeffs"), py::arg("x"),
        py::arg("dt"));
  m.def(
      "solve_path",
      [](SchemeKind kind, const SdeCoeffs& c, double x0, const GridPath& driver, bool record_path,
         std::optional<double> zero_threshold, Generator* exact_rng) {
        SolveOptions opt;
        opt.record_path = record_path;
        opt.zero_threshold = zero_threshold;
        return solve_path(kind, c, x0, driver, opt, exact_rng);
      },
      py::arg("kind"), py::arg("coeffs"), py::arg("x0"), py::arg("driver"),
      py::arg("record_path") = false, py::arg("zero_threshold") = std::nullopt,
      py::arg("exact_rng") = nullptr);
  m.def("reference_solve", &reference_solve, py::arg("coeffs"), py::arg("x0"),
        py::arg("coarse_driver"), py::arg("refine_factor"), py::arg("generator"));

  // experiments -------------------------------------------------------------
  py::class_<ErrorEstimate>(m, "ErrorEstimate")
      .def_readonly("n_grid", &ErrorEstimate::n_grid)
      .def_readonly("mean_abs_error", &ErrorEstimate::mean_abs_error)
      .def_readonly("std_error", &ErrorEstimate::std_error)
      .def_readonly("reps", &ErrorEstimate::reps)
      .def_readonly("seed", &ErrorEstimate::seed);

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("slope", &RateFit::slope)
      .def_readonly("intercept", &RateFit::intercept)
      .def_readonly("r_squared", &RateFit::r_squared)
      .def_readonly("n_points", &RateFit::n_points);

  py::enum_<CouplingVariant>(m, "CouplingVariant")
      .value("FullConditionalRefill", CouplingVariant::FullConditionalRefill)
      .value("SingleCellAfterZeroHit", CouplingVariant::SingleCellAfterZeroHit);

  py::class_<MonteCarloEstimate>(m, "MonteCarloEstimate")
      .def_readonly("mean", &MonteCarloEstimate::mean)
      .def_readonly("std_error", &MonteCarloEstimate::std_error)
      .def_readonly("reps", &MonteCarloEstimate::reps);

  py::class_<HitProbability>(m, "HitProbability")
      .def_readonly("eps", &HitProbability::eps)
      .def_readonly("estimate", &HitProbability::estimate)
      .def_readonly("std_error", &HitProbability::std_error)
      .def_readonly("reps", &HitProbability::reps);

  m.def("strong_error", &strong_error, py::arg("kind"), py::arg("params"), py::arg("n_grid"),
        py::arg("reps"), py::arg("refine_factor"), py::arg("seed"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("lower_bound_coupling", &lower_bound_coupling, py::arg("params"), py::arg("n_grid"),
        py::arg("reps"), py::arg("fine_factor"), py::arg("variant"), py::arg("seed"),
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("hitting_probability", &hitting_probability, py::arg("params"), py::arg("eps"),
        py::arg("T"), py::arg("reps"), py::arg("mesh"), py::arg("seed"), py::arg("threads") = 0,
        py::arg("zero_threshold") = std::nullopt, py::call_guard<py::gil_scoped_release>());
  m.def("zero_hit_fraction", &zero_hit_fraction, py::arg("params"), py::arg("T"), py::arg("mesh"),
        py::arg("zero_threshold"), py::arg("kind"), py::arg("reps"), py::arg("seed"),
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("mc_mean_exact", &mc_mean_exact, py::arg("params"), py::arg("t"), py::arg("reps"),
        py::arg("seed"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("l1_distance_mc", &l1_distance_mc, py::arg("delta"), py::arg("b"), py::arg("z1"),
        py::arg("z2"), py::arg("t"), py::arg("mesh"), py::arg("reps"), py::arg("seed"),
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("fit_rate", &fit_rate, py::arg("points"));
  m.def(
      "first_zero_hit",
      [](const SolveResult& r) { return first_zero_hit(r); }, py::arg("result"));
}
