#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cirlab/experiments.hpp"
#include "cirlab/model.hpp"
#include "cirlab/parallel.hpp"
#include "cirlab/paths.hpp"
#include "cirlab/schemes.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace cirlab;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SchemeKind parse_scheme(const std::string& name) {
  if (name == "euler-ft") return SchemeKind::EulerFullTruncation;
  if (name == "drift-implicit") return SchemeKind::DriftImplicitSqrt;
  if (name == "truncated-milstein") return SchemeKind::TruncatedMilstein;
  if (name == "exact") return SchemeKind::ExactTransition;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (euler-ft, drift-implicit, truncated-milstein, exact)");
}

CouplingVariant parse_variant(const std::string& name) {
  if (name == "full-refill") return CouplingVariant::FullConditionalRefill;
  if (name == "single-cell") return CouplingVariant::SingleCellAfterZeroHit;
  throw std::invalid_argument("unknown variant '" + name + "' (full-refill, single-cell)");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument(std::string(what) + ": bad entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

std::vector<std::size_t> parse_grid_list(const std::string& text) {
  const auto raw = parse_list(text, "--N");
  std::vector<std::size_t> out;
  double prev = 0.0;
  for (const double v : raw) {
    if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument("--N entries must be integers >= 1");
    if (v <= prev) throw std::invalid_argument("--N must be strictly increasing");
    prev = v;
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// Parameter bundle shared by every subcommand: either the CIR or the squared
// Bessel parameterization, never both. All computation runs in the
// normalized Bessel form on [0, 1]; outputs scale back by 1/rho.
struct ParamOpts {
  std::optional<double> a, sigma, x0, T;
  std::optional<double> delta, z0;
  double b = 0.0;
};

struct Model {
  BesselParams bessel{1.0, 0.0, 0.0};
  double rho = 1.0;
  double time_scale = 1.0;
  bool from_cir = false;
};

void add_param_options(CLI::App* cmd, ParamOpts& opts) {
  cmd->add_option("--a", opts.a, "CIR drift constant a > 0");
  cmd->add_option("--sigma", opts.sigma, "CIR diffusion coefficient sigma > 0");
  cmd->add_option("--x0", opts.x0, "CIR initial value (default 0)");
  cmd->add_option("--T", opts.T, "CIR horizon (default 1)");
  cmd->add_option("--delta", opts.delta, "squared Bessel dimension delta > 0");
  cmd->add_option("--z0", opts.z0, "squared Bessel initial value (default 0)");
  cmd->add_option("--b", opts.b, "mean-reversion / drift rate (default 0)");
}

Model resolve_params(const ParamOpts& opts) {
  const bool cir_given = opts.a || opts.sigma || opts.x0 || opts.T;
  const bool bessel_given = opts.delta || opts.z0;
  if (cir_given && bessel_given) {
    throw std::invalid_argument("give either the CIR (--a/--sigma/--x0/--T) or the Bessel "
                                "(--delta/--z0) parameterization, not both");
  }
  Model m;
  if (cir_given) {
    if (!opts.a || !opts.sigma) throw std::invalid_argument("CIR parameterization needs --a and --sigma");
    const CirParams cir(*opts.a, opts.b, *opts.sigma, opts.x0.value_or(0.0), opts.T.value_or(1.0));
    const BesselTransform bt = to_bessel(cir);
    m.bessel = bt.params;
    m.rho = bt.space_scale;
    m.time_scale = bt.time_scale;
    m.from_cir = true;
  } else if (opts.delta) {
    m.bessel = BesselParams(*opts.delta, opts.b, opts.z0.value_or(0.0));
  } else {
    throw std::invalid_argument("missing parameters: give --delta (Bessel) or --a/--sigma (CIR)");
  }
  return m;
}

json params_json(const Model& m) {
  json j;
  j["delta"] = m.bessel.delta;
  j["b"] = m.bessel.b;
  j["z0"] = m.bessel.z0;
  j["space_scale"] = m.rho;
  j["time_scale"] = m.time_scale;
  j["from_cir"] = m.from_cir;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

std::string sidecar_path(const std::string& out_path) {
  const auto dot = out_path.find_last_of('.');
  const auto slash = out_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return out_path + ".json";
  }
  return out_path.substr(0, dot) + ".json";
}

// format: csv -> CSV at --out; json -> JSON at --out; both -> CSV at --out
// plus a .json sidecar. Without --out everything goes to stdout.
void emit_outputs(const std::string& csv, const json& summary, const std::string& out_path,
                  const std::string& format) {
  if (format != "csv" && format != "json" && format != "both") {
    throw std::invalid_argument("--format must be csv, json or both");
  }
  const std::string json_text = summary.dump(2) + "\n";
  if (out_path.empty()) {
    if (format == "csv" || format == "both") std::cout << csv;
    if (format == "json" || format == "both") std::cout << json_text;
    return;
  }
  if (format == "csv") {
    write_text(out_path, csv);
  } else if (format == "json") {
    write_text(out_path, json_text);
  } else {
    write_text(out_path, csv);
    write_text(sidecar_path(out_path), json_text);
  }
}

struct FitSettings {
  std::size_t drop_smallest = 1;
};

std::optional<RateFit> fit_points(const std::vector<std::pair<double, double>>& points,
                                  std::size_t drop, std::string& note) {
  if (points.size() <= drop + 2) {
    note = "not enough points for a rate fit";
    return std::nullopt;
  }
  std::vector<std::pair<double, double>> kept(points.begin() + static_cast<long>(drop),
                                              points.end());
  return fit_rate(kept);
}

json fit_json(const std::optional<RateFit>& fit, std::size_t drop, const std::string& note) {
  json j;
  if (fit) {
    j["slope"] = fit->slope;
    j["intercept"] = fit->intercept;
    j["r_squared"] = fit->r_squared;
    j["n_points"] = fit->n_points;
  } else {
    j["note"] = note;
  }
  j["dropped_smallest_n"] = drop;
  return j;
}

int run_rate_experiment(const Model& m, const std::vector<std::size_t>& grids, std::size_t reps,
                        std::uint64_t seed, const FitSettings& fit_cfg,
                        const std::string& out_path, const std::string& format, json config,
                        const std::function<ErrorEstimate(std::size_t)>& estimator) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string csv = "n_grid,reps,mean_abs_error,std_error\n";
  std::vector<std::pair<double, double>> points;
  json point_rows = json::array();
  for (const std::size_t n : grids) {
    const ErrorEstimate e = estimator(n);
    const double err = e.mean_abs_error / m.rho;
    const double se = e.std_error / m.rho;
    csv += std::to_string(e.n_grid) + "," + std::to_string(e.reps) + "," + fmt17(err) + "," +
           fmt17(se) + "\n";
    points.emplace_back(static_cast<double>(e.n_grid), err);
    point_rows.push_back(
        {{"n_grid", e.n_grid}, {"reps", e.reps}, {"mean_abs_error", err}, {"std_error", se}});
    std::cerr << "N=" << n << "  mean_abs_error=" << err << "  std_error=" << se << "\n";
  }
  std::string note;
  const auto fit = fit_points(points, fit_cfg.drop_smallest, note);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json summary;
  config["reps"] = reps;
  summary["config"] = std::move(config);
  summary["points"] = point_rows;
  summary["fit"] = fit_json(fit, fit_cfg.drop_smallest, note);
  summary["runtime_seconds"] = runtime;
  summary["seed"] = seed;
  emit_outputs(csv, summary, out_path, format);
  if (fit) {
    std::cerr << "fitted slope=" << fit->slope << "  r_squared=" << fit->r_squared << "\n";
  }
  return 0;
}

int cmd_moments(const Model& m, double t, std::size_t reps, std::uint64_t seed, unsigned threads) {
  // t is given in user time units; the sampler runs in normalized time.
  const double tau = t / m.time_scale;
  const double closed = mean_at(m.bessel, tau) / m.rho;
  const auto est = mc_mean_exact(m.bessel, tau, reps, seed, threads);
  const double mc = est.mean / m.rho;
  const double se = est.std_error / m.rho;
  const double z = se > 0.0 ? (mc - closed) / se : 0.0;
  std::cout << "closed_form_mean=" << fmt17(closed) << "\n";
  std::cout << "mc_mean=" << fmt17(mc) << " std_error=" << fmt17(se) << " reps=" << reps << "\n";
  std::cout << "z_score=" << fmt17(z) << "\n";
  return 0;
}

int cmd_simulate(const Model& m, std::size_t steps, SchemeKind kind, std::uint64_t seed,
                 const std::string& out_path) {
  Generator g_driver = derive(SeedSpec{seed, experiment_stream(0x10, steps, 1), 0});
  const GridPath driver = sample_bm(g_driver, steps, 1.0 / static_cast<double>(steps));
  SolveOptions opt;
  opt.record_path = true;
  Generator g_exact = derive(SeedSpec{seed, experiment_stream(0x10, steps, 2), 0});
  const SolveResult r = solve_path(kind, SdeCoeffs::of(m.bessel), m.bessel.z0, driver, opt,
                                   kind == SchemeKind::ExactTransition ? &g_exact : nullptr);
  GridPath solution = *r.path;
  // back to user units
  for (double& v : solution.values) v /= m.rho;
  solution.dt *= m.time_scale;
  std::ostringstream csv;
  write_csv(solution, csv);
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out_path, csv.str());
  }
  if (r.zero_hit_time) {
    std::cerr << "first_zero_hit=" << fmt17(*r.zero_hit_time * m.time_scale) << "\n";
  }
  return 0;
}

int cmd_hitting(const Model& m, const std::vector<double>& eps_list, std::size_t reps, double mesh,
                std::optional<double> threshold, std::uint64_t seed, unsigned threads,
                std::size_t drop, const std::string& out_path, const std::string& format,
                json config) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string csv = "eps,reps,prob_estimate,std_error\n";
  std::vector<std::pair<double, double>> points;
  json point_rows = json::array();
  for (const double eps : eps_list) {
    const HitProbability h = hitting_probability(m.bessel, eps, 1.0, reps, mesh, seed, threads,
                                                 threshold);
    csv += fmt17(h.eps) + "," + std::to_string(h.reps) + "," + fmt17(h.estimate) + "," +
           fmt17(h.std_error) + "\n";
    if (h.estimate > 0.0) points.emplace_back(h.eps, h.estimate);
    point_rows.push_back({{"eps", h.eps},
                          {"reps", h.reps},
                          {"prob_estimate", h.estimate},
                          {"std_error", h.std_error}});
    std::cerr << "eps=" << eps << "  prob=" << h.estimate << "  std_error=" << h.std_error << "\n";
  }
  std::string note;
  std::optional<RateFit> fit;
  if (points.size() == eps_list.size()) {
    fit = fit_points(points, drop, note);
  } else {
    note = "zero estimates present; no log-log fit";
  }
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json summary;
  summary["config"] = std::move(config);
  summary["points"] = point_rows;
  summary["fit"] = fit_json(fit, drop, note);
  summary["runtime_seconds"] = runtime;
  summary["seed"] = seed;
  emit_outputs(csv, summary, out_path, format);
  if (fit) std::cerr << "fitted slope=" << fit->slope << "\n";
  return 0;
}

bool report(const char* name, bool ok) {
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
  return ok;
}

int cmd_selftest(unsigned threads) {
  bool all = true;

  all &= report("closed-form moment examples", [] {
    const bool m1 = mean_at(BesselParams(1.0, 0.0, 1.0), 1.0) == 2.0;
    const bool m2 = std::abs(mean_at(BesselParams(1.0, 1.0, 0.0), 1.0) - 0.6321205588285577) < 1e-15;
    const bool l1 = std::abs(l1_distance_exact(3.0, 1.0, 1.0, 1.0) - 0.7357588823428847) < 1e-15;
    const bool cm = std::abs(chi_moment(1.0) - 0.7978845608028655) < 1e-12;
    return m1 && m2 && l1 && cm;
  }());

  all &= report("reparameterization round trip", [] {
    const CirParams cir(0.7, 1.3, 1.9, 0.4, 2.5);
    const CirParams back = to_cir(to_bessel(cir));
    return std::abs(back.a - cir.a) < 1e-14 && std::abs(back.sigma - cir.sigma) < 1e-14 &&
           std::abs(back.x0 - cir.x0) < 1e-14 && back.T == cir.T;
  }());

  all &= report("exact sampler matches the closed-form mean", [&] {
    const BesselParams p(1.0, 1.0, 0.0);
    const auto est = mc_mean_exact(p, 1.0, 100000, 2024, threads);
    return std::abs(est.mean - mean_at(p, 1.0)) < 4.0 * est.std_error;
  }());

  all &= report("coupled drivers agree at grid points (20 random configurations)", [] {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      Generator g = derive(SeedSpec{77, 1, rep});
      const std::size_t n = 4, sub = 4;
      const double mesh = 1.0 / 16.0;
      const std::size_t cell = rep % 4;
      GridPath w1 = cell == 0 ? GridPath{0.0, mesh, {0.0}} : sample_bm(g, cell * sub, mesh);
      const GridPath w_tri = sample_bm(g, sub, mesh);
      const GridPath w2 = sample_bm(g, 2 * sub, mesh);
      const BridgePath f = sample_bridge(g, sub);
      const double r = static_cast<double>(cell) / static_cast<double>(n);
      const auto tri = concat_with_cell(r, w1, w_tri, w2, f, n, CellMarker::Triangle);
      const auto box = concat_with_cell(r, w1, w_tri, w2, f, n, CellMarker::Box);
      for (std::size_t k = 0; k * sub < tri.values.size(); ++k) {
        if (tri.values[k * sub] != box.values[k * sub]) return false;
      }
    }
    return true;
  }());

  all &= report("strong error vanishes on the reference mesh", [] {
    const ErrorEstimate e =
        strong_error(SchemeKind::TruncatedMilstein, BesselParams(1.0, 0.0, 0.0), 8, 100, 1, 3);
    return e.mean_abs_error == 0.0;
  }());

  all &= report("replication results do not depend on the thread count", [] {
    const BesselParams p(0.5, 0.0, 0.0);
    const ErrorEstimate a = strong_error(SchemeKind::TruncatedMilstein, p, 8, 400, 8, 7, 1);
    const ErrorEstimate b = strong_error(SchemeKind::TruncatedMilstein, p, 8, 400, 8, 7, 4);
    return a.mean_abs_error == b.mean_abs_error && a.std_error == b.std_error;
  }());

  all &= report("coupled lower bound is positive", [&] {
    const ErrorEstimate e = lower_bound_coupling(BesselParams(0.5, 0.0, 0.0), 8, 2000, 16,
                                                 CouplingVariant::FullConditionalRefill, 5,
                                                 threads);
    return e.mean_abs_error > 3.0 * e.std_error;
  }());

  all &= report("rate fit recovers an exact power law", [] {
    const RateFit f = fit_rate({{8.0, std::pow(8.0, -0.5)},
                                {16.0, std::pow(16.0, -0.5)},
                                {32.0, std::pow(32.0, -0.5)}});
    return std::abs(f.slope + 0.5) < 1e-12 && std::abs(f.r_squared - 1.0) < 1e-12;
  }());

  if (!all) {
    std::cerr << "selftest failed\n";
    return 2;
  }
  std::cout << "selftest passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cirlab: Monte Carlo laboratory for strong approximation of CIR / squared "
               "Bessel processes"};
  app.require_subcommand(1);

  ParamOpts params;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out_path;
  std::string format = "both";
  FitSettings fit_cfg;

  // moments
  auto* moments = app.add_subcommand("moments", "closed-form mean vs Monte Carlo");
  double moments_t = 1.0;
  std::size_t moments_reps = 1000000;
  add_param_options(moments, params);
  moments->add_option("--t", moments_t, "evaluation time (default 1)");
  moments->add_option("--reps", moments_reps, "replications (default 1e6)");
  moments->add_option("--seed", seed, "root seed (default 0)");
  moments->add_option("--threads", threads, "worker threads, 0 = auto");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "write one solution path as CSV");
  std::size_t sim_steps = 256;
  std::string sim_scheme = "truncated-milstein";
  add_param_options(simulate, params);
  simulate->add_option("--N", sim_steps, "grid steps (default 256)");
  simulate->add_option("--scheme", sim_scheme, "stepping scheme");
  simulate->add_option("--seed", seed, "root seed");
  simulate->add_option("--out", out_path, "output CSV path (default stdout)");

  // convergence
  auto* convergence = app.add_subcommand("convergence", "strong error against N plus rate fit");
  std::string conv_grids;
  std::size_t conv_reps = 20000;
  std::size_t conv_refine = 64;
  std::string conv_scheme = "truncated-milstein";
  add_param_options(convergence, params);
  convergence->add_option("--N", conv_grids, "comma list of grid sizes, strictly increasing")
      ->required();
  convergence->add_option("--reps", conv_reps, "replications per N (default 20000)");
  convergence->add_option("--refine", conv_refine, "reference refinement factor (default 64)");
  convergence->add_option("--scheme", conv_scheme, "scheme under test");
  convergence->add_option("--seed", seed, "root seed");
  convergence->add_option("--threads", threads, "worker threads, 0 = auto");
  convergence->add_option("--drop-smallest", fit_cfg.drop_smallest,
                          "points dropped from the small-N end before fitting (default 1)");
  convergence->add_option("--out", out_path, "output CSV path");
  convergence->add_option("--format", format, "csv, json or both (default both)");

  // lower-bound
  auto* lower = app.add_subcommand("lower-bound", "coupled lower-bound estimates plus rate fit");
  std::string lower_grids;
  std::size_t lower_reps = 20000;
  std::size_t lower_fine = 64;
  std::string lower_variant = "full-refill";
  add_param_options(lower, params);
  lower->add_option("--N", lower_grids, "comma list of grid sizes, strictly increasing")
      ->required();
  lower->add_option("--reps", lower_reps, "replications per N (default 20000)");
  lower->add_option("--fine-factor", lower_fine, "fine mesh factor (default 64)");
  lower->add_option("--variant", lower_variant, "full-refill or single-cell");
  lower->add_option("--seed", seed, "root seed");
  lower->add_option("--threads", threads, "worker threads, 0 = auto");
  lower->add_option("--drop-smallest", fit_cfg.drop_smallest,
                    "points dropped from the small-N end before fitting (default 1)");
  lower->add_option("--out", out_path, "output CSV path");
  lower->add_option("--format", format, "csv, json or both (default both)");

  // hitting
  auto* hitting = app.add_subcommand("hitting", "survival probabilities over an eps list");
  std::string hit_eps;
  std::size_t hit_reps = 20000;
  double hit_mesh = 1.0 / 4096.0;
  std::optional<double> hit_threshold;
  add_param_options(hitting, params);
  hitting->add_option("--eps", hit_eps, "comma list of window starts in (0, 1]")->required();
  hitting->add_option("--reps", hit_reps, "replications per eps (default 20000)");
  hitting->add_option("--mesh", hit_mesh, "solver mesh on [0, 1] (default 2^-12)");
  hitting->add_option("--zero-threshold", hit_threshold,
                      "zero detection threshold (default: the mesh)");
  hitting->add_option("--seed", seed, "root seed");
  hitting->add_option("--threads", threads, "worker threads, 0 = auto");
  hitting->add_option("--drop-smallest", fit_cfg.drop_smallest,
                      "points dropped from the small-eps end before fitting (default 1)");
  hitting->add_option("--out", out_path, "output CSV path");
  hitting->add_option("--format", format, "csv, json or both (default both)");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite at reduced scale");
  selftest->add_option("--threads", threads, "worker threads, 0 = auto");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  // Validation phase: bad parameter combinations exit 1.
  Model model;
  SchemeKind conv_kind = SchemeKind::TruncatedMilstein;
  SchemeKind sim_kind = SchemeKind::TruncatedMilstein;
  CouplingVariant variant = CouplingVariant::FullConditionalRefill;
  std::vector<std::size_t> grids;
  std::vector<double> eps_list;
  try {
    if (!selftest->parsed()) model = resolve_params(params);
    if (format != "csv" && format != "json" && format != "both") {
      throw std::invalid_argument("--format must be csv, json or both");
    }
    if (convergence->parsed()) {
      conv_kind = parse_scheme(conv_scheme);
      validate_scheme(conv_kind, SdeCoeffs::of(model.bessel));
      grids = parse_grid_list(conv_grids);
    }
    if (lower->parsed()) {
      grids = parse_grid_list(lower_grids);
      variant = parse_variant(lower_variant);
    }
    if (simulate->parsed()) {
      sim_kind = parse_scheme(sim_scheme);
      validate_scheme(sim_kind, SdeCoeffs::of(model.bessel));
      if (sim_steps < 1) throw std::invalid_argument("--N must be >= 1");
    }
    if (hitting->parsed()) {
      eps_list = parse_list(hit_eps, "--eps");
      for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0 && eps_list[i] <= 1.0)) {
          throw std::invalid_argument("--eps entries must lie in (0, 1]");
        }
        if (i > 0 && eps_list[i] <= eps_list[i - 1]) {
          throw std::invalid_argument("--eps must be strictly increasing");
        }
      }
      if (model.bessel.delta >= 2.0) {
        throw std::invalid_argument(
            "hitting requires delta < 2: for delta >= 2 the process never reaches zero");
      }
      if (model.bessel.z0 != 0.0) throw std::invalid_argument("hitting requires z0 = 0");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  // Execution phase: numerical failures exit 2.
  try {
    if (moments->parsed()) return cmd_moments(model, moments_t, moments_reps, seed, threads);
    if (simulate->parsed()) return cmd_simulate(model, sim_steps, sim_kind, seed, out_path);
    if (selftest->parsed()) return cmd_selftest(threads);

    if (convergence->parsed()) {
      if (conv_kind == SchemeKind::ExactTransition) {
        std::cerr << "note: the exact-transition scheme is not pathwise-coupled to the driver; "
                     "the measured quantity will not converge to zero\n";
      }
      json config;
      config["subcommand"] = "convergence";
      config["params"] = params_json(model);
      config["N"] = grids;
      config["scheme"] = conv_scheme;
      config["refine"] = conv_refine;
      config["format"] = format;
      config["out"] = out_path;
      return run_rate_experiment(model, grids, conv_reps, seed, fit_cfg, out_path,
                                 format, std::move(config), [&](std::size_t n) {
                                   return strong_error(conv_kind, model.bessel, n, conv_reps,
                                                       conv_refine, seed, threads);
                                 });
    }
    if (lower->parsed()) {
      json config;
      config["subcommand"] = "lower-bound";
      config["params"] = params_json(model);
      config["N"] = grids;
      config["variant"] = lower_variant;
      config["fine_factor"] = lower_fine;
      config["format"] = format;
      config["out"] = out_path;
      return run_rate_experiment(model, grids, lower_reps, seed, fit_cfg, out_path,
                                 format, std::move(config), [&](std::size_t n) {
                                   return lower_bound_coupling(model.bessel, n, lower_reps,
                                                               lower_fine, variant, seed,
                                                               threads);
                                 });
    }
    if (hitting->parsed()) {
      json config;
      config["subcommand"] = "hitting";
      config["params"] = params_json(model);
      config["eps"] = eps_list;
      config["reps"] = hit_reps;
      config["mesh"] = hit_mesh;
      if (hit_threshold) {
        config["zero_threshold"] = *hit_threshold;
      } else {
        config["zero_threshold"] = hit_mesh;
      }
      config["format"] = format;
      config["out"] = out_path;
      return cmd_hitting(model, eps_list, hit_reps, hit_mesh, hit_threshold, seed, threads,
                         fit_cfg.drop_smallest, out_path, format, std::move(config));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
