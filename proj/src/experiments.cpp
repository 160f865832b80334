#include "cirlab/experiments.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cirlab/parallel.hpp"
#include "cirlab/paths.hpp"
#include "cirlab/sampling.hpp"

namespace cirlab {

namespace {

constexpr std::uint64_t kExpStrong = 0x01;
constexpr std::uint64_t kExpLower = 0x02;
constexpr std::uint64_t kExpHitting = 0x03;
constexpr std::uint64_t kExpMoments = 0x04;
constexpr std::uint64_t kExpHitFraction = 0x05;
constexpr std::uint64_t kExpL1 = 0x06;

constexpr std::uint64_t kPurposeDriver = 0x01;
constexpr std::uint64_t kPurposeRefineA = 0x02;
constexpr std::uint64_t kPurposeRefineB = 0x03;
constexpr std::uint64_t kPurposeCellBridge = 0x04;
constexpr std::uint64_t kPurposeExact = 0x05;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Neumaier-compensated serial sum over an index-ordered buffer; the result
// does not depend on how the buffer was filled.
double stable_sum(const std::vector<double>& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (const double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

MonteCarloEstimate summarize(const std::vector<double>& v) {
  const auto n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) {
      throw std::runtime_error("replication " + std::to_string(i) +
                               " produced a non-finite value");
    }
  }
  const double mean = stable_sum(v) / static_cast<double>(n);
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return MonteCarloEstimate{mean, sd / std::sqrt(static_cast<double>(n)), n};
}

SeedSpec seed_for(std::uint64_t root, std::uint64_t experiment, std::uint64_t tag,
                  std::uint64_t purpose, std::size_t rep) {
  return SeedSpec{root, experiment_stream(experiment, tag, purpose),
                  static_cast<std::uint64_t>(rep)};
}

// Walks the scheme along on-the-fly Brownian increments and reports whether
// any grid value at a time >= window_start is <= threshold. Early exit keeps
// hitting runs cheap.
bool grid_hits_threshold(Generator& g, const SdeCoeffs& c, SchemeKind kind, double x0,
                         std::size_t steps, double dt, double threshold,
                         std::size_t window_start_index) {
  const double root_dt = std::sqrt(dt);
  double x = x0;
  if (window_start_index == 0 && x <= threshold) return true;
  for (std::size_t i = 1; i <= steps; ++i) {
    x = step(kind, c, x, root_dt * std_normal(g), dt);
    if (!std::isfinite(x)) throw std::runtime_error("non-finite value in hitting walk");
    if (i >= window_start_index && x <= threshold) return true;
  }
  return false;
}

}  // namespace

std::uint64_t experiment_stream(std::uint64_t experiment, std::uint64_t tag,
                                std::uint64_t purpose) {
  return mix64(mix64(mix64(experiment) ^ tag) ^ purpose);
}

ErrorEstimate strong_error(SchemeKind kind, const BesselParams& p, std::size_t n_grid,
                           std::size_t reps, std::size_t refine_factor, std::uint64_t seed,
                           unsigned threads) {
  if (n_grid < 1) throw std::invalid_argument("strong_error: n_grid must be >= 1");
  if (reps < 2) throw std::invalid_argument("strong_error: reps must be >= 2");
  if (refine_factor < 1) throw std::invalid_argument("strong_error: refine_factor must be >= 1");
  const SdeCoeffs coeffs = SdeCoeffs::of(p);
  validate_scheme(kind, coeffs);
  const double dt = 1.0 / static_cast<double>(n_grid);

  std::vector<double> diffs(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Generator g_driver = derive(seed_for(seed, kExpStrong, n_grid, kPurposeDriver, i));
    const GridPath coarse = sample_bm(g_driver, n_grid, dt);
    double approx;
    if (kind == SchemeKind::ExactTransition) {
      Generator g_exact = derive(seed_for(seed, kExpStrong, n_grid, kPurposeExact, i));
      approx = solve_path(kind, coeffs, p.z0, coarse, {}, &g_exact).terminal_value;
    } else {
      approx = solve_path(kind, coeffs, p.z0, coarse).terminal_value;
    }
    Generator g_refine = derive(seed_for(seed, kExpStrong, n_grid, kPurposeRefineA, i));
    const double reference = reference_solve(coeffs, p.z0, coarse, refine_factor, g_refine);
    diffs[i] = std::abs(approx - reference);
  });

  const MonteCarloEstimate est = summarize(diffs);
  return ErrorEstimate{n_grid, est.mean, est.std_error, reps, seed};
}

namespace {

double coupled_difference_full_refill(const BesselParams& p, const SdeCoeffs& coeffs,
                                      std::size_t n_grid, std::size_t fine_factor,
                                      std::uint64_t seed, std::size_t rep) {
  Generator g_driver = derive(seed_for(seed, kExpLower, n_grid, kPurposeDriver, rep));
  const GridPath coarse = sample_bm(g_driver, n_grid, 1.0 / static_cast<double>(n_grid));
  Generator g_a = derive(seed_for(seed, kExpLower, n_grid, kPurposeRefineA, rep));
  Generator g_b = derive(seed_for(seed, kExpLower, n_grid, kPurposeRefineB, rep));
  const GridPath fine_a = refine(g_a, coarse, fine_factor);
  const GridPath fine_b = refine(g_b, coarse, fine_factor);
  const double za = solve_path(SchemeKind::TruncatedMilstein, coeffs, p.z0, fine_a).terminal_value;
  const double zb = solve_path(SchemeKind::TruncatedMilstein, coeffs, p.z0, fine_b).terminal_value;
  return 0.5 * std::abs(za - zb);
}

double coupled_difference_single_cell(const BesselParams& p, const SdeCoeffs& coeffs,
                                      std::size_t n_grid, std::size_t fine_factor,
                                      std::uint64_t seed, std::size_t rep) {
  Generator g_driver = derive(seed_for(seed, kExpLower, n_grid, kPurposeDriver, rep));
  const GridPath coarse = sample_bm(g_driver, n_grid, 1.0 / static_cast<double>(n_grid));
  Generator g_a = derive(seed_for(seed, kExpLower, n_grid, kPurposeRefineA, rep));
  const GridPath fine = refine(g_a, coarse, fine_factor);
  const double mesh = fine.dt;

  // A grid walk cannot witness sub-mesh excursions, so the zero detector
  // runs at the mesh scale.
  SolveOptions probe_opt;
  probe_opt.zero_threshold = mesh;
  const SolveResult probe =
      solve_path(SchemeKind::TruncatedMilstein, coeffs, p.z0, fine, probe_opt);
  if (!probe.zero_hit_time) return 0.0;

  const auto hit_index = static_cast<std::size_t>(std::llround(*probe.zero_hit_time / mesh));
  // The perturbation needs one full coarse cell ending no later than T; a
  // hit after T - 2/N leaves no room and the replication contributes zero.
  if (n_grid < 2 || hit_index > (n_grid - 2) * fine_factor) return 0.0;
  const std::size_t cell = (hit_index + fine_factor - 1) / fine_factor;
  const std::size_t start = cell * fine_factor;

  GridPath w1{0.0, mesh, {fine.values.begin(), fine.values.begin() + static_cast<long>(start + 1)}};
  GridPath w_tri{0.0, mesh, std::vector<double>(fine_factor + 1)};
  const double base = fine.values[start];
  for (std::size_t j = 0; j <= fine_factor; ++j) {
    w_tri.values[j] = fine.values[start + j] - base;
  }
  const std::size_t tail_begin = start + fine_factor;
  GridPath w2{0.0, mesh, std::vector<double>(fine.values.size() - tail_begin)};
  const double tail_base = fine.values[tail_begin];
  for (std::size_t j = 0; j < w2.values.size(); ++j) {
    w2.values[j] = fine.values[tail_begin + j] - tail_base;
  }
  w1.values[0] = 0.0;
  w_tri.values[0] = 0.0;
  w2.values[0] = 0.0;

  Generator g_cell = derive(seed_for(seed, kExpLower, n_grid, kPurposeCellBridge, rep));
  const BridgePath f = sample_bridge(g_cell, fine_factor);
  const double r = static_cast<double>(cell) / static_cast<double>(n_grid);
  const GridPath w_triangle =
      concat_with_cell(r, w1, w_tri, w2, f, n_grid, CellMarker::Triangle);
  const GridPath w_box = concat_with_cell(r, w1, w_tri, w2, f, n_grid, CellMarker::Box);
  const double za =
      solve_path(SchemeKind::TruncatedMilstein, coeffs, p.z0, w_triangle).terminal_value;
  const double zb = solve_path(SchemeKind::TruncatedMilstein, coeffs, p.z0, w_box).terminal_value;
  return 0.5 * std::abs(za - zb);
}

}  // namespace

ErrorEstimate lower_bound_coupling(const BesselParams& p, std::size_t n_grid, std::size_t reps,
                                   std::size_t fine_factor, CouplingVariant variant,
                                   std::uint64_t seed, unsigned threads) {
  if (n_grid < 1) throw std::invalid_argument("lower_bound_coupling: n_grid must be >= 1");
  if (reps < 2) throw std::invalid_argument("lower_bound_coupling: reps must be >= 2");
  if (fine_factor < 2) throw std::invalid_argument("lower_bound_coupling: fine_factor must be >= 2");
  const SdeCoeffs coeffs = SdeCoeffs::of(p);

  std::vector<double> diffs(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    diffs[i] = variant == CouplingVariant::FullConditionalRefill
                   ? coupled_difference_full_refill(p, coeffs, n_grid, fine_factor, seed, i)
                   : coupled_difference_single_cell(p, coeffs, n_grid, fine_factor, seed, i);
  });

  const MonteCarloEstimate est = summarize(diffs);
  return ErrorEstimate{n_grid, est.mean, est.std_error, reps, seed};
}

HitProbability hitting_probability(const BesselParams& p, double eps, double T, std::size_t reps,
                                   double mesh, std::uint64_t seed, unsigned threads,
                                   std::optional<double> zero_threshold) {
  if (p.delta >= 2.0) {
    throw std::invalid_argument(
        "hitting_probability: requires delta < 2 (for delta >= 2 the process never reaches "
        "zero and the survival probability is identically 1)");
  }
  if (p.z0 != 0.0) throw std::invalid_argument("hitting_probability: requires z0 = 0");
  if (!(eps > 0.0 && eps <= T)) throw std::invalid_argument("hitting_probability: need 0 < eps <= T");
  if (!(mesh > 0.0)) throw std::invalid_argument("hitting_probability: mesh must be > 0");
  if (reps < 2) throw std::invalid_argument("hitting_probability: reps must be >= 2");
  const double threshold = zero_threshold ? *zero_threshold : mesh;
  const SdeCoeffs coeffs = SdeCoeffs::of(p);
  const auto steps = static_cast<std::size_t>(std::llround(T / mesh));
  const auto window = static_cast<std::size_t>(std::ceil(eps / mesh - 1e-12));
  const std::uint64_t tag = std::bit_cast<std::uint64_t>(eps);

  std::vector<double> survived(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Generator g = derive(seed_for(seed, kExpHitting, tag, kPurposeDriver, i));
    const bool hit = grid_hits_threshold(g, coeffs, SchemeKind::TruncatedMilstein, p.z0, steps,
                                         mesh, threshold, window);
    survived[i] = hit ? 0.0 : 1.0;
  });

  const MonteCarloEstimate est = summarize(survived);
  return HitProbability{eps, est.mean, est.std_error, reps};
}

MonteCarloEstimate zero_hit_fraction(const BesselParams& p, double T, double mesh,
                                     double zero_threshold, SchemeKind kind, std::size_t reps,
                                     std::uint64_t seed, unsigned threads) {
  if (!(T > 0.0) || !(mesh > 0.0)) {
    throw std::invalid_argument("zero_hit_fraction: T and mesh must be > 0");
  }
  if (reps < 2) throw std::invalid_argument("zero_hit_fraction: reps must be >= 2");
  const SdeCoeffs coeffs = SdeCoeffs::of(p);
  validate_scheme(kind, coeffs);
  const auto steps = static_cast<std::size_t>(std::llround(T / mesh));

  std::vector<double> hits(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Generator g = derive(seed_for(seed, kExpHitFraction, 0, kPurposeDriver, i));
    Generator g_exact = derive(seed_for(seed, kExpHitFraction, 0, kPurposeExact, i));
    bool hit;
    if (kind == SchemeKind::ExactTransition) {
      double x = p.z0;
      hit = x <= zero_threshold;
      for (std::size_t k = 0; k < steps && !hit; ++k) {
        x = exact_step(g_exact, coeffs, x, mesh);
        hit = x <= zero_threshold;
      }
    } else {
      hit = grid_hits_threshold(g, coeffs, kind, p.z0, steps, mesh, zero_threshold, 0);
    }
    hits[i] = hit ? 1.0 : 0.0;
  });
  return summarize(hits);
}

MonteCarloEstimate mc_mean_exact(const BesselParams& p, double t, std::size_t reps,
                                 std::uint64_t seed, unsigned threads) {
  if (!(t > 0.0)) throw std::invalid_argument("mc_mean_exact: t must be > 0");
  if (reps < 2) throw std::invalid_argument("mc_mean_exact: reps must be >= 2");
  std::vector<double> samples(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Generator g = derive(seed_for(seed, kExpMoments, 0, kPurposeExact, i));
    samples[i] = exact_bessel_transition(g, p.z0, p, t);
  });
  return summarize(samples);
}

MonteCarloEstimate l1_distance_mc(double delta, double b, double z1, double z2, double t,
                                  double mesh, std::size_t reps, std::uint64_t seed,
                                  unsigned threads) {
  if (!(t > 0.0) || !(mesh > 0.0)) throw std::invalid_argument("l1_distance_mc: t, mesh > 0");
  if (reps < 2) throw std::invalid_argument("l1_distance_mc: reps must be >= 2");
  const SdeCoeffs coeffs(delta, b, 2.0);
  const auto steps = static_cast<std::size_t>(std::llround(t / mesh));

  std::vector<double> diffs(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Generator g = derive(seed_for(seed, kExpL1, 0, kPurposeDriver, i));
    const double root_dt = std::sqrt(mesh);
    double xa = z1;
    double xb = z2;
    for (std::size_t k = 0; k < steps; ++k) {
      const double dW = root_dt * std_normal(g);
      xa = step(SchemeKind::TruncatedMilstein, coeffs, xa, dW, mesh);
      xb = step(SchemeKind::TruncatedMilstein, coeffs, xb, dW, mesh);
    }
    diffs[i] = std::abs(xa - xb);
  });
  return summarize(diffs);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_rate: needs at least 3 points");
  for (const auto& [n, error] : points) {
    if (!(n > 0.0)) throw std::invalid_argument("fit_rate: grid sizes must be positive");
    if (!(error > 0.0)) {
      throw std::invalid_argument(
          "fit_rate: errors must be positive for the log-log fit; increase replications");
    }
  }
  const auto n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [N, e] : points) {
    sx += std::log(N);
    sy += std::log(e);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [N, e] : points) {
    const double dx = std::log(N) - mx;
    const double dy = std::log(e) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: grid sizes must not be all equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  const double ss_res = syy - slope * sxy;
  const double r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  return RateFit{slope, intercept, r_squared, points.size()};
}

std::optional<double> first_zero_hit(const SolveResult& result) { return result.zero_hit_time; }

std::optional<double> first_zero_hit(const GridPath& solution, double zero_threshold) {
  for (std::size_t i = 0; i < solution.values.size(); ++i) {
    if (solution.values[i] <= zero_threshold) return solution.time(i);
  }
  return std::nullopt;
}

}  // namespace cirlab
