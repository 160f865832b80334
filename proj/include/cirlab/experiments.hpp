#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cirlab/model.hpp"
#include "cirlab/schemes.hpp"

namespace cirlab {

/// Strong-error estimate at one grid size: mean of |terminal difference|
/// over `reps` replications, with std_error = sample sd / sqrt(reps).
struct ErrorEstimate {
  std::size_t n_grid = 0;
  double mean_abs_error = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

/// Least-squares fit of log(error) against log(N). A negative slope means a
/// positive convergence order.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

/// How the coupled driver pair is built.
///  - FullConditionalRefill: both drivers share all coarse grid values and
///    carry conditionally independent bridge fillings in every cell.
///  - SingleCellAfterZeroHit: the drivers are identical until the solution's
///    first zero hit and then differ in exactly one full coarse cell, which
///    gets an independent bridge in the Box driver.
enum class CouplingVariant { FullConditionalRefill, SingleCellAfterZeroHit };

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

struct HitProbability {
  double eps = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t reps = 0;
};

/// Pathwise strong error of `kind` against a bridge-refined reference on the
/// same coarse driver: per replication, sample an N-step driver on [0, 1],
/// solve with the scheme, solve the refined driver with TruncatedMilstein,
/// and average the absolute terminal difference.
ErrorEstimate strong_error(SchemeKind kind, const BesselParams& p, std::size_t n_grid,
                           std::size_t reps, std::size_t refine_factor, std::uint64_t seed,
                           unsigned threads = 0);

/// Coupled lower-bound estimator: builds two fine-mesh drivers that agree at
/// all N coarse grid times per `variant`, solves both with TruncatedMilstein
/// from z0, and averages |terminal difference| / 2. The result estimates a
/// lower bound on the error of any method that sees only the N grid values.
ErrorEstimate lower_bound_coupling(const BesselParams& p, std::size_t n_grid, std::size_t reps,
                                   std::size_t fine_factor, CouplingVariant variant,
                                   std::uint64_t seed, unsigned threads = 0);

/// Probability that the fine-grid solution started at z0 = 0 stays above
/// zero_threshold on [eps, T]. Requires delta < 2 and p.z0 == 0; the
/// threshold defaults to the mesh width (a grid solution cannot witness
/// sub-mesh excursions, so the detection scale follows the mesh).
HitProbability hitting_probability(const BesselParams& p, double eps, double T, std::size_t reps,
                                   double mesh, std::uint64_t seed, unsigned threads = 0,
                                   std::optional<double> zero_threshold = std::nullopt);

/// Fraction of replications whose solve reaches `zero_threshold` on [0, T].
MonteCarloEstimate zero_hit_fraction(const BesselParams& p, double T, double mesh,
                                     double zero_threshold, SchemeKind kind, std::size_t reps,
                                     std::uint64_t seed, unsigned threads = 0);

/// Monte Carlo mean of Z_t via one exact transition per replication.
MonteCarloEstimate mc_mean_exact(const BesselParams& p, double t, std::size_t reps,
                                 std::uint64_t seed, unsigned threads = 0);

/// E|Z_t^{z1} - Z_t^{z2}| for common-driver TruncatedMilstein solves at the
/// given mesh.
MonteCarloEstimate l1_distance_mc(double delta, double b, double z1, double z2, double t,
                                  double mesh, std::size_t reps, std::uint64_t seed,
                                  unsigned threads = 0);

/// OLS of log(error) on log(N); rejects fewer than 3 points and nonpositive
/// errors (the log is undefined; more replications usually fix that).
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

std::optional<double> first_zero_hit(const SolveResult& result);
std::optional<double> first_zero_hit(const GridPath& solution, double zero_threshold);

/// Deterministic stream-id layout used by every experiment, exposed so that
/// external drivers (CLI, bindings, tests) can reproduce sub-streams.
std::uint64_t experiment_stream(std::uint64_t experiment, std::uint64_t tag,
                                std::uint64_t purpose);

}  // namespace cirlab
