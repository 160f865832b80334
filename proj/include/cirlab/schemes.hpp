#pragma once

#include <optional>

#include "cirlab/model.hpp"
#include "cirlab/paths.hpp"

namespace cirlab {

enum class SchemeKind { EulerFullTruncation, DriftImplicitSqrt, TruncatedMilstein, ExactTransition };

/// Drift/diffusion coefficients of dX = (a - b X) dt + sigma sqrt(X) dW.
/// The normalized squared Bessel form is (a, b, sigma) = (delta, b, 2).
struct SdeCoeffs {
  double a;
  double b;
  double sigma;

  SdeCoeffs(double a, double b, double sigma);
  static SdeCoeffs of(const BesselParams& p) { return SdeCoeffs(p.delta, p.b, 2.0); }
  static SdeCoeffs of(const CirParams& p) { return SdeCoeffs(p.a, p.b, p.sigma); }
};

/// Rejects combinations a scheme cannot run with. DriftImplicitSqrt requires
/// a >= sigma^2 / 4, otherwise the positive root of its implicit update is
/// undefined; this fails loudly instead of falling back.
void validate_scheme(SchemeKind kind, const SdeCoeffs& c);

/// One deterministic update x -> x' given the Brownian increment. Not defined
/// for ExactTransition (which draws from the transition law instead; see
/// exact_step and solve_path).
double step(SchemeKind kind, const SdeCoeffs& c, double x, double dW, double dt);

/// One exact-transition update; ignores any driving path.
double exact_step(Generator& g, const SdeCoeffs& c, double x, double dt);

/// Threshold at which a grid value counts as a zero hit. TruncatedMilstein
/// can land exactly on 0, so its default is 0; the other schemes approach
/// but never touch 0 and use 1e-12.
double default_zero_threshold(SchemeKind kind);

struct SolveResult {
  double terminal_value = 0.0;
  std::optional<GridPath> path;
  std::optional<double> zero_hit_time;
};

struct SolveOptions {
  bool record_path = false;
  std::optional<double> zero_threshold;  // absent -> default_zero_threshold(kind)
};

/// Iterates the stepping kernel over the driver's increments. For
/// ExactTransition the driver supplies only the grid (its values are ignored)
/// and exact_rng must be non-null.
SolveResult solve_path(SchemeKind kind, const SdeCoeffs& c, double x0, const GridPath& driver,
                       const SolveOptions& opt = {}, Generator* exact_rng = nullptr);

/// High-accuracy proxy for the true terminal value conditional on the coarse
/// driver: bridge-refines the driver by refine_factor and solves with
/// TruncatedMilstein on the fine mesh. refine_factor 1 solves on the coarse
/// driver directly.
double reference_solve(const SdeCoeffs& c, double x0, const GridPath& coarse_driver,
                       std::size_t refine_factor, Generator& g);

}  // namespace cirlab
