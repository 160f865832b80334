#include "cirlab/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace cirlab {

SdeCoeffs::SdeCoeffs(double a_, double b_, double sigma_) : a(a_), b(b_), sigma(sigma_) {
  if (!(a > 0.0) || !(sigma > 0.0) || !(b >= 0.0)) {
    throw std::invalid_argument("SdeCoeffs: requires a > 0, b >= 0, sigma > 0");
  }
}

void validate_scheme(SchemeKind kind, const SdeCoeffs& c) {
  if (kind == SchemeKind::DriftImplicitSqrt && c.a < 0.25 * c.sigma * c.sigma) {
    throw std::invalid_argument(
        "DriftImplicitSqrt requires a >= sigma^2/4 (positive root undefined otherwise)");
  }
}

double step(SchemeKind kind, const SdeCoeffs& c, double x, double dW, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  if (!std::isfinite(x)) throw std::invalid_argument("step: x must be finite");
  const double xp = x > 0.0 ? x : 0.0;
  switch (kind) {
    case SchemeKind::EulerFullTruncation:
      return x + (c.a - c.b * xp) * dt + c.sigma * std::sqrt(xp) * dW;
    case SchemeKind::TruncatedMilstein: {
      const double inc = x + (c.a - c.b * xp) * dt + c.sigma * std::sqrt(xp) * dW +
                         0.25 * c.sigma * c.sigma * (dW * dW - dt);
      return inc > 0.0 ? inc : 0.0;
    }
    case SchemeKind::DriftImplicitSqrt: {
      validate_scheme(kind, c);
      // Drift-implicit Euler for Y = sqrt(X); the positive root of
      // Y'^2 (1 + b dt / 2) - Y' (Y + sigma dW / 2) - (a - sigma^2/4) dt / 2 = 0.
      const double y = std::sqrt(xp);
      const double u = y + 0.5 * c.sigma * dW;
      const double denom = 1.0 + 0.5 * c.b * dt;
      const double q = 0.5 * (c.a - 0.25 * c.sigma * c.sigma) * dt;
      const double root = (u + std::sqrt(u * u + 4.0 * denom * q)) / (2.0 * denom);
      return root * root;
    }
    case SchemeKind::ExactTransition:
      throw std::invalid_argument(
          "step: ExactTransition draws from the transition law; use exact_step or solve_path");
  }
  throw std::invalid_argument("step: unknown scheme kind");
}

double exact_step(Generator& g, const SdeCoeffs& c, double x, double dt) {
  return exact_cir_transition(g, x, c.a, c.b, c.sigma, dt);
}

double default_zero_threshold(SchemeKind kind) {
  return kind == SchemeKind::TruncatedMilstein ? 0.0 : 1e-12;
}

SolveResult solve_path(SchemeKind kind, const SdeCoeffs& c, double x0, const GridPath& driver,
                       const SolveOptions& opt, Generator* exact_rng) {
  if (!(x0 >= 0.0)) throw std::invalid_argument("solve_path: x0 must be >= 0");
  if (driver.values.size() < 2) throw std::invalid_argument("solve_path: empty driver");
  validate_scheme(kind, c);
  if (kind == SchemeKind::ExactTransition && exact_rng == nullptr) {
    throw std::invalid_argument("solve_path: ExactTransition needs a generator");
  }
  const double threshold = opt.zero_threshold ? *opt.zero_threshold : default_zero_threshold(kind);
  const std::size_t n = driver.n_steps();
  const double dt = driver.dt;

  SolveResult result;
  if (opt.record_path) {
    result.path = GridPath{driver.t0, dt, std::vector<double>(n + 1)};
  }
  double x = x0;
  if (opt.record_path) result.path->values[0] = x;
  if (x <= threshold) result.zero_hit_time = driver.time(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (kind == SchemeKind::ExactTransition) {
      x = exact_step(*exact_rng, c, x, dt);
    } else {
      const double dW = driver.values[i + 1] - driver.values[i];
      x = step(kind, c, x, dW, dt);
    }
    if (!std::isfinite(x)) {
      throw std::runtime_error("solve_path: non-finite value produced");
    }
    if (opt.record_path) result.path->values[i + 1] = x;
    if (!result.zero_hit_time && x <= threshold) result.zero_hit_time = driver.time(i + 1);
  }
  result.terminal_value = x;
  return result;
}

double reference_solve(const SdeCoeffs& c, double x0, const GridPath& coarse_driver,
                       std::size_t refine_factor, Generator& g) {
  if (refine_factor < 1) throw std::invalid_argument("reference_solve: refine_factor must be >= 1");
  if (refine_factor == 1) {
    return solve_path(SchemeKind::TruncatedMilstein, c, x0, coarse_driver).terminal_value;
  }
  const GridPath fine = refine(g, coarse_driver, refine_factor);
  return solve_path(SchemeKind::TruncatedMilstein, c, x0, fine).terminal_value;
}

}  // namespace cirlab
