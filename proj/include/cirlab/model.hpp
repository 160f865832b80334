#pragma once

namespace cirlab {

/// Parameters of the CIR diffusion dX = (a - b X) dt + sigma sqrt(X) dW on [0, T].
struct CirParams {
  double a;
  double b;
  double sigma;
  double x0;
  double T;

  CirParams(double a, double b, double sigma, double x0, double T);
};

/// Parameters of the squared Bessel diffusion with drift,
/// dZ = (delta - b Z) dt + 2 sqrt(Z) dW, started at z0.
struct BesselParams {
  double delta;
  double b;
  double z0;

  BesselParams(double delta, double b, double z0);
};

/// Boundary classification: the process started strictly positive reaches
/// zero almost surely iff delta < 2.
enum class FellerClass { HitsZeroAlmostSurely, NeverHitsZero };

/// Result of reducing a CIR process to normalized squared Bessel form.
/// The transformed process rho * X_{t T}, t in [0, 1], has unit diffusion
/// scale (sigma = 2) and parameters `params`.
struct BesselTransform {
  BesselParams params;
  double space_scale;  // rho = 4 / (T sigma^2)
  double time_scale;   // T
};

/// Dimension of the squared Bessel process associated with a CIR process,
/// delta = 4 a / sigma^2. The strong-rate exponent 2 a / sigma^2 is delta / 2.
double delta_of(const CirParams& cir);

BesselTransform to_bessel(const CirParams& cir);

/// Exact inverse of to_bessel given the recorded scales.
CirParams to_cir(const BesselTransform& bt);

/// E[Z_t] = z e^{-b t} + delta (1 - e^{-b t}) / b, with the b = 0 case
/// handled by its own branch (z + delta t).
double mean_at(const BesselParams& p, double t);

/// Same closed form with (a, b) in place of (delta, b).
double cir_mean_at(const CirParams& p, double t);

/// E|Z_t^{z1} - Z_t^{z2}| = e^{-b t} |z1 - z2| for solutions driven by a
/// common Brownian motion.
double l1_distance_exact(double z1, double z2, double b, double t);

FellerClass feller_class(double delta);

/// E[(chi^2_delta)^{1 - delta/2}] = 2^{1 - delta/2} / Gamma(delta/2).
/// Defined for 0 < delta < 2 only.
double chi_moment(double delta);

/// Unnormalized survival shape z^nu * int_r^inf t^{-nu-1} exp(-z/(2t)) dt
/// with nu = 1 - delta/2. The multiplicative constant that turns this into a
/// probability is not included; callers calibrate it empirically.
/// Monotone decreasing in r and increasing in z. Requires 0 < delta < 2.
double hitting_tail_shape(double z, double r, double delta);

}  // namespace cirlab
