#include "cirlab/model.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace cirlab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Adaptive Simpson with absolute tolerance. The integrands below are smooth
// after substitution, so the recursion stays shallow.
double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(a, b, fa, fm, fb);
  return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

CirParams::CirParams(double a_, double b_, double sigma_, double x0_, double T_)
    : a(a_), b(b_), sigma(sigma_), x0(x0_), T(T_) {
  require(std::isfinite(a) && a > 0.0, "CirParams: a must be > 0");
  require(std::isfinite(b) && b >= 0.0, "CirParams: b must be >= 0");
  require(std::isfinite(sigma) && sigma > 0.0, "CirParams: sigma must be > 0");
  require(std::isfinite(x0) && x0 >= 0.0, "CirParams: x0 must be >= 0");
  require(std::isfinite(T) && T > 0.0, "CirParams: T must be > 0");
}

BesselParams::BesselParams(double delta_, double b_, double z0_) : delta(delta_), b(b_), z0(z0_) {
  require(std::isfinite(delta) && delta > 0.0, "BesselParams: delta must be > 0");
  require(std::isfinite(b) && b >= 0.0, "BesselParams: b must be >= 0");
  require(std::isfinite(z0) && z0 >= 0.0, "BesselParams: z0 must be >= 0");
}

double delta_of(const CirParams& cir) { return 4.0 * cir.a / (cir.sigma * cir.sigma); }

BesselTransform to_bessel(const CirParams& cir) {
  const double rho = 4.0 / (cir.T * cir.sigma * cir.sigma);
  return BesselTransform{BesselParams(delta_of(cir), cir.T * cir.b, rho * cir.x0), rho, cir.T};
}

CirParams to_cir(const BesselTransform& bt) {
  const double sigma2 = 4.0 / (bt.time_scale * bt.space_scale);
  return CirParams(bt.params.delta * sigma2 / 4.0, bt.params.b / bt.time_scale,
                   std::sqrt(sigma2), bt.params.z0 / bt.space_scale, bt.time_scale);
}

double mean_at(const BesselParams& p, double t) {
  require(t >= 0.0, "mean_at: t must be >= 0");
  if (p.b == 0.0) return p.z0 + p.delta * t;
  // -expm1(-b t) / b keeps full precision for small b.
  return p.z0 * std::exp(-p.b * t) + p.delta * (-std::expm1(-p.b * t) / p.b);
}

double cir_mean_at(const CirParams& p, double t) {
  require(t >= 0.0, "cir_mean_at: t must be >= 0");
  if (p.b == 0.0) return p.x0 + p.a * t;
  return p.x0 * std::exp(-p.b * t) + p.a * (-std::expm1(-p.b * t) / p.b);
}

double l1_distance_exact(double z1, double z2, double b, double t) {
  require(z1 >= 0.0 && z2 >= 0.0, "l1_distance_exact: initial values must be >= 0");
  require(b >= 0.0, "l1_distance_exact: b must be >= 0");
  require(t >= 0.0, "l1_distance_exact: t must be >= 0");
  return std::exp(-b * t) * std::abs(z1 - z2);
}

FellerClass feller_class(double delta) {
  require(delta > 0.0, "feller_class: delta must be > 0");
  return delta < 2.0 ? FellerClass::HitsZeroAlmostSurely : FellerClass::NeverHitsZero;
}

double chi_moment(double delta) {
  require(delta > 0.0 && delta < 2.0, "chi_moment: requires 0 < delta < 2");
  return std::pow(2.0, 1.0 - 0.5 * delta) / std::tgamma(0.5 * delta);
}

double hitting_tail_shape(double z, double r, double delta) {
  require(delta > 0.0 && delta < 2.0, "hitting_tail_shape: requires 0 < delta < 2");
  require(z >= 0.0, "hitting_tail_shape: z must be >= 0");
  require(r > 0.0, "hitting_tail_shape: r must be > 0");
  if (z == 0.0) return 0.0;
  const double nu = 1.0 - 0.5 * delta;
  // u = 1/t maps the tail integral onto (0, 1/r]; a second substitution
  // u = s^{1/nu} absorbs the u^{nu-1} endpoint singularity, leaving
  // (1/nu) * int_0^{r^{-nu}} exp(-(z/2) s^{1/nu}) ds, which is smooth.
  const double upper = std::pow(r, -nu);
  const double integral = adaptive_simpson(
      [z, nu](double s) { return std::exp(-0.5 * z * std::pow(s, 1.0 / nu)); }, 0.0, upper,
      1e-10);
  return std::pow(z, nu) * integral / nu;
}

}  // namespace cirlab
