#include "cirlab/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cirlab {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73Bull;

inline void mul_hi_lo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  lo = static_cast<std::uint64_t>(product);
}

inline void philox_round(std::array<std::uint64_t, 4>& ctr, const std::array<std::uint64_t, 2>& key) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mul_hi_lo(kPhiloxM0, ctr[0], hi0, lo0);
  mul_hi_lo(kPhiloxM1, ctr[2], hi1, lo1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

Generator::Generator(const SeedSpec& seed)
    : seed_(seed),
      key_{seed.root_seed, seed.stream_id},
      counter_{0, 0, seed.replication_index, 0} {}

void Generator::refill() {
  std::array<std::uint64_t, 4> ctr = counter_;
  std::array<std::uint64_t, 2> key = key_;
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  block_ = ctr;
  cursor_ = 0;
  if (++counter_[0] == 0) ++counter_[1];
}

std::uint64_t Generator::next_u64() {
  if (cursor_ >= 4) refill();
  return block_[static_cast<std::size_t>(cursor_++)];
}

double Generator::uniform01() {
  // 53 random bits shifted into (0, 1); never returns an endpoint.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

Generator derive(const SeedSpec& seed) { return Generator(seed); }

double std_normal(Generator& g) {
  if (g.has_spare_normal_) {
    g.has_spare_normal_ = false;
    return g.spare_normal_;
  }
  const double u1 = g.uniform01();
  const double u2 = g.uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  g.spare_normal_ = radius * std::sin(angle);
  g.has_spare_normal_ = true;
  return radius * std::cos(angle);
}

double gamma(Generator& g, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma: shape must be positive and finite");
  }
  if (shape < 1.0) {
    // Boost a shape+1 draw back down; exact for every shape in (0, 1).
    const double u = g.uniform01();
    return gamma(g, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia & Tsang (2000) squeeze-and-accept.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = std_normal(g);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = g.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

namespace {

std::uint64_t poisson_small(Generator& g, double mean) {
  // Knuth multiplication method; fine for small means.
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= g.uniform01();
  } while (p > limit);
  return k - 1;
}

std::uint64_t poisson_ptrs(Generator& g, double mean) {
  // Hoermann (1993), transformed rejection with squeeze (PTRS).
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = g.uniform01() - 0.5;
    const double v = g.uniform01();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(kf);
    }
  }
}

}  // namespace

std::uint64_t poisson(Generator& g, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_small(g, mean);
  return poisson_ptrs(g, mean);
}

double noncentral_chisq(Generator& g, double df, double noncentrality) {
  if (!(df > 0.0)) throw std::invalid_argument("noncentral_chisq: df must be > 0");
  if (!(noncentrality >= 0.0) || !std::isfinite(noncentrality)) {
    throw std::invalid_argument("noncentral_chisq: noncentrality must be finite and >= 0");
  }
  const std::uint64_t mix = poisson(g, 0.5 * noncentrality);
  return 2.0 * gamma(g, 0.5 * df + static_cast<double>(mix));
}

double exact_cir_transition(Generator& g, double x, double a, double b, double sigma, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("exact_cir_transition: dt must be > 0");
  if (!(x >= 0.0)) throw std::invalid_argument("exact_cir_transition: x must be >= 0");
  const double df = 4.0 * a / (sigma * sigma);
  double scale, lambda;
  if (b == 0.0) {
    scale = 0.25 * sigma * sigma * dt;
    lambda = x / scale;
  } else {
    const double decay = std::exp(-b * dt);
    scale = 0.25 * sigma * sigma * (-std::expm1(-b * dt)) / b;
    lambda = x * decay / scale;
  }
  return scale * noncentral_chisq(g, df, lambda);
}

double exact_bessel_transition(Generator& g, double z, const BesselParams& p, double dt) {
  return exact_cir_transition(g, z, p.delta, p.b, 2.0, dt);
}

}  // namespace cirlab
