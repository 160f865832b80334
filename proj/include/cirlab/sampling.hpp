#pragma once

#include <array>
#include <cstdint>

#include "cirlab/model.hpp"

namespace cirlab {

/// Identifies one pseudo-random stream. The generator state is a pure
/// function of the triple, so replications can be scheduled on any number of
/// threads in any order without changing a single drawn number.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t replication_index = 0;
};

/// Counter-based generator (Philox-4x64-10). root_seed/stream_id form the
/// key, replication_index sits in the counter block, and draws advance a
/// 128-bit in-stream counter.
class Generator {
 public:
  explicit Generator(const SeedSpec& seed);

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0, 1).
  double uniform01();

  const SeedSpec& seed() const { return seed_; }

 private:
  void refill();

  SeedSpec seed_;
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_;
  std::array<std::uint64_t, 4> block_{};
  int cursor_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;

  friend double std_normal(Generator& g);
};

Generator derive(const SeedSpec& seed);

double std_normal(Generator& g);

/// Gamma variate with unit scale; valid for every shape > 0, including
/// shape < 1 (Marsaglia-Tsang with the boosting step for small shapes).
double gamma(Generator& g, double shape);

std::uint64_t poisson(Generator& g, double mean);

/// Noncentral chi-square via the Poisson mixture of central chi-squares,
/// valid for every df > 0.
double noncentral_chisq(Generator& g, double df, double noncentrality);

/// Exact transition of dX = (a - b X) dt + sigma sqrt(X) dW over a step dt,
/// given X_t = x. Always >= 0.
double exact_cir_transition(Generator& g, double x, double a, double b, double sigma, double dt);

/// Exact transition of the squared Bessel SDE dZ = (delta - b Z) dt
/// + 2 sqrt(Z) dW over a step dt, given Z_t = z.
double exact_bessel_transition(Generator& g, double z, const BesselParams& p, double dt);

}  // namespace cirlab
