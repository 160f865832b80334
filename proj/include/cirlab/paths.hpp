#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "cirlab/sampling.hpp"

namespace cirlab {

/// Path sampled on a uniform grid. The time of index i is t0 + i * dt,
/// always derived from the integer index so that junction comparisons stay
/// exact; times are never accumulated by repeated addition.
struct GridPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  std::size_t n_steps() const { return values.size() - 1; }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double terminal() const { return values.back(); }
};

/// Bridge over [0, 1] on a uniform grid; both endpoint values are exactly 0.
struct BridgePath {
  std::vector<double> values;

  std::size_t n_steps() const { return values.size() - 1; }
};

/// Selects the driver inside a perturbed cell: Triangle keeps the original
/// Brownian values, Box replaces them by the chord plus an independent
/// rescaled bridge.
enum class CellMarker { Triangle, Box };

/// Brownian path started at 0 with n_steps increments of variance dt.
/// Values are scaled partial sums of unit normals, so sampling at dt and
/// rescaling a unit-mesh sample by sqrt(dt) agree bit for bit.
GridPath sample_bm(Generator& g, std::size_t n_steps, double dt);

/// Covariance of a Brownian bridge pinned at 0 and T: min(s,t) - s t / T.
double bridge_cov(double s, double t, double T);

/// Bridge over [0,1] built as B_t = W_t - t W_1; endpoints exactly 0.
BridgePath sample_bridge(Generator& g, std::size_t n_steps);

/// Brownian motion on [0, T] with prescribed terminal value:
/// t -> (t/T) w_T + sqrt(T) bridge(t/T). Requires T in (0, 1] and a bridge
/// independent of w_T (caller's contract). Endpoints are 0 and w_T exactly.
GridPath bm_from_bridge(double w_T, const BridgePath& bridge, double T);

struct GridOffsets {
  double tau1;  // distance from t up to the next multiple of 1/n, in [0, 1/n)
  double tau2;  // tau1 + 1/n
};

GridOffsets grid_ceil_offsets(std::size_t n, double t);

/// Cell perturbation on [0, 1/n]: Triangle returns w unchanged; Box replaces
/// w on [0, 1/n] by the chord through (0,0)-(1/n, w_{1/n}) plus
/// n^{-1/2} f(n t), and keeps w beyond 1/n. Agrees with w at t = 0, t = 1/n
/// and all t >= 1/n exactly. w's mesh must divide 1/n evenly and f must be
/// sampled on the cell's sub-grid.
GridPath perturb_first_cell(const GridPath& w, const BridgePath& f, std::size_t n,
                            CellMarker marker);

/// Concatenation with one perturbable cell:
///   [0, r]        -> w1
///   [r, r + 1/n]  -> perturbed cell built from w_tri and f, shifted by w1(r)
///   [r + 1/n, ..) -> w2 shifted by w_tri(1/n) + w1(r)
/// All inputs must share one mesh dividing 1/n; r is snapped to that mesh.
/// Triangle and Box outputs agree exactly outside the open cell interval.
GridPath concat_with_cell(double r, const GridPath& w1, const GridPath& w_tri,
                          const GridPath& w2, const BridgePath& f, std::size_t n,
                          CellMarker marker);

/// Conditional Brownian refinement: splits every cell into `factor` sub-steps
/// with an independent bridge per cell. Coarse grid values are kept verbatim.
GridPath refine(Generator& g, const GridPath& w, std::size_t factor);

/// Brownian scaling s -> c^{-1/2} w(c s) on the induced grid.
GridPath scale_path(const GridPath& w, double c);

/// CSV dump, header "index,time,value", one row per grid point.
void write_csv(const GridPath& w, std::ostream& out);

}  // namespace cirlab
