#include "cirlab/paths.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace cirlab {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Number of mesh steps that make up one cell of width 1/n; rejects meshes
// that do not divide the cell evenly.
std::size_t cell_steps(double mesh, std::size_t n, const char* what) {
  require(mesh > 0.0, "paths: mesh must be > 0");
  const double exact = 1.0 / (static_cast<double>(n) * mesh);
  const auto m = static_cast<std::size_t>(std::llround(exact));
  require(m >= 1 && std::abs(exact - static_cast<double>(m)) <= 1e-9 * exact, what);
  return m;
}

}  // namespace

GridPath sample_bm(Generator& g, std::size_t n_steps, double dt) {
  require(n_steps >= 1, "sample_bm: n_steps must be >= 1");
  require(dt > 0.0, "sample_bm: dt must be > 0");
  const double scale = std::sqrt(dt);
  GridPath path;
  path.dt = dt;
  path.values.resize(n_steps + 1);
  path.values[0] = 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    sum += std_normal(g);
    path.values[i] = scale * sum;
  }
  return path;
}

double bridge_cov(double s, double t, double T) {
  require(T > 0.0, "bridge_cov: T must be > 0");
  require(s >= 0.0 && s <= T && t >= 0.0 && t <= T, "bridge_cov: s, t must lie in [0, T]");
  return std::min(s, t) - s * t / T;
}

BridgePath sample_bridge(Generator& g, std::size_t n_steps) {
  require(n_steps >= 2, "sample_bridge: n_steps must be >= 2");
  const GridPath w = sample_bm(g, n_steps, 1.0 / static_cast<double>(n_steps));
  const double w1 = w.terminal();
  BridgePath bridge;
  bridge.values.resize(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n_steps);
    bridge.values[i] = w.values[i] - frac * w1;
  }
  bridge.values[0] = 0.0;
  bridge.values[n_steps] = 0.0;
  return bridge;
}

GridPath bm_from_bridge(double w_T, const BridgePath& bridge, double T) {
  require(T > 0.0 && T <= 1.0, "bm_from_bridge: T must lie in (0, 1]");
  const std::size_t n = bridge.n_steps();
  require(n >= 1, "bm_from_bridge: bridge must have at least one step");
  const double root_T = std::sqrt(T);
  GridPath path;
  path.dt = T / static_cast<double>(n);
  path.values.resize(n + 1);
  path.values[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n);
    path.values[i] = frac * w_T + root_T * bridge.values[i];
  }
  path.values[n] = w_T;
  return path;
}

GridOffsets grid_ceil_offsets(std::size_t n, double t) {
  require(n >= 1, "grid_ceil_offsets: n must be >= 1");
  require(t >= 0.0, "grid_ceil_offsets: t must be >= 0");
  const double nd = static_cast<double>(n);
  const double next = std::ceil(t * nd) / nd;
  const double tau1 = next - t;
  return GridOffsets{tau1, tau1 + 1.0 / nd};
}

GridPath perturb_first_cell(const GridPath& w, const BridgePath& f, std::size_t n,
                            CellMarker marker) {
  require(n >= 1, "perturb_first_cell: n must be >= 1");
  require(!w.values.empty() && w.t0 == 0.0 && w.values[0] == 0.0,
          "perturb_first_cell: w must start at the origin");
  const std::size_t m =
      cell_steps(w.dt, n, "perturb_first_cell: w mesh must divide 1/n evenly");
  require(w.values.size() >= m + 1, "perturb_first_cell: w must cover [0, 1/n]");
  require(f.n_steps() == m, "perturb_first_cell: bridge resolution must match the cell sub-grid");
  if (marker == CellMarker::Triangle) return w;

  GridPath out = w;
  const double cell_end = w.values[m];
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  // Chord plus rescaled bridge; the j = 0 and j = m evaluations reproduce
  // 0 and w_{1/n} exactly because the bridge endpoints are exactly zero.
  for (std::size_t j = 0; j <= m; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(m);
    out.values[j] = frac * cell_end + inv_sqrt_n * f.values[j];
  }
  return out;
}

GridPath concat_with_cell(double r, const GridPath& w1, const GridPath& w_tri,
                          const GridPath& w2, const BridgePath& f, std::size_t n,
                          CellMarker marker) {
  require(n >= 1, "concat_with_cell: n must be >= 1");
  require(r >= 0.0, "concat_with_cell: r must be >= 0");
  const double mesh = w1.dt;
  require(w_tri.dt == mesh && w2.dt == mesh,
          "concat_with_cell: all inputs must share one mesh");
  require(w1.t0 == 0.0 && w_tri.t0 == 0.0 && w2.t0 == 0.0,
          "concat_with_cell: segment paths must start at time 0");
  require(!w1.values.empty() && w1.values[0] == 0.0 && !w_tri.values.empty() &&
              w_tri.values[0] == 0.0 && !w2.values.empty() && w2.values[0] == 0.0,
          "concat_with_cell: segment paths must start at value 0");
  const std::size_t m = cell_steps(mesh, n, "concat_with_cell: mesh must divide 1/n evenly");
  require(w_tri.values.size() >= m + 1, "concat_with_cell: w_tri must cover [0, 1/n]");
  require(f.n_steps() == m, "concat_with_cell: bridge resolution must match the cell sub-grid");

  // Snap r to the working mesh.
  const auto ir = static_cast<std::size_t>(std::llround(r / mesh));
  require(w1.values.size() >= ir + 1, "concat_with_cell: w1 must cover [0, r]");

  GridPath out;
  out.dt = mesh;
  out.values.resize(ir + m + w2.n_steps() + 1);
  for (std::size_t j = 0; j <= ir; ++j) out.values[j] = w1.values[j];

  const double base = w1.values[ir];
  const double cell_end = w_tri.values[m];
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  if (marker == CellMarker::Triangle) {
    for (std::size_t j = 1; j <= m; ++j) out.values[ir + j] = w_tri.values[j] + base;
  } else {
    for (std::size_t j = 1; j <= m; ++j) {
      const double frac = static_cast<double>(j) / static_cast<double>(m);
      out.values[ir + j] = (frac * cell_end + inv_sqrt_n * f.values[j]) + base;
    }
  }
  // Both markers produce fl(cell_end + base) at the cell end, so the tail
  // below lines up with either one exactly.
  const double shift = cell_end + base;
  for (std::size_t j = 1; j <= w2.n_steps(); ++j) out.values[ir + m + j] = w2.values[j] + shift;
  return out;
}

GridPath refine(Generator& g, const GridPath& w, std::size_t factor) {
  require(factor >= 2, "refine: factor must be >= 2");
  require(w.values.size() >= 2, "refine: path must have at least one step");
  const std::size_t cells = w.n_steps();
  const double fine_dt = w.dt / static_cast<double>(factor);
  const double root_dt = std::sqrt(w.dt);
  GridPath out;
  out.t0 = w.t0;
  out.dt = fine_dt;
  out.values.resize(cells * factor + 1);
  out.values[0] = w.values[0];
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const double left = w.values[cell];
    const double increment = w.values[cell + 1] - left;
    const BridgePath bridge = sample_bridge(g, factor);
    for (std::size_t j = 1; j < factor; ++j) {
      const double frac = static_cast<double>(j) / static_cast<double>(factor);
      out.values[cell * factor + j] = left + frac * increment + root_dt * bridge.values[j];
    }
    // Coarse values are carried over verbatim, not recomputed.
    out.values[(cell + 1) * factor] = w.values[cell + 1];
  }
  return out;
}

GridPath scale_path(const GridPath& w, double c) {
  require(c > 0.0 && std::isfinite(c), "scale_path: c must be positive and finite");
  const double inv_sqrt_c = 1.0 / std::sqrt(c);
  GridPath out;
  out.t0 = w.t0 / c;
  out.dt = w.dt / c;
  out.values.resize(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i) out.values[i] = inv_sqrt_c * w.values[i];
  return out;
}

void write_csv(const GridPath& w, std::ostream& out) {
  out << "index,time,value\n";
  char line[96];
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i, w.time(i), w.values[i]);
    out << line;
  }
}

}  // namespace cirlab
