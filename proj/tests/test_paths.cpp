#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cirlab/paths.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace cirlab;

TEST_CASE("sample_bm basic law") {
  SUBCASE("single increment is N(0, dt)") {
    const double dt = 0.3;
    Generator g = derive(SeedSpec{11, 101, 0});
    const std::size_t n = 200000;
    std::vector<double> v(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
      const GridPath w = sample_bm(g, 1, dt);
      CHECK(w.values[0] == 0.0);
      v[i] = w.values[1];
      v2[i] = w.values[1] * w.values[1];
    }
    const auto s = oracle::summarize(v);
    const auto s2 = oracle::summarize(v2);
    CHECK(std::abs(s.mean) < 3.0 * s.std_error);
    CHECK(std::abs(s2.mean - dt) < 3.0 * s2.std_error);
  }
  SUBCASE("covariance is min(s, t)") {
    Generator g = derive(SeedSpec{11, 2, 0});
    const std::size_t n = 100000;
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) {
      const GridPath w = sample_bm(g, 4, 0.25);
      prod[i] = w.values[1] * w.values[3];  // times 0.25 and 0.75
    }
    const auto s = oracle::summarize(prod);
    CHECK(std::abs(s.mean - 0.25) < 3.0 * s.std_error);
  }
  SUBCASE("dt enters only through the sqrt(dt) scaling") {
    Generator gu = derive(SeedSpec{11, 3, 5});
    const GridPath unit = sample_bm(gu, 64, 1.0);
    Generator g = derive(SeedSpec{11, 3, 5});
    const GridPath scaled = sample_bm(g, 64, 0.03125);
    const double root = std::sqrt(0.03125);
    for (std::size_t i = 0; i < unit.values.size(); ++i) {
      CHECK(scaled.values[i] == root * unit.values[i]);
    }
  }
}

TEST_CASE("bridge covariance formula") {
  CHECK(bridge_cov(0.0, 0.7, 1.0) == 0.0);
  CHECK(bridge_cov(0.5, 0.5, 1.0) == 0.25);
  CHECK(bridge_cov(2.0, 2.0, 4.0) == 1.0);
  CHECK(bridge_cov(0.25, 0.75, 1.0) == 0.0625);

  Generator g = derive(SeedSpec{12, 1, 0});
  const std::size_t n = 100000;
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BridgePath b = sample_bridge(g, 4);
    prod[i] = b.values[1] * b.values[3];
  }
  const auto s = oracle::summarize(prod);
  CHECK(std::abs(s.mean - 0.0625) < 3.0 * s.std_error);
}

TEST_CASE("sample_bridge endpoints and law") {
  Generator g = derive(SeedSpec{12, 2, 0});
  const std::size_t n = 100000;
  std::vector<double> mid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BridgePath b = sample_bridge(g, 8);
    CHECK(b.values.front() == 0.0);
    CHECK(b.values.back() == 0.0);
    mid[i] = b.values[4] * b.values[4];
  }
  const auto s = oracle::summarize(mid);
  CHECK(std::abs(s.mean - 0.25) < 3.0 * s.std_error);
}

TEST_CASE("bridge is uncorrelated with the generating terminal value") {
  Generator g = derive(SeedSpec{12, 3, 0});
  const std::size_t n = 100000;
  std::vector<double> bridge_mid(n), terminal(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GridPath w = sample_bm(g, 8, 0.125);
    terminal[i] = w.terminal();
    bridge_mid[i] = w.values[4] - 0.5 * w.terminal();
  }
  CHECK(std::abs(oracle::correlation(bridge_mid, terminal)) < 0.01);
}

TEST_CASE("bm_from_bridge") {
  SUBCASE("zero bridge gives the chord") {
    BridgePath flat{std::vector<double>(9, 0.0)};
    const GridPath w = bm_from_bridge(1.6, flat, 1.0);
    for (std::size_t i = 0; i <= 8; ++i) {
      CHECK(w.values[i] == doctest::Approx(1.6 * static_cast<double>(i) / 8.0).epsilon(1e-15));
    }
    CHECK(w.values[0] == 0.0);
    CHECK(w.values[8] == 1.6);
  }
  SUBCASE("terminal value is pinned exactly") {
    Generator g = derive(SeedSpec{13, 1, 0});
    for (int i = 0; i < 100; ++i) {
      const double wT = std_normal(g);
      const GridPath w = bm_from_bridge(wT, sample_bridge(g, 16), 0.7);
      CHECK(w.terminal() == wT);
      CHECK(w.values[0] == 0.0);
    }
  }
  SUBCASE("output has Brownian covariance") {
    Generator g = derive(SeedSpec{13, 2, 0});
    const double T = 0.5;
    const std::size_t n = 100000;
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double wT = std::sqrt(T) * std_normal(g);
      const GridPath w = bm_from_bridge(wT, sample_bridge(g, 4), T);
      prod[i] = w.values[1] * w.values[3];  // times T/4 and 3T/4
    }
    const auto s = oracle::summarize(prod);
    CHECK(std::abs(s.mean - T / 4.0) < 3.0 * s.std_error);
  }
  CHECK_THROWS_AS(bm_from_bridge(1.0, BridgePath{{0.0, 0.0, 0.0}}, 1.5), std::invalid_argument);
}

TEST_CASE("grid_ceil_offsets") {
  const auto on_grid = grid_ceil_offsets(2, 0.5);
  CHECK(on_grid.tau1 == 0.0);
  CHECK(on_grid.tau2 == 0.5);
  const auto mid = grid_ceil_offsets(2, 0.3);
  CHECK(mid.tau1 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(mid.tau2 == doctest::Approx(0.7).epsilon(1e-12));
  const auto near_end = grid_ceil_offsets(5, 0.99);
  CHECK(near_end.tau1 == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(near_end.tau2 == doctest::Approx(0.21).epsilon(1e-9));
}

TEST_CASE("perturb_first_cell") {
  Generator g = derive(SeedSpec{14, 1, 0});
  const std::size_t n = 4;       // cell [0, 1/4]
  const std::size_t sub = 8;     // mesh 1/32
  const GridPath w = sample_bm(g, 32, 1.0 / 32.0);
  const BridgePath f = sample_bridge(g, sub);

  SUBCASE("Triangle keeps the path bit for bit") {
    const GridPath out = perturb_first_cell(w, f, n, CellMarker::Triangle);
    CHECK(out.values == w.values);
  }
  SUBCASE("Box pins the cell endpoints and the tail") {
    const GridPath out = perturb_first_cell(w, f, n, CellMarker::Box);
    CHECK(out.values[0] == 0.0);
    CHECK(out.values[sub] == w.values[sub]);
    for (std::size_t i = sub; i < w.values.size(); ++i) CHECK(out.values[i] == w.values[i]);
    bool differs = false;
    for (std::size_t i = 1; i < sub; ++i) differs = differs || out.values[i] != w.values[i];
    CHECK(differs);
  }
  SUBCASE("Box with a zero bridge reproduces a linear cell") {
    GridPath linear = w;
    for (std::size_t j = 0; j <= sub; ++j) {
      linear.values[j] = (static_cast<double>(j) / static_cast<double>(sub)) * w.values[sub];
    }
    const BridgePath zero{std::vector<double>(sub + 1, 0.0)};
    const GridPath out = perturb_first_cell(linear, zero, n, CellMarker::Box);
    CHECK(out.values == linear.values);
  }
  SUBCASE("resolution mismatch is rejected") {
    const BridgePath bad = sample_bridge(g, sub + 1);
    CHECK_THROWS_AS(perturb_first_cell(w, bad, n, CellMarker::Box), std::invalid_argument);
    GridPath odd = w;
    odd.dt = 0.013;
    CHECK_THROWS_AS(perturb_first_cell(odd, f, n, CellMarker::Box), std::invalid_argument);
  }
}

namespace {

struct ConcatFixture {
  std::size_t n = 4;
  std::size_t sub = 4;  // mesh 1/16
  double mesh = 1.0 / 16.0;
  GridPath w1, w_tri, w2;
  BridgePath f;
  double r = 0.0;

  explicit ConcatFixture(std::uint64_t rep, std::size_t cell_index = 2) {
    Generator g = derive(SeedSpec{15, 40, rep});
    r = static_cast<double>(cell_index) / static_cast<double>(n);
    if (cell_index == 0) {
      w1 = GridPath{0.0, mesh, {0.0}};
    } else {
      w1 = sample_bm(g, cell_index * sub, mesh);
    }
    w_tri = sample_bm(g, sub, mesh);
    w2 = sample_bm(g, 3 * sub, mesh);
    f = sample_bridge(g, sub);
  }
};

}  // namespace

TEST_CASE("concat_with_cell junctions and marker equality") {
  const ConcatFixture fx(0);
  const auto tri =
      concat_with_cell(fx.r, fx.w1, fx.w_tri, fx.w2, fx.f, fx.n, CellMarker::Triangle);
  const auto box = concat_with_cell(fx.r, fx.w1, fx.w_tri, fx.w2, fx.f, fx.n, CellMarker::Box);
  const std::size_t ir = 2 * fx.sub;

  SUBCASE("prefix is w1") {
    for (std::size_t j = 0; j <= ir; ++j) {
      CHECK(tri.values[j] == fx.w1.values[j]);
      CHECK(box.values[j] == fx.w1.values[j]);
    }
  }
  SUBCASE("cell end value for both markers") {
    const double expected = fx.w_tri.values[fx.sub] + fx.w1.values[ir];
    CHECK(tri.values[ir + fx.sub] == expected);
    CHECK(box.values[ir + fx.sub] == expected);
  }
  SUBCASE("markers agree exactly outside the open cell") {
    CHECK(tri.values.size() == box.values.size());
    for (std::size_t j = 0; j < tri.values.size(); ++j) {
      if (j > ir && j < ir + fx.sub) continue;
      CHECK(tri.values[j] == box.values[j]);
    }
    bool differs = false;
    for (std::size_t j = ir + 1; j < ir + fx.sub; ++j) {
      differs = differs || tri.values[j] != box.values[j];
    }
    CHECK(differs);
  }
  SUBCASE("coupled drivers match at every multiple of 1/n") {
    for (std::size_t k = 0; k * fx.sub < tri.values.size(); ++k) {
      CHECK(tri.values[k * fx.sub] == box.values[k * fx.sub]);
    }
  }
}

TEST_CASE("concat_with_cell grid-point equality across random configurations") {
  for (std::uint64_t rep = 0; rep < 25; ++rep) {
    const ConcatFixture fx(rep, rep % 3);
    const std::size_t ir = (rep % 3) * fx.sub;
    const auto tri =
        concat_with_cell(fx.r, fx.w1, fx.w_tri, fx.w2, fx.f, fx.n, CellMarker::Triangle);
    const auto box = concat_with_cell(fx.r, fx.w1, fx.w_tri, fx.w2, fx.f, fx.n, CellMarker::Box);
    for (std::size_t k = 0; k * fx.sub < tri.values.size(); ++k) {
      REQUIRE(tri.values[k * fx.sub] == box.values[k * fx.sub]);
    }
    for (std::size_t j = 0; j < tri.values.size(); ++j) {
      if (j > ir && j < ir + fx.sub) continue;
      REQUIRE(tri.values[j] == box.values[j]);
    }
  }
}

TEST_CASE("concat_with_cell rejects incompatible meshes") {
  const ConcatFixture fx(1);
  GridPath bad = fx.w_tri;
  bad.dt = 0.01;
  CHECK_THROWS_AS(concat_with_cell(fx.r, fx.w1, bad, fx.w2, fx.f, fx.n, CellMarker::Box),
                  std::invalid_argument);
}

TEST_CASE("refine") {
  Generator g = derive(SeedSpec{16, 1, 0});
  const GridPath w = sample_bm(g, 8, 0.125);

  SUBCASE("coarse grid values are kept verbatim") {
    Generator gr = derive(SeedSpec{16, 2, 0});
    const GridPath fine = refine(gr, w, 4);
    CHECK(fine.dt == doctest::Approx(0.03125).epsilon(1e-16));
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      CHECK(fine.values[4 * i] == w.values[i]);
    }
  }
  SUBCASE("independent refinements differ only inside cells") {
    Generator ga = derive(SeedSpec{16, 3, 0});
    Generator gb = derive(SeedSpec{16, 3, 1});
    const GridPath fa = refine(ga, w, 4);
    const GridPath fb = refine(gb, w, 4);
    bool inner_differs = false;
    for (std::size_t i = 0; i < fa.values.size(); ++i) {
      if (i % 4 == 0) {
        CHECK(fa.values[i] == fb.values[i]);
      } else {
        inner_differs = inner_differs || fa.values[i] != fb.values[i];
      }
    }
    CHECK(inner_differs);
  }
  SUBCASE("marginal law at a mid-cell time") {
    Generator gr = derive(SeedSpec{16, 4, 0});
    const std::size_t n = 100000;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const GridPath coarse = sample_bm(gr, 2, 0.5);
      const GridPath fine = refine(gr, coarse, 2);
      v[i] = fine.values[1] * fine.values[1];  // time 0.25
    }
    const auto s = oracle::summarize(v);
    CHECK(std::abs(s.mean - 0.25) < 3.0 * s.std_error);
  }
}

TEST_CASE("scale_path") {
  Generator g = derive(SeedSpec{17, 1, 0});
  const GridPath w = sample_bm(g, 16, 0.0625);

  SUBCASE("identity at c = 1") {
    const GridPath out = scale_path(w, 1.0);
    CHECK(out.values == w.values);
    CHECK(out.dt == w.dt);
  }
  SUBCASE("group property for dyadic c") {
    const GridPath back = scale_path(scale_path(w, 4.0), 0.25);
    CHECK(back.values == w.values);
    CHECK(back.dt == w.dt);
  }
  SUBCASE("variance is preserved at matching times") {
    Generator gr = derive(SeedSpec{17, 2, 0});
    const std::size_t n = 100000;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const GridPath path = sample_bm(gr, 8, 0.125);
      const GridPath scaled = scale_path(path, 4.0);  // covers [0, 0.25]
      v[i] = scaled.terminal() * scaled.terminal();
    }
    const auto s = oracle::summarize(v);
    CHECK(std::abs(s.mean - 0.25) < 3.0 * s.std_error);
  }
}

TEST_CASE("grid path CSV dump") {
  GridPath w{0.0, 0.5, {0.0, 1.25, -0.5}};
  std::ostringstream out;
  write_csv(w, out);
  CHECK(out.str() == "index,time,value\n0,0,0\n1,0.5,1.25\n2,1,-0.5\n");
}
