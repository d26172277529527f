#include <cmath>

#include "doctest.h"
#include "pnp/error.hpp"
#include "pnp/grid.hpp"

using namespace pnp;

TEST_CASE("spacing and cell volume") {
  const Grid a = build_grid(1, {1.0}, {2});
  CHECK(a.spacing(0) == 0.5);
  CHECK(a.cell_volume() == 0.5);

  const Grid b = build_grid(3, {1, 1, 1}, {30, 30, 30});
  CHECK(b.spacing(2) == doctest::Approx(1.0 / 30).epsilon(1e-15));
  CHECK(b.cell_volume() == doctest::Approx(1.0 / 27000).epsilon(1e-14));
  CHECK(b.num_cells() == 27000u);

  const Grid c = build_grid(2, {2, 1}, {4, 2});
  CHECK(c.spacing(0) == 0.5);
  CHECK(c.spacing(1) == 0.5);
  CHECK(c.cell_volume() == 0.25);
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(build_grid(0, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(build_grid(4, {1, 1, 1, 1}, {1, 1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(build_grid(1, {0.0}, {3}), InvalidArgument);
  CHECK_THROWS_AS(build_grid(1, {-1.0}, {3}), InvalidArgument);
  CHECK_THROWS_AS(build_grid(2, {1, 1}, {3, 0}), InvalidArgument);
  CHECK_THROWS_AS(build_grid(2, {1}, {3, 3}), InvalidArgument);
}

TEST_CASE("spacing times count reproduces the length") {
  for (int n : {1, 3, 7, 30, 97}) {
    for (double l : {0.1, 1.0, 2.7, 1e3}) {
      const Grid g = build_grid(1, {l}, {n});
      CHECK(std::abs(g.spacing(0) * n - l) <= 4 * std::nextafter(l, 2 * l) - 4 * l);
    }
  }
}

TEST_CASE("flat and multi-index round trip, axis 0 fastest") {
  const Grid g = build_grid(3, {1, 2, 3}, {3, 4, 5});
  for (std::size_t c = 0; c < g.num_cells(); ++c) CHECK(g.flat(g.multi(c)) == c);
  CHECK(g.flat({1, 0, 0}) == 1u);
  CHECK(g.flat({0, 1, 0}) == 3u);
  CHECK(g.flat({0, 0, 1}) == 12u);
  CHECK(g.stride(0) == 1u);
  CHECK(g.stride(1) == 3u);
  CHECK(g.stride(2) == 12u);
}

TEST_CASE("cell volumes sum to the domain volume") {
  const Grid g = build_grid(3, {0.3, 1.7, 2.9}, {7, 11, 13});
  double sum = 0.0;
  for (std::size_t c = 0; c < g.num_cells(); ++c) sum += g.cell_volume();
  CHECK(std::abs(sum - 0.3 * 1.7 * 2.9) <= 1e-13 * 0.3 * 1.7 * 2.9);
  CHECK(g.domain_volume() == doctest::Approx(0.3 * 1.7 * 2.9).epsilon(1e-14));
}

TEST_CASE("cell centers are midpoints") {
  const Grid g = build_grid(1, {1.0}, {2});
  CHECK(g.cell_center(std::size_t{0})[0] == 0.25);
  CHECK(g.cell_center(std::size_t{1})[0] == 0.75);
  const Grid h = build_grid(3, {1, 1, 1}, {30, 30, 30});
  // (7 + 0.5) / 30 lands exactly on 0.25, so indicator edges are reproducible.
  CHECK(h.cell_center(MultiIndex{7, 0, 0})[0] == 0.25);
}

TEST_CASE("boundary faces") {
  const Grid a = build_grid(1, {1.0}, {3});
  const auto fa = a.boundary_faces(0, Side::Minus);
  REQUIRE(fa.size() == 1u);
  CHECK(fa[0].cell == MultiIndex{0, 0, 0});
  CHECK(a.face_center(fa[0])[0] == 0.0);

  const Grid b = build_grid(2, {2, 1}, {4, 2});
  const auto fb = b.boundary_faces(0, Side::Plus);
  REQUIRE(fb.size() == 2u);
  for (const auto& f : fb) {
    CHECK(f.cell[0] == 3);
    CHECK(b.face_center(f)[0] == 2.0);
    CHECK(b.is_boundary(f));
  }

  const Grid c = build_grid(3, {1, 1, 1}, {30, 30, 30});
  CHECK(c.boundary_faces(1, Side::Minus).size() == 900u);
  for (const auto& f : c.boundary_faces(2, Side::Plus)) CHECK(c.face_center(f)[2] == 1.0);
}

TEST_CASE("interior faces have one canonical owner") {
  const Grid g = build_grid(2, {1, 1}, {3, 2});
  const FaceId up{{1, 0, 0}, 0, Side::Plus};
  const FaceId down{{2, 0, 0}, 0, Side::Minus};
  CHECK(g.canonical(up) == g.canonical(down));
  CHECK(g.canonical(down) == up);
  CHECK_FALSE(g.is_boundary(up));
  CHECK(g.face_center(up) == g.face_center(down));
  CHECK(g.num_interior_faces(0) == 4u);
  CHECK(g.num_interior_faces(1) == 3u);
}
