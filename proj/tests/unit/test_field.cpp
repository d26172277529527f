#include <memory>

#include "doctest.h"
#include "pnp/diagnostics.hpp"
#include "pnp/error.hpp"
#include "pnp/field.hpp"

using namespace pnp;

namespace {
std::shared_ptr<const Grid> grid(int dim, std::vector<double> l, std::vector<int> n) {
  return std::make_shared<const Grid>(dim, std::move(l), std::move(n));
}
}  // namespace

TEST_CASE("midpoint sampling") {
  const auto g1 = grid(1, {1.0}, {2});
  const ScalarField x = sample_initial(g1, expression_field("x"));
  CHECK(x[0] == 0.25);
  CHECK(x[1] == 0.75);

  const auto g2 = grid(2, {2.0, 1.0}, {3, 5});
  const ScalarField c = sample_initial(g2, constant_field(3.0));
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == 3.0);
}

TEST_CASE("indicator on the 30^3 grid") {
  const auto g = grid(3, {1, 1, 1}, {30, 30, 30});
  const ScalarField rho =
      sample_initial(g, expression_field("chi(x,0,0.25)*chi(y,0,0.25)*chi(z,0,0.25)"));
  std::size_t ones = 0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const Point p = g->cell_center(k);
    const bool inside = p[0] <= 0.25 && p[1] <= 0.25 && p[2] <= 0.25;
    CHECK(rho[k] == (inside ? 1.0 : 0.0));
    ones += inside;
  }
  // centers (k + 1/2)/30 <= 1/4  <=>  k <= 7
  CHECK(ones == 8u * 8u * 8u);
  CHECK(rho.min() == 0.0);
  CHECK(rho.max() == 1.0);
}

TEST_CASE("non-finite samples are reported with the cell") {
  const auto g = grid(1, {1.0}, {4});
  try {
    (void)sample_initial(g, expression_field("1/(x-0.375)"));
    FAIL("expected a throw");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("cell (1, 0, 0)") != std::string::npos);
  }
}

TEST_CASE("face values at face centers") {
  const Grid g = build_grid(1, {1.0}, {2});
  const FaceId mid{{0, 0, 0}, 0, Side::Plus};
  CHECK(face_value(g, constant_field(2.5), mid) == 2.5);
  CHECK(face_value(g, expression_field("x"), mid) == 0.5);
  CHECK(face_value(g, expression_field("1+x"), mid) == 1.5);
  CHECK_THROWS_AS(face_value(g, expression_field("log(x-0.5)"), mid), InvalidArgument);
}

TEST_CASE("plus-face sampling along an axis") {
  const Grid g = build_grid(2, {1.0, 2.0}, {2, 2});
  const auto v = sample_plus_faces(g, expression_field("10*x + y"), 1);
  REQUIRE(v.size() == 4u);
  CHECK(v[0] == doctest::Approx(2.5 + 1.0));
  CHECK(v[1] == doctest::Approx(7.5 + 1.0));
  CHECK(v[2] == doctest::Approx(2.5 + 2.0));
}

TEST_CASE("sampling a constant conserves c times the volume") {
  const auto g = grid(3, {0.7, 1.3, 2.2}, {5, 9, 4});
  for (double c : {0.0, 1.0, 3.7, 1e-6}) {
    const double m = total_mass(sample_initial(g, constant_field(c)));
    CHECK(std::abs(m - c * 0.7 * 1.3 * 2.2) <= 1e-13 * std::max(1.0, c));
  }
}

TEST_CASE("boundary spec bookkeeping") {
  BoundarySpec b;
  CHECK_FALSE(b.any_dirichlet(3));
  b.set_dirichlet(2, Side::Plus, constant_field(0.0), {constant_field(1.0)});
  CHECK(b.is_dirichlet(2, Side::Plus));
  CHECK_FALSE(b.is_dirichlet(2, Side::Minus));
  CHECK(b.any_dirichlet(3));
  CHECK_FALSE(b.any_dirichlet(2));
}
