#include <random>
#include <sstream>

#include "doctest.h"
#include "pnp/error.hpp"
#include "pnp/sparse.hpp"

using namespace pnp;

namespace {

CsrMatrix two_by_two() {
  CsrBuilder b(2);
  b.add(0, 2.0);
  b.add(1, -1.0);
  b.end_row();
  b.add(1, 2.0);
  b.add(0, -1.0);
  b.end_row();
  return std::move(b).finish();
}

// 1D Laplacian plus shift; SPD.
CsrMatrix laplacian(std::size_t n, double shift) {
  CsrBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) b.add(i - 1, -1.0);
    b.add(i, 2.0 + shift);
    if (i + 1 < n) b.add(i + 1, -1.0);
    b.end_row();
  }
  return std::move(b).finish();
}

double rel_residual(const CsrMatrix& a, const std::vector<double>& x, const std::vector<double>& b) {
  const auto ax = matvec(a, x);
  double r = 0, nb = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    r += (b[i] - ax[i]) * (b[i] - ax[i]);
    nb += b[i] * b[i];
  }
  return std::sqrt(r / nb);
}

}  // namespace

TEST_CASE("builder sorts columns and merges duplicates") {
  CsrBuilder b(2);
  b.add(1, 1.0);
  b.add(0, 2.0);
  b.add(1, 0.5);
  b.end_row();
  b.end_row();
  const CsrMatrix a = std::move(b).finish();
  CHECK(a.nnz() == 2u);
  CHECK(a.cols()[0] == 0u);
  CHECK(a.cols()[1] == 1u);
  CHECK(a.at(0, 1) == 1.5);
  CHECK(a.at(1, 1) == 0.0);
}

TEST_CASE("invalid CSR arrays are rejected") {
  CHECK_THROWS_AS(CsrMatrix(2, {0, 1, 1}, {1, 0}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(CsrMatrix(2, {0, 2, 2}, {1, 0}, {1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(CsrMatrix(1, {0, 1}, {3}, {1.0}), InvalidArgument);
}

TEST_CASE("matvec") {
  const CsrMatrix id = CsrMatrix::identity(3);
  const std::vector<double> x{1, 2, 3};
  CHECK(matvec(id, x) == x);
  CHECK(matvec(two_by_two(), std::vector<double>{1, 1}) == std::vector<double>{1, 1});
  const CsrMatrix zero(2, {0, 0, 0}, {}, {});
  CHECK(matvec(zero, std::vector<double>{5, 6}) == std::vector<double>{0, 0});
  CHECK_THROWS_AS(matvec(id, std::vector<double>{1, 2}), InvalidArgument);
}

TEST_CASE("identity solve") {
  const auto r = solve(CsrMatrix::identity(3), std::vector<double>{1, 2, 3}, SolverConfig{});
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[2] == doctest::Approx(3.0));
  CHECK(r.iterations <= 1);
}

TEST_CASE("2x2 hand solve with every method and preconditioner") {
  for (auto m : {KrylovMethod::CG, KrylovMethod::BiCGStab}) {
    for (auto p : {Preconditioner::None, Preconditioner::Jacobi, Preconditioner::ILU0}) {
      SolverConfig cfg;
      cfg.method = m;
      cfg.preconditioner = p;
      cfg.tolerance = 1e-14;
      const auto r = solve(two_by_two(), std::vector<double>{2, 0}, cfg);
      CAPTURE(to_string(m));
      CAPTURE(to_string(p));
      CHECK(r.x[0] == doctest::Approx(4.0 / 3).epsilon(1e-13));
      CHECK(r.x[1] == doctest::Approx(2.0 / 3).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero right-hand side returns zero") {
  const auto r = solve(laplacian(5, 0.1), std::vector<double>(5, 0.0), SolverConfig{});
  for (double v : r.x) CHECK(v == 0.0);
  CHECK(r.iterations == 0);
}

TEST_CASE("returned residual meets the tolerance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t n : {10u, 100u, 1000u}) {
    const CsrMatrix a = laplacian(n, 1e-3);
    std::vector<double> b(n);
    for (double& v : b) v = u(rng);
    for (auto p : {Preconditioner::None, Preconditioner::Jacobi, Preconditioner::ILU0}) {
      SolverConfig cfg;
      cfg.preconditioner = p;
      const auto r = solve(a, b, cfg);
      CHECK(rel_residual(a, r.x, b) <= cfg.tolerance);
      CHECK(r.residual <= cfg.tolerance);
    }
  }
}

TEST_CASE("deterministic results") {
  const CsrMatrix a = laplacian(200, 0.01);
  std::vector<double> b(200);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(0.1 * i);
  const auto r1 = solve(a, b, SolverConfig{});
  const auto r2 = solve(a, b, SolverConfig{});
  CHECK(r1.x == r2.x);
}

TEST_CASE("non-convergence carries the residual") {
  SolverConfig cfg;
  cfg.preconditioner = Preconditioner::None;
  cfg.max_iterations = 2;
  cfg.tolerance = 1e-14;
  std::vector<double> b(100, 1.0);
  try {
    (void)solve(laplacian(100, 0.0), b, cfg);
    FAIL("expected a throw");
  } catch (const SolverError& e) {
    CHECK(e.residual() > 1e-14);
    CHECK(e.iterations() >= 2);
  }
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.tolerance = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.tolerance = 1e-8;
  cfg.max_iterations = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("symmetry measure and MatrixMarket dump") {
  CHECK(two_by_two().asymmetry() == 0.0);
  const CsrMatrix a(2, {0, 2, 3}, {0, 1, 1}, {1.0, 0.5, 1.0});
  CHECK(a.asymmetry() == 0.5);
  std::ostringstream out;
  write_matrix_market(two_by_two(), out);
  CHECK(out.str().rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  CHECK(out.str().find("2 2 4") != std::string::npos);
}
