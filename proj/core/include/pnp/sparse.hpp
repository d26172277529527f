#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pnp {

/// Square matrix in compressed-sparse-row format. Column indices are
/// strictly increasing within each row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols,
            std::vector<double> vals);

  static CsrMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return vals_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> cols() const noexcept { return cols_; }
  std::span<const double> vals() const noexcept { return vals_; }

  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;

  double max_abs() const;
  /// max |A_ij - A_ji| over the stored pattern and its transpose.
  double asymmetry() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

/// Row-by-row assembly. Entries of the current row may be added in any order
/// and duplicates are summed when the row is closed.
class CsrBuilder {
 public:
  explicit CsrBuilder(std::size_t n, std::size_t nnz_hint = 0);

  void add(std::size_t col, double value);
  /// Closes the current row; must be called exactly n times.
  void end_row();
  CsrMatrix finish() &&;

 private:
  std::size_t n_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

std::vector<double> matvec(const CsrMatrix& a, std::span<const double> x);
void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

enum class KrylovMethod { CG, BiCGStab };
enum class Preconditioner { None, Jacobi, ILU0 };

struct SolverConfig {
  KrylovMethod method = KrylovMethod::CG;
  Preconditioner preconditioner = Preconditioner::ILU0;
  double tolerance = 1e-10;   // relative residual or componentwise backward error
  int max_iterations = 0;     // 0 means 10 * n

  void validate() const;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;      // final relative residual
};

/// Solves A x = b. `initial_guess` may be empty (zero start).
/// Stops when either the relative residual ||b - A x|| / ||b|| or the
/// componentwise backward error max_i |b - A x|_i / (|A| |x| + |b|)_i meets
/// the tolerance (the latter floored at 64 eps). The second test matters for
/// badly scaled systems, where |A| |x| >> |b| puts the first out of reach.
/// The true residual is formed in extended precision and refined.
/// Throws SolverError on breakdown or when max_iterations is exhausted.
SolveResult solve(const CsrMatrix& a, std::span<const double> b, const SolverConfig& config,
                  std::span<const double> initial_guess = {});

/// MatrixMarket coordinate dump (real general), 1-based indices.
void write_matrix_market(const CsrMatrix& a, std::ostream& out);
void write_matrix_market(const CsrMatrix& a, const std::string& path);

std::string to_string(KrylovMethod m);
std::string to_string(Preconditioner p);

}  // namespace pnp
