#include "pnp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pnp/error.hpp"

namespace pnp {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> cols, std::vector<double> vals)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != cols_.size() ||
      cols_.size() != vals_.size()) {
    throw InvalidArgument("inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw InvalidArgument("CSR row pointers decrease");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] >= n_) throw InvalidArgument("CSR column index out of range");
      if (k > row_ptr_[i] && cols_[k] <= cols_[k - 1]) {
        throw InvalidArgument("CSR column indices must be strictly increasing per row");
      }
    }
  }
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1), cols(n);
  std::iota(rp.begin(), rp.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return CsrMatrix(n, std::move(rp), std::move(cols), std::vector<double>(n, 1.0));
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      worst = std::max(worst, std::abs(vals_[k] - at(cols_[k], i)));
    }
  }
  return worst;
}

CsrBuilder::CsrBuilder(std::size_t n, std::size_t nnz_hint) : n_(n) {
  row_ptr_.reserve(n + 1);
  cols_.reserve(nnz_hint);
  vals_.reserve(nnz_hint);
}

void CsrBuilder::add(std::size_t col, double value) {
  if (col >= n_) throw InvalidArgument("column index out of range");
  cols_.push_back(col);
  vals_.push_back(value);
}

void CsrBuilder::end_row() {
  if (row_ptr_.size() > n_) throw InvalidArgument("too many rows");
  const std::size_t start = row_ptr_.back();
  const std::size_t len = cols_.size() - start;
  bool sorted = true;
  for (std::size_t k = start + 1; k < cols_.size(); ++k) {
    if (cols_[k] <= cols_[k - 1]) sorted = false;
  }
  if (!sorted) {
    std::vector<std::size_t> order(len);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cols_[start + a] < cols_[start + b];
    });
    std::vector<std::size_t> c;
    std::vector<double> v;
    for (std::size_t k : order) {
      if (!c.empty() && c.back() == cols_[start + k]) {
        v.back() += vals_[start + k];
      } else {
        c.push_back(cols_[start + k]);
        v.push_back(vals_[start + k]);
      }
    }
    cols_.resize(start);
    vals_.resize(start);
    cols_.insert(cols_.end(), c.begin(), c.end());
    vals_.insert(vals_.end(), v.begin(), v.end());
  }
  row_ptr_.push_back(cols_.size());
}

CsrMatrix CsrBuilder::finish() && {
  if (row_ptr_.size() != n_ + 1) throw InvalidArgument("CsrBuilder: not all rows closed");
  return CsrMatrix(n_, std::move(row_ptr_), std::move(cols_), std::move(vals_));
}

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.size() || y.size() != a.size()) {
    throw InvalidArgument("matvec dimension mismatch");
  }
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.vals();
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

std::vector<double> matvec(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.size());
  matvec(a, x, y);
  return y;
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw InvalidArgument("solver tolerance must lie in (0, 1)");
  }
  if (max_iterations < 0) throw InvalidArgument("solver max_iterations must be >= 1");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

constexpr double kBreakdown = 1e-300;
// Floor for the componentwise backward error test; a tolerance below it is
// not attainable in double precision.
constexpr double kBackwardFloor = 64 * std::numeric_limits<double>::epsilon();

// r = b - A x accumulated in long double.
void residual_extended(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
                       std::span<double> r) {
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.vals();
  for (std::size_t i = 0; i < a.size(); ++i) {
    long double acc = b[i];
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      acc -= static_cast<long double>(vals[k]) * x[cols[k]];
    }
    r[i] = static_cast<double>(acc);
  }
}

// max_i |r_i| / (|A| |x| + |b|)_i
double backward_error(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
                      std::span<const double> r) {
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.vals();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double scale = std::abs(b[i]);
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) scale += std::abs(vals[k] * x[cols[k]]);
    if (r[i] != 0.0) worst = std::max(worst, scale > 0.0 ? std::abs(r[i]) / scale : INFINITY);
  }
  return worst;
}

/// z = M^{-1} r for the configured preconditioner.
class Precond {
 public:
  Precond(const CsrMatrix& a, Preconditioner kind) : a_(a), kind_(kind) {
    const std::size_t n = a.size();
    const auto rp = a.row_ptr();
    const auto cols = a.cols();
    if (kind_ == Preconditioner::Jacobi) {
      inv_diag_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = a.at(i, i);
        inv_diag_[i] = d != 0.0 ? 1.0 / d : 1.0;
      }
    } else if (kind_ == Preconditioner::ILU0) {
      lu_.assign(a.vals().begin(), a.vals().end());
      diag_pos_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        diag_pos_[i] = rp[i + 1];
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
          if (cols[k] == i) diag_pos_[i] = k;
        }
        if (diag_pos_[i] == rp[i + 1]) {
          throw InvalidArgument("ILU0 needs a stored diagonal in every row");
        }
      }
      factor();
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const std::size_t n = a_.size();
    switch (kind_) {
      case Preconditioner::None:
        std::copy(r.begin(), r.end(), z.begin());
        return;
      case Preconditioner::Jacobi:
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag_[i] * r[i];
        return;
      case Preconditioner::ILU0: {
        const auto rp = a_.row_ptr();
        const auto cols = a_.cols();
        for (std::size_t i = 0; i < n; ++i) {
          double s = r[i];
          for (std::size_t k = rp[i]; k < diag_pos_[i]; ++k) s -= lu_[k] * z[cols[k]];
          z[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
          double s = z[i];
          for (std::size_t k = diag_pos_[i] + 1; k < rp[i + 1]; ++k) s -= lu_[k] * z[cols[k]];
          z[i] = s / lu_[diag_pos_[i]];
        }
        return;
      }
    }
  }

 private:
  // In-place ILU(0) on the CSR pattern. A pivot that collapses relative to
  // the original diagonal (singular pure-Neumann operators) is reset to it.
  void factor() {
    const std::size_t n = a_.size();
    const auto rp = a_.row_ptr();
    const auto cols = a_.cols();
    const auto orig = a_.vals();
    std::vector<std::size_t> pos(n, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) pos[cols[k]] = k;
      for (std::size_t k = rp[i]; k < diag_pos_[i]; ++k) {
        const std::size_t p = cols[k];
        lu_[k] /= lu_[diag_pos_[p]];
        for (std::size_t kk = diag_pos_[p] + 1; kk < rp[p + 1]; ++kk) {
          const std::size_t target = pos[cols[kk]];
          if (target != static_cast<std::size_t>(-1)) lu_[target] -= lu_[k] * lu_[kk];
        }
      }
      double& pivot = lu_[diag_pos_[i]];
      const double ref = std::abs(orig[diag_pos_[i]]);
      if (std::abs(pivot) <= 1e-12 * ref || pivot == 0.0) pivot = ref != 0.0 ? ref : 1.0;
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) pos[cols[k]] = static_cast<std::size_t>(-1);
    }
  }

  const CsrMatrix& a_;
  Preconditioner kind_;
  std::vector<double> inv_diag_;
  std::vector<double> lu_;
  std::vector<std::size_t> diag_pos_;
};

struct Outcome {
  int iterations = 0;
  bool converged = false;
};

Outcome run_cg(const CsrMatrix& a, std::span<const double> b, const Precond& m,
               std::vector<double>& x, double target, int max_iter) {
  const std::size_t n = a.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  matvec(a, x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  if (norm2(r) <= target) return {0, true};
  m.apply(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    matvec(a, p, q);
    const double pq = dot(p, q);
    if (std::abs(pq) < kBreakdown) throw SolverError("CG breakdown: p.Ap vanished", norm2(r), it);
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (norm2(r) <= target) return {it, true};
    m.apply(r, z);
    const double rz_new = dot(r, z);
    if (std::abs(rz) < kBreakdown) throw SolverError("CG breakdown: r.z vanished", norm2(r), it);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return {max_iter, false};
}

Outcome run_bicgstab(const CsrMatrix& a, std::span<const double> b, const Precond& m,
                     std::vector<double>& x, double target, int max_iter) {
  const std::size_t n = a.size();
  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
  matvec(a, x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  if (norm2(r) <= target) return {0, true};
  r0 = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = dot(r0, r);
    if (std::abs(rho_new) < kBreakdown) throw SolverError("BiCGStab breakdown: rho", norm2(r), it);
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    m.apply(p, ph);
    matvec(a, ph, v);
    const double r0v = dot(r0, v);
    if (std::abs(r0v) < kBreakdown) throw SolverError("BiCGStab breakdown: r0.v", norm2(r), it);
    alpha = rho / r0v;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= target) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
      return {it, true};
    }
    m.apply(s, sh);
    matvec(a, sh, t);
    const double tt = dot(t, t);
    if (tt < kBreakdown) throw SolverError("BiCGStab breakdown: t.t", norm2(s), it);
    omega = dot(t, s) / tt;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * ph[i] + omega * sh[i];
      r[i] = s[i] - omega * t[i];
    }
    if (norm2(r) <= target) return {it, true};
    if (std::abs(omega) < kBreakdown) throw SolverError("BiCGStab breakdown: omega", norm2(r), it);
  }
  return {max_iter, false};
}

}  // namespace

SolveResult solve(const CsrMatrix& a, std::span<const double> b, const SolverConfig& config,
                  std::span<const double> initial_guess) {
  config.validate();
  const std::size_t n = a.size();
  if (b.size() != n) throw InvalidArgument("rhs length does not match matrix size");
  if (!initial_guess.empty() && initial_guess.size() != n) {
    throw InvalidArgument("initial guess length does not match matrix size");
  }

  SolveResult result;
  result.x.assign(n, 0.0);
  if (!initial_guess.empty()) std::copy(initial_guess.begin(), initial_guess.end(), result.x.begin());

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    return result;
  }
  const double target = config.tolerance * bnorm;
  const int budget = config.max_iterations > 0 ? config.max_iterations
                                               : static_cast<int>(std::max<std::size_t>(10 * n, 10));

  const Precond m(a, config.preconditioner);
  auto krylov = [&](std::span<const double> rhs, std::vector<double>& x, double goal, int left) {
    return config.method == KrylovMethod::CG ? run_cg(a, rhs, m, x, goal, left)
                                             : run_bicgstab(a, rhs, m, x, goal, left);
  };
  std::vector<double> r(n), d(n);
  Outcome o = krylov(b, result.x, target, budget);
  int used = o.iterations;
  // Iterative refinement: the recurrence residual drifts from the true one,
  // and b - A x loses digits to cancellation when |A||x| >> |b - A x|, so the
  // true residual is formed in extended precision and a correction is solved.
  const double omega_target = std::max(config.tolerance, kBackwardFloor);
  double previous = INFINITY;
  double omega = INFINITY;
  for (int stalled = 0;;) {
    residual_extended(a, result.x, b, r);
    result.residual = norm2(r) / bnorm;
    omega = backward_error(a, result.x, b, r);
    if (result.residual <= config.tolerance || omega <= omega_target) {
      result.iterations = used;
      return result;
    }
    stalled = result.residual < 0.5 * previous ? 0 : stalled + 1;
    if (!o.converged || used >= budget || stalled >= 4) break;
    previous = result.residual;
    std::fill(d.begin(), d.end(), 0.0);
    o = krylov(r, d, 0.5 * target, budget - used);
    used += o.iterations;
    for (std::size_t i = 0; i < n; ++i) result.x[i] += d[i];
  }
  result.iterations = used;
  std::ostringstream msg;
  msg << to_string(config.method) << " did not converge: relative residual " << std::scientific
      << std::setprecision(3) << result.residual << " (backward error " << omega << ") after " << used << " iterations";
  throw SolverError(msg.str(), result.residual, used);
}

void write_matrix_market(const CsrMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.size() << ' ' << a.size() << ' ' << a.nnz() << '\n';
  out << std::setprecision(17);
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.vals();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << vals[k] << '\n';
    }
  }
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_matrix_market(a, out);
  if (!out) throw Error("failed writing " + path);
}

std::string to_string(KrylovMethod m) { return m == KrylovMethod::CG ? "cg" : "bicgstab"; }

std::string to_string(Preconditioner p) {
  switch (p) {
    case Preconditioner::None: return "none";
    case Preconditioner::Jacobi: return "jacobi";
    case Preconditioner::ILU0: return "ilu0";
  }
  return "none";
}

}  // namespace pnp
