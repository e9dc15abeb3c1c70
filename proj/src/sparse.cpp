#include "msdg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msdg {

void CsrMatrix::multiply(const double* x, double* y, bool parallel) const {
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < n; ++r) {
    double s = 0;
    for (int64_t k = rowptr[r]; k < rowptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
    y[r] = s;
  }
}

double& CsrMatrix::at(int r, int c) {
  auto lo = cols.begin() + rowptr[r], hi = cols.begin() + rowptr[r + 1];
  auto it = std::lower_bound(lo, hi, c);
  if (it == hi || *it != c) throw std::runtime_error("csr: entry outside pattern");
  return vals[it - cols.begin()];
}

double CsrMatrix::get(int r, int c) const {
  auto lo = cols.begin() + rowptr[r], hi = cols.begin() + rowptr[r + 1];
  auto it = std::lower_bound(lo, hi, c);
  if (it == hi || *it != c) return 0.0;
  return vals[it - cols.begin()];
}

CsrMatrix csr_from_adjacency(const std::vector<std::vector<int>>& rows) {
  CsrMatrix m;
  m.n = (int)rows.size();
  m.rowptr.resize(m.n + 1);
  m.rowptr[0] = 0;
  for (int r = 0; r < m.n; ++r) m.rowptr[r + 1] = m.rowptr[r] + (int64_t)rows[r].size();
  m.cols.reserve(m.rowptr[m.n]);
  for (const auto& row : rows) m.cols.insert(m.cols.end(), row.begin(), row.end());
  m.vals.assign(m.rowptr[m.n], 0.0);
  return m;
}

namespace {

double dot_serial(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot_serial(a, a)); }

std::vector<double> jacobi_diag(const CsrMatrix& A) {
  std::vector<double> d(A.n, 1.0);
  for (int r = 0; r < A.n; ++r) {
    double v = A.get(r, r);
    d[r] = (v != 0.0) ? 1.0 / v : 1.0;
  }
  return d;
}

double true_residual(const CsrMatrix& A, const std::vector<double>& b,
                     const std::vector<double>& x, double bnorm) {
  std::vector<double> r(A.n);
  A.multiply(x.data(), r.data());
  for (int i = 0; i < A.n; ++i) r[i] = b[i] - r[i];
  return norm2(r) / bnorm;
}

}  // namespace

SolveResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, const SolveOptions& opt,
                     bool* indefinite) {
  SolveResult res;
  res.x.assign(A.n, 0.0);
  if (indefinite) *indefinite = false;
  double bnorm = norm2(b);
  if (bnorm == 0) {
    res.converged = true;
    return res;
  }
  std::vector<double> r = b, z(A.n), p(A.n), q(A.n);
  auto d = jacobi_diag(A);
  for (int i = 0; i < A.n; ++i) z[i] = d[i] * r[i];
  p = z;
  double rz = dot_serial(r, z);
  for (int it = 1; it <= opt.max_iter; ++it) {
    A.multiply(p.data(), q.data());
    double pq = dot_serial(p, q);
    if (!(pq > 0)) {
      if (indefinite) *indefinite = true;
      res.iterations = it;
      res.residual = true_residual(A, b, res.x, bnorm);
      return res;
    }
    double alpha = rz / pq;
    for (int i = 0; i < A.n; ++i) res.x[i] += alpha * p[i];
    for (int i = 0; i < A.n; ++i) r[i] -= alpha * q[i];
    res.iterations = it;
    if (norm2(r) / bnorm <= opt.tol) {
      res.residual = true_residual(A, b, res.x, bnorm);
      if (res.residual <= 10 * opt.tol) {
        res.converged = true;
        return res;
      }
    }
    for (int i = 0; i < A.n; ++i) z[i] = d[i] * r[i];
    double rz2 = dot_serial(r, z);
    double beta = rz2 / rz;
    rz = rz2;
    for (int i = 0; i < A.n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.residual = true_residual(A, b, res.x, bnorm);
  res.converged = res.residual <= opt.tol;
  return res;
}

SolveResult bicgstab_solve(const CsrMatrix& A, const std::vector<double>& b,
                           const SolveOptions& opt) {
  SolveResult res;
  res.x.assign(A.n, 0.0);
  double bnorm = norm2(b);
  if (bnorm == 0) {
    res.converged = true;
    return res;
  }
  auto d = jacobi_diag(A);
  std::vector<double> r(A.n), rhat(A.n), v(A.n), p(A.n), phat(A.n), shat(A.n), s(A.n), t(A.n);
  // restart from the best iterate on breakdown or runaway growth; penalty
  // dominated systems drive plain bicgstab divergent otherwise
  std::vector<double> xbest = res.x;
  double best = 1e300;
  int it = 0;
  while (it < opt.max_iter) {
    res.x = xbest;
    A.multiply(res.x.data(), r.data());
    for (int i = 0; i < A.n; ++i) r[i] = b[i] - r[i];
    rhat = r;
    std::fill(v.begin(), v.end(), 0.0);
    std::fill(p.begin(), p.end(), 0.0);
    double rho = 1, alpha = 1, omega = 1;
    double rn = norm2(r) / bnorm;
    if (rn < best) {
      best = rn;
      xbest = res.x;
    }
    bool broke = false;
    while (it < opt.max_iter) {
      res.iterations = ++it;
      double rho2 = dot_serial(rhat, r);
      if (std::abs(rho2) < 1e-280) {
        broke = true;
        break;
      }
      double beta = (rho2 / rho) * (alpha / omega);
      rho = rho2;
      for (int i = 0; i < A.n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (int i = 0; i < A.n; ++i) phat[i] = d[i] * p[i];
      A.multiply(phat.data(), v.data());
      double rv = dot_serial(rhat, v);
      if (std::abs(rv) < 1e-280) {
        broke = true;
        break;
      }
      alpha = rho / rv;
      for (int i = 0; i < A.n; ++i) s[i] = r[i] - alpha * v[i];
      if (norm2(s) / bnorm <= opt.tol) {
        for (int i = 0; i < A.n; ++i) res.x[i] += alpha * phat[i];
        res.residual = true_residual(A, b, res.x, bnorm);
        res.converged = res.residual <= 10 * opt.tol;
        if (res.converged) return res;
      }
      for (int i = 0; i < A.n; ++i) shat[i] = d[i] * s[i];
      A.multiply(shat.data(), t.data());
      double tt = dot_serial(t, t);
      if (tt == 0) {
        broke = true;
        break;
      }
      omega = dot_serial(t, s) / tt;
      for (int i = 0; i < A.n; ++i) res.x[i] += alpha * phat[i] + omega * shat[i];
      for (int i = 0; i < A.n; ++i) r[i] = s[i] - omega * t[i];
      rn = norm2(r) / bnorm;
      if (rn < best) {
        best = rn;
        xbest = res.x;
      }
      if (rn <= opt.tol) {
        res.residual = true_residual(A, b, res.x, bnorm);
        if (res.residual <= 10 * opt.tol) {
          res.converged = true;
          return res;
        }
      }
      if (rn > 1e4 * best || std::abs(omega) < 1e-280) {
        broke = true;
        break;
      }
    }
    if (!broke) break;
  }
  res.x = xbest;
  res.residual = true_residual(A, b, res.x, bnorm);
  res.converged = res.residual <= opt.tol;
  return res;
}

SolveResult solve_sparse(const SparseSystem& sys, const SolveOptions& opt) {
  if ((int)sys.rhs.size() != sys.A.n) throw std::invalid_argument("solve: rhs size mismatch");
  if (sys.symmetric) {
    bool indefinite = false;
    SolveResult res = cg_solve(sys.A, sys.rhs, opt, &indefinite);
    if (res.converged || !indefinite) return res;
  }
  return bicgstab_solve(sys.A, sys.rhs, opt);
}

void band_cholesky_factor(BandMatrix& m) {
  for (int i = 0; i < m.n; ++i) {
    int j0 = std::max(0, i - m.bw);
    for (int j = j0; j < i; ++j) {
      double s = m.get(i, j);
      int k0 = std::max(j0, j - m.bw);
      for (int k = k0; k < j; ++k) s -= m.get(i, k) * m.get(j, k);
      m.at(i, j) = s / m.get(j, j);
    }
    double s = m.get(i, i);
    for (int k = j0; k < i; ++k) s -= m.get(i, k) * m.get(i, k);
    if (!(s > 0)) throw std::runtime_error("band cholesky: matrix not positive definite");
    m.at(i, i) = std::sqrt(s);
  }
}

void band_cholesky_solve(const BandMatrix& chol, std::vector<double>& x) {
  const int n = chol.n, bw = chol.bw;
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int j = std::max(0, i - bw); j < i; ++j) s -= chol.get(i, j) * x[j];
    x[i] = s / chol.get(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    int jmax = std::min(n - 1, i + bw);
    for (int j = i + 1; j <= jmax; ++j) s -= chol.get(j, i) * x[j];
    x[i] = s / chol.get(i, i);
  }
}

}  // namespace msdg
