#pragma once

#include <cstdint>
#include <vector>

namespace msdg {

struct CsrMatrix {
  int n = 0;
  std::vector<int64_t> rowptr;
  std::vector<int> cols;
  std::vector<double> vals;

  // y = A x; row-parallel, so results do not depend on thread count
  void multiply(const double* x, double* y, bool parallel = true) const;
  double& at(int r, int c);
  double get(int r, int c) const;
};

// rows: sorted unique column lists
CsrMatrix csr_from_adjacency(const std::vector<std::vector<int>>& rows);

struct SparseSystem {
  CsrMatrix A;
  std::vector<double> rhs;
  bool symmetric = false;
};

struct SolveOptions {
  double tol = 1e-10;  // relative residual target
  int max_iter = 20000;
};

struct SolveResult {
  std::vector<double> x;
  bool converged = false;
  double residual = 0;  // achieved |b - Ax| / |b|
  int iterations = 0;
};

// Jacobi-preconditioned CG; flags nonpositive curvature so callers can fall
// back to BiCGStab
SolveResult cg_solve(const CsrMatrix& A, const std::vector<double>& b, const SolveOptions& opt,
                     bool* indefinite = nullptr);
SolveResult bicgstab_solve(const CsrMatrix& A, const std::vector<double>& b,
                           const SolveOptions& opt);

// routes on the symmetry flag; CG falls back to BiCGStab when curvature fails
SolveResult solve_sparse(const SparseSystem& sys, const SolveOptions& opt = {});

// dense symmetric band, lower storage: entry (i,j), j in [i-bw, i]
struct BandMatrix {
  int n = 0, bw = 0;
  std::vector<double> a;

  void init(int n_, int bw_) {
    n = n_;
    bw = bw_;
    a.assign((size_t)n * (bw + 1), 0.0);
  }
  double& at(int i, int j) { return a[(size_t)i * (bw + 1) + (j - i + bw)]; }
  double get(int i, int j) const { return a[(size_t)i * (bw + 1) + (j - i + bw)]; }
};

// in-place Cholesky of a positive definite band matrix
void band_cholesky_factor(BandMatrix& m);
void band_cholesky_solve(const BandMatrix& chol, std::vector<double>& x);

}  // namespace msdg
