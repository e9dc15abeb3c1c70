#include "msdg/homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msdg {

namespace {

// reference hat gradients on the two congruent cell triangles, legs h
struct CellGrads {
  Vec2 lower[3], upper[3];
};

CellGrads cell_grads(double h) {
  CellGrads g;
  g.lower[0] = {-1 / h, 0};
  g.lower[1] = {1 / h, -1 / h};
  g.lower[2] = {0, 1 / h};
  g.upper[0] = {0, -1 / h};
  g.upper[1] = {1 / h, 0};
  g.upper[2] = {-1 / h, 1 / h};
  return g;
}

inline int wrap(int i, int n) { return i >= n ? i - n : i; }

}  // namespace

double CellSolution::eval_chi(int j, Vec2 y) const {
  double fx = y.x - std::floor(y.x), fy = y.y - std::floor(y.y);
  double u = fx * n, v = fy * n;
  int i = std::min((int)u, n - 1), k = std::min((int)v, n - 1);
  u -= i;
  v -= k;
  const auto& c = chi[j];
  int n00 = k * n + i, n10 = k * n + wrap(i + 1, n), n11 = wrap(k + 1, n) * n + wrap(i + 1, n),
      n01 = wrap(k + 1, n) * n + i;
  if (v <= u) return (1 - u) * c[n00] + (u - v) * c[n10] + v * c[n11];
  return (1 - v) * c[n00] + u * c[n11] + (v - u) * c[n01];
}

CellSolution solve_cell_problem(const CoefficientField& a, int n, const SolveOptions& opt) {
  if (n < 2) throw std::invalid_argument("cell problem: n must be at least 2");
  CellSolution cs;
  cs.n = n;
  const double h = 1.0 / n;
  const double area = 0.5 * h * h;
  const auto G = cell_grads(h);

  // wrapped node ids and per-triangle data; triangles enumerated cell by
  // cell, lower then upper
  const int nn = n * n;
  const int nt = 2 * n * n;
  std::vector<std::array<int, 3>> tnodes(nt);
  std::vector<double> aval(nt);
  for (int cj = 0; cj < n; ++cj)
    for (int ci = 0; ci < n; ++ci) {
      int v00 = cj * n + ci, v10 = cj * n + wrap(ci + 1, n);
      int v11 = wrap(cj + 1, n) * n + wrap(ci + 1, n), v01 = wrap(cj + 1, n) * n + ci;
      int t = 2 * (cj * n + ci);
      tnodes[t] = {v00, v10, v11};
      tnodes[t + 1] = {v00, v11, v01};
      double x0 = ci * h, y0 = cj * h;
      aval[t] = a.eval_unit({x0 + 2 * h / 3, y0 + h / 3});
      aval[t + 1] = a.eval_unit({x0 + h / 3, y0 + 2 * h / 3});
      if (!(aval[t] > 0) || !(aval[t + 1] > 0))
        throw std::runtime_error("cell problem: coefficient not positive");
    }
  auto grads_of = [&](int t) { return (t & 1) ? G.upper : G.lower; };

  // assemble once; node 0 is pinned to fix the constant
  std::vector<std::vector<int>> adj(nn);
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) adj[tnodes[t][i]].push_back(tnodes[t][j]);
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  CsrMatrix A = csr_from_adjacency(adj);
  for (int t = 0; t < nt; ++t) {
    const auto* g = grads_of(t);
    double w = aval[t] * area;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A.at(tnodes[t][i], tnodes[t][j]) += w * dot(g[i], g[j]);
  }

  std::array<std::vector<double>, 2> rhs;
  for (int dir = 0; dir < 2; ++dir) {
    rhs[dir].assign(nn, 0.0);
    Vec2 e = dir == 0 ? Vec2{1, 0} : Vec2{0, 1};
    for (int t = 0; t < nt; ++t) {
      const auto* g = grads_of(t);
      double w = aval[t] * area;
      for (int i = 0; i < 3; ++i) rhs[dir][tnodes[t][i]] -= w * dot(e, g[i]);
    }
  }

  // reduced system without node 0
  std::vector<std::vector<int>> radj(nn - 1);
  for (int r = 1; r < nn; ++r)
    for (int64_t k = A.rowptr[r]; k < A.rowptr[r + 1]; ++k)
      if (A.cols[k] != 0) radj[r - 1].push_back(A.cols[k] - 1);
  CsrMatrix R = csr_from_adjacency(radj);
  for (int r = 1; r < nn; ++r)
    for (int64_t k = A.rowptr[r]; k < A.rowptr[r + 1]; ++k)
      if (A.cols[k] != 0) R.at(r - 1, A.cols[k] - 1) = A.vals[k];

  // the two solves run concurrently, each on one thread
  std::array<SolveResult, 2> sol;
#pragma omp parallel for schedule(static, 1) num_threads(2)
  for (int dir = 0; dir < 2; ++dir) {
    std::vector<double> b(rhs[dir].begin() + 1, rhs[dir].end());
    sol[dir] = cg_solve(R, b, opt, nullptr);
  }
  for (int dir = 0; dir < 2; ++dir) {
    if (!sol[dir].converged) throw std::runtime_error("cell problem: solver did not converge");
    cs.chi[dir].assign(nn, 0.0);
    for (int r = 1; r < nn; ++r) cs.chi[dir][r] = sol[dir].x[r - 1];
    double mean = 0;
    for (int t = 0; t < nt; ++t)
      mean += (area / 3) *
              (cs.chi[dir][tnodes[t][0]] + cs.chi[dir][tnodes[t][1]] + cs.chi[dir][tnodes[t][2]]);
    for (auto& v : cs.chi[dir]) v -= mean;
  }

  for (int kdir = 0; kdir < 2; ++kdir) {
    Vec2 ek = kdir == 0 ? Vec2{1, 0} : Vec2{0, 1};
    double s0 = 0, s1 = 0;
    for (int t = 0; t < nt; ++t) {
      const auto* g = grads_of(t);
      Vec2 gc = cs.chi[kdir][tnodes[t][0]] * g[0] + cs.chi[kdir][tnodes[t][1]] * g[1] +
                cs.chi[kdir][tnodes[t][2]] * g[2];
      s0 += aval[t] * area * (ek.x + gc.x);
      s1 += aval[t] * area * (ek.y + gc.y);
    }
    cs.a_star[0][kdir] = s0;
    cs.a_star[1][kdir] = s1;
  }
  return cs;
}

std::vector<Vec2> recover_gradient(const TriMesh& mesh, const std::vector<double>& u) {
  std::vector<Vec2> g(mesh.nodes.size(), {0, 0});
  std::vector<double> w(mesh.nodes.size(), 0.0);
  for (int t = 0; t < (int)mesh.tris.size(); ++t) {
    auto gr = mesh.grads(t);
    const auto& v = mesh.tris[t];
    Vec2 gt = u[v[0]] * gr[0] + u[v[1]] * gr[1] + u[v[2]] * gr[2];
    double at = mesh.area(t);
    for (int i = 0; i < 3; ++i) {
      g[v[i]] = g[v[i]] + at * gt;
      w[v[i]] += at;
    }
  }
  for (size_t i = 0; i < g.size(); ++i) g[i] = (1.0 / w[i]) * g[i];
  return g;
}

P1Function corrector_u1(const P1Function& u0, const CellSolution& cell, double eps) {
  const TriMesh& mesh = *u0.mesh;
  auto g = recover_gradient(mesh, u0.values);
  P1Function u1;
  u1.mesh = &mesh;
  u1.values.resize(u0.values.size());
  for (size_t p = 0; p < mesh.nodes.size(); ++p) {
    Vec2 y{mesh.nodes[p].x / eps, mesh.nodes[p].y / eps};
    u1.values[p] =
        u0.values[p] + eps * (cell.eval_chi(0, y) * g[p].x + cell.eval_chi(1, y) * g[p].y);
  }
  return u1;
}

P1Function solve_homogenized(const TriMesh& mesh, const std::array<std::array<double, 2>, 2>& a_star,
                             const ScalarFn& f, const ScalarFn& g, const SolveOptions& opt,
                             SolveResult* info) {
  auto raw = assemble_p1_tensor_raw(mesh, a_star, f);
  auto ds = apply_dirichlet(mesh, raw, g);
  auto res = solve_sparse(ds.sys, opt);
  if (info) *info = res;
  if (!res.converged) throw std::runtime_error("homogenized solve did not converge");
  return scatter_solution(mesh, ds, res.x);
}

}  // namespace msdg
