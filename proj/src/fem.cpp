#include "msdg/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace msdg {

double P1Function::eval(Vec2 p) const {
  int t = mesh->locate(p);
  if (t < 0) throw std::runtime_error("p1: point outside mesh");
  auto lam = mesh->bary(t, p);
  const auto& v = mesh->tris[t];
  return lam[0] * values[v[0]] + lam[1] * values[v[1]] + lam[2] * values[v[2]];
}

P1Function interpolate_p1(const TriMesh& mesh, const ScalarFn& fn) {
  P1Function u;
  u.mesh = &mesh;
  u.values.resize(mesh.nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i) u.values[i] = fn(mesh.nodes[i]);
  return u;
}

namespace {

std::vector<std::vector<int>> node_adjacency(const TriMesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i) adj[i].push_back((int)i);
  for (const auto& e : mesh.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

// local(t) fills a 3x3 stiffness block; merge order is ascending t for every
// matrix slot and load slot, in both the serial and the parallel path
template <class LocalFn>
RawSystem assemble_core(const TriMesh& mesh, const LocalFn& local, const ScalarFn& f,
                        bool parallel) {
  RawSystem out;
  out.A = csr_from_adjacency(node_adjacency(mesh));
  out.load.assign(mesh.nodes.size(), 0.0);
  const int nt = (int)mesh.tris.size();

  if (!parallel) {
    double B[3][3];
    for (int t = 0; t < nt; ++t) {
      local(t, B);
      const auto& v = mesh.tris[t];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.A.at(v[i], v[j]) += B[i][j];
      double w = mesh.area(t) / 3.0;
      auto p = mesh.tri_xy(t);
      for (int i = 0; i < 3; ++i) out.load[v[i]] += w * f(p[i]);
    }
    return out;
  }

  std::vector<std::array<double, 9>> blocks(nt);
  std::vector<std::array<double, 3>> loads(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    double B[3][3];
    local(t, B);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) blocks[t][i * 3 + j] = B[i][j];
    double w = mesh.area(t) / 3.0;
    auto p = mesh.tri_xy(t);
    for (int i = 0; i < 3; ++i) loads[t][i] = w * f(p[i]);
  }

  // per-node incidence, ascending t by construction
  std::vector<std::vector<std::array<int, 2>>> inc(mesh.nodes.size());
  for (int t = 0; t < nt; ++t)
    for (int i = 0; i < 3; ++i) inc[mesh.tris[t][i]].push_back({t, i});
#pragma omp parallel for schedule(static)
  for (int64_t r = 0; r < (int64_t)mesh.nodes.size(); ++r) {
    for (const auto& ti : inc[r]) {
      int t = ti[0], i = ti[1];
      const auto& v = mesh.tris[t];
      for (int j = 0; j < 3; ++j) out.A.at((int)r, v[j]) += blocks[t][i * 3 + j];
      out.load[r] += loads[t][i];
    }
  }
  return out;
}

}  // namespace

RawSystem assemble_p1_raw(const TriMesh& mesh, const CoefficientField& a, const ScalarFn& f,
                          bool parallel) {
  auto local = [&](int t, double B[3][3]) {
    double at = a.eval(mesh.centroid(t));
    if (!(at > 0)) throw std::runtime_error("fem: coefficient not positive on element");
    double w = at * mesh.area(t);
    auto g = mesh.grads(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) B[i][j] = w * dot(g[i], g[j]);
  };
  return assemble_core(mesh, local, f, parallel);
}

RawSystem assemble_p1_raw_serial(const TriMesh& mesh, const CoefficientField& a,
                                 const ScalarFn& f) {
  return assemble_p1_raw(mesh, a, f, false);
}

RawSystem assemble_p1_tensor_raw(const TriMesh& mesh, const std::array<std::array<double, 2>, 2>& A,
                                 const ScalarFn& f, bool parallel) {
  auto local = [&](int t, double B[3][3]) {
    double w = mesh.area(t);
    auto g = mesh.grads(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Vec2 Ag{A[0][0] * g[j].x + A[0][1] * g[j].y, A[1][0] * g[j].x + A[1][1] * g[j].y};
        B[i][j] = w * dot(g[i], Ag);
      }
  };
  return assemble_core(mesh, local, f, parallel);
}

DirichletSystem apply_dirichlet(const TriMesh& mesh, const RawSystem& raw, const ScalarFn& g) {
  DirichletSystem ds;
  ds.slot_of_node.assign(mesh.nodes.size(), -1);
  ds.boundary_g.assign(mesh.nodes.size(), 0.0);
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (mesh.node_boundary[i])
      ds.boundary_g[i] = g(mesh.nodes[i]);
    else {
      ds.slot_of_node[i] = (int)ds.interior.size();
      ds.interior.push_back((int)i);
    }
  }
  const int ni = (int)ds.interior.size();
  std::vector<std::vector<int>> rows(ni);
  for (int s = 0; s < ni; ++s) {
    int r = ds.interior[s];
    for (int64_t k = raw.A.rowptr[r]; k < raw.A.rowptr[r + 1]; ++k) {
      int c = raw.A.cols[k];
      if (ds.slot_of_node[c] >= 0) rows[s].push_back(ds.slot_of_node[c]);
    }
    std::sort(rows[s].begin(), rows[s].end());
  }
  ds.sys.A = csr_from_adjacency(rows);
  ds.sys.rhs.assign(ni, 0.0);
  ds.sys.symmetric = true;
  for (int s = 0; s < ni; ++s) {
    int r = ds.interior[s];
    double rhs = raw.load[r];
    for (int64_t k = raw.A.rowptr[r]; k < raw.A.rowptr[r + 1]; ++k) {
      int c = raw.A.cols[k];
      if (ds.slot_of_node[c] >= 0)
        ds.sys.A.at(s, ds.slot_of_node[c]) = raw.A.vals[k];
      else
        rhs -= raw.A.vals[k] * ds.boundary_g[c];
    }
    ds.sys.rhs[s] = rhs;
  }
  return ds;
}

DirichletSystem assemble_p1(const TriMesh& mesh, const CoefficientField& a, const ScalarFn& f,
                            const ScalarFn& g, bool parallel) {
  return apply_dirichlet(mesh, assemble_p1_raw(mesh, a, f, parallel), g);
}

P1Function scatter_solution(const TriMesh& mesh, const DirichletSystem& ds,
                            const std::vector<double>& x) {
  P1Function u;
  u.mesh = &mesh;
  u.values = ds.boundary_g;
  for (size_t s = 0; s < ds.interior.size(); ++s) u.values[ds.interior[s]] = x[s];
  return u;
}

P1Function solve_p1_dirichlet(const TriMesh& mesh, const CoefficientField& a, const ScalarFn& f,
                              const ScalarFn& g, const SolveOptions& opt, SolveResult* info) {
  auto ds = assemble_p1(mesh, a, f, g);
  auto res = solve_sparse(ds.sys, opt);
  if (info) *info = res;
  return scatter_solution(mesh, ds, res.x);
}

void LocalDirichletSolver::init(const TriMesh& patch, const CoefficientField& a) {
  mesh = &patch;
  auto zero = [](Vec2) { return 0.0; };
  raw = assemble_p1_raw(patch, a, zero, false).A;
  slot_of_node.assign(patch.nodes.size(), -1);
  interior.clear();
  for (size_t i = 0; i < patch.nodes.size(); ++i)
    if (!patch.node_boundary[i]) {
      slot_of_node[i] = (int)interior.size();
      interior.push_back((int)i);
    }
  const int ni = (int)interior.size();
  int bw = 0;
  for (int s = 0; s < ni; ++s) {
    int r = interior[s];
    for (int64_t k = raw.rowptr[r]; k < raw.rowptr[r + 1]; ++k) {
      int cs = slot_of_node[raw.cols[k]];
      if (cs >= 0) bw = std::max(bw, std::abs(cs - s));
    }
  }
  chol.init(ni, bw);
  for (int s = 0; s < ni; ++s) {
    int r = interior[s];
    for (int64_t k = raw.rowptr[r]; k < raw.rowptr[r + 1]; ++k) {
      int cs = slot_of_node[raw.cols[k]];
      if (cs >= 0 && cs <= s) chol.at(s, cs) = raw.vals[k];
    }
  }
  band_cholesky_factor(chol);
}

std::vector<double> LocalDirichletSolver::solve(const std::vector<double>& boundary_values) const {
  std::vector<double> full(mesh->nodes.size());
  for (size_t i = 0; i < mesh->nodes.size(); ++i)
    full[i] = mesh->node_boundary[i] ? boundary_values[i] : 0.0;
  std::vector<double> rhs(interior.size(), 0.0);
  for (size_t s = 0; s < interior.size(); ++s) {
    int r = interior[s];
    double v = 0;
    for (int64_t k = raw.rowptr[r]; k < raw.rowptr[r + 1]; ++k) {
      int c = raw.cols[k];
      if (slot_of_node[c] < 0) v -= raw.vals[k] * full[c];
    }
    rhs[s] = v;
  }
  band_cholesky_solve(chol, rhs);
  for (size_t s = 0; s < interior.size(); ++s) full[interior[s]] = rhs[s];
  return full;
}

std::vector<double> solve_local_dirichlet(const TriMesh& patch, const CoefficientField& a,
                                          const ScalarFn& g) {
  LocalDirichletSolver s;
  s.init(patch, a);
  std::vector<double> bv(patch.nodes.size(), 0.0);
  for (size_t i = 0; i < patch.nodes.size(); ++i)
    if (patch.node_boundary[i]) bv[i] = g(patch.nodes[i]);
  return s.solve(bv);
}

P1Function reference_solution(const TriMesh& fine, const CoefficientField& a, const ScalarFn& f,
                              const ScalarFn& g, const SolveOptions& opt, SolveResult* info,
                              bool* under_resolved) {
  bool under = false;
  if ((a.kind == CoefKind::AnalyticPeriodic || a.kind == CoefKind::Layered) && a.eps > 0)
    under = a.eps * fine.n_per_unit < 8.0;
  if (under)
    std::fprintf(stderr, "warning: reference grid does not resolve eps (eps/h_f = %.3g < 8)\n",
                 a.eps * fine.n_per_unit);
  if (under_resolved) *under_resolved = under;
  return solve_p1_dirichlet(fine, a, f, g, opt, info);
}

}  // namespace msdg
