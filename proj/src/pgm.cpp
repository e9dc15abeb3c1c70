#include "msdg/pgm.hpp"

#include <algorithm>
#include <array>

namespace msdg {

namespace {

// rows are coarse test nodes: B[q][p] = int_K a grad(psi_p) . grad(phi_q)
void pg_local(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
              const ElementBasis& eb, const CoefficientField& a, const ScalarFn& f, int K,
              double B[3][3], double load[3]) {
  auto cg = coarse.grads(K);
  for (int i = 0; i < 3; ++i) {
    load[i] = 0;
    for (int j = 0; j < 3; ++j) B[i][j] = 0;
  }
  for (int t : cf.tris_of[K]) {
    int sl[3];
    for (int loc = 0; loc < 3; ++loc) sl[loc] = cf.local_node(K, fine.tris[t][loc]);
    auto g = fine.grads(t);
    double w = a.eval(fine.centroid(t)) * fine.area(t);
    for (int p = 0; p < 3; ++p) {
      Vec2 gp = eb.values[p][sl[0]] * g[0] + eb.values[p][sl[1]] * g[1] +
                eb.values[p][sl[2]] * g[2];
      for (int q = 0; q < 3; ++q) B[q][p] += w * dot(cg[q], gp);
    }
    auto pxy = fine.tri_xy(t);
    double wf = fine.area(t) / 3.0;
    for (int loc = 0; loc < 3; ++loc) {
      double fv = wf * f(pxy[loc]);
      if (fv == 0) continue;
      auto lam = coarse.bary(K, pxy[loc]);
      for (int q = 0; q < 3; ++q) load[q] += fv * lam[q];
    }
  }
}

std::vector<std::vector<int>> coarse_node_adjacency(const TriMesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i) adj[i].push_back((int)i);
  for (const auto& e : mesh.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

PGSystem assemble_pg_impl(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
                          const std::vector<ElementBasis>& basis, const CoefficientField& a,
                          const ScalarFn& f, const ScalarFn& g, bool parallel) {
  const int nk = (int)coarse.tris.size();
  RawSystem raw;
  raw.A = csr_from_adjacency(coarse_node_adjacency(coarse));
  raw.load.assign(coarse.nodes.size(), 0.0);

  if (!parallel) {
    for (int K = 0; K < nk; ++K) {
      double B[3][3], load[3];
      pg_local(coarse, fine, cf, basis[K], a, f, K, B, load);
      const auto& v = coarse.tris[K];
      for (int q = 0; q < 3; ++q) {
        for (int p = 0; p < 3; ++p) raw.A.at(v[q], v[p]) += B[q][p];
        raw.load[v[q]] += load[q];
      }
    }
  } else {
    std::vector<std::array<double, 9>> blocks(nk);
    std::vector<std::array<double, 3>> loads(nk);
#pragma omp parallel for schedule(dynamic, 8)
    for (int K = 0; K < nk; ++K) {
      double B[3][3], load[3];
      pg_local(coarse, fine, cf, basis[K], a, f, K, B, load);
      for (int q = 0; q < 3; ++q) {
        for (int p = 0; p < 3; ++p) blocks[K][3 * q + p] = B[q][p];
        loads[K][q] = load[q];
      }
    }
    std::vector<std::vector<std::array<int, 2>>> inc(coarse.nodes.size());
    for (int K = 0; K < nk; ++K)
      for (int q = 0; q < 3; ++q) inc[coarse.tris[K][q]].push_back({K, q});
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < (int64_t)coarse.nodes.size(); ++r) {
      for (const auto& Kq : inc[r]) {
        int K = Kq[0], q = Kq[1];
        const auto& v = coarse.tris[K];
        for (int p = 0; p < 3; ++p) raw.A.at((int)r, v[p]) += blocks[K][3 * q + p];
        raw.load[r] += loads[K][q];
      }
    }
  }

  auto ds = apply_dirichlet(coarse, raw, g);
  PGSystem ps;
  ps.sys = std::move(ds.sys);
  ps.sys.symmetric = false;
  ps.interior = std::move(ds.interior);
  ps.slot_of_node = std::move(ds.slot_of_node);
  ps.boundary_g = std::move(ds.boundary_g);
  return ps;
}

}  // namespace

PGSystem assemble_pg(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
                     const std::vector<ElementBasis>& basis, const CoefficientField& a,
                     const ScalarFn& f, const ScalarFn& g, bool parallel) {
  return assemble_pg_impl(coarse, fine, cf, basis, a, f, g, parallel);
}

PGSystem assemble_pg_serial(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
                            const std::vector<ElementBasis>& basis, const CoefficientField& a,
                            const ScalarFn& f, const ScalarFn& g) {
  return assemble_pg_impl(coarse, fine, cf, basis, a, f, g, false);
}

std::vector<double> pg_nodal_solution(const PGSystem& ps, const std::vector<double>& x) {
  std::vector<double> full = ps.boundary_g;
  for (size_t s = 0; s < ps.interior.size(); ++s) full[ps.interior[s]] = x[s];
  return full;
}

}  // namespace msdg
