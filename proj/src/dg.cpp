#include "msdg/dg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace msdg {

void validate_penalty(const PenaltyConfig& pc) {
  if (pc.beta != -1.0 && pc.beta != 0.0 && pc.beta != 1.0)
    throw std::invalid_argument("penalty: beta must be -1, 0, or 1");
  if (!(pc.gamma0 > 0)) throw std::invalid_argument("penalty: gamma0 must be positive");
  if (!(pc.rho > 0)) throw std::invalid_argument("penalty: rho must be positive");
}

DGSpace make_dg_space(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
                      const std::vector<ElementBasis>& basis) {
  if (basis.size() != coarse.tris.size())
    throw std::invalid_argument("dg: basis set does not match the coarse mesh");
  DGSpace sp;
  sp.coarse = &coarse;
  sp.fine = &fine;
  sp.cf = &cf;
  sp.basis = &basis;
  sp.elem_edges.assign(coarse.tris.size(), {});
  for (int e = 0; e < (int)coarse.edges.size(); ++e) {
    sp.elem_edges[coarse.edges[e].k1].push_back(e);
    if (coarse.edges[e].k2 >= 0) sp.elem_edges[coarse.edges[e].k2].push_back(e);
  }
  return sp;
}

namespace {

constexpr double kGaussXi[2] = {0.21132486540518711775, 0.78867513459481288225};

struct EdgeBlock {
  double A[6][6];
  double rhs[6];
};

// volume: MsDFEM integrates a grad(psi_j) . grad(psi_i) over the fine tiling;
// MsDPGM replaces the test gradient by the constant shadow gradient
void volume_block(const DGSpace& sp, const CoefficientField& a, int K, DGForm form,
                  double B[3][3]) {
  const TriMesh& fine = *sp.fine;
  const ElementBasis& eb = (*sp.basis)[K];
  auto cg = sp.coarse->grads(K);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) B[i][j] = 0;
  for (int t : sp.cf->tris_of[K]) {
    int sl[3];
    for (int loc = 0; loc < 3; ++loc) sl[loc] = sp.cf->local_node(K, fine.tris[t][loc]);
    auto g = fine.grads(t);
    double w = a.eval(fine.centroid(t)) * fine.area(t);
    Vec2 gb[3];
    for (int j = 0; j < 3; ++j)
      gb[j] = eb.values[j][sl[0]] * g[0] + eb.values[j][sl[1]] * g[1] + eb.values[j][sl[2]] * g[2];
    for (int i = 0; i < 3; ++i) {
      Vec2 gi = (form == DGForm::MsDPGM) ? cg[i] : gb[i];
      for (int j = 0; j < 3; ++j) B[i][j] += w * dot(gi, gb[j]);
    }
  }
}

void volume_rhs(const DGSpace& sp, int K, DGForm form, const ScalarFn& f, double out[3]) {
  const TriMesh& fine = *sp.fine;
  const ElementBasis& eb = (*sp.basis)[K];
  out[0] = out[1] = out[2] = 0;
  for (int t : sp.cf->tris_of[K]) {
    auto p = fine.tri_xy(t);
    double w = fine.area(t) / 3.0;
    for (int loc = 0; loc < 3; ++loc) {
      double fv = w * f(p[loc]);
      if (fv == 0) continue;
      if (form == DGForm::MsDPGM) {
        auto lam = sp.coarse->bary(K, p[loc]);
        for (int i = 0; i < 3; ++i) out[i] += fv * lam[i];
      } else {
        int sl = sp.cf->local_node(K, fine.tris[t][loc]);
        for (int i = 0; i < 3; ++i) out[i] += fv * eb.values[i][sl];
      }
    }
  }
}

void edge_block(const DGSpace& sp, const CoefficientField& a, int eid, DGForm form,
                const PenaltyConfig& pc, const ScalarFn* g, EdgeBlock& out) {
  std::memset(&out, 0, sizeof out);
  const TriMesh& fine = *sp.fine;
  const TriMesh& coarse = *sp.coarse;
  const Edge& e = coarse.edges[eid];
  const int ks[2] = {e.k1, e.k2};
  const int nsides = e.boundary ? 1 : 2;
  const double sgn[2] = {1.0, -1.0};
  const double fac = e.boundary ? 1.0 : 0.5;
  const double go = pc.gamma0 / pc.rho;
  const bool project = (form == DGForm::MsDPGM);
  const int nd = 3 * nsides;

  for (const EdgeSegment& seg : sp.cf->edge_tiling[eid]) {
    Vec2 p0 = fine.nodes[seg.n0], p1 = fine.nodes[seg.n1];
    Vec2 d = p1 - p0;
    double ell = std::sqrt(dot(d, d));
    const int fts[2] = {seg.t1, seg.t2};

    double fl[6] = {0}, jmp0[6] = {0}, jmp1[6] = {0};
    for (int s = 0; s < nsides; ++s) {
      int K = ks[s];
      const ElementBasis& eb = (*sp.basis)[K];
      int s0 = sp.cf->local_node(K, seg.n0), s1 = sp.cf->local_node(K, seg.n1);
      int t = fts[s];
      int sl[3];
      for (int loc = 0; loc < 3; ++loc) sl[loc] = sp.cf->local_node(K, fine.tris[t][loc]);
      auto gt = fine.grads(t);
      double at = a.eval(fine.centroid(t));
      std::array<double, 3> lam0{}, lam1{};
      if (project) {
        lam0 = coarse.bary(K, p0);
        lam1 = coarse.bary(K, p1);
      }
      for (int i = 0; i < 3; ++i) {
        int dof = 3 * s + i;
        Vec2 gr = eb.values[i][sl[0]] * gt[0] + eb.values[i][sl[1]] * gt[1] +
                  eb.values[i][sl[2]] * gt[2];
        fl[dof] = fac * at * dot(gr, e.normal);
        jmp0[dof] = sgn[s] * (project ? lam0[i] : eb.values[i][s0]);
        jmp1[dof] = sgn[s] * (project ? lam1[i] : eb.values[i][s1]);
      }
    }

    for (int r = 0; r < nd; ++r) {
      double jvr = 0.5 * ell * (jmp0[r] + jmp1[r]);
      for (int c = 0; c < nd; ++c) {
        double jud = 0.5 * ell * (jmp0[c] + jmp1[c]);
        out.A[r][c] += -fl[c] * jvr + pc.beta * fl[r] * jud +
                       go * (ell / 6.0) *
                           (2 * jmp0[c] * jmp0[r] + jmp0[c] * jmp1[r] + jmp1[c] * jmp0[r] +
                            2 * jmp1[c] * jmp1[r]);
      }
    }

    if (e.boundary && g) {
      for (double xi : kGaussXi) {
        Vec2 xg = p0 + xi * d;
        double w = 0.5 * ell * (*g)(xg);
        if (w == 0) continue;
        for (int r = 0; r < nd; ++r)
          out.rhs[r] += pc.beta * fl[r] * w + go * w * (jmp0[r] * (1 - xi) + jmp1[r] * xi);
      }
    }
  }
}

CsrMatrix dg_pattern(const DGSpace& sp) {
  const int nk = (int)sp.coarse->tris.size();
  std::vector<std::vector<int>> rows(3 * nk);
  for (int K = 0; K < nk; ++K) {
    std::vector<int> nbr{K};
    for (int e : sp.elem_edges[K]) {
      const Edge& ed = sp.coarse->edges[e];
      int other = ed.k1 == K ? ed.k2 : ed.k1;
      if (other >= 0) nbr.push_back(other);
    }
    std::sort(nbr.begin(), nbr.end());
    std::vector<int> cols;
    for (int o : nbr)
      for (int j = 0; j < 3; ++j) cols.push_back(3 * o + j);
    for (int i = 0; i < 3; ++i) rows[3 * K + i] = cols;
  }
  return csr_from_adjacency(rows);
}

SparseSystem assemble_dg_impl(const DGSpace& sp, const CoefficientField& a, const ScalarFn& f,
                              const ScalarFn& g, DGForm form, const PenaltyConfig& pc,
                              bool parallel) {
  validate_penalty(pc);
  const int nk = (int)sp.coarse->tris.size();
  const int ne = (int)sp.coarse->edges.size();

  SparseSystem sys;
  sys.A = dg_pattern(sp);
  sys.rhs.assign(3 * nk, 0.0);
  sys.symmetric = (form == DGForm::MsDFEM && pc.beta == -1.0);

  if (!parallel) {
    // reference path: direct accumulation, elements then edges
    for (int K = 0; K < nk; ++K) {
      double B[3][3], r[3];
      volume_block(sp, a, K, form, B);
      volume_rhs(sp, K, form, f, r);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) sys.A.at(3 * K + i, 3 * K + j) += B[i][j];
        sys.rhs[3 * K + i] += r[i];
      }
    }
    for (int e = 0; e < ne; ++e) {
      EdgeBlock eb;
      edge_block(sp, a, e, form, pc, &g, eb);
      const Edge& ed = sp.coarse->edges[e];
      const int ks[2] = {ed.k1, ed.k2};
      const int nsides = ed.boundary ? 1 : 2;
      for (int rs = 0; rs < nsides; ++rs)
        for (int i = 0; i < 3; ++i) {
          int row = 3 * ks[rs] + i;
          for (int cs = 0; cs < nsides; ++cs)
            for (int j = 0; j < 3; ++j)
              sys.A.at(row, 3 * ks[cs] + j) += eb.A[3 * rs + i][3 * cs + j];
          sys.rhs[row] += eb.rhs[3 * rs + i];
        }
    }
    return sys;
  }

  std::vector<std::array<double, 9>> vol(nk);
  std::vector<std::array<double, 3>> vrhs(nk);
#pragma omp parallel for schedule(dynamic, 8)
  for (int K = 0; K < nk; ++K) {
    double B[3][3], r[3];
    volume_block(sp, a, K, form, B);
    volume_rhs(sp, K, form, f, r);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) vol[K][3 * i + j] = B[i][j];
    for (int i = 0; i < 3; ++i) vrhs[K][i] = r[i];
  }
  std::vector<EdgeBlock> eblocks(ne);
#pragma omp parallel for schedule(dynamic, 8)
  for (int e = 0; e < ne; ++e) edge_block(sp, a, e, form, pc, &g, eblocks[e]);

  // merge: per row, volume block first, then incident edges ascending,
  // matching the reference accumulation order slot by slot
#pragma omp parallel for schedule(static)
  for (int K = 0; K < nk; ++K) {
    for (int i = 0; i < 3; ++i) {
      int row = 3 * K + i;
      for (int j = 0; j < 3; ++j) sys.A.at(row, 3 * K + j) += vol[K][3 * i + j];
      sys.rhs[row] += vrhs[K][i];
    }
    for (int e : sp.elem_edges[K]) {
      const Edge& ed = sp.coarse->edges[e];
      const int ks[2] = {ed.k1, ed.k2};
      const int nsides = ed.boundary ? 1 : 2;
      int rs = (ed.k1 == K) ? 0 : 1;
      for (int i = 0; i < 3; ++i) {
        int row = 3 * K + i;
        for (int cs = 0; cs < nsides; ++cs)
          for (int j = 0; j < 3; ++j)
            sys.A.at(row, 3 * ks[cs] + j) += eblocks[e].A[3 * rs + i][3 * cs + j];
        sys.rhs[row] += eblocks[e].rhs[3 * rs + i];
      }
    }
  }
  return sys;
}

}  // namespace

SparseSystem assemble_dg(const DGSpace& sp, const CoefficientField& a, const ScalarFn& f,
                         const ScalarFn& g, DGForm form, const PenaltyConfig& pc, bool parallel) {
  return assemble_dg_impl(sp, a, f, g, form, pc, parallel);
}

SparseSystem assemble_dg_serial(const DGSpace& sp, const CoefficientField& a, const ScalarFn& f,
                                const ScalarFn& g, DGForm form, const PenaltyConfig& pc) {
  return assemble_dg_impl(sp, a, f, g, form, pc, false);
}

std::vector<double> weak_dirichlet_rhs(const DGSpace& sp, const CoefficientField& a,
                                       const ScalarFn& g, DGForm form, const PenaltyConfig& pc) {
  validate_penalty(pc);
  std::vector<double> rhs(sp.ndof(), 0.0);
  for (int e = 0; e < (int)sp.coarse->edges.size(); ++e) {
    const Edge& ed = sp.coarse->edges[e];
    if (!ed.boundary) continue;
    EdgeBlock eb;
    edge_block(sp, a, e, form, pc, &g, eb);
    for (int i = 0; i < 3; ++i) rhs[3 * ed.k1 + i] += eb.rhs[i];
  }
  return rhs;
}

}  // namespace msdg
