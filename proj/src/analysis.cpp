#include "msdg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace msdg {

BrokenFine expand_dg(const DGSpace& sp, const std::vector<double>& coeffs) {
  if ((int)coeffs.size() != sp.ndof()) throw std::invalid_argument("expand: dof count mismatch");
  BrokenFine out;
  out.cf = sp.cf;
  const int nk = (int)sp.coarse->tris.size();
  out.vals.resize(nk);
  for (int K = 0; K < nk; ++K) {
    const auto& eb = (*sp.basis)[K];
    size_t ns = sp.cf->nodes_of[K].size();
    out.vals[K].assign(ns, 0.0);
    for (int i = 0; i < 3; ++i) {
      double c = coeffs[3 * K + i];
      for (size_t s = 0; s < ns; ++s) out.vals[K][s] += c * eb.values[i][s];
    }
  }
  return out;
}

BrokenFine expand_nodal(const TriMesh& coarse, const CoarseFineMap& cf,
                        const std::vector<ElementBasis>& basis,
                        const std::vector<double>& nodal) {
  BrokenFine out;
  out.cf = &cf;
  const int nk = (int)coarse.tris.size();
  out.vals.resize(nk);
  for (int K = 0; K < nk; ++K) {
    size_t ns = cf.nodes_of[K].size();
    out.vals[K].assign(ns, 0.0);
    for (int i = 0; i < 3; ++i) {
      double c = nodal[coarse.tris[K][i]];
      for (size_t s = 0; s < ns; ++s) out.vals[K][s] += c * basis[K].values[i][s];
    }
  }
  return out;
}

BrokenFine expand_coarse_p1(const TriMesh& coarse, const CoarseFineMap& cf,
                            const std::vector<double>& coarse_nodal) {
  BrokenFine out;
  out.cf = &cf;
  const int nk = (int)coarse.tris.size();
  out.vals.resize(nk);
  for (int K = 0; K < nk; ++K) {
    const auto& slots = cf.nodes_of[K];
    out.vals[K].resize(slots.size());
    const auto& v = coarse.tris[K];
    for (size_t s = 0; s < slots.size(); ++s) {
      auto lam = coarse.bary(K, cf.fine->nodes[slots[s]]);
      out.vals[K][s] = lam[0] * coarse_nodal[v[0]] + lam[1] * coarse_nodal[v[1]] +
                       lam[2] * coarse_nodal[v[2]];
    }
  }
  return out;
}

BrokenFine restrict_fine(const CoarseFineMap& cf, const std::vector<double>& fine_nodal) {
  BrokenFine out;
  out.cf = &cf;
  out.vals.resize(cf.nodes_of.size());
  for (size_t K = 0; K < cf.nodes_of.size(); ++K) {
    const auto& slots = cf.nodes_of[K];
    out.vals[K].resize(slots.size());
    for (size_t s = 0; s < slots.size(); ++s) out.vals[K][s] = fine_nodal[slots[s]];
  }
  return out;
}

BrokenFine broken_diff(const BrokenFine& x, const BrokenFine& y) {
  BrokenFine out = x;
  for (size_t K = 0; K < out.vals.size(); ++K)
    for (size_t s = 0; s < out.vals[K].size(); ++s) out.vals[K][s] -= y.vals[K][s];
  return out;
}

namespace {

// exact integrals of P1 quantities on the fine tiling
struct BrokenNorms {
  double agrad2 = 0, l2 = 0, linf = 0;
};

BrokenNorms broken_norms(const CoefficientField& a, const BrokenFine& v) {
  const CoarseFineMap& cf = *v.cf;
  const TriMesh& fine = *cf.fine;
  BrokenNorms out;
  for (size_t K = 0; K < v.vals.size(); ++K) {
    const auto& vals = v.vals[K];
    for (double w : vals) out.linf = std::max(out.linf, std::abs(w));
    for (int t : cf.tris_of[K]) {
      double w[3];
      for (int loc = 0; loc < 3; ++loc) w[loc] = vals[cf.local_node((int)K, fine.tris[t][loc])];
      auto g = fine.grads(t);
      Vec2 gr = w[0] * g[0] + w[1] * g[1] + w[2] * g[2];
      double at = a.eval(fine.centroid(t));
      double A = fine.area(t);
      out.agrad2 += at * A * dot(gr, gr);
      out.l2 += (A / 6.0) *
                (w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[0] * w[1] + w[0] * w[2] + w[1] * w[2]);
    }
  }
  return out;
}

}  // namespace

void relative_errors(const CoefficientField& a, const BrokenFine& uh,
                     const std::vector<double>& ue_fine, ErrorReport& out) {
  BrokenFine ue = restrict_fine(*uh.cf, ue_fine);
  BrokenFine diff = broken_diff(uh, ue);
  BrokenNorms nd = broken_norms(a, diff);
  BrokenNorms nr = broken_norms(a, ue);
  out.err_l2 = std::sqrt(nd.l2) / std::sqrt(nr.l2);
  out.err_linf = nd.linf / nr.linf;
  out.err_energy = std::sqrt(nd.agrad2 + nd.l2) / std::sqrt(nr.agrad2 + nr.l2);
}

double broken_energy_norm(const CoefficientField& a, const BrokenFine& v) {
  BrokenNorms n = broken_norms(a, v);
  return std::sqrt(n.agrad2 + n.l2);
}

double DGNormParts::total() const { return std::sqrt(grad2 + flux2 + jump2); }

namespace {

// per-element trace helpers shared by the norm and the error functional
struct SideTrace {
  double v0, v1;   // values at the segment endpoints
  double flux;     // a grad . n from the adjacent fine triangle
};

}  // namespace

DGNormParts dg_norm_parts(const DGSpace& sp, const CoefficientField& a, const PenaltyConfig& pc,
                          const std::vector<double>& coeffs, DGNormKind kind) {
  validate_penalty(pc);
  const TriMesh& fine = *sp.fine;
  const TriMesh& coarse = *sp.coarse;
  const CoarseFineMap& cf = *sp.cf;
  DGNormParts out;

  for (int K = 0; K < (int)coarse.tris.size(); ++K) {
    const auto& eb = (*sp.basis)[K];
    const double* c = &coeffs[3 * K];
    for (int t : cf.tris_of[K]) {
      int sl[3];
      for (int loc = 0; loc < 3; ++loc) sl[loc] = cf.local_node(K, fine.tris[t][loc]);
      auto g = fine.grads(t);
      Vec2 gr{0, 0};
      for (int i = 0; i < 3; ++i) {
        double w = c[0] * eb.values[0][sl[i]] + c[1] * eb.values[1][sl[i]] +
                   c[2] * eb.values[2][sl[i]];
        gr = gr + w * g[i];
      }
      out.grad2 += a.eval(fine.centroid(t)) * fine.area(t) * dot(gr, gr);
    }
  }

  const double go = pc.gamma0 / pc.rho;
  for (int e = 0; e < (int)coarse.edges.size(); ++e) {
    const Edge& ed = coarse.edges[e];
    const int ks[2] = {ed.k1, ed.k2};
    const int nsides = ed.boundary ? 1 : 2;
    const double fac = ed.boundary ? 1.0 : 0.5;
    for (const EdgeSegment& seg : cf.edge_tiling[e]) {
      Vec2 p0 = fine.nodes[seg.n0], p1 = fine.nodes[seg.n1];
      Vec2 d = p1 - p0;
      double ell = std::sqrt(dot(d, d));
      const int fts[2] = {seg.t1, seg.t2};
      double avg = 0, j0 = 0, j1 = 0;
      for (int s = 0; s < nsides; ++s) {
        int K = ks[s];
        const ElementBasis& eb = (*sp.basis)[K];
        const double* c = &coeffs[3 * K];
        int t = fts[s];
        int sl[3];
        for (int loc = 0; loc < 3; ++loc) sl[loc] = cf.local_node(K, fine.tris[t][loc]);
        auto gt = fine.grads(t);
        Vec2 gr{0, 0};
        for (int i = 0; i < 3; ++i) {
          double w = c[0] * eb.values[0][sl[i]] + c[1] * eb.values[1][sl[i]] +
                     c[2] * eb.values[2][sl[i]];
          gr = gr + w * gt[i];
        }
        avg += fac * a.eval(fine.centroid(t)) * dot(gr, ed.normal);
        double sgn = s == 0 ? 1.0 : -1.0;
        if (kind == DGNormKind::HOmega) {
          j0 += sgn * pi_value(coarse, K, c, p0);
          j1 += sgn * pi_value(coarse, K, c, p1);
        } else {
          int s0 = cf.local_node(K, seg.n0), s1 = cf.local_node(K, seg.n1);
          double w0 = c[0] * eb.values[0][s0] + c[1] * eb.values[1][s0] + c[2] * eb.values[2][s0];
          double w1 = c[0] * eb.values[0][s1] + c[1] * eb.values[1][s1] + c[2] * eb.values[2][s1];
          j0 += sgn * w0;
          j1 += sgn * w1;
        }
      }
      out.flux2 += (1.0 / go) * ell * avg * avg;
      out.jump2 += go * (ell / 3.0) * (j0 * j0 + j0 * j1 + j1 * j1);
    }
  }
  return out;
}

double dg_norm(const DGSpace& sp, const CoefficientField& a, const PenaltyConfig& pc,
               const std::vector<double>& coeffs, DGNormKind kind) {
  return dg_norm_parts(sp, a, pc, coeffs, kind).total();
}

DGNormParts error_functional_parts(const DGSpace& sp, const CoefficientField& a,
                                   const PenaltyConfig& pc, const std::vector<double>& ue_fine,
                                   const std::vector<double>& coeffs) {
  validate_penalty(pc);
  const TriMesh& fine = *sp.fine;
  const TriMesh& coarse = *sp.coarse;
  const CoarseFineMap& cf = *sp.cf;
  DGNormParts out;

  for (int K = 0; K < (int)coarse.tris.size(); ++K) {
    const auto& eb = (*sp.basis)[K];
    const double* c = &coeffs[3 * K];
    for (int t : cf.tris_of[K]) {
      int sl[3];
      for (int loc = 0; loc < 3; ++loc) sl[loc] = cf.local_node(K, fine.tris[t][loc]);
      auto g = fine.grads(t);
      Vec2 gr{0, 0};
      for (int i = 0; i < 3; ++i) {
        double w = ue_fine[fine.tris[t][i]] - (c[0] * eb.values[0][sl[i]] +
                                               c[1] * eb.values[1][sl[i]] +
                                               c[2] * eb.values[2][sl[i]]);
        gr = gr + w * g[i];
      }
      out.grad2 += a.eval(fine.centroid(t)) * fine.area(t) * dot(gr, gr);
    }
  }

  const double go = pc.gamma0 / pc.rho;
  for (int e = 0; e < (int)coarse.edges.size(); ++e) {
    const Edge& ed = coarse.edges[e];
    const int ks[2] = {ed.k1, ed.k2};
    const int nsides = ed.boundary ? 1 : 2;
    const double fac = ed.boundary ? 1.0 : 0.5;
    for (const EdgeSegment& seg : cf.edge_tiling[e]) {
      Vec2 p0 = fine.nodes[seg.n0], p1 = fine.nodes[seg.n1];
      Vec2 d = p1 - p0;
      double ell = std::sqrt(dot(d, d));
      const int fts[2] = {seg.t1, seg.t2};
      double avg = 0, j0 = 0, j1 = 0;
      for (int s = 0; s < nsides; ++s) {
        int K = ks[s];
        const ElementBasis& eb = (*sp.basis)[K];
        const double* c = &coeffs[3 * K];
        int t = fts[s];
        int sl[3];
        for (int loc = 0; loc < 3; ++loc) sl[loc] = cf.local_node(K, fine.tris[t][loc]);
        auto gt = fine.grads(t);
        Vec2 gr{0, 0};
        for (int i = 0; i < 3; ++i) {
          double w = ue_fine[fine.tris[t][i]] - (c[0] * eb.values[0][sl[i]] +
                                                 c[1] * eb.values[1][sl[i]] +
                                                 c[2] * eb.values[2][sl[i]]);
          gr = gr + w * gt[i];
        }
        avg += fac * a.eval(fine.centroid(t)) * dot(gr, ed.normal);
        double sgn = s == 0 ? 1.0 : -1.0;
        j0 += sgn * (ue_fine[seg.n0] - pi_value(coarse, K, c, p0));
        j1 += sgn * (ue_fine[seg.n1] - pi_value(coarse, K, c, p1));
      }
      out.flux2 += (1.0 / go) * ell * avg * avg;
      out.jump2 += go * (ell / 3.0) * (j0 * j0 + j0 * j1 + j1 * j1);
    }
  }
  return out;
}

double error_functional(const DGSpace& sp, const CoefficientField& a, const PenaltyConfig& pc,
                        const std::vector<double>& ue_fine, const std::vector<double>& coeffs) {
  return error_functional_parts(sp, a, pc, ue_fine, coeffs).total();
}

CoercivityResult coercivity_probe(const DGSpace& sp, const CoefficientField& a,
                                  const PenaltyConfig& pc, int trials, uint64_t seed) {
  auto zero = [](Vec2) { return 0.0; };
  SparseSystem sys = assemble_dg(sp, a, zero, zero, DGForm::MsDPGM, pc);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
  CoercivityResult out;
  out.trials = trials;
  std::vector<double> v(sp.ndof()), Av(sp.ndof());
  for (int trial = 0; trial < trials; ++trial) {
    for (auto& x : v) x = uniform();
    sys.A.multiply(v.data(), Av.data());
    double quad = 0;
    for (int i = 0; i < sp.ndof(); ++i) quad += v[i] * Av[i];
    DGNormParts parts = dg_norm_parts(sp, a, pc, v, DGNormKind::HOmega);
    double q = quad / (parts.grad2 + parts.flux2 + parts.jump2);
    if (trial == 0 || q < out.min_quotient) out.min_quotient = q;
  }
  return out;
}

double h1_norm(const TriMesh& mesh, const std::vector<double>& w) {
  double g2 = 0, l2 = 0;
  for (int t = 0; t < (int)mesh.tris.size(); ++t) {
    const auto& v = mesh.tris[t];
    auto g = mesh.grads(t);
    Vec2 gr = w[v[0]] * g[0] + w[v[1]] * g[1] + w[v[2]] * g[2];
    double A = mesh.area(t);
    g2 += A * dot(gr, gr);
    l2 += (A / 6.0) * (w[v[0]] * w[v[0]] + w[v[1]] * w[v[1]] + w[v[2]] * w[v[2]] +
                       w[v[0]] * w[v[1]] + w[v[0]] * w[v[2]] + w[v[1]] * w[v[2]]);
  }
  return std::sqrt(g2 + l2);
}

}  // namespace msdg
