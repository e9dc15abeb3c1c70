#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "msdg/analysis.hpp"

using namespace msdg;

namespace {

struct NormSetup {
  TriMesh coarse, fine;
  CoarseFineMap cf;
  CoefficientField field;
  std::vector<ElementBasis> basis;
  DGSpace space;

  NormSetup(int cn, int fn, CoefficientField a, BasisKind kind, double factor)
      : coarse(build_structured_mesh(Domain::UnitSquare, cn)),
        fine(build_structured_mesh(Domain::UnitSquare, fn)),
        cf(build_coarse_fine_map(coarse, fine)),
        field(std::move(a)),
        basis(build_basis_set(coarse, fine, cf, field, kind, factor)),
        space(make_dg_space(coarse, fine, cf, basis)) {}
};

PenaltyConfig penalty(double beta, double gamma0, double rho) {
  PenaltyConfig pc;
  pc.beta = beta;
  pc.gamma0 = gamma0;
  pc.rho = rho;
  return pc;
}

std::vector<double> random_coeffs(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> c(n);
  for (auto& x : c) x = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
  return c;
}

Vec2 fine_gradient(const NormSetup& s, const BrokenFine& u, int K, int t) {
  auto g = s.fine.grads(t);
  Vec2 gr{0, 0};
  for (int loc = 0; loc < 3; ++loc) {
    int slot = s.cf.local_node(K, s.fine.tris[t][loc]);
    gr = gr + u.vals[K][slot] * g[loc];
  }
  return gr;
}

// recompute the mesh-dependent norm from the expanded function, replacing the
// closed-form segment integral with two-point Gauss quadrature
DGNormParts brute_norm(const NormSetup& s, const PenaltyConfig& pc,
                       const std::vector<double>& coeffs, DGNormKind kind) {
  BrokenFine u = expand_dg(s.space, coeffs);
  DGNormParts out;
  for (int K = 0; K < (int)s.coarse.tris.size(); ++K)
    for (int t : s.cf.tris_of[K]) {
      Vec2 gr = fine_gradient(s, u, K, t);
      out.grad2 += s.field.eval(s.fine.centroid(t)) * s.fine.area(t) * dot(gr, gr);
    }

  const double go = pc.gamma0 / pc.rho;
  const double gq[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  for (int e = 0; e < (int)s.coarse.edges.size(); ++e) {
    const Edge& ed = s.coarse.edges[e];
    const int ks[2] = {ed.k1, ed.k2};
    const int nsides = ed.boundary ? 1 : 2;
    const double fac = ed.boundary ? 1.0 : 0.5;
    for (const EdgeSegment& seg : s.cf.edge_tiling[e]) {
      Vec2 p0 = s.fine.nodes[seg.n0], p1 = s.fine.nodes[seg.n1];
      Vec2 d = p1 - p0;
      double ell = std::sqrt(dot(d, d));
      const int fts[2] = {seg.t1, seg.t2};
      double avg = 0, j0 = 0, j1 = 0;
      for (int side = 0; side < nsides; ++side) {
        int K = ks[side];
        int t = fts[side];
        Vec2 gr = fine_gradient(s, u, K, t);
        avg += fac * s.field.eval(s.fine.centroid(t)) * dot(gr, ed.normal);
        double sgn = side == 0 ? 1.0 : -1.0;
        if (kind == DGNormKind::HOmega) {
          const double* c = &coeffs[3 * K];
          auto l0 = s.coarse.bary(K, p0);
          auto l1 = s.coarse.bary(K, p1);
          j0 += sgn * (c[0] * l0[0] + c[1] * l0[1] + c[2] * l0[2]);
          j1 += sgn * (c[0] * l1[0] + c[1] * l1[1] + c[2] * l1[2]);
        } else {
          j0 += sgn * u.vals[K][s.cf.local_node(K, seg.n0)];
          j1 += sgn * u.vals[K][s.cf.local_node(K, seg.n1)];
        }
      }
      out.flux2 += (1.0 / go) * ell * avg * avg;
      for (double tq : gq) {
        double j = (1.0 - tq) * j0 + tq * j1;
        out.jump2 += go * ell * 0.5 * j * j;
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("analysis");

TEST_CASE("restriction, expansion, and difference are consistent") {
  NormSetup s(2, 8, make_constant_field(1.0), BasisKind::Hat, 1.0);
  std::vector<double> w(s.fine.nodes.size());
  for (size_t i = 0; i < w.size(); ++i) {
    Vec2 p = s.fine.nodes[i];
    w[i] = 1.5 * p.x - 0.5 * p.y + 0.25;
  }
  BrokenFine r = restrict_fine(s.cf, w);
  REQUIRE(r.vals.size() == s.coarse.tris.size());
  for (size_t K = 0; K < r.vals.size(); ++K)
    for (size_t sl = 0; sl < r.vals[K].size(); ++sl)
      CHECK(r.vals[K][sl] == w[s.cf.nodes_of[K][sl]]);
  CHECK(broken_energy_norm(s.field, broken_diff(r, r)) == 0.0);

  // a P1 function expanded through hat bases reproduces its restriction
  std::vector<double> nodal(s.coarse.nodes.size());
  for (size_t i = 0; i < nodal.size(); ++i) {
    Vec2 p = s.coarse.nodes[i];
    nodal[i] = 1.5 * p.x - 0.5 * p.y + 0.25;
  }
  BrokenFine ex = expand_nodal(s.coarse, s.cf, s.basis, nodal);
  CHECK(broken_energy_norm(s.field, broken_diff(ex, r)) < 1e-12);

  BrokenFine cp = expand_coarse_p1(s.coarse, s.cf, nodal);
  CHECK(broken_energy_norm(s.field, broken_diff(cp, r)) < 1e-12);
}

TEST_CASE("broken energy norm integrates P1 functions exactly") {
  NormSetup s(2, 8, make_constant_field(1.0), BasisKind::Hat, 1.0);
  std::vector<double> w(s.fine.nodes.size());
  for (size_t i = 0; i < w.size(); ++i) {
    Vec2 p = s.fine.nodes[i];
    w[i] = 2.0 * p.x + 3.0 * p.y - 1.0;
  }
  // int |grad w|^2 = 13, int w^2 = 10/3 over the unit square
  double expect = std::sqrt(13.0 + 10.0 / 3.0);
  CHECK(broken_energy_norm(s.field, restrict_fine(s.cf, w)) ==
        doctest::Approx(expect).epsilon(1e-13));
  CHECK(h1_norm(s.fine, w) == doctest::Approx(expect).epsilon(1e-13));

  std::vector<double> lin(s.fine.nodes.size());
  for (size_t i = 0; i < lin.size(); ++i) lin[i] = s.fine.nodes[i].x;
  CHECK(h1_norm(s.fine, lin) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-13));
}

TEST_CASE("relative errors vanish on the reference and are one against zero") {
  NormSetup s(4, 16, make_periodic_field(0.25), BasisKind::Hat, 1.0);
  std::vector<double> ue(s.fine.nodes.size());
  for (size_t i = 0; i < ue.size(); ++i) {
    Vec2 p = s.fine.nodes[i];
    ue[i] = std::sin(3.0 * p.x) * (1.0 + p.y);
  }
  ErrorReport rep;
  relative_errors(s.field, restrict_fine(s.cf, ue), ue, rep);
  CHECK(rep.err_l2 == 0.0);
  CHECK(rep.err_linf == 0.0);
  CHECK(rep.err_energy == 0.0);

  BrokenFine zero = expand_dg(s.space, std::vector<double>(s.space.ndof(), 0.0));
  relative_errors(s.field, zero, ue, rep);
  CHECK(rep.err_l2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.err_linf == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.err_energy == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("norm parts match an independent quadrature") {
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  NormSetup hat(2, 8, make_periodic_field(0.25), BasisKind::Hat, 1.0);
  std::vector<double> c = random_coeffs(hat.space.ndof(), 42);
  for (DGNormKind kind : {DGNormKind::HOmega, DGNormKind::E}) {
    DGNormParts got = dg_norm_parts(hat.space, hat.field, pc, c, kind);
    DGNormParts want = brute_norm(hat, pc, c, kind);
    CHECK(got.grad2 == doctest::Approx(want.grad2).epsilon(1e-12));
    CHECK(got.flux2 == doctest::Approx(want.flux2).epsilon(1e-12));
    CHECK(got.jump2 == doctest::Approx(want.jump2).epsilon(1e-12));
    CHECK(dg_norm(hat.space, hat.field, pc, c, kind) ==
          doctest::Approx(want.total()).epsilon(1e-12));
  }

  NormSetup os(4, 16, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  std::vector<double> co = random_coeffs(os.space.ndof(), 7);
  for (DGNormKind kind : {DGNormKind::HOmega, DGNormKind::E}) {
    DGNormParts got = dg_norm_parts(os.space, os.field, pc, co, kind);
    DGNormParts want = brute_norm(os, pc, co, kind);
    CHECK(got.grad2 == doctest::Approx(want.grad2).epsilon(1e-12));
    CHECK(got.flux2 == doctest::Approx(want.flux2).epsilon(1e-12));
    CHECK(got.jump2 == doctest::Approx(want.jump2).epsilon(1e-12));
  }
}

TEST_CASE("projected and raw jump norms coincide exactly for hat bases") {
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  NormSetup hat(4, 16, make_periodic_field(0.25), BasisKind::Hat, 1.0);
  std::vector<double> c = random_coeffs(hat.space.ndof(), 9);
  DGNormParts h = dg_norm_parts(hat.space, hat.field, pc, c, DGNormKind::HOmega);
  DGNormParts e = dg_norm_parts(hat.space, hat.field, pc, c, DGNormKind::E);
  CHECK(h.grad2 == e.grad2);
  CHECK(h.flux2 == e.flux2);
  CHECK(h.jump2 == doctest::Approx(e.jump2).epsilon(1e-11));

  // oversampled traces deviate from their P1 shadows, so the kinds separate
  NormSetup os(4, 16, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  std::vector<double> co = random_coeffs(os.space.ndof(), 9);
  DGNormParts ho = dg_norm_parts(os.space, os.field, pc, co, DGNormKind::HOmega);
  DGNormParts eo = dg_norm_parts(os.space, os.field, pc, co, DGNormKind::E);
  CHECK(std::abs(ho.jump2 - eo.jump2) > 1e-8 * ho.jump2);
}

TEST_CASE("continuous P1 with zero trace has no jump energy") {
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  NormSetup s(2, 8, make_constant_field(1.0), BasisKind::Hat, 1.0);
  // coarse hat at the center node: continuous, zero on the boundary
  std::vector<double> nodal(s.coarse.nodes.size(), 0.0);
  nodal[s.coarse.node_at(1, 1)] = 1.0;
  std::vector<double> c(s.space.ndof());
  for (size_t K = 0; K < s.coarse.tris.size(); ++K)
    for (int i = 0; i < 3; ++i) c[3 * K + i] = nodal[s.coarse.tris[K][i]];
  DGNormParts parts = dg_norm_parts(s.space, s.field, pc, c, DGNormKind::HOmega);
  CHECK(parts.grad2 > 0.1);
  CHECK(parts.flux2 > 0.0);
  CHECK(parts.jump2 < 1e-24);
}

TEST_CASE("penalty weight moves between jump and flux parts") {
  NormSetup s(4, 16, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  std::vector<double> c = random_coeffs(s.space.ndof(), 3);
  DGNormParts p1 = dg_norm_parts(s.space, s.field, penalty(-1, 10, 0.25), c, DGNormKind::HOmega);
  DGNormParts p4 = dg_norm_parts(s.space, s.field, penalty(-1, 40, 0.25), c, DGNormKind::HOmega);
  CHECK(p4.grad2 == p1.grad2);
  CHECK(p4.flux2 == doctest::Approx(p1.flux2 / 4.0).epsilon(1e-12));
  CHECK(p4.jump2 == doctest::Approx(4.0 * p1.jump2).epsilon(1e-12));
}

TEST_CASE("error functional vanishes on an exactly represented solution") {
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  NormSetup s(4, 16, make_constant_field(2.0), BasisKind::Hat, 1.0);
  std::vector<double> c(s.space.ndof());
  for (size_t K = 0; K < s.coarse.tris.size(); ++K)
    for (int i = 0; i < 3; ++i) {
      Vec2 p = s.coarse.nodes[s.coarse.tris[K][i]];
      c[3 * K + i] = 1.5 * p.x - 0.5 * p.y + 0.25;
    }
  std::vector<double> ue(s.fine.nodes.size());
  for (size_t i = 0; i < ue.size(); ++i) {
    Vec2 p = s.fine.nodes[i];
    ue[i] = 1.5 * p.x - 0.5 * p.y + 0.25;
  }
  DGNormParts parts = error_functional_parts(s.space, s.field, pc, ue, c);
  CHECK(parts.grad2 < 1e-20);
  CHECK(parts.flux2 < 1e-18);
  CHECK(parts.jump2 < 1e-20);
  CHECK(error_functional(s.space, s.field, pc, ue, c) < 1e-9);
}

TEST_CASE("error functional jumps see only the boundary trace mismatch") {
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  NormSetup s(4, 16, make_constant_field(1.0), BasisKind::Hat, 1.0);
  std::vector<double> ue(s.fine.nodes.size());
  for (size_t i = 0; i < ue.size(); ++i) {
    Vec2 p = s.fine.nodes[i];
    ue[i] = 16.0 * p.x * (1.0 - p.x) * p.y * (1.0 - p.y);
  }
  // against the zero solution, interior jumps of a continuous reference cancel
  // and its boundary trace is exactly zero
  std::vector<double> zero(s.space.ndof(), 0.0);
  DGNormParts parts = error_functional_parts(s.space, s.field, pc, ue, zero);
  CHECK(parts.jump2 == 0.0);
  CHECK(parts.grad2 > 0.5);
}

TEST_CASE("coercivity probe reports a positive deterministic quotient") {
  NormSetup s(4, 16, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  PenaltyConfig pc = penalty(-1, 50, 0.25);
  CoercivityResult r1 = coercivity_probe(s.space, s.field, pc, 25, 7);
  CHECK(r1.trials == 25);
  CHECK(r1.min_quotient > 0.0);
  CHECK(std::isfinite(r1.min_quotient));
  CoercivityResult r2 = coercivity_probe(s.space, s.field, pc, 25, 7);
  CHECK(r1.min_quotient == r2.min_quotient);
}

TEST_SUITE_END();
