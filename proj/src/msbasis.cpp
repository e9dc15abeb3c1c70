#include "msdg/msbasis.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

namespace msdg {

namespace {

std::array<double, 3> affine_coords(const std::array<Vec2, 3>& v, Vec2 p) {
  double s2 = cross(v[1] - v[0], v[2] - v[0]);
  return {cross(v[1] - p, v[2] - p) / s2, cross(v[2] - p, v[0] - p) / s2,
          cross(v[0] - p, v[1] - p) / s2};
}

}  // namespace

std::array<std::array<double, 3>, 3> change_of_basis(const std::array<Vec2, 3>& S,
                                                     const std::array<Vec2, 3>& K_vertices,
                                                     int element_id) {
  // P[j][k] = phi_j^S(x_k); C = P^{-1}
  double P[3][3];
  for (int k = 0; k < 3; ++k) {
    auto lam = affine_coords(S, K_vertices[k]);
    for (int j = 0; j < 3; ++j) P[j][k] = lam[j];
  }
  double det = P[0][0] * (P[1][1] * P[2][2] - P[1][2] * P[2][1]) -
               P[0][1] * (P[1][0] * P[2][2] - P[1][2] * P[2][0]) +
               P[0][2] * (P[1][0] * P[2][1] - P[1][1] * P[2][0]);
  // written so a NaN det (degenerate S) also lands in the throw branch
  if (!(std::abs(det) > 1e-12))
    throw std::runtime_error("basis: singular change of basis on element " +
                             std::to_string(element_id));
  std::array<std::array<double, 3>, 3> C{};
  double inv = 1.0 / det;
  C[0][0] = (P[1][1] * P[2][2] - P[1][2] * P[2][1]) * inv;
  C[0][1] = (P[0][2] * P[2][1] - P[0][1] * P[2][2]) * inv;
  C[0][2] = (P[0][1] * P[1][2] - P[0][2] * P[1][1]) * inv;
  C[1][0] = (P[1][2] * P[2][0] - P[1][0] * P[2][2]) * inv;
  C[1][1] = (P[0][0] * P[2][2] - P[0][2] * P[2][0]) * inv;
  C[1][2] = (P[0][2] * P[1][0] - P[0][0] * P[1][2]) * inv;
  C[2][0] = (P[1][0] * P[2][1] - P[1][1] * P[2][0]) * inv;
  C[2][1] = (P[0][1] * P[2][0] - P[0][0] * P[2][1]) * inv;
  C[2][2] = (P[0][0] * P[1][1] - P[0][1] * P[1][0]) * inv;
  return C;
}

ElementBasis compute_oversampling_basis(const TriMesh& coarse, int K, const PatchSpec& patch,
                                        const TriMesh& fine, const CoarseFineMap& cf,
                                        const CoefficientField& a) {
  (void)fine;
  ElementBasis eb;
  eb.element = K;
  eb.kind = patch.separation == 0 ? BasisKind::Classical : BasisKind::Oversampled;
  eb.separation = patch.separation;
  eb.translated = patch.translated;
  eb.shrunk = patch.shrunk;

  const TriMesh& sm = patch.submesh;
  LocalDirichletSolver solver;
  solver.init(sm, a);

  // a-harmonic extensions of the macro-triangle nodal functions
  std::array<std::vector<double>, 3> psiS;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> bv(sm.nodes.size(), 0.0);
    for (size_t p = 0; p < sm.nodes.size(); ++p)
      if (sm.node_boundary[p]) bv[p] = affine_coords(patch.macro_vertices, sm.nodes[p])[j];
    psiS[j] = solver.solve(bv);
  }

  auto Kxy = coarse.tri_xy(K);
  eb.cob = change_of_basis(patch.macro_vertices, Kxy, K);

  const auto& slots = cf.nodes_of[K];
  for (int i = 0; i < 3; ++i) {
    eb.values[i].resize(slots.size());
    for (size_t s = 0; s < slots.size(); ++s) {
      int pn = patch.restrict_to_element[s];
      eb.values[i][s] =
          eb.cob[i][0] * psiS[0][pn] + eb.cob[i][1] * psiS[1][pn] + eb.cob[i][2] * psiS[2][pn];
    }
  }
  return eb;
}

ElementBasis compute_classical_basis(const TriMesh& coarse, int K, const TriMesh& fine,
                                     const CoarseFineMap& cf, const CoefficientField& a) {
  auto patch = build_oversampling_patch(coarse, K, 1.0, fine, cf);
  return compute_oversampling_basis(coarse, K, patch, fine, cf, a);
}

ElementBasis compute_hat_basis(const TriMesh& coarse, int K, const TriMesh& fine,
                               const CoarseFineMap& cf) {
  ElementBasis eb;
  eb.element = K;
  eb.kind = BasisKind::Hat;
  for (int i = 0; i < 3; ++i) eb.cob[i][i] = 1.0;
  const auto& slots = cf.nodes_of[K];
  for (int i = 0; i < 3; ++i) eb.values[i].resize(slots.size());
  for (size_t s = 0; s < slots.size(); ++s) {
    auto lam = coarse.bary(K, fine.nodes[slots[s]]);
    for (int i = 0; i < 3; ++i) eb.values[i][s] = lam[i];
  }
  return eb;
}

namespace {

std::vector<ElementBasis> build_set(const TriMesh& coarse, const TriMesh& fine,
                                    const CoarseFineMap& cf, const CoefficientField& a,
                                    BasisKind kind, double factor, bool parallel) {
  const int nk = (int)coarse.tris.size();
  std::vector<ElementBasis> out(nk);
  if (kind == BasisKind::Hat) {
    for (int K = 0; K < nk; ++K) out[K] = compute_hat_basis(coarse, K, fine, cf);
    return out;
  }
  if (kind == BasisKind::Classical) factor = 1.0;
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int K = 0; K < nk; ++K) {
    try {
      auto patch = build_oversampling_patch(coarse, K, factor, fine, cf);
      out[K] = compute_oversampling_basis(coarse, K, patch, fine, cf, a);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace

std::vector<ElementBasis> build_basis_set(const TriMesh& coarse, const TriMesh& fine,
                                          const CoarseFineMap& cf, const CoefficientField& a,
                                          BasisKind kind, double factor) {
  return build_set(coarse, fine, cf, a, kind, factor, true);
}

std::vector<ElementBasis> build_basis_set_serial(const TriMesh& coarse, const TriMesh& fine,
                                                 const CoarseFineMap& cf,
                                                 const CoefficientField& a, BasisKind kind,
                                                 double factor) {
  return build_set(coarse, fine, cf, a, kind, factor, false);
}

double pi_value(const TriMesh& coarse, int K, const double* c, Vec2 x) {
  auto lam = coarse.bary(K, x);
  return c[0] * lam[0] + c[1] * lam[1] + c[2] * lam[2];
}

}  // namespace msdg
