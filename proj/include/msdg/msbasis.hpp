#pragma once

#include <array>
#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/fem.hpp"
#include "msdg/mesh.hpp"

namespace msdg {

enum class BasisKind { Oversampled, Classical, Hat };

// Per-element trial functions sampled at the fine nodes of the element
// closure (slot order of CoarseFineMap::nodes_of).  cob holds the
// change-of-basis coefficients against the patch's a-harmonic nodal
// functions; the P1 shadow of basis i is the hat function of vertex i.
struct ElementBasis {
  int element = -1;
  BasisKind kind = BasisKind::Hat;
  std::array<std::vector<double>, 3> values;
  std::array<std::array<double, 3>, 3> cob{};
  double separation = 0;
  bool translated = false, shrunk = false;
};

// c with phi_i^K = sum_j c[i][j] phi_j^S; throws when S is degenerate
std::array<std::array<double, 3>, 3> change_of_basis(const std::array<Vec2, 3>& S,
                                                     const std::array<Vec2, 3>& K_vertices,
                                                     int element_id);

ElementBasis compute_oversampling_basis(const TriMesh& coarse, int K, const PatchSpec& patch,
                                        const TriMesh& fine, const CoarseFineMap& cf,
                                        const CoefficientField& a);
ElementBasis compute_classical_basis(const TriMesh& coarse, int K, const TriMesh& fine,
                                     const CoarseFineMap& cf, const CoefficientField& a);
ElementBasis compute_hat_basis(const TriMesh& coarse, int K, const TriMesh& fine,
                               const CoarseFineMap& cf);

std::vector<ElementBasis> build_basis_set(const TriMesh& coarse, const TriMesh& fine,
                                          const CoarseFineMap& cf, const CoefficientField& a,
                                          BasisKind kind, double factor);
// plain loop kept as the reference for the parallel builder
std::vector<ElementBasis> build_basis_set_serial(const TriMesh& coarse, const TriMesh& fine,
                                                 const CoarseFineMap& cf,
                                                 const CoefficientField& a, BasisKind kind,
                                                 double factor);

// P1 shadow of DG coefficients c on element K, evaluated at x
double pi_value(const TriMesh& coarse, int K, const double* c, Vec2 x);

}  // namespace msdg
