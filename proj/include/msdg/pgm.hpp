#pragma once

#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/fem.hpp"
#include "msdg/mesh.hpp"
#include "msdg/msbasis.hpp"
#include "msdg/sparse.hpp"

namespace msdg {

// Nodal Petrov-Galerkin transfer: multiscale trial functions tested against
// conforming P1 hats, volume integrals only.  With the classical basis the
// trial space is continuous (MsPGM); with the oversampled basis it is broken
// across edges (OMsPGM) and the integrals are taken elementwise.
struct PGSystem {
  SparseSystem sys;  // interior coarse nodes
  std::vector<int> interior;
  std::vector<int> slot_of_node;
  std::vector<double> boundary_g;  // full nodal length
};

PGSystem assemble_pg(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
                     const std::vector<ElementBasis>& basis, const CoefficientField& a,
                     const ScalarFn& f, const ScalarFn& g, bool parallel = true);
PGSystem assemble_pg_serial(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
                            const std::vector<ElementBasis>& basis, const CoefficientField& a,
                            const ScalarFn& f, const ScalarFn& g);

// full nodal vector from an interior solve plus boundary data
std::vector<double> pg_nodal_solution(const PGSystem& ps, const std::vector<double>& x);

}  // namespace msdg
