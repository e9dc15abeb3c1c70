#pragma once

#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/fem.hpp"
#include "msdg/mesh.hpp"
#include "msdg/msbasis.hpp"
#include "msdg/sparse.hpp"

namespace msdg {

struct PenaltyConfig {
  double beta = -1;    // one of -1, 0, 1
  double gamma0 = 20;  // > 0
  double rho = 0;      // > 0, resolved from eps or the coarse cell size
};

void validate_penalty(const PenaltyConfig& pc);

// Broken trial space: 3 dofs per coarse element, functions expanded in the
// element basis over the fine tiling.  dof of (element K, vertex i) is 3K+i.
struct DGSpace {
  const TriMesh* coarse = nullptr;
  const TriMesh* fine = nullptr;
  const CoarseFineMap* cf = nullptr;
  const std::vector<ElementBasis>* basis = nullptr;
  std::vector<std::vector<int>> elem_edges;  // ascending edge ids per element

  int ndof() const { return 3 * (int)coarse->tris.size(); }
};

DGSpace make_dg_space(const TriMesh& coarse, const TriMesh& fine, const CoarseFineMap& cf,
                      const std::vector<ElementBasis>& basis);

// MsDFEM tests with the multiscale functions themselves; MsDPGM tests with
// their P1 shadows, so every jump (and the penalty) acts on projected traces
// while fluxes stay multiscale.
enum class DGForm { MsDFEM, MsDPGM };

SparseSystem assemble_dg(const DGSpace& sp, const CoefficientField& a, const ScalarFn& f,
                         const ScalarFn& g, DGForm form, const PenaltyConfig& pc,
                         bool parallel = true);
SparseSystem assemble_dg_serial(const DGSpace& sp, const CoefficientField& a, const ScalarFn& f,
                                const ScalarFn& g, DGForm form, const PenaltyConfig& pc);

// boundary contribution of weakly imposed data alone
std::vector<double> weak_dirichlet_rhs(const DGSpace& sp, const CoefficientField& a,
                                       const ScalarFn& g, DGForm form, const PenaltyConfig& pc);

}  // namespace msdg
