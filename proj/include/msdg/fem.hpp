#pragma once

#include <array>
#include <functional>
#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/mesh.hpp"
#include "msdg/sparse.hpp"

namespace msdg {

using ScalarFn = std::function<double(Vec2)>;

struct P1Function {
  const TriMesh* mesh = nullptr;
  std::vector<double> values;  // nodal

  double eval(Vec2 p) const;
};

P1Function interpolate_p1(const TriMesh& mesh, const ScalarFn& fn);

// stiffness and load over the full node set, no boundary conditions;
// coefficient sampled at element centroids, load by the vertex rule
struct RawSystem {
  CsrMatrix A;
  std::vector<double> load;
};

RawSystem assemble_p1_raw(const TriMesh& mesh, const CoefficientField& a, const ScalarFn& f,
                          bool parallel = true);
RawSystem assemble_p1_tensor_raw(const TriMesh& mesh, const std::array<std::array<double, 2>, 2>& A,
                                 const ScalarFn& f, bool parallel = true);
// serial reference for the parallel assembly path
RawSystem assemble_p1_raw_serial(const TriMesh& mesh, const CoefficientField& a, const ScalarFn& f);

// symmetric elimination of Dirichlet nodes
struct DirichletSystem {
  SparseSystem sys;                // interior x interior
  std::vector<int> interior;       // interior node ids, ascending
  std::vector<int> slot_of_node;   // node id -> interior slot, -1 on boundary
  std::vector<double> boundary_g;  // full length, g at boundary nodes, 0 inside
};

DirichletSystem apply_dirichlet(const TriMesh& mesh, const RawSystem& raw, const ScalarFn& g);

DirichletSystem assemble_p1(const TriMesh& mesh, const CoefficientField& a, const ScalarFn& f,
                            const ScalarFn& g, bool parallel = true);

// scatter an interior solve back to a full nodal function
P1Function scatter_solution(const TriMesh& mesh, const DirichletSystem& ds,
                            const std::vector<double>& x);

P1Function solve_p1_dirichlet(const TriMesh& mesh, const CoefficientField& a, const ScalarFn& f,
                              const ScalarFn& g, const SolveOptions& opt = {},
                              SolveResult* info = nullptr);

// Direct solver for the homogeneous equation on a patch: factors once, then
// solves for many boundary data sets.  Node order keeps the lattice band.
struct LocalDirichletSolver {
  const TriMesh* mesh = nullptr;
  std::vector<int> interior;
  std::vector<int> slot_of_node;
  CsrMatrix raw;  // full stiffness, for boundary coupling
  BandMatrix chol;

  void init(const TriMesh& patch, const CoefficientField& a);
  // boundary_values: full nodal length, read only at boundary nodes
  std::vector<double> solve(const std::vector<double>& boundary_values) const;
};

std::vector<double> solve_local_dirichlet(const TriMesh& patch, const CoefficientField& a,
                                          const ScalarFn& g);

// fine-grid Dirichlet solve used as the surrogate truth; warns when an
// analytic-periodic coefficient is not resolved (eps/h_f < 8)
P1Function reference_solution(const TriMesh& fine, const CoefficientField& a, const ScalarFn& f,
                              const ScalarFn& g, const SolveOptions& opt = {},
                              SolveResult* info = nullptr, bool* under_resolved = nullptr);

}  // namespace msdg
