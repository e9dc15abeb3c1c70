#pragma once

#include <array>

#include "msdg/coefficient.hpp"
#include "msdg/fem.hpp"
#include "msdg/mesh.hpp"
#include "msdg/sparse.hpp"

namespace msdg {

// First-order correctors on the periodic unit cell, discretized on an n x n
// structured grid with wrapped nodes.  chi[j] has zero P1 mean.
struct CellSolution {
  int n = 0;
  std::array<std::vector<double>, 2> chi;
  std::array<std::array<double, 2>, 2> a_star{};

  double eval_chi(int j, Vec2 y) const;  // y taken modulo the unit cell
};

// field is read through eval_unit, i.e. as 1-periodic
CellSolution solve_cell_problem(const CoefficientField& a, int n, const SolveOptions& opt = {});

// area-weighted recovery of the broken gradient at the nodes
std::vector<Vec2> recover_gradient(const TriMesh& mesh, const std::vector<double>& u);

// u1(x) = u0(x) + eps * chi^j(x/eps) d_j u0(x) with recovered gradients
P1Function corrector_u1(const P1Function& u0, const CellSolution& cell, double eps);

P1Function solve_homogenized(const TriMesh& mesh, const std::array<std::array<double, 2>, 2>& a_star,
                             const ScalarFn& f, const ScalarFn& g, const SolveOptions& opt = {},
                             SolveResult* info = nullptr);

}  // namespace msdg
