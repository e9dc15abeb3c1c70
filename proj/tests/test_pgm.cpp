#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "msdg/analysis.hpp"
#include "msdg/pgm.hpp"

using namespace msdg;

namespace {

const ScalarFn kZero = [](Vec2) { return 0.0; };
const ScalarFn kOne = [](Vec2) { return 1.0; };

}  // namespace

TEST_SUITE_BEGIN("pgm");

TEST_CASE("classical basis on constant field reduces to the p1 system") {
  TriMesh coarse = build_structured_mesh(Domain::UnitSquare, 4);
  TriMesh fine = build_structured_mesh(Domain::UnitSquare, 16);
  CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
  CoefficientField one = make_constant_field(1.0);
  auto basis = build_basis_set(coarse, fine, cf, one, BasisKind::Classical, 1.0);
  PGSystem pg = assemble_pg(coarse, fine, cf, basis, one, kOne, kZero);
  DirichletSystem fem = assemble_p1(coarse, one, kOne, kZero);
  REQUIRE(pg.sys.A.n == fem.sys.A.n);
  for (int r = 0; r < pg.sys.A.n; ++r)
    for (int64_t k = pg.sys.A.rowptr[r]; k < pg.sys.A.rowptr[r + 1]; ++k)
      CHECK(pg.sys.A.vals[k] ==
            doctest::Approx(fem.sys.A.get(r, pg.sys.A.cols[k])).epsilon(1e-11));
  for (size_t i = 0; i < pg.sys.rhs.size(); ++i)
    CHECK(pg.sys.rhs[i] == doctest::Approx(fem.sys.rhs[i]).epsilon(1e-11));
}

TEST_CASE("petrov galerkin reproduces linear data") {
  TriMesh coarse = build_structured_mesh(Domain::UnitSquare, 4);
  TriMesh fine = build_structured_mesh(Domain::UnitSquare, 16);
  CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
  CoefficientField one = make_constant_field(1.0);
  ScalarFn lin = [](Vec2 p) { return 3 * p.x - p.y + 1; };
  for (BasisKind kind : {BasisKind::Classical, BasisKind::Oversampled}) {
    auto basis = build_basis_set(coarse, fine, cf, one, kind, 2.0);
    PGSystem pg = assemble_pg(coarse, fine, cf, basis, one, kZero, lin);
    SolveOptions opt;
    opt.tol = 1e-12;
    SolveResult res = solve_sparse(pg.sys, opt);
    REQUIRE(res.converged);
    std::vector<double> u = pg_nodal_solution(pg, res.x);
    for (size_t i = 0; i < coarse.nodes.size(); ++i)
      CHECK(u[i] == doctest::Approx(lin(coarse.nodes[i])).epsilon(1e-8));
  }
}

TEST_CASE("boundary nodes carry the data exactly") {
  TriMesh coarse = build_structured_mesh(Domain::LShape, 2);
  TriMesh fine = build_structured_mesh(Domain::LShape, 8);
  CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
  CoefficientField a = make_periodic_field(0.5);
  auto basis = build_basis_set(coarse, fine, cf, a, BasisKind::Classical, 1.0);
  ScalarFn g = [](Vec2 p) { return p.x * p.x + p.y; };
  PGSystem pg = assemble_pg(coarse, fine, cf, basis, a, kOne, g);
  std::vector<double> u = pg_nodal_solution(pg, std::vector<double>(pg.interior.size(), 0.0));
  for (size_t i = 0; i < coarse.nodes.size(); ++i)
    if (coarse.node_boundary[i]) CHECK(u[i] == g(coarse.nodes[i]));
}

TEST_CASE("oversampled factor one equals classical system") {
  TriMesh coarse = build_structured_mesh(Domain::UnitSquare, 2);
  TriMesh fine = build_structured_mesh(Domain::UnitSquare, 8);
  CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
  CoefficientField a = make_periodic_field(0.5);
  auto cl = build_basis_set(coarse, fine, cf, a, BasisKind::Classical, 1.0);
  auto os = build_basis_set(coarse, fine, cf, a, BasisKind::Oversampled, 1.0);
  PGSystem p1 = assemble_pg(coarse, fine, cf, cl, a, kOne, kZero);
  PGSystem p2 = assemble_pg(coarse, fine, cf, os, a, kOne, kZero);
  CHECK(std::memcmp(p1.sys.A.vals.data(), p2.sys.A.vals.data(),
                    p1.sys.A.vals.size() * sizeof(double)) == 0);
}

TEST_CASE("parallel pg assembly is bit identical to serial") {
  TriMesh coarse = build_structured_mesh(Domain::UnitSquare, 4);
  TriMesh fine = build_structured_mesh(Domain::UnitSquare, 16);
  CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
  CoefficientField a = make_periodic_field(0.25);
  auto basis = build_basis_set(coarse, fine, cf, a, BasisKind::Oversampled, 2.0);
  ScalarFn g = [](Vec2 p) { return p.y - p.x; };
  PGSystem ser = assemble_pg_serial(coarse, fine, cf, basis, a, kOne, g);
  PGSystem par = assemble_pg(coarse, fine, cf, basis, a, kOne, g);
  REQUIRE(ser.sys.A.vals.size() == par.sys.A.vals.size());
  CHECK(std::memcmp(ser.sys.A.vals.data(), par.sys.A.vals.data(),
                    ser.sys.A.vals.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(ser.sys.rhs.data(), par.sys.rhs.data(),
                    ser.sys.rhs.size() * sizeof(double)) == 0);
}

TEST_CASE("expansion through the basis stays nodally consistent") {
  TriMesh coarse = build_structured_mesh(Domain::UnitSquare, 2);
  TriMesh fine = build_structured_mesh(Domain::UnitSquare, 8);
  CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
  CoefficientField a = make_periodic_field(0.5);
  auto basis = build_basis_set(coarse, fine, cf, a, BasisKind::Classical, 1.0);
  std::vector<double> nodal(coarse.nodes.size());
  for (size_t i = 0; i < nodal.size(); ++i)
    nodal[i] = 0.3 * coarse.nodes[i].x - coarse.nodes[i].y;
  BrokenFine u = expand_nodal(coarse, cf, basis, nodal);
  // classical basis interpolates at coarse vertices, so the expansion hits
  // the nodal values there
  for (size_t K = 0; K < coarse.tris.size(); ++K) {
    auto kxy = coarse.tri_xy(K);
    for (int k = 0; k < 3; ++k) {
      const auto& nodes = cf.nodes_of[K];
      for (size_t n = 0; n < nodes.size(); ++n) {
        Vec2 d = fine.nodes[nodes[n]] - kxy[k];
        if (std::abs(d.x) + std::abs(d.y) < 1e-12)
          CHECK(u.vals[K][n] ==
                doctest::Approx(nodal[coarse.tris[K][k]]).epsilon(1e-11));
      }
    }
  }
}

TEST_SUITE_END();
