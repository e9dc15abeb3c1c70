#include <cmath>
#include <cstring>

#include "doctest.h"
#include "msdg/fem.hpp"

using namespace msdg;

namespace {

const ScalarFn kZero = [](Vec2) { return 0.0; };
const ScalarFn kOne = [](Vec2) { return 1.0; };

double l2_error(const TriMesh& m, const P1Function& u, const ScalarFn& exact) {
  // vertex-rule quadrature is enough for rate checks
  double s = 0;
  for (size_t t = 0; t < m.tris.size(); ++t) {
    auto xy = m.tri_xy(t);
    const auto& tri = m.tris[t];
    for (int k = 0; k < 3; ++k) {
      double d = u.values[tri[k]] - exact(xy[k]);
      s += m.area(t) / 3 * d * d;
    }
  }
  return std::sqrt(s);
}

double h1_seminorm_error(const TriMesh& m, const P1Function& u, const P1Function& uref) {
  double s = 0;
  for (size_t t = 0; t < m.tris.size(); ++t) {
    auto g = m.grads(t);
    const auto& tri = m.tris[t];
    Vec2 gu{0, 0};
    for (int k = 0; k < 3; ++k) gu = gu + (u.values[tri[k]] - uref.values[tri[k]]) * g[k];
    s += m.area(t) * dot(gu, gu);
  }
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE_BEGIN("fem");

TEST_CASE("stiffness matches the five point stencil") {
  TriMesh m = build_structured_mesh(Domain::UnitSquare, 4);
  CoefficientField one = make_constant_field(1.0);
  RawSystem raw = assemble_p1_raw(m, one, kOne);
  int c = m.node_at(2, 2);
  CHECK(raw.A.get(c, c) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(raw.A.get(c, m.node_at(1, 2)) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(raw.A.get(c, m.node_at(3, 2)) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(raw.A.get(c, m.node_at(2, 1)) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(raw.A.get(c, m.node_at(2, 3)) == doctest::Approx(-1.0).epsilon(1e-13));
  // the diagonal couplings cancel for the laplacian on this split
  CHECK(raw.A.get(c, m.node_at(3, 3)) == doctest::Approx(0.0).epsilon(1e-13));
  // interior load: |support|/3 = h^2
  CHECK(raw.load[c] == doctest::Approx(m.cell * m.cell).epsilon(1e-13));
  // row sums of the stiffness vanish (constants in the kernel)
  for (int r = 0; r < raw.A.n; ++r) {
    double s = 0;
    for (int64_t k = raw.A.rowptr[r]; k < raw.A.rowptr[r + 1]; ++k) s += raw.A.vals[k];
    CHECK(std::abs(s) < 1e-13);
  }
}

TEST_CASE("linear solutions are exact") {
  TriMesh m = build_structured_mesh(Domain::UnitSquare, 8);
  CoefficientField one = make_constant_field(1.0);
  ScalarFn lin = [](Vec2 p) { return 2 * p.x - 3 * p.y + 0.5; };
  P1Function u = solve_p1_dirichlet(m, one, kZero, lin);
  for (size_t i = 0; i < m.nodes.size(); ++i)
    CHECK(u.values[i] == doctest::Approx(lin(m.nodes[i])).epsilon(1e-9));
}

TEST_CASE("manufactured solution converges at second order") {
  const double pi = 3.14159265358979323846;
  CoefficientField one = make_constant_field(1.0);
  ScalarFn exact = [=](Vec2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); };
  ScalarFn f = [=](Vec2 p) { return 2 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); };
  SolveOptions opt;
  opt.tol = 1e-12;
  double prev = 0;
  for (int n : {8, 16, 32}) {
    TriMesh m = build_structured_mesh(Domain::UnitSquare, n);
    P1Function u = solve_p1_dirichlet(m, one, f, kZero, opt);
    double err = l2_error(m, u, exact);
    if (prev > 0) {
      double ratio = prev / err;
      CHECK(ratio > 3.3);
      CHECK(ratio < 4.7);
    }
    prev = err;
  }
}

TEST_CASE("five point scheme is nodally exact on separable quadratics") {
  // second differences of x(1-x) and y(1-y) are exact, so the discrete
  // solution coincides with the interpolant at every node
  CoefficientField one = make_constant_field(1.0);
  ScalarFn exact = [](Vec2 p) { return p.x * (1 - p.x) * p.y * (1 - p.y); };
  ScalarFn f = [](Vec2 p) { return 2 * (p.y * (1 - p.y) + p.x * (1 - p.x)); };
  SolveOptions opt;
  opt.tol = 1e-13;
  TriMesh m = build_structured_mesh(Domain::UnitSquare, 16);
  P1Function u = solve_p1_dirichlet(m, one, f, kZero, opt);
  for (size_t i = 0; i < m.nodes.size(); ++i)
    CHECK(std::abs(u.values[i] - exact(m.nodes[i])) < 1e-12);
}

TEST_CASE("poisson center value") {
  TriMesh m = build_structured_mesh(Domain::UnitSquare, 256);
  CoefficientField one = make_constant_field(1.0);
  SolveOptions opt;
  opt.tol = 1e-11;
  P1Function u = solve_p1_dirichlet(m, one, kOne, kZero, opt);
  // series value of the unit square poisson problem at the center
  CHECK(u.values[m.node_at(128, 128)] == doctest::Approx(0.07367135).epsilon(3e-4));
}

TEST_CASE("parallel assembly is bit identical to serial") {
  TriMesh m = build_structured_mesh(Domain::UnitSquare, 16);
  CoefficientField a = make_periodic_field(0.25);
  ScalarFn f = [](Vec2 p) { return std::sin(3 * p.x) + p.y; };
  RawSystem s = assemble_p1_raw_serial(m, a, f);
  RawSystem p = assemble_p1_raw(m, a, f, true);
  REQUIRE(s.A.vals.size() == p.A.vals.size());
  CHECK(std::memcmp(s.A.vals.data(), p.A.vals.data(), s.A.vals.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(s.load.data(), p.load.data(), s.load.size() * sizeof(double)) == 0);
}

TEST_CASE("dirichlet elimination keeps symmetry and boundary data") {
  TriMesh m = build_structured_mesh(Domain::LShape, 4);
  CoefficientField a = make_periodic_field(0.25);
  ScalarFn g = [](Vec2 p) { return p.x + p.y * p.y; };
  DirichletSystem ds = assemble_p1(m, a, kOne, g);
  CHECK(ds.sys.symmetric);
  CHECK(ds.interior.size() + m.num_boundary_nodes() == m.nodes.size());
  for (int r = 0; r < ds.sys.A.n; ++r)
    for (int64_t k = ds.sys.A.rowptr[r]; k < ds.sys.A.rowptr[r + 1]; ++k)
      CHECK(ds.sys.A.vals[k] ==
            doctest::Approx(ds.sys.A.get(ds.sys.A.cols[k], r)).epsilon(1e-14));
  P1Function u = scatter_solution(m, ds, std::vector<double>(ds.interior.size(), 0.0));
  for (size_t i = 0; i < m.nodes.size(); ++i)
    if (m.node_boundary[i]) CHECK(u.values[i] == g(m.nodes[i]));
}

TEST_CASE("local direct solver matches the iterative one") {
  TriMesh patch = build_right_triangle_mesh(0, {0, 0}, 12, 1.0 / 24, {0, 0});
  CoefficientField a = make_periodic_field(0.25);
  ScalarFn g = [](Vec2 p) { return p.x * p.x - p.y + 0.2; };
  std::vector<double> direct = solve_local_dirichlet(patch, a, g);
  SolveOptions opt;
  opt.tol = 1e-13;
  P1Function iter = solve_p1_dirichlet(patch, a, kZero, g, opt);
  for (size_t i = 0; i < patch.nodes.size(); ++i)
    CHECK(direct[i] == doctest::Approx(iter.values[i]).epsilon(1e-8));

  // shared factorization answers several boundary data sets
  LocalDirichletSolver solver;
  solver.init(patch, a);
  std::vector<double> gv(patch.nodes.size());
  for (size_t i = 0; i < patch.nodes.size(); ++i) gv[i] = g(patch.nodes[i]);
  std::vector<double> again = solver.solve(gv);
  for (size_t i = 0; i < patch.nodes.size(); ++i)
    CHECK(again[i] == doctest::Approx(direct[i]).epsilon(1e-12));
}

TEST_CASE("reference solve flags unresolved oscillation") {
  CoefficientField a = make_periodic_field(0.05);
  SolveOptions opt;
  opt.tol = 1e-8;
  bool flag = false;
  TriMesh low = build_structured_mesh(Domain::UnitSquare, 100);
  reference_solution(low, a, kOne, kZero, opt, nullptr, &flag);
  CHECK(flag);
  flag = true;
  TriMesh ok = build_structured_mesh(Domain::UnitSquare, 160);
  reference_solution(ok, a, kOne, kZero, opt, nullptr, &flag);
  CHECK(!flag);
}

TEST_CASE("interpolation and eval") {
  TriMesh m = build_structured_mesh(Domain::UnitSquare, 5);
  ScalarFn fn = [](Vec2 p) { return 3 * p.x - p.y; };
  P1Function u = interpolate_p1(m, fn);
  CHECK(u.eval({0.37, 0.61}) == doctest::Approx(fn({0.37, 0.61})).epsilon(1e-12));
  CHECK(h1_seminorm_error(m, u, u) == 0);
}

TEST_SUITE_END();
