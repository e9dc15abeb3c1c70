#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "msdg/analysis.hpp"
#include "msdg/dg.hpp"

using namespace msdg;

namespace {

const ScalarFn kZero = [](Vec2) { return 0.0; };
const ScalarFn kOne = [](Vec2) { return 1.0; };

struct DGSetup {
  TriMesh coarse, fine;
  CoarseFineMap cf;
  CoefficientField field;
  std::vector<ElementBasis> basis;
  DGSpace space;

  DGSetup(int cn, int fn, CoefficientField a, BasisKind kind, double factor)
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

double max_entry_diff(const CsrMatrix& A, const CsrMatrix& B) {
  double worst = 0;
  for (int r = 0; r < A.n; ++r)
    for (int64_t k = A.rowptr[r]; k < A.rowptr[r + 1]; ++k)
      worst = std::max(worst, std::abs(A.vals[k] - B.get(r, A.cols[k])));
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("dg");

TEST_CASE("penalty validation") {
  CHECK_THROWS(validate_penalty(penalty(0.5, 20, 0.1)));
  CHECK_THROWS(validate_penalty(penalty(-1, 0, 0.1)));
  CHECK_THROWS(validate_penalty(penalty(-1, 20, 0)));
  CHECK_NOTHROW(validate_penalty(penalty(1, 20, 0.1)));
}

TEST_CASE("constant coefficient collapses every variant") {
  DGSetup hat(4, 16, make_constant_field(1.0), BasisKind::Hat, 1.0);
  DGSetup os(4, 16, make_constant_field(1.0), BasisKind::Oversampled, 2.0);
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  SparseSystem dfem = assemble_dg(hat.space, hat.field, kOne, kZero, DGForm::MsDFEM, pc);
  SparseSystem msdfem = assemble_dg(os.space, os.field, kOne, kZero, DGForm::MsDFEM, pc);
  SparseSystem msdpgm = assemble_dg(os.space, os.field, kOne, kZero, DGForm::MsDPGM, pc);
  CHECK(max_entry_diff(dfem.A, msdfem.A) < 1e-10);
  CHECK(max_entry_diff(dfem.A, msdpgm.A) < 1e-10);
  for (int i = 0; i < dfem.A.n; ++i) {
    CHECK(dfem.rhs[i] == doctest::Approx(msdfem.rhs[i]).epsilon(1e-12));
    CHECK(dfem.rhs[i] == doctest::Approx(msdpgm.rhs[i]).epsilon(1e-12));
  }
}

TEST_CASE("symmetric variant gives a symmetric matrix") {
  DGSetup s(4, 16, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  SparseSystem sys = assemble_dg(s.space, s.field, kOne, kZero, DGForm::MsDFEM,
                                 penalty(-1, 20, 0.25));
  CHECK(sys.symmetric);
  // entrywise to 1e-12; accumulation order differs between (r,c) and (c,r)
  for (int r = 0; r < sys.A.n; ++r)
    for (int64_t k = sys.A.rowptr[r]; k < sys.A.rowptr[r + 1]; ++k)
      CHECK(std::abs(sys.A.vals[k] - sys.A.get(sys.A.cols[k], r)) < 1e-12);

  SparseSystem pg = assemble_dg(s.space, s.field, kOne, kZero, DGForm::MsDPGM,
                                penalty(-1, 20, 0.25));
  CHECK(!pg.symmetric);
}

TEST_CASE("continuous injection kills jump terms") {
  DGSetup s(4, 16, make_constant_field(1.0), BasisKind::Hat, 1.0);
  // inject w = 2x - y + 0.25 elementwise: coefficients are vertex values
  std::vector<double> w(s.space.ndof());
  for (size_t K = 0; K < s.coarse.tris.size(); ++K) {
    auto xy = s.coarse.tri_xy(K);
    for (int i = 0; i < 3; ++i) w[3 * K + i] = 2 * xy[i].x - xy[i].y + 0.25;
  }
  for (DGNormKind kind : {DGNormKind::HOmega, DGNormKind::E}) {
    DGNormParts parts = dg_norm_parts(s.space, s.field, penalty(-1, 20, 0.25), w, kind);
    // interior jumps vanish; boundary traces remain by the trace convention
    CHECK(parts.grad2 == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(parts.jump2 > 0);
  }

  // zero boundary trace: product of hats, injected the same way
  std::vector<double> z(s.space.ndof());
  auto bubble = [](Vec2 p) { return p.x * (1 - p.x) * p.y * (1 - p.y); };
  for (size_t K = 0; K < s.coarse.tris.size(); ++K) {
    auto xy = s.coarse.tri_xy(K);
    for (int i = 0; i < 3; ++i) z[3 * K + i] = bubble(xy[i]);
  }
  DGNormParts zp = dg_norm_parts(s.space, s.field, penalty(-1, 20, 0.25), z, DGNormKind::HOmega);
  CHECK(zp.jump2 < 1e-24);
}

TEST_CASE("dfem reproduces linear boundary data") {
  DGSetup s(4, 16, make_constant_field(1.0), BasisKind::Hat, 1.0);
  ScalarFn lin = [](Vec2 p) { return p.x + 2 * p.y; };
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  SparseSystem sys = assemble_dg(s.space, s.field, kZero, lin, DGForm::MsDFEM, pc);
  SolveOptions opt;
  opt.tol = 1e-12;
  SolveResult res = solve_sparse(sys, opt);
  REQUIRE(res.converged);
  BrokenFine u = expand_dg(s.space, res.x);
  for (size_t K = 0; K < s.coarse.tris.size(); ++K)
    for (size_t n = 0; n < s.cf.nodes_of[K].size(); ++n) {
      Vec2 p = s.fine.nodes[s.cf.nodes_of[K][n]];
      CHECK(u.vals[K][n] == doctest::Approx(lin(p)).epsilon(1e-8));
    }
}

TEST_CASE("weak dirichlet rhs scales with the boundary data") {
  DGSetup s(2, 8, make_constant_field(1.0), BasisKind::Hat, 1.0);
  PenaltyConfig pc = penalty(-1, 50, 0.5);
  std::vector<double> zero = weak_dirichlet_rhs(s.space, s.field, kZero, DGForm::MsDFEM, pc);
  for (double v : zero) CHECK(v == 0);

  // test function = constant one: flux term drops, penalty integrates g
  std::vector<double> rhs = weak_dirichlet_rhs(s.space, s.field, kOne, DGForm::MsDFEM, pc);
  std::vector<double> ones(s.space.ndof(), 1.0);
  double acc = 0;
  for (int i = 0; i < s.space.ndof(); ++i) acc += rhs[i] * ones[i];
  CHECK(acc == doctest::Approx(pc.gamma0 / pc.rho * 4.0).epsilon(1e-12));

  // doubling g doubles the contribution
  ScalarFn g2 = [](Vec2) { return 2.0; };
  std::vector<double> rhs2 = weak_dirichlet_rhs(s.space, s.field, g2, DGForm::MsDFEM, pc);
  for (int i = 0; i < s.space.ndof(); ++i)
    CHECK(rhs2[i] == doctest::Approx(2 * rhs[i]).epsilon(1e-12));
}

TEST_CASE("projected rhs integrates the hat shadows") {
  DGSetup s(4, 16, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  SparseSystem sys = assemble_dg(s.space, s.field, kOne, kZero, DGForm::MsDPGM, pc);
  double expect = s.coarse.area(0) / 3;
  for (int d = 0; d < s.space.ndof(); ++d)
    CHECK(sys.rhs[d] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("penalty scales linearly in gamma0") {
  DGSetup s(2, 8, make_periodic_field(0.5), BasisKind::Oversampled, 2.0);
  double rho = 0.5;
  SparseSystem a1 = assemble_dg(s.space, s.field, kOne, kZero, DGForm::MsDPGM,
                                penalty(-1, 10, rho));
  SparseSystem a2 = assemble_dg(s.space, s.field, kOne, kZero, DGForm::MsDPGM,
                                penalty(-1, 20, rho));
  SparseSystem a3 = assemble_dg(s.space, s.field, kOne, kZero, DGForm::MsDPGM,
                                penalty(-1, 30, rho));
  // A(g) = B + g*J: check the extrapolation A3 = A2 + (A2 - A1)
  double worst = 0;
  for (size_t k = 0; k < a1.A.vals.size(); ++k) {
    double pred = 2 * a2.A.vals[k] - a1.A.vals[k];
    worst = std::max(worst, std::abs(pred - a3.A.vals[k]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("parallel dg assembly is bit identical to serial") {
  DGSetup s(4, 16, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  for (DGForm form : {DGForm::MsDFEM, DGForm::MsDPGM}) {
    SparseSystem ser = assemble_dg_serial(s.space, s.field, kOne, kZero, form, pc);
    SparseSystem par = assemble_dg(s.space, s.field, kOne, kZero, form, pc);
    REQUIRE(ser.A.vals.size() == par.A.vals.size());
    CHECK(std::memcmp(ser.A.vals.data(), par.A.vals.data(),
                      ser.A.vals.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(ser.rhs.data(), par.rhs.data(), ser.rhs.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("msdfem converges on the periodic problem") {
  DGSetup s(4, 32, make_periodic_field(0.25), BasisKind::Oversampled, 2.0);
  PenaltyConfig pc = penalty(-1, 20, 0.25);
  SparseSystem sys = assemble_dg(s.space, s.field, kOne, kZero, DGForm::MsDFEM, pc);
  SolveOptions opt;
  opt.tol = 1e-10;
  SolveResult res = solve_sparse(sys, opt);
  CHECK(res.converged);
  BrokenFine u = expand_dg(s.space, res.x);
  double peak = 0;
  for (const auto& elem : u.vals)
    for (double v : elem) peak = std::max(peak, std::abs(v));
  CHECK(peak > 0.01);
  CHECK(peak < 1.0);
}

TEST_SUITE_END();
