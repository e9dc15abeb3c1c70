#include <omp.h>

#include <cstdio>
#include <cstring>
#include <vector>

#include "msdg/dg.hpp"
#include "msdg/experiment.hpp"
#include "msdg/fem.hpp"
#include "msdg/msbasis.hpp"
#include "msdg/pgm.hpp"

using namespace msdg;

namespace {

double bench(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = omp_get_wtime();
    body();
    double dt = omp_get_wtime() - t0;
    if (dt < best) best = dt;
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-18s %10.4f ms %10.4f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  int coarse_n = 16, fine_n = 160, reps = 3;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--coarse-n") && i + 1 < argc) coarse_n = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--fine-n") && i + 1 < argc) fine_n = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--reps") && i + 1 < argc) reps = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: bench_kernels [--coarse-n N] [--fine-n N] [--reps R]\n");
      return 1;
    }
  }

  RunConfig cfg;
  cfg.coarse_n = coarse_n;
  cfg.fine_n = fine_n;
  cfg.coef.eps = 0.05;
  validate_config(cfg);

  TriMesh coarse = build_structured_mesh(cfg.domain, coarse_n);
  TriMesh fine = build_structured_mesh(cfg.domain, fine_n);
  CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
  CoefficientField field = build_field(cfg);
  double factor = resolve_factor(cfg);

  std::printf("coarse %d  fine %d  threads %d  (best of %d)\n", coarse_n, fine_n,
              omp_get_max_threads(), reps);
  std::printf("%-18s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  std::vector<ElementBasis> basis;
  double ts = bench(reps, [&] {
    basis = build_basis_set_serial(coarse, fine, cf, field, BasisKind::Oversampled, factor);
  });
  double tp = bench(reps, [&] {
    basis = build_basis_set(coarse, fine, cf, field, BasisKind::Oversampled, factor);
  });
  row("basis build", ts, tp);

  DGSpace space = make_dg_space(coarse, fine, cf, basis);
  ScalarFn f = [](Vec2) { return 1.0; };
  ScalarFn g = [](Vec2) { return 0.0; };
  PenaltyConfig pen;
  pen.rho = 1.0 / coarse_n;

  SparseSystem sys;
  ts = bench(reps, [&] { sys = assemble_dg_serial(space, field, f, g, DGForm::MsDFEM, pen); });
  tp = bench(reps, [&] { sys = assemble_dg(space, field, f, g, DGForm::MsDFEM, pen); });
  row("MsDFEM assembly", ts, tp);

  ts = bench(reps, [&] { sys = assemble_dg_serial(space, field, f, g, DGForm::MsDPGM, pen); });
  SparseSystem psys;
  tp = bench(reps, [&] { psys = assemble_dg(space, field, f, g, DGForm::MsDPGM, pen); });
  row("MsDPGM assembly", ts, tp);

  PGSystem pgs;
  ts = bench(reps, [&] { pgs = assemble_pg_serial(coarse, fine, cf, basis, field, f, g); });
  tp = bench(reps, [&] { pgs = assemble_pg(coarse, fine, cf, basis, field, f, g); });
  row("PG assembly", ts, tp);

  std::vector<double> x(sys.A.n, 1.0), y(sys.A.n);
  int spmv_reps = 200;
  ts = bench(reps, [&] {
    for (int r = 0; r < spmv_reps; ++r) sys.A.multiply(x.data(), y.data(), false);
  });
  tp = bench(reps, [&] {
    for (int r = 0; r < spmv_reps; ++r) sys.A.multiply(x.data(), y.data(), true);
  });
  row("SpMV x200", ts, tp);

  // the solver parallelizes only through SpMV, so pin the thread count
  int max_threads = omp_get_max_threads();
  SolveOptions opt;
  opt.tol = 1e-10;
  SolveResult res;
  omp_set_num_threads(1);
  ts = bench(reps, [&] { res = cg_solve(sys.A, sys.rhs, opt); });
  omp_set_num_threads(max_threads);
  tp = bench(reps, [&] { res = cg_solve(sys.A, sys.rhs, opt); });
  row("CG solve", ts, tp);
  std::printf("CG iterations %d  residual %.3e\n", res.iterations, res.residual);
  return 0;
}
