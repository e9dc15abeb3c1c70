#include "msdg/experiment.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "msdg/dg.hpp"
#include "msdg/pgm.hpp"

namespace msdg {

ScalarFn corner_singular_fn() {
  return [](Vec2 p) {
    double r = std::sqrt(p.x * p.x + p.y * p.y);
    if (r == 0) return 0.0;
    double th = std::atan2(p.y, p.x);
    if (th < 0) th += 2 * M_PI;
    return std::pow(r, 2.0 / 3.0) * std::sin(2.0 * th / 3.0);
  };
}

ScalarFn boundary_fn(const RunConfig& cfg) {
  if (cfg.g_kind == BoundaryKind::Corner) return corner_singular_fn();
  return [](Vec2) { return 0.0; };
}

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

CoefficientField build_field(const RunConfig& cfg) {
  const CoefConfig& c = cfg.coef;
  Vec2 bb0 = (cfg.domain == Domain::LShape) ? Vec2{-1, -1} : Vec2{0, 0};
  Vec2 bb1{1, 1};
  switch (c.kind) {
    case CoefKind::AnalyticPeriodic: return make_periodic_field(c.eps);
    case CoefKind::Constant: return make_constant_field(c.value);
    case CoefKind::Layered: return make_layered_field(c.eps);
    case CoefKind::Grid: {
      if (c.grid_file.empty()) throw std::runtime_error("grid coefficient needs coef-file");
      return load_grid_field_text(read_text_file(c.grid_file), bb0, bb1);
    }
    case CoefKind::Lognormal: {
      int n = (cfg.domain == Domain::LShape) ? 2 * cfg.fine_n : cfg.fine_n;
      return make_lognormal_field(c.sigma2, c.l1, c.l2, c.seed, n, bb0, bb1);
    }
  }
  throw std::runtime_error("unhandled coefficient kind");
}

namespace {

std::string reference_key(const RunConfig& cfg, const CoefficientField& field) {
  char buf[64];
  std::string key = field_signature(field);
  std::snprintf(buf, sizeof buf, "|%d|%d|%.17g|%.17g|%d", static_cast<int>(cfg.domain),
                cfg.fine_n, cfg.solver_tol, cfg.f_const, static_cast<int>(cfg.g_kind));
  return key + buf;
}

std::map<std::string, std::shared_ptr<const std::vector<double>>>& reference_cache() {
  static std::map<std::string, std::shared_ptr<const std::vector<double>>> cache;
  return cache;
}

}  // namespace

void clear_reference_cache() { reference_cache().clear(); }

const std::vector<double>& cached_reference(const RunConfig& cfg, const TriMesh& fine,
                                            const CoefficientField& field) {
  auto& cache = reference_cache();
  std::string key = reference_key(cfg, field);
  auto it = cache.find(key);
  if (it == cache.end()) {
    double fc = cfg.f_const;
    ScalarFn f = [fc](Vec2) { return fc; };
    SolveOptions opt;
    opt.tol = cfg.solver_tol;
    opt.max_iter = cfg.max_iter;
    SolveResult info;
    P1Function u = reference_solution(fine, field, f, boundary_fn(cfg), opt, &info);
    if (!info.converged) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "reference solve stalled at residual %.3e", info.residual);
      throw std::runtime_error(msg);
    }
    it = cache.emplace(key, std::make_shared<const std::vector<double>>(std::move(u.values))).first;
  }
  if (it->second->size() != fine.nodes.size())
    throw std::runtime_error("reference cache node count mismatch");
  return *it->second;
}

namespace {

struct Context {
  RunConfig cfg;
  TriMesh coarse, fine;
  CoarseFineMap cf;
  CoefficientField field;
  const std::vector<double>* ue = nullptr;
  double rho = 0, factor = 1;

  std::vector<ElementBasis> os_basis, cl_basis, hat_basis;
  bool has_os = false, has_cl = false, has_hat = false;
  double dmin = -1, dmax = -1;

  ScalarFn f, g;
};

Context make_context(const RunConfig& cfg) {
  Context ctx;
  ctx.cfg = cfg;
  ctx.coarse = build_structured_mesh(cfg.domain, cfg.coarse_n);
  ctx.fine = build_structured_mesh(cfg.domain, cfg.fine_n);
  ctx.cf = build_coarse_fine_map(ctx.coarse, ctx.fine);
  ctx.field = build_field(cfg);
  ctx.rho = resolve_rho(cfg);
  ctx.factor = resolve_factor(cfg);
  double fc = cfg.f_const;
  ctx.f = [fc](Vec2) { return fc; };
  ctx.g = boundary_fn(cfg);
  ctx.ue = &cached_reference(cfg, ctx.fine, ctx.field);
  return ctx;
}

void ensure_basis(Context& ctx, BasisKind kind) {
  switch (kind) {
    case BasisKind::Oversampled:
      if (!ctx.has_os) {
        ctx.os_basis = build_basis_set(ctx.coarse, ctx.fine, ctx.cf, ctx.field, kind, ctx.factor);
        ctx.has_os = true;
        for (const ElementBasis& b : ctx.os_basis) {
          if (ctx.dmin < 0 || b.separation < ctx.dmin) ctx.dmin = b.separation;
          if (b.separation > ctx.dmax) ctx.dmax = b.separation;
        }
      }
      break;
    case BasisKind::Classical:
      if (!ctx.has_cl) {
        ctx.cl_basis = build_basis_set(ctx.coarse, ctx.fine, ctx.cf, ctx.field, kind, 1.0);
        ctx.has_cl = true;
      }
      break;
    case BasisKind::Hat:
      if (!ctx.has_hat) {
        ctx.hat_basis = build_basis_set(ctx.coarse, ctx.fine, ctx.cf, ctx.field, kind, 1.0);
        ctx.has_hat = true;
      }
      break;
  }
}

bool finite_values(const BrokenFine& u) {
  for (const auto& elem : u.vals)
    for (double x : elem)
      if (!std::isfinite(x)) return false;
  return true;
}

ErrorReport run_method(Context& ctx, Method m, double gamma0) {
  const RunConfig& cfg = ctx.cfg;
  ErrorReport rep;
  rep.method = method_name(m);
  rep.h = ctx.coarse.h;
  switch (ctx.field.kind) {
    case CoefKind::AnalyticPeriodic:
    case CoefKind::Layered: rep.eps_or_seed = ctx.field.eps; break;
    case CoefKind::Lognormal: rep.eps_or_seed = static_cast<double>(ctx.field.seed); break;
    default: rep.eps_or_seed = 0; break;
  }
  rep.beta = cfg.beta;
  rep.gamma0 = gamma0;
  rep.rho_mode = (cfg.rho_mode == RhoMode::Eps) ? "eps" : "h";
  bool oversampled = (m == Method::MsDFEM || m == Method::MsDPGM || m == Method::OMsPGM);
  rep.factor = oversampled ? ctx.factor : 1.0;

  PenaltyConfig pen;
  pen.beta = cfg.beta;
  pen.gamma0 = gamma0;
  pen.rho = ctx.rho;

  BrokenFine uh;
  double t0 = 0, t1 = 0, t2 = 0;
  SolveOptions opt;
  opt.tol = cfg.solver_tol;
  opt.max_iter = cfg.max_iter;

  switch (m) {
    case Method::FEM: {
      t0 = omp_get_wtime();
      DirichletSystem ds = assemble_p1(ctx.coarse, ctx.field, ctx.f, ctx.g);
      t1 = omp_get_wtime();
      SolveResult res = solve_sparse(ds.sys, opt);
      t2 = omp_get_wtime();
      rep.failed = !res.converged;
      rep.residual = res.residual;
      P1Function u = scatter_solution(ctx.coarse, ds, res.x);
      uh = expand_coarse_p1(ctx.coarse, ctx.cf, u.values);
      break;
    }
    case Method::DFEM:
    case Method::MsDFEM:
    case Method::MsDPGM: {
      BasisKind bk = (m == Method::DFEM) ? BasisKind::Hat : BasisKind::Oversampled;
      ensure_basis(ctx, bk);
      const std::vector<ElementBasis>& basis =
          (bk == BasisKind::Hat) ? ctx.hat_basis : ctx.os_basis;
      DGSpace space = make_dg_space(ctx.coarse, ctx.fine, ctx.cf, basis);
      DGForm form = (m == Method::MsDPGM) ? DGForm::MsDPGM : DGForm::MsDFEM;
      t0 = omp_get_wtime();
      SparseSystem sys = assemble_dg(space, ctx.field, ctx.f, ctx.g, form, pen);
      t1 = omp_get_wtime();
      SolveResult res = solve_sparse(sys, opt);
      t2 = omp_get_wtime();
      rep.failed = !res.converged;
      rep.residual = res.residual;
      uh = expand_dg(space, res.x);
      break;
    }
    case Method::MsPGM:
    case Method::OMsPGM: {
      BasisKind bk = (m == Method::MsPGM) ? BasisKind::Classical : BasisKind::Oversampled;
      ensure_basis(ctx, bk);
      const std::vector<ElementBasis>& basis =
          (bk == BasisKind::Classical) ? ctx.cl_basis : ctx.os_basis;
      t0 = omp_get_wtime();
      PGSystem pg = assemble_pg(ctx.coarse, ctx.fine, ctx.cf, basis, ctx.field, ctx.f, ctx.g);
      t1 = omp_get_wtime();
      SolveResult res = solve_sparse(pg.sys, opt);
      t2 = omp_get_wtime();
      rep.failed = !res.converged;
      rep.residual = res.residual;
      std::vector<double> nodal = pg_nodal_solution(pg, res.x);
      uh = expand_nodal(ctx.coarse, ctx.cf, basis, nodal);
      break;
    }
  }

  rep.t_assemble = t1 - t0;
  rep.t_solve = t2 - t1;
  if (!cfg.emit_timings) rep.t_assemble = rep.t_solve = 0;

  if (!finite_values(uh)) {
    rep.failed = true;
    rep.err_l2 = rep.err_linf = rep.err_energy = std::nan("");
    return rep;
  }
  relative_errors(ctx.field, uh, *ctx.ue, rep);
  return rep;
}

void append_csv_rows(std::string& out, const std::vector<ErrorReport>& rows) {
  char buf[512];
  for (const ErrorReport& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%s,%.10g,%.10g,%.10g,%.10g,%s,%.10g,%.12e,%.12e,%.12e,%.6e,%.6e\n",
                  r.method.c_str(), r.h, r.eps_or_seed, r.beta, r.gamma0, r.rho_mode.c_str(),
                  r.factor, r.err_l2, r.err_linf, r.err_energy, r.t_assemble, r.t_solve);
    out += buf;
  }
}

std::string csv_header(const RunConfig& cfg, double dmin, double dmax) {
  char buf[256];
  std::string out = "# msdg results\n";
  std::snprintf(buf, sizeof buf, "# config %016llx\n",
                static_cast<unsigned long long>(config_hash(cfg)));
  out += buf;
  out += "# rng mt19937_64 box-muller\n";
  if (dmin >= 0) {
    std::snprintf(buf, sizeof buf, "# dtilde %.12g %.12g\n", dmin, dmax);
    out += buf;
  }
  out += "method,h,eps_or_seed,beta,gamma0,rho_mode,factor,err_L2,err_Linf,err_energy,T1,T2\n";
  return out;
}

void finish_outputs(RunOutputs& out, const RunConfig& cfg, const std::string& name) {
  std::string csv = csv_header(cfg, out.dtilde_min, out.dtilde_max);
  append_csv_rows(csv, out.rows);
  out.csv = csv;
  for (const ErrorReport& r : out.rows)
    if (r.failed) out.any_failed = true;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file((std::filesystem::path(cfg.out_dir) / name).string(), csv);
  }
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed for " + path);
}

RunOutputs run_experiment(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  Context ctx = make_context(cfg);
  RunOutputs out;
  for (Method m : cfg.methods) out.rows.push_back(run_method(ctx, m, cfg.gamma0));
  out.dtilde_min = ctx.dmin;
  out.dtilde_max = ctx.dmax;
  finish_outputs(out, cfg, "results.csv");
  return out;
}

RunOutputs run_sweep(const RunConfig& base, const SweepSpec& sweep) {
  if (sweep.values.empty()) throw std::runtime_error("sweep needs at least one value");
  if (base.threads > 0) omp_set_num_threads(base.threads);
  RunOutputs out;
  if (sweep.param == "gamma0") {
    validate_config(base);
    Context ctx = make_context(base);
    for (double v : sweep.values) {
      if (v <= 0) throw std::runtime_error("gamma0 sweep values must be positive");
      for (Method m : base.methods) out.rows.push_back(run_method(ctx, m, v));
    }
    out.dtilde_min = ctx.dmin;
    out.dtilde_max = ctx.dmax;
  } else if (sweep.param == "h") {
    for (double v : sweep.values) {
      int cn = static_cast<int>(std::llround(v));
      if (cn < 1 || std::abs(v - cn) > 1e-9)
        throw std::runtime_error("h sweep values must be coarse cell counts");
      RunConfig cfg = base;
      cfg.coarse_n = cn;
      validate_config(cfg);
      Context ctx = make_context(cfg);
      for (Method m : cfg.methods) out.rows.push_back(run_method(ctx, m, cfg.gamma0));
      if (ctx.dmin >= 0 && (out.dtilde_min < 0 || ctx.dmin < out.dtilde_min))
        out.dtilde_min = ctx.dmin;
      if (ctx.dmax > out.dtilde_max) out.dtilde_max = ctx.dmax;
    }
  } else if (sweep.param == "delta0") {
    for (double v : sweep.values) {
      if (v < 0) throw std::runtime_error("delta0 sweep values must be nonnegative");
      RunConfig cfg = base;
      cfg.dtilde = -1;
      cfg.factor = 1.0 + 3.0 * v;
      validate_config(cfg);
      Context ctx = make_context(cfg);
      for (Method m : cfg.methods) out.rows.push_back(run_method(ctx, m, cfg.gamma0));
      if (ctx.dmin >= 0 && (out.dtilde_min < 0 || ctx.dmin < out.dtilde_min))
        out.dtilde_min = ctx.dmin;
      if (ctx.dmax > out.dtilde_max) out.dtilde_max = ctx.dmax;
    }
  } else {
    throw std::runtime_error("unknown sweep parameter: " + sweep.param);
  }
  finish_outputs(out, base, "sweep_" + sweep.param + ".csv");
  return out;
}

RunOutputs run_lshape(RunConfig cfg) {
  cfg.domain = Domain::LShape;
  cfg.g_kind = BoundaryKind::Corner;
  return run_experiment(cfg);
}

}  // namespace msdg
