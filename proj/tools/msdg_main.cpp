#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msdg/analysis.hpp"
#include "msdg/config.hpp"
#include "msdg/experiment.hpp"
#include "msdg/homogenization.hpp"
#include "msdg/render.hpp"

using namespace msdg;

namespace {

struct Flags {
  std::string config_file;
  std::vector<std::string> sets;  // key=value overrides, applied after the file
};

void add_common(CLI::App* cmd, Flags& fl) {
  cmd->add_option("--config", fl.config_file, "config file with key = value lines");
  auto kv = [&fl](const std::string& key) {
    return [&fl, key](const std::string& v) { fl.sets.push_back(key + "=" + v); };
  };
  cmd->add_option_function<std::string>("--domain", kv("domain"), "unit-square | l-shape");
  cmd->add_option_function<std::string>("--coef", kv("coef"),
                                        "periodic | constant | layered | grid | lognormal");
  cmd->add_option_function<std::string>("--eps", kv("eps"), "oscillation period");
  cmd->add_option_function<std::string>("--coef-value", kv("coef-value"), "constant value");
  cmd->add_option_function<std::string>("--sigma2", kv("sigma2"), "log-field variance");
  cmd->add_option_function<std::string>("--l1", kv("l1"), "correlation length x");
  cmd->add_option_function<std::string>("--l2", kv("l2"), "correlation length y");
  cmd->add_option_function<std::string>("--seed", kv("seed"), "random seed");
  cmd->add_option_function<std::string>("--coef-file", kv("coef-file"), "grid field file");
  cmd->add_option_function<std::string>("--coarse-n", kv("coarse-n"), "coarse cells per unit");
  cmd->add_option_function<std::string>("--fine-n", kv("fine-n"), "fine cells per unit");
  cmd->add_option_function<std::string>("--methods", kv("methods"), "comma list of methods");
  cmd->add_option_function<std::string>("--beta", kv("beta"), "flux symmetry switch -1|0|1");
  cmd->add_option_function<std::string>("--gamma0", kv("gamma0"), "penalty strength");
  cmd->add_option_function<std::string>("--rho", kv("rho"), "penalty scale: eps | h");
  cmd->add_option_function<std::string>("--factor", kv("factor"), "patch enlargement factor");
  cmd->add_option_function<std::string>("--delta0", kv("delta0"), "patch margin in coarse cells");
  cmd->add_option_function<std::string>("--dtilde", kv("dtilde"), "pinned patch separation");
  cmd->add_option_function<std::string>("--f", kv("f"), "constant load");
  cmd->add_option_function<std::string>("--g", kv("g"), "boundary data: zero | corner");
  cmd->add_option_function<std::string>("--tol", kv("tol"), "solver tolerance");
  cmd->add_option_function<std::string>("--max-iter", kv("max-iter"), "solver iteration cap");
  cmd->add_option_function<std::string>("--threads", kv("threads"), "OpenMP threads, 0 = default");
  cmd->add_option_function<std::string>("--timings", kv("timings"), "emit wall times in CSV");
  cmd->add_option_function<std::string>("--out", kv("out"), "output directory");
}

RunConfig resolve(const Flags& fl, RunConfig base = {}) {
  RunConfig cfg = std::move(base);
  if (!fl.config_file.empty()) cfg = parse_config_file(fl.config_file, cfg);
  for (const std::string& s : fl.sets) {
    auto p = s.find('=');
    apply_config_kv(cfg, s.substr(0, p), s.substr(p + 1));
  }
  return cfg;
}

void print_rows(const RunOutputs& out) {
  for (const ErrorReport& r : out.rows) {
    if (r.failed)
      std::printf("%-8s h=%-9.4g FAILED (residual %.3e)\n", r.method.c_str(), r.h, r.residual);
    else
      std::printf("%-8s h=%-9.4g L2 %.6e  Linf %.6e  energy %.6e\n", r.method.c_str(), r.h,
                  r.err_l2, r.err_linf, r.err_energy);
  }
  if (out.dtilde_min >= 0)
    std::printf("separation dtilde in [%.6g, %.6g]\n", out.dtilde_min, out.dtilde_max);
}

int finish(const RunOutputs& out, const RunConfig& cfg, const char* name) {
  print_rows(out);
  if (!cfg.out_dir.empty())
    std::printf("wrote %s\n", (std::filesystem::path(cfg.out_dir) / name).string().c_str());
  return out.any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale elliptic solver laboratory"};
  app.require_subcommand(1);

  Flags fl;
  auto* c_solve = app.add_subcommand("solve", "run the configured methods once");
  add_common(c_solve, fl);

  auto* c_sweep = app.add_subcommand("sweep", "repeat a run over one parameter");
  add_common(c_sweep, fl);
  std::string sweep_param = "gamma0";
  std::vector<double> sweep_values;
  c_sweep->add_option("--param", sweep_param, "gamma0 | h | delta0")->required();
  c_sweep->add_option("--values", sweep_values, "sweep values")->required()->delimiter(',');

  auto* c_lshape = app.add_subcommand("lshape", "reentrant corner study");
  add_common(c_lshape, fl);

  auto* c_field = app.add_subcommand("random-field", "generate and dump a lognormal field");
  add_common(c_field, fl);
  std::string field_out = "field.txt";
  std::string field_svg;
  c_field->add_option("--field-out", field_out, "text dump path");
  c_field->add_option("--svg", field_svg, "also render a heat map");

  auto* c_cell = app.add_subcommand("cell-problem", "periodic cell problem and a*");
  add_common(c_cell, fl);
  int cell_n = 128;
  c_cell->add_option("--cell-n", cell_n, "cells per axis on the unit cell");

  auto* c_basis = app.add_subcommand("dump-basis", "render multiscale basis functions");
  add_common(c_basis, fl);
  int basis_element = 0, basis_slot = 0;
  c_basis->add_option("--element", basis_element, "coarse element index");
  c_basis->add_option("--slot", basis_slot, "vertex slot 0..2");

  auto* c_mesh = app.add_subcommand("dump-mesh", "write the coarse mesh as text");
  add_common(c_mesh, fl);

  auto* c_ref = app.add_subcommand("solve-reference", "fine-grid reference solve");
  add_common(c_ref, fl);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig defaults;
    if (c_lshape->parsed()) defaults.f_const = 0;  // corner studies drive the trace, not a load
    RunConfig cfg = resolve(fl, defaults);

    if (c_solve->parsed()) {
      RunOutputs out = run_experiment(cfg);
      return finish(out, cfg, "results.csv");
    }

    if (c_sweep->parsed()) {
      SweepSpec spec{sweep_param, sweep_values};
      RunOutputs out = run_sweep(cfg, spec);
      return finish(out, cfg, ("sweep_" + sweep_param + ".csv").c_str());
    }

    if (c_lshape->parsed()) {
      cfg.domain = Domain::LShape;
      cfg.g_kind = BoundaryKind::Corner;
      RunOutputs out = run_lshape(cfg);
      return finish(out, cfg, "results.csv");
    }

    if (c_field->parsed()) {
      cfg.coef.kind = CoefKind::Lognormal;
      CoefficientField f = build_field(cfg);
      estimate_ellipticity(f);
      std::filesystem::create_directories(cfg.out_dir);
      auto path = std::filesystem::path(cfg.out_dir) / field_out;
      write_text_file(path.string(), dump_grid_field_text(f));
      std::printf("field %s  lambda in [%.6g, %.6g]\n", path.string().c_str(), f.lambda_min,
                  f.lambda_max);
      if (!field_svg.empty()) {
        auto spath = std::filesystem::path(cfg.out_dir) / field_svg;
        write_text_file(spath.string(), render_field_svg(f, f.bb0, f.bb1));
        std::printf("wrote %s\n", spath.string().c_str());
      }
      return 0;
    }

    if (c_cell->parsed()) {
      CoefficientField f = build_field(cfg);
      CellSolution cs = solve_cell_problem(f, cell_n);
      std::printf("a* = [ %.12g %.12g ; %.12g %.12g ]\n", cs.a_star[0][0], cs.a_star[0][1],
                  cs.a_star[1][0], cs.a_star[1][1]);
      return 0;
    }

    if (c_basis->parsed()) {
      validate_config(cfg);
      TriMesh coarse = build_structured_mesh(cfg.domain, cfg.coarse_n);
      TriMesh fine = build_structured_mesh(cfg.domain, cfg.fine_n);
      CoarseFineMap cf = build_coarse_fine_map(coarse, fine);
      CoefficientField f = build_field(cfg);
      if (basis_element < 0 || basis_element >= (int)coarse.tris.size())
        throw std::runtime_error("element index out of range");
      if (basis_slot < 0 || basis_slot > 2) throw std::runtime_error("slot must be 0..2");
      PatchSpec patch = build_oversampling_patch(coarse, basis_element, resolve_factor(cfg), fine, cf);
      ElementBasis b = compute_oversampling_basis(coarse, basis_element, patch, fine, cf, f);
      std::filesystem::create_directories(cfg.out_dir);
      char name[64];
      std::snprintf(name, sizeof name, "basis_e%d_s%d.svg", basis_element, basis_slot);
      auto path = std::filesystem::path(cfg.out_dir) / name;
      write_text_file(path.string(), render_basis_svg(fine, cf, b, basis_slot));
      std::printf("element %d slot %d  separation %.6g%s%s\nwrote %s\n", basis_element, basis_slot,
                  b.separation, b.translated ? "  translated" : "", b.shrunk ? "  shrunk" : "",
                  path.string().c_str());
      return 0;
    }

    if (c_mesh->parsed()) {
      TriMesh coarse = build_structured_mesh(cfg.domain, cfg.coarse_n);
      std::filesystem::create_directories(cfg.out_dir);
      auto path = std::filesystem::path(cfg.out_dir) / "mesh.txt";
      write_text_file(path.string(), dump_mesh_text(coarse));
      std::printf("wrote %s\n", path.string().c_str());
      return 0;
    }

    if (c_ref->parsed()) {
      validate_config(cfg);
      TriMesh fine = build_structured_mesh(cfg.domain, cfg.fine_n);
      CoefficientField f = build_field(cfg);
      const std::vector<double>& ue = cached_reference(cfg, fine, f);
      std::filesystem::create_directories(cfg.out_dir);
      auto path = std::filesystem::path(cfg.out_dir) / "reference.svg";
      write_text_file(path.string(), render_nodal_svg(fine, ue));
      std::printf("reference on %zu nodes\nwrote %s\n", fine.nodes.size(), path.string().c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::string what = e.what();
    if (what.find("residual") != std::string::npos || what.find("solver") != std::string::npos ||
        what.find("converge") != std::string::npos)
      return 2;
    return 1;
  }
  return 0;
}
