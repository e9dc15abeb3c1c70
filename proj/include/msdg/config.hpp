#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/mesh.hpp"

namespace msdg {

enum class Method { FEM, DFEM, MsPGM, OMsPGM, MsDFEM, MsDPGM };

std::string method_name(Method m);
Method method_from_name(const std::string& s);

enum class RhoMode { Eps, CoarseH };
enum class BoundaryKind { Zero, Corner };

struct CoefConfig {
  CoefKind kind = CoefKind::AnalyticPeriodic;
  double eps = 0.05;
  double value = 1.0;
  double sigma2 = 1.0, l1 = 0.01, l2 = 0.01;
  uint64_t seed = 1;
  std::string grid_file;
};

struct RunConfig {
  Domain domain = Domain::UnitSquare;
  CoefConfig coef;
  int coarse_n = 32, fine_n = 320;
  std::vector<Method> methods{Method::MsDFEM, Method::MsDPGM};
  double beta = -1, gamma0 = 20;
  RhoMode rho_mode = RhoMode::CoarseH;
  double factor = 4;
  double dtilde = -1;  // >= 0 pins the separation and overrides factor
  double f_const = 1;
  BoundaryKind g_kind = BoundaryKind::Zero;
  double solver_tol = 1e-10;
  int max_iter = 50000;
  bool emit_timings = false;
  std::string out_dir = "out";
  int threads = 0;
};

// "key = value" lines, '#' comments; keys match the CLI flag names and
// override the passed-in defaults
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::string& path, RunConfig base = {});
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

std::string canonical_config(const RunConfig& cfg);
uint64_t config_hash(const RunConfig& cfg);  // FNV-1a of the canonical form

double resolve_rho(const RunConfig& cfg);
double resolve_factor(const RunConfig& cfg);  // applies dtilde when set
void validate_config(const RunConfig& cfg);

uint64_t fnv1a(const std::string& s);

}  // namespace msdg
