#include "msdg/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace msdg {

std::string method_name(Method m) {
  switch (m) {
    case Method::FEM: return "FEM";
    case Method::DFEM: return "DFEM";
    case Method::MsPGM: return "MsPGM";
    case Method::OMsPGM: return "OMsPGM";
    case Method::MsDFEM: return "MsDFEM";
    case Method::MsDPGM: return "MsDPGM";
  }
  return "?";
}

Method method_from_name(const std::string& s) {
  if (s == "FEM") return Method::FEM;
  if (s == "DFEM") return Method::DFEM;
  if (s == "MsPGM") return Method::MsPGM;
  if (s == "OMsPGM") return Method::OMsPGM;
  if (s == "MsDFEM") return Method::MsDFEM;
  if (s == "MsDPGM") return Method::MsDPGM;
  throw std::invalid_argument("config: unknown method '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

CoefKind coef_kind_from_name(const std::string& s) {
  if (s == "periodic") return CoefKind::AnalyticPeriodic;
  if (s == "constant") return CoefKind::Constant;
  if (s == "layered") return CoefKind::Layered;
  if (s == "grid") return CoefKind::Grid;
  if (s == "lognormal") return CoefKind::Lognormal;
  throw std::invalid_argument("config: unknown coefficient kind '" + s + "'");
}

std::string coef_kind_name(CoefKind k) {
  switch (k) {
    case CoefKind::AnalyticPeriodic: return "periodic";
    case CoefKind::Constant: return "constant";
    case CoefKind::Layered: return "layered";
    case CoefKind::Grid: return "grid";
    case CoefKind::Lognormal: return "lognormal";
  }
  return "?";
}

}  // namespace

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto d = [&] { return std::stod(value); };
  auto i = [&] { return std::stoi(value); };
  if (key == "domain") {
    if (value == "unit-square") cfg.domain = Domain::UnitSquare;
    else if (value == "l-shape") cfg.domain = Domain::LShape;
    else throw std::invalid_argument("config: unknown domain '" + value + "'");
  } else if (key == "coef") cfg.coef.kind = coef_kind_from_name(value);
  else if (key == "eps") cfg.coef.eps = d();
  else if (key == "coef-value") cfg.coef.value = d();
  else if (key == "sigma2") cfg.coef.sigma2 = d();
  else if (key == "l1") cfg.coef.l1 = d();
  else if (key == "l2") cfg.coef.l2 = d();
  else if (key == "seed") cfg.coef.seed = std::stoull(value);
  else if (key == "coef-file") cfg.coef.grid_file = value;
  else if (key == "coarse-n") cfg.coarse_n = i();
  else if (key == "fine-n") cfg.fine_n = i();
  else if (key == "methods") {
    cfg.methods.clear();
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) cfg.methods.push_back(method_from_name(tok));
    }
    if (cfg.methods.empty()) throw std::invalid_argument("config: empty method list");
  } else if (key == "beta") cfg.beta = d();
  else if (key == "gamma0") cfg.gamma0 = d();
  else if (key == "rho") {
    if (value == "eps") cfg.rho_mode = RhoMode::Eps;
    else if (value == "h") cfg.rho_mode = RhoMode::CoarseH;
    else throw std::invalid_argument("config: rho must be 'eps' or 'h'");
  } else if (key == "factor") cfg.factor = d();
  else if (key == "delta0") cfg.factor = 1.0 + 3.0 * d();
  else if (key == "dtilde") cfg.dtilde = d();
  else if (key == "f") cfg.f_const = d();
  else if (key == "g") {
    if (value == "zero") cfg.g_kind = BoundaryKind::Zero;
    else if (value == "corner") cfg.g_kind = BoundaryKind::Corner;
    else throw std::invalid_argument("config: g must be 'zero' or 'corner'");
  } else if (key == "tol") cfg.solver_tol = d();
  else if (key == "max-iter") cfg.max_iter = i();
  else if (key == "timings") cfg.emit_timings = (value == "1" || value == "true" || value == "on");
  else if (key == "out") cfg.out_dir = value;
  else if (key == "threads") cfg.threads = i();
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  RunConfig cfg = std::move(base);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key = value");
    apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::string canonical_config(const RunConfig& cfg) {
  char buf[512];
  std::string out;
  out += std::string("domain=") + (cfg.domain == Domain::UnitSquare ? "unit-square" : "l-shape") + "\n";
  std::snprintf(buf, sizeof buf,
                "coef=%s\neps=%.17g\ncoef-value=%.17g\nsigma2=%.17g\nl1=%.17g\nl2=%.17g\nseed=%llu\n",
                coef_kind_name(cfg.coef.kind).c_str(), cfg.coef.eps, cfg.coef.value,
                cfg.coef.sigma2, cfg.coef.l1, cfg.coef.l2, (unsigned long long)cfg.coef.seed);
  out += buf;
  if (!cfg.coef.grid_file.empty()) out += "coef-file=" + cfg.coef.grid_file + "\n";
  std::snprintf(buf, sizeof buf, "coarse-n=%d\nfine-n=%d\n", cfg.coarse_n, cfg.fine_n);
  out += buf;
  out += "methods=";
  for (size_t k = 0; k < cfg.methods.size(); ++k)
    out += (k ? "," : "") + method_name(cfg.methods[k]);
  out += "\n";
  std::snprintf(buf, sizeof buf,
                "beta=%.17g\ngamma0=%.17g\nrho=%s\nfactor=%.17g\ndtilde=%.17g\nf=%.17g\ng=%s\n"
                "tol=%.17g\nmax-iter=%d\ntimings=%d\n",
                cfg.beta, cfg.gamma0, cfg.rho_mode == RhoMode::Eps ? "eps" : "h", cfg.factor,
                cfg.dtilde, cfg.f_const, cfg.g_kind == BoundaryKind::Zero ? "zero" : "corner",
                cfg.solver_tol, cfg.max_iter, cfg.emit_timings ? 1 : 0);
  out += buf;
  return out;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t config_hash(const RunConfig& cfg) { return fnv1a(canonical_config(cfg)); }

double resolve_rho(const RunConfig& cfg) {
  if (cfg.rho_mode == RhoMode::Eps) {
    if (!(cfg.coef.eps > 0) ||
        (cfg.coef.kind != CoefKind::AnalyticPeriodic && cfg.coef.kind != CoefKind::Layered))
      throw std::invalid_argument("config: rho=eps needs an oscillatory coefficient with eps > 0");
    return cfg.coef.eps;
  }
  return 1.0 / cfg.coarse_n;
}

double resolve_factor(const RunConfig& cfg) {
  if (cfg.dtilde >= 0) return 1.0 + 3.0 * cfg.dtilde * cfg.coarse_n;
  return cfg.factor;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.coarse_n < 1 || cfg.fine_n < 1 || cfg.fine_n % cfg.coarse_n != 0)
    throw std::invalid_argument("config: fine-n must be a positive multiple of coarse-n");
  if (cfg.methods.empty()) throw std::invalid_argument("config: no methods requested");
  bool multiscale = false;
  for (Method m : cfg.methods)
    if (m == Method::MsPGM || m == Method::OMsPGM || m == Method::MsDFEM || m == Method::MsDPGM)
      multiscale = true;
  if (multiscale && cfg.fine_n / cfg.coarse_n < 2)
    throw std::invalid_argument(
        "config: multiscale methods need fine-n >= 2 * coarse-n to resolve the basis");
  if ((cfg.coef.kind == CoefKind::AnalyticPeriodic || cfg.coef.kind == CoefKind::Layered) &&
      cfg.coef.eps * cfg.fine_n < 8.0)
    throw std::invalid_argument("config: fine grid must resolve eps (eps * fine-n >= 8)");
  if (resolve_factor(cfg) < 1.0) throw std::invalid_argument("config: oversampling factor < 1");
  if (!(cfg.gamma0 > 0)) throw std::invalid_argument("config: gamma0 must be positive");
  if (cfg.beta != -1 && cfg.beta != 0 && cfg.beta != 1)
    throw std::invalid_argument("config: beta must be -1, 0, or 1");
  if (cfg.g_kind == BoundaryKind::Corner && cfg.domain != Domain::LShape)
    throw std::invalid_argument("config: corner boundary data needs the l-shape domain");
  if (!(cfg.solver_tol > 0) || cfg.max_iter < 1)
    throw std::invalid_argument("config: bad solver settings");
  resolve_rho(cfg);
}

}  // namespace msdg
