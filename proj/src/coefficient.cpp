#include "msdg/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace msdg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double periodic_cell_value(double y1, double y2) {
  double s1 = std::sin(kTwoPi * y1);
  double s2 = std::sin(kTwoPi * y2);
  double c2 = std::cos(kTwoPi * y2);
  return (2 + 1.8 * s1) / (2 + 1.8 * c2) + (2 + 1.8 * s2) / (2 + 1.8 * s1);
}

double layered_cell_value(double y1) { return 2 + 1.8 * std::sin(kTwoPi * y1); }

int wrap_index(int i, int n) {
  int w = i % n;
  return w < 0 ? w + n : w;
}

}  // namespace

double CoefficientField::eval(Vec2 p) const {
  switch (kind) {
    case CoefKind::Constant:
      return value;
    case CoefKind::AnalyticPeriodic:
      return periodic_cell_value(p.x / eps, p.y / eps);
    case CoefKind::Layered:
      return layered_cell_value(p.x / eps);
    case CoefKind::Grid:
    case CoefKind::Lognormal: {
      double hx = (bb1.x - bb0.x) / n, hy = (bb1.y - bb0.y) / n;
      int i = std::clamp((int)std::floor((p.x - bb0.x) / hx), 0, n - 1);
      int j = std::clamp((int)std::floor((p.y - bb0.y) / hy), 0, n - 1);
      return cells[(size_t)j * n + i];
    }
  }
  return value;
}

double CoefficientField::eval_unit(Vec2 y) const {
  switch (kind) {
    case CoefKind::Constant:
      return value;
    case CoefKind::AnalyticPeriodic:
      return periodic_cell_value(y.x, y.y);
    case CoefKind::Layered:
      return layered_cell_value(y.x);
    case CoefKind::Grid:
    case CoefKind::Lognormal: {
      double hx = (bb1.x - bb0.x) / n, hy = (bb1.y - bb0.y) / n;
      int i = wrap_index((int)std::floor((y.x - bb0.x) / hx), n);
      int j = wrap_index((int)std::floor((y.y - bb0.y) / hy), n);
      return cells[(size_t)j * n + i];
    }
  }
  return value;
}

CoefficientField make_periodic_field(double eps) {
  if (eps <= 0) throw std::invalid_argument("coefficient: eps must be positive");
  CoefficientField f;
  f.kind = CoefKind::AnalyticPeriodic;
  f.eps = eps;
  return f;
}

CoefficientField make_constant_field(double v) {
  if (v <= 0) throw std::invalid_argument("coefficient: constant must be positive");
  CoefficientField f;
  f.kind = CoefKind::Constant;
  f.value = v;
  return f;
}

CoefficientField make_layered_field(double eps) {
  if (eps <= 0) throw std::invalid_argument("coefficient: eps must be positive");
  CoefficientField f;
  f.kind = CoefKind::Layered;
  f.eps = eps;
  return f;
}

CoefficientField make_grid_field(int n, std::vector<double> cells, Vec2 bb0, Vec2 bb1) {
  if (n < 1 || cells.size() != (size_t)n * n)
    throw std::invalid_argument("coefficient: grid needs n*n cell values");
  for (double v : cells)
    if (!(v > 0)) throw std::invalid_argument("coefficient: grid values must be positive");
  CoefficientField f;
  f.kind = CoefKind::Grid;
  f.n = n;
  f.cells = std::move(cells);
  f.bb0 = bb0;
  f.bb1 = bb1;
  return f;
}

std::vector<double> ellipse_mean_smooth(const std::vector<double>& z, int n, double h,
                                        double l1, double l2) {
  // offsets are translation invariant on the uniform grid
  int r1 = (int)std::floor(l1 / h), r2 = (int)std::floor(l2 / h);
  std::vector<std::array<int, 2>> offs;
  for (int dj = -r2; dj <= r2; ++dj)
    for (int di = -r1; di <= r1; ++di) {
      double ex = di * h / l1, ey = dj * h / l2;
      if (ex * ex + ey * ey <= 1.0) offs.push_back({di, dj});
    }
  std::vector<double> out((size_t)n * n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double s = 0;
      int c = 0;
      for (const auto& o : offs) {
        int ii = i + o[0], jj = j + o[1];
        if (ii < 0 || ii >= n || jj < 0 || jj >= n) continue;
        s += z[(size_t)jj * n + ii];
        ++c;
      }
      out[(size_t)j * n + i] = s / c;
    }
  return out;
}

CoefficientField make_lognormal_field(double sigma2, double l1, double l2, uint64_t seed,
                                      int n, Vec2 bb0, Vec2 bb1) {
  if (sigma2 < 0 || l1 <= 0 || l2 <= 0 || n < 1)
    throw std::invalid_argument("coefficient: bad lognormal parameters");
  CoefficientField f;
  f.kind = CoefKind::Lognormal;
  f.n = n;
  f.bb0 = bb0;
  f.bb1 = bb1;
  f.sigma2 = sigma2;
  f.l1 = l1;
  f.l2 = l2;
  f.seed = seed;
  f.cells.assign((size_t)n * n, 1.0);
  if (sigma2 == 0) return f;

  // white noise in row-major order, Box-Muller pairs on mt19937_64
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return ((rng() >> 11) + 1) * 0x1.0p-53; };
  std::vector<double> z((size_t)n * n);
  for (size_t k = 0; k < z.size(); k += 2) {
    double u1 = uniform(), u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    z[k] = rad * std::cos(kTwoPi * u2);
    if (k + 1 < z.size()) z[k + 1] = rad * std::sin(kTwoPi * u2);
  }

  double h = (bb1.x - bb0.x) / n;
  std::vector<double> s = ellipse_mean_smooth(z, n, h, l1, l2);

  double mu = 0;
  for (double v : s) mu += v;
  mu /= s.size();
  double var = 0;
  for (double v : s) var += (v - mu) * (v - mu);
  var /= s.size();
  if (var <= 0) throw std::runtime_error("coefficient: degenerate smoothed field");
  double scale = std::sqrt(sigma2 / var);
  for (size_t k = 0; k < s.size(); ++k) f.cells[k] = std::exp((s[k] - mu) * scale);
  return f;
}

std::pair<double, double> estimate_ellipticity(CoefficientField& f, int samples) {
  double lo, hi;
  if (f.kind == CoefKind::Grid || f.kind == CoefKind::Lognormal) {
    lo = hi = f.cells[0];
    for (double v : f.cells) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  } else if (f.kind == CoefKind::Constant) {
    lo = hi = f.value;
  } else {
    int k = std::max(2, (int)std::ceil(std::sqrt((double)samples)));
    // sample one period when it is shorter than the box
    double span = std::min(1.0, f.eps > 0 ? f.eps : 1.0);
    lo = hi = f.eval({0, 0});
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) {
        double v = f.eval({(i + 0.5) / k * span, (j + 0.5) / k * span});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  if (!(lo > 0)) throw std::runtime_error("coefficient: field is not elliptic");
  f.lambda_min = lo;
  f.lambda_max = hi;
  return {lo, hi};
}

std::string field_signature(const CoefficientField& f) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "k%d:eps=%.17g:v=%.17g:n=%d:s2=%.17g:l1=%.17g:l2=%.17g:seed=%llu",
                (int)f.kind, f.eps, f.value, f.n, f.sigma2, f.l1, f.l2,
                (unsigned long long)f.seed);
  return buf;
}

std::string dump_grid_field_text(const CoefficientField& f) {
  if (f.n == 0) throw std::invalid_argument("coefficient: only grid-backed fields serialize");
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g %llu\n", f.n, f.sigma2, f.l1, f.l2,
                (unsigned long long)f.seed);
  out += buf;
  for (size_t k = 0; k < f.cells.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g\n", f.cells[k]);
    out += buf;
  }
  return out;
}

CoefficientField load_grid_field_text(const std::string& text, Vec2 bb0, Vec2 bb1) {
  std::istringstream in(text);
  int n;
  double s2, l1, l2;
  unsigned long long seed;
  if (!(in >> n >> s2 >> l1 >> l2 >> seed))
    throw std::invalid_argument("coefficient: bad grid field header");
  std::vector<double> cells((size_t)n * n);
  for (auto& v : cells)
    if (!(in >> v)) throw std::invalid_argument("coefficient: truncated grid field");
  auto f = make_grid_field(n, std::move(cells), bb0, bb1);
  f.sigma2 = s2;
  f.l1 = l1;
  f.l2 = l2;
  f.seed = seed;
  return f;
}

}  // namespace msdg
