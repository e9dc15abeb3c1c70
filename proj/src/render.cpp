#include "msdg/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace msdg {

namespace {

// dark blue .. teal .. yellow ramp
const double kRamp[][3] = {
    {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
    {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
    {0.135, 0.659, 0.518}, {0.267, 0.749, 0.441}, {0.478, 0.821, 0.318},
    {0.741, 0.873, 0.150}, {0.993, 0.906, 0.144}};

void ramp_color(double t, int rgb[3]) {
  t = std::clamp(t, 0.0, 1.0);
  const int n = sizeof kRamp / sizeof kRamp[0];
  double s = t * (n - 1);
  int k = std::min((int)s, n - 2);
  double w = s - k;
  for (int c = 0; c < 3; ++c) {
    double v = kRamp[k][c] * (1 - w) + kRamp[k + 1][c] * w;
    rgb[c] = (int)std::lround(255 * v);
  }
}

// samples fn at lattice cell centers over [b0,b1]; NaN samples are skipped
std::string lattice_svg(Vec2 b0, Vec2 b1, int samples,
                        const std::function<double(Vec2)>& fn) {
  if (samples < 1) samples = 1;
  if (samples > 256) samples = 256;
  double wx = b1.x - b0.x, wy = b1.y - b0.y;
  int nx = samples, ny = samples;
  if (wx > wy)
    ny = std::max(1, (int)std::lround(samples * wy / wx));
  else if (wy > wx)
    nx = std::max(1, (int)std::lround(samples * wx / wy));

  std::vector<double> v((size_t)nx * ny);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Vec2 p{b0.x + (i + 0.5) * wx / nx, b0.y + (j + 0.5) * wy / ny};
      double s = fn(p);
      v[(size_t)j * nx + i] = s;
      if (std::isfinite(s)) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
  if (!(hi > lo)) hi = lo + 1;

  const int px = 512;
  int py = (int)std::lround(px * wy / wx);
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                px, py, nx, ny);
  out += buf;
  std::snprintf(buf, sizeof buf, "<!-- range %.6g %.6g -->\n", lo, hi);
  out += buf;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double s = v[(size_t)j * nx + i];
      if (!std::isfinite(s)) continue;
      int rgb[3];
      ramp_color((s - lo) / (hi - lo), rgb);
      // svg y axis points down
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%d\" y=\"%d\" width=\"1\" height=\"1\" fill=\"#%02x%02x%02x\"/>\n",
                    i, ny - 1 - j, rgb[0], rgb[1], rgb[2]);
      out += buf;
    }
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string render_field_svg(const CoefficientField& a, Vec2 bb0, Vec2 bb1, int samples) {
  return lattice_svg(bb0, bb1, samples, [&](Vec2 p) { return a.eval(p); });
}

std::string render_nodal_svg(const TriMesh& mesh, const std::vector<double>& vals, int samples) {
  Vec2 b0 = mesh.origin;
  Vec2 b1{mesh.origin.x + mesh.nx * mesh.cell, mesh.origin.y + mesh.ny * mesh.cell};
  return lattice_svg(b0, b1, samples, [&](Vec2 p) -> double {
    int t = mesh.locate(p);
    if (t < 0) return std::nan("");
    std::array<double, 3> l = mesh.bary(t, p);
    const auto& tri = mesh.tris[t];
    return l[0] * vals[tri[0]] + l[1] * vals[tri[1]] + l[2] * vals[tri[2]];
  });
}

std::string render_basis_svg(const TriMesh& fine, const CoarseFineMap& cf, const ElementBasis& b,
                             int slot, int samples) {
  std::vector<double> full(fine.nodes.size(), std::nan(""));
  const std::vector<int>& nodes = cf.nodes_of[b.element];
  for (size_t k = 0; k < nodes.size(); ++k) full[nodes[k]] = b.values[slot][k];
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (int n : nodes) {
    lo.x = std::min(lo.x, fine.nodes[n].x);
    lo.y = std::min(lo.y, fine.nodes[n].y);
    hi.x = std::max(hi.x, fine.nodes[n].x);
    hi.y = std::max(hi.y, fine.nodes[n].y);
  }
  return lattice_svg(lo, hi, samples, [&](Vec2 p) -> double {
    int t = fine.locate(p);
    if (t < 0) return std::nan("");
    std::array<double, 3> l = fine.bary(t, p);
    const auto& tri = fine.tris[t];
    double s = 0;
    for (int k = 0; k < 3; ++k) {
      if (!std::isfinite(full[tri[k]])) return std::nan("");
      s += l[k] * full[tri[k]];
    }
    return s;
  });
}

}  // namespace msdg
