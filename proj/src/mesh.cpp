#include "msdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace msdg {

int TriMesh::edge_between(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = edge_index.find((int64_t)a * (int64_t)nodes.size() + b);
  return it == edge_index.end() ? -1 : it->second;
}

std::array<Vec2, 3> TriMesh::tri_xy(int t) const {
  const auto& v = tris[t];
  return {nodes[v[0]], nodes[v[1]], nodes[v[2]]};
}

double TriMesh::area(int t) const {
  auto p = tri_xy(t);
  return 0.5 * cross(p[1] - p[0], p[2] - p[0]);
}

Vec2 TriMesh::centroid(int t) const {
  auto p = tri_xy(t);
  return (1.0 / 3.0) * (p[0] + p[1] + p[2]);
}

std::array<Vec2, 3> TriMesh::grads(int t) const {
  auto p = tri_xy(t);
  double s2 = cross(p[1] - p[0], p[2] - p[0]);  // 2*area
  auto rot = [](Vec2 v) { return Vec2{-v.y, v.x}; };
  return {(1.0 / s2) * rot(p[2] - p[1]), (1.0 / s2) * rot(p[0] - p[2]),
          (1.0 / s2) * rot(p[1] - p[0])};
}

std::array<double, 3> TriMesh::bary(int t, Vec2 p) const {
  auto v = tri_xy(t);
  double s2 = cross(v[1] - v[0], v[2] - v[0]);
  return {cross(v[1] - p, v[2] - p) / s2, cross(v[2] - p, v[0] - p) / s2,
          cross(v[0] - p, v[1] - p) / s2};
}

int TriMesh::locate(Vec2 p) const {
  if (nx == 0) return -1;
  double fx = (p.x - origin.x) / cell;
  double fy = (p.y - origin.y) / cell;
  int i = std::clamp((int)std::floor(fx), 0, nx - 1);
  int j = std::clamp((int)std::floor(fy), 0, ny - 1);
  auto ct = cell_tris[(int64_t)j * nx + i];
  if (ct[0] < 0 && ct[1] < 0) return -1;
  if (ct[0] < 0) return ct[1];
  if (ct[1] < 0) return ct[0];
  return (fy - j <= fx - i) ? ct[0] : ct[1];
}

int TriMesh::num_boundary_nodes() const {
  int c = 0;
  for (auto f : node_boundary) c += f;
  return c;
}

namespace {

// edges, adjacency, normals, boundary flags; assumes CCW triangles
void finish_mesh(TriMesh& m) {
  struct Rec {
    int a, b, tri;
  };
  std::vector<Rec> recs;
  recs.reserve(m.tris.size() * 3);
  for (int t = 0; t < (int)m.tris.size(); ++t) {
    const auto& v = m.tris[t];
    for (int k = 0; k < 3; ++k) {
      int a = v[k], b = v[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      recs.push_back({a, b, t});
    }
  }
  std::sort(recs.begin(), recs.end(), [](const Rec& l, const Rec& r) {
    return l.a != r.a ? l.a < r.a : (l.b != r.b ? l.b < r.b : l.tri < r.tri);
  });

  m.edges.clear();
  m.edge_index.clear();
  const int64_t N = (int64_t)m.nodes.size();
  for (size_t i = 0; i < recs.size();) {
    size_t j = i + 1;
    while (j < recs.size() && recs[j].a == recs[i].a && recs[j].b == recs[i].b) ++j;
    if (j - i > 2) throw std::runtime_error("mesh: edge shared by >2 triangles");
    Edge e;
    e.a = recs[i].a;
    e.b = recs[i].b;
    e.k1 = recs[i].tri;
    e.k2 = (j - i == 2) ? recs[i + 1].tri : -1;
    e.boundary = (e.k2 < 0);
    Vec2 d = m.nodes[e.b] - m.nodes[e.a];
    e.len = std::sqrt(dot(d, d));
    Vec2 n{d.y / e.len, -d.x / e.len};
    Vec2 ref = e.boundary ? (0.5 * (m.nodes[e.a] + m.nodes[e.b]) - m.centroid(e.k1))
                          : (m.centroid(e.k2) - m.centroid(e.k1));
    if (dot(n, ref) < 0) n = {-n.x, -n.y};
    e.normal = n;
    m.edge_index.emplace((int64_t)e.a * N + e.b, (int)m.edges.size());
    m.edges.push_back(e);
    i = j;
  }

  m.node_boundary.assign(m.nodes.size(), 0);
  for (const auto& e : m.edges)
    if (e.boundary) {
      m.node_boundary[e.a] = 1;
      m.node_boundary[e.b] = 1;
    }

  m.h = 0;
  for (int t = 0; t < (int)m.tris.size(); ++t) {
    auto p = m.tri_xy(t);
    for (int k = 0; k < 3; ++k) {
      Vec2 d = p[(k + 1) % 3] - p[k];
      m.h = std::max(m.h, std::sqrt(dot(d, d)));
    }
  }
}

}  // namespace

TriMesh build_structured_mesh(Domain d, int n) {
  if (n < 1) throw std::invalid_argument("mesh: n must be positive");
  if (d == Domain::Generic) throw std::invalid_argument("mesh: generic domain has no builder");
  TriMesh m;
  m.domain = d;
  m.n_per_unit = n;
  m.cell = 1.0 / n;
  int nc = (d == Domain::UnitSquare) ? n : 2 * n;
  m.nx = m.ny = nc;
  m.origin = (d == Domain::UnitSquare) ? Vec2{0, 0} : Vec2{-1, -1};

  auto node_excluded = [&](int i, int j) {
    return d == Domain::LShape && i > n && j < n;  // strict interior of removed quadrant
  };
  auto cell_excluded = [&](int i, int j) { return d == Domain::LShape && i >= n && j < n; };

  m.lattice_node.assign((int64_t)(nc + 1) * (nc + 1), -1);
  for (int j = 0; j <= nc; ++j)
    for (int i = 0; i <= nc; ++i)
      if (!node_excluded(i, j)) {
        m.lattice_node[(int64_t)j * (nc + 1) + i] = (int)m.nodes.size();
        m.nodes.push_back({m.origin.x + i * m.cell, m.origin.y + j * m.cell});
      }

  m.cell_tris.assign((int64_t)nc * nc, {-1, -1});
  for (int j = 0; j < nc; ++j)
    for (int i = 0; i < nc; ++i) {
      if (cell_excluded(i, j)) continue;
      int v00 = m.node_at(i, j), v10 = m.node_at(i + 1, j);
      int v11 = m.node_at(i + 1, j + 1), v01 = m.node_at(i, j + 1);
      m.cell_tris[(int64_t)j * nc + i] = {(int)m.tris.size(), (int)m.tris.size() + 1};
      m.tris.push_back({v00, v10, v11});
      m.tri_type.push_back(0);
      m.tris.push_back({v00, v11, v01});
      m.tri_type.push_back(1);
    }

  finish_mesh(m);
  return m;
}

TriMesh build_right_triangle_mesh(int type, std::array<int, 2> origin_cell, int m,
                                  double spacing, Vec2 lattice_origin) {
  if (m < 1) throw std::invalid_argument("patch mesh: m must be positive");
  TriMesh msh;
  msh.domain = Domain::Generic;
  msh.cell = spacing;
  msh.nx = msh.ny = m;
  msh.origin = {lattice_origin.x + origin_cell[0] * spacing,
                lattice_origin.y + origin_cell[1] * spacing};

  auto node_in = [&](int i, int j) { return type == 0 ? j <= i : j >= i; };
  msh.lattice_node.assign((int64_t)(m + 1) * (m + 1), -1);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i)
      if (node_in(i, j)) {
        msh.lattice_node[(int64_t)j * (m + 1) + i] = (int)msh.nodes.size();
        msh.nodes.push_back({msh.origin.x + i * spacing, msh.origin.y + j * spacing});
      }

  msh.cell_tris.assign((int64_t)m * m, {-1, -1});
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      bool has_lower = (type == 0) ? (j <= i) : (j > i);
      bool has_upper = (type == 0) ? (j < i) : (j >= i);
      if (!has_lower && !has_upper) continue;
      int v00 = msh.node_at(i, j), v10 = has_lower ? msh.node_at(i + 1, j) : -1;
      int v11 = msh.node_at(i + 1, j + 1), v01 = has_upper ? msh.node_at(i, j + 1) : -1;
      auto& ct = msh.cell_tris[(int64_t)j * m + i];
      if (has_lower) {
        ct[0] = (int)msh.tris.size();
        msh.tris.push_back({v00, v10, v11});
        msh.tri_type.push_back(0);
      }
      if (has_upper) {
        ct[1] = (int)msh.tris.size();
        msh.tris.push_back({v00, v11, v01});
        msh.tri_type.push_back(1);
      }
    }

  finish_mesh(msh);
  return msh;
}

std::array<double, 3> hat_at(const TriMesh& coarse, int K, Vec2 p) {
  return coarse.bary(K, p);
}

int CoarseFineMap::local_node(int K, int fine_node) const {
  const auto& v = nodes_of[K];
  auto it = std::lower_bound(v.begin(), v.end(), fine_node);
  if (it == v.end() || *it != fine_node) return -1;
  return (int)(it - v.begin());
}

CoarseFineMap build_coarse_fine_map(const TriMesh& coarse, const TriMesh& fine) {
  if (coarse.domain != fine.domain || coarse.domain == Domain::Generic)
    throw std::invalid_argument("coarse-fine map: meshes must share a structured domain");
  if (coarse.n_per_unit <= 0 || fine.n_per_unit % coarse.n_per_unit != 0)
    throw std::invalid_argument("coarse-fine map: fine resolution must be a multiple of coarse");

  CoarseFineMap cf;
  cf.coarse = &coarse;
  cf.fine = &fine;
  cf.ratio = fine.n_per_unit / coarse.n_per_unit;

  std::vector<int> owner(fine.tris.size(), -1);
  cf.tris_of.assign(coarse.tris.size(), {});
  for (int t = 0; t < (int)fine.tris.size(); ++t) {
    int K = coarse.locate(fine.centroid(t));
    if (K < 0) throw std::runtime_error("coarse-fine map: fine triangle outside coarse mesh");
    owner[t] = K;
    cf.tris_of[K].push_back(t);
  }

  cf.nodes_of.assign(coarse.tris.size(), {});
  for (int K = 0; K < (int)coarse.tris.size(); ++K) {
    auto& nl = cf.nodes_of[K];
    nl.reserve(cf.tris_of[K].size() * 3);
    for (int t : cf.tris_of[K])
      for (int v : fine.tris[t]) nl.push_back(v);
    std::sort(nl.begin(), nl.end());
    nl.erase(std::unique(nl.begin(), nl.end()), nl.end());
  }

  const int r = cf.ratio;
  cf.edge_tiling.assign(coarse.edges.size(), {});
  for (int e = 0; e < (int)coarse.edges.size(); ++e) {
    const Edge& ce = coarse.edges[e];
    Vec2 P = coarse.nodes[ce.a], Q = coarse.nodes[ce.b];
    std::vector<int> chain(r + 1);
    for (int k = 0; k <= r; ++k) {
      Vec2 p = P + (double(k) / r) * (Q - P);
      int li = (int)std::llround((p.x - fine.origin.x) / fine.cell);
      int lj = (int)std::llround((p.y - fine.origin.y) / fine.cell);
      chain[k] = fine.node_at(li, lj);
      if (chain[k] < 0) throw std::runtime_error("coarse-fine map: coarse edge misses fine lattice");
    }
    auto& tiling = cf.edge_tiling[e];
    tiling.resize(r);
    for (int k = 0; k < r; ++k) {
      EdgeSegment s;
      s.n0 = chain[k];
      s.n1 = chain[k + 1];
      s.fine_edge = fine.edge_between(s.n0, s.n1);
      if (s.fine_edge < 0) throw std::runtime_error("coarse-fine map: missing fine edge on coarse edge");
      const Edge& fe = fine.edges[s.fine_edge];
      int o1 = owner[fe.k1], o2 = fe.k2 >= 0 ? owner[fe.k2] : -1;
      if (o1 == ce.k1 && o2 == ce.k2) {
        s.t1 = fe.k1;
        s.t2 = fe.k2;
      } else if (o1 == ce.k2 && o2 == ce.k1) {
        s.t1 = fe.k2;
        s.t2 = fe.k1;
      } else {
        throw std::runtime_error("coarse-fine map: edge segment adjacency mismatch");
      }
      tiling[k] = s;
    }
  }
  return cf;
}

namespace {

// S(K) placement: integer lattice admissibility tests.  All in fine-cell units.
struct PatchPlacement {
  int is, js, m;
};

bool contains_element(int type, int is, int js, int m, int a0, int b0, int r) {
  if (type == 0) return js <= b0 && is + m >= a0 + r && is - js <= a0 - b0;
  return is <= a0 && js + m >= b0 + r && is - js >= a0 - b0;
}

bool inside_domain(const TriMesh& fine, int type, int is, int js, int m) {
  if (is < 0 || js < 0 || is + m > fine.nx || js + m > fine.ny) return false;
  if (fine.domain == Domain::LShape) {
    // separating-axis test against the open removed quadrant
    int n = fine.n_per_unit;
    bool ox = (is + m > n) && (is < 2 * n);
    bool oy = (js + m > 0) && (js < n);
    int dlo = type == 0 ? is - js : is - js - m;
    int dhi = type == 0 ? is - js + m : is - js;
    bool od = (dhi > 0) && (dlo < 2 * n);
    if (ox && oy && od) return false;
  }
  return true;
}

}  // namespace

PatchSpec build_oversampling_patch(const TriMesh& coarse, int K, double factor,
                                   const TriMesh& fine, const CoarseFineMap& cf) {
  if (factor < 1.0) throw std::invalid_argument("patch: oversampling factor must be >= 1");
  if (K < 0 || K >= (int)coarse.tris.size()) throw std::invalid_argument("patch: bad element id");

  const int r = cf.ratio;
  const int type = coarse.tri_type[K];
  auto pxy = coarse.tri_xy(K);
  double minx = std::min({pxy[0].x, pxy[1].x, pxy[2].x});
  double miny = std::min({pxy[0].y, pxy[1].y, pxy[2].y});
  const int a0 = (int)std::llround((minx - fine.origin.x) / fine.cell);
  const int b0 = (int)std::llround((miny - fine.origin.y) / fine.cell);

  const int m0 = std::max(r, (int)std::llround(factor * r));
  PatchPlacement found{-1, -1, -1};
  bool translated = false;

  for (int m = m0; m >= r && found.m < 0; --m) {
    // barycenter-aligned ideal placement, snapped to the lattice
    double isr, jsr;
    if (type == 0) {
      isr = a0 + (2.0 / 3.0) * (r - m);
      jsr = b0 + (1.0 / 3.0) * (r - m);
    } else {
      isr = a0 + (1.0 / 3.0) * (r - m);
      jsr = b0 + (2.0 / 3.0) * (r - m);
    }
    int ci = (int)std::llround(isr), cj = (int)std::llround(jsr);
    if (contains_element(type, ci, cj, m, a0, b0, r) && inside_domain(fine, type, ci, cj, m)) {
      found = {ci, cj, m};
      break;
    }
    const int R = 2 * m + r;
    struct Off {
      int d2, di, dj;
    };
    std::vector<Off> offs;
    offs.reserve((size_t)(2 * R + 1) * (2 * R + 1));
    for (int dj = -R; dj <= R; ++dj)
      for (int di = -R; di <= R; ++di)
        if (di || dj) offs.push_back({di * di + dj * dj, di, dj});
    std::sort(offs.begin(), offs.end(), [](const Off& l, const Off& r2) {
      return l.d2 != r2.d2 ? l.d2 < r2.d2 : (l.di != r2.di ? l.di < r2.di : l.dj < r2.dj);
    });
    for (const auto& o : offs) {
      int ti = ci + o.di, tj = cj + o.dj;
      if (contains_element(type, ti, tj, m, a0, b0, r) && inside_domain(fine, type, ti, tj, m)) {
        found = {ti, tj, m};
        translated = true;
        break;
      }
    }
  }
  if (found.m < 0) throw std::runtime_error("patch: no admissible placement for element " + std::to_string(K));

  PatchSpec spec;
  spec.element = K;
  spec.h_s = found.m * fine.cell;
  spec.separation = (found.m - r) * fine.cell / 3.0;
  spec.translated = translated;
  spec.shrunk = (found.m < m0);
  spec.submesh = build_right_triangle_mesh(type, {found.is, found.js}, found.m, fine.cell, fine.origin);

  double xs = fine.origin.x + found.is * fine.cell;
  double ys = fine.origin.y + found.js * fine.cell;
  double L = found.m * fine.cell;
  if (type == 0)
    spec.macro_vertices = {Vec2{xs, ys}, Vec2{xs + L, ys}, Vec2{xs + L, ys + L}};
  else
    spec.macro_vertices = {Vec2{xs, ys}, Vec2{xs + L, ys + L}, Vec2{xs, ys + L}};

  const auto& slots = cf.nodes_of[K];
  spec.restrict_to_element.resize(slots.size());
  for (size_t s = 0; s < slots.size(); ++s) {
    Vec2 p = fine.nodes[slots[s]];
    int gi = (int)std::llround((p.x - fine.origin.x) / fine.cell);
    int gj = (int)std::llround((p.y - fine.origin.y) / fine.cell);
    int pn = spec.submesh.node_at(gi - found.is, gj - found.js);
    if (pn < 0) throw std::runtime_error("patch: element node escaped patch for element " + std::to_string(K));
    spec.restrict_to_element[s] = pn;
  }
  return spec;
}

std::string dump_mesh_text(const TriMesh& m) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu %zu %zu\n", m.nodes.size(), m.tris.size(), m.edges.size());
  out += buf;
  for (const auto& p : m.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out += buf;
  }
  for (const auto& t : m.tris) {
    std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
    out += buf;
  }
  for (const auto& e : m.edges) {
    std::snprintf(buf, sizeof buf, "%d %d %d %d\n", e.a, e.b, e.k1, e.k2);
    out += buf;
  }
  return out;
}

}  // namespace msdg
