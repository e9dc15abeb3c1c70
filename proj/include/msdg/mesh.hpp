#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace msdg {

struct Vec2 {
  double x = 0, y = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

enum class Domain { UnitSquare, LShape, Generic };

// k1 -> k2 is the normal direction; boundary edges have k2 == -1 and an
// outward normal.  Node ids satisfy a < b.
struct Edge {
  int a = -1, b = -1;
  int k1 = -1, k2 = -1;
  Vec2 normal;
  double len = 0;
  bool boundary = false;
};

// Structured triangulations of the unit square and the L-shaped domain
// (-1,1)^2 \ [0,1]x[-1,0], plus axis-aligned right-triangle submeshes used as
// oversampling patches.  Every square cell is split by the diagonal running
// from its lower-left to its upper-right corner; tri_type 0 is the triangle
// below that diagonal, 1 the one above.
struct TriMesh {
  Domain domain = Domain::Generic;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;  // CCW
  std::vector<uint8_t> tri_type;
  std::vector<Edge> edges;
  std::vector<uint8_t> node_boundary;
  double cell = 0;   // lattice spacing
  double h = 0;      // max element diameter
  int n_per_unit = 0;

  // lattice metadata: cells are indexed (i,j) over the bounding box
  Vec2 origin;
  int nx = 0, ny = 0;
  std::vector<int> lattice_node;              // (nx+1)*(ny+1), -1 where absent
  std::vector<std::array<int, 2>> cell_tris;  // nx*ny, {lower,upper}, -1 absent
  std::unordered_map<int64_t, int> edge_index;

  int node_at(int i, int j) const { return lattice_node[(int64_t)j * (nx + 1) + i]; }
  int edge_between(int a, int b) const;

  std::array<Vec2, 3> tri_xy(int t) const;
  double area(int t) const;
  Vec2 centroid(int t) const;
  std::array<Vec2, 3> grads(int t) const;          // P1 hat gradients
  std::array<double, 3> bary(int t, Vec2 p) const; // barycentric coords
  int locate(Vec2 p) const;                        // containing triangle

  int num_boundary_nodes() const;
};

TriMesh build_structured_mesh(Domain d, int n);

// Right triangle with axis-aligned legs of m cells, lattice-aligned at
// `origin_cell` (in units of `spacing`).  type 0: below the diagonal.
TriMesh build_right_triangle_mesh(int type, std::array<int, 2> origin_cell, int m,
                                  double spacing, Vec2 lattice_origin);

// nodal hat functions of coarse element K evaluated at p
std::array<double, 3> hat_at(const TriMesh& coarse, int K, Vec2 p);

struct EdgeSegment {
  int n0 = -1, n1 = -1;   // fine node ids, ordered along the coarse edge
  int t1 = -1, t2 = -1;   // adjacent fine triangles on the k1 / k2 side
  int fine_edge = -1;
};

// Fine-into-coarse containment for nested structured meshes.
struct CoarseFineMap {
  const TriMesh* coarse = nullptr;
  const TriMesh* fine = nullptr;
  int ratio = 1;
  std::vector<std::vector<int>> tris_of;   // coarse tri -> fine tris, ascending
  std::vector<std::vector<int>> nodes_of;  // coarse tri -> fine nodes of its closure, ascending
  std::vector<std::vector<EdgeSegment>> edge_tiling;  // per coarse edge

  // slot of a fine node in nodes_of[K], -1 when absent
  int local_node(int K, int fine_node) const;
};

CoarseFineMap build_coarse_fine_map(const TriMesh& coarse, const TriMesh& fine);

// Oversampling patch S(K): a scaled copy of K with legs of m fine cells,
// barycenter-aligned with K when that placement stays inside the domain,
// otherwise translated (smallest lattice shift first) and as a last resort
// shrunk.  separation is the reported (h_S - h_K)/3 proxy.
struct PatchSpec {
  int element = -1;
  std::array<Vec2, 3> macro_vertices;
  double h_s = 0;
  double separation = 0;
  bool translated = false;
  bool shrunk = false;
  TriMesh submesh;
  std::vector<int> restrict_to_element;  // slot in nodes_of[K] -> patch node
};

PatchSpec build_oversampling_patch(const TriMesh& coarse, int K, double factor,
                                   const TriMesh& fine, const CoarseFineMap& cf);

std::string dump_mesh_text(const TriMesh& m);

}  // namespace msdg
