#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "radtex/geometry.hpp"

namespace radtex {

// Triangles with area below this are flagged degenerate and carry no texture.
constexpr double kDegenerateArea = 1e-12;
// Inclusive-boundary slack for barycentric membership tests.
constexpr double kBaryEps = 1e-9;

using EdgeKey = std::pair<int, int>;  // (min vertex id, max vertex id)

inline EdgeKey make_edge(int a, int b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

/// Immutable after construction; safe for concurrent reads.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> normals;     // per-triangle, unit length (zero if degenerate)
  std::vector<double> areas;     // per-triangle
  std::vector<bool> degenerate;  // area <= kDegenerateArea

  // Undirected edge -> up to two incident triangles (-1 = open boundary).
  // Non-manifold edges keep the first two incident triangles by id; the
  // rest are counted in nonmanifold_ignored.
  std::map<EdgeKey, std::pair<int, int>> edge_adjacency;
  std::vector<std::vector<int>> vertex_adjacency;  // vertex id -> sorted tri ids
  int nonmanifold_ignored = 0;

  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }

  // Sorted list of the other triangles across each edge / around each vertex.
  int edge_neighbor(int tri, const EdgeKey& e) const;

  void build_adjacency();
  Vec3 centroid(int tri) const;
};

/// Per-triangle base/height frame: the longest edge is the base, ties broken
/// by smallest (min id, max id) edge key. base_start is the lower vertex id.
struct TriangleFrame {
  int base_start = -1;
  int base_end = -1;
  int apex = -1;
  Vec3 foot;            // orthogonal projection of apex onto the base line
  double base_length = 0;
  double height_length = 0;
  Vec3 base_dir;        // unit, base_start -> base_end
  Vec3 height_dir;      // unit, foot -> apex
};

TriangleMesh load_mesh(const std::string& path);

TriangleFrame triangle_frame(const TriangleMesh& mesh, int tri);

/// Inclusive-boundary membership. Points out of the triangle plane by more
/// than eps_plane (absolute, meters) are outside.
bool point_in_triangle(const TriangleMesh& mesh, int tri, const Vec3& p,
                       double eps_bary = kBaryEps, double eps_plane = 1e-6);

/// Barycentric coordinates of the in-plane projection of p.
std::array<double, 3> barycentric(const Vec3& a, const Vec3& b, const Vec3& c,
                                  const Vec3& p);

}  // namespace radtex
