#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "radtex/mesh.hpp"
#include "radtex/synth.hpp"

namespace testutil {

using radtex::TriangleMesh;
using radtex::Vec3;

inline TriangleMesh make_mesh(std::vector<Vec3> verts,
                              std::vector<std::array<int, 3>> tris) {
  TriangleMesh mesh;
  mesh.vertices = std::move(verts);
  mesh.triangles = std::move(tris);
  mesh.build_adjacency();
  return mesh;
}

inline TriangleMesh single_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  return make_mesh({a, b, c}, {{0, 1, 2}});
}

/// Two triangles forming the unit-extent quad [0,s]^2 in the z=0 plane,
/// sharing the diagonal edge (0, 3).
inline TriangleMesh quad_mesh(double s = 1.0) {
  return make_mesh({{0, 0, 0}, {s, 0, 0}, {s, s, 0}, {0, s, 0}},
                   {{0, 1, 3}, {1, 2, 3}});
}

/// Fan of n triangles around vertex 0 at the origin in the z=0 plane.
inline TriangleMesh vertex_fan(int n, double radius = 1.0) {
  TriangleMesh mesh;
  mesh.vertices.emplace_back(0, 0, 0);
  for (int i = 0; i <= n; ++i) {
    double a = radtex::kPi * i / n;  // half-disc fan, open boundary
    mesh.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
  }
  for (int i = 0; i < n; ++i) mesh.triangles.push_back({0, i + 1, i + 2});
  mesh.build_adjacency();
  return mesh;
}

/// Camera at `pos` looking at `target`; image w x h, focal f.
inline radtex::Camera lookat(const Vec3& pos, const Vec3& target, int w = 64,
                             int h = 64, double f = 64.0) {
  return radtex::make_lookat_camera(pos, target, w, h, f);
}

/// Random point strictly inside triangle `tri` (uniform barycentric).
inline Vec3 random_point_in_triangle(const TriangleMesh& mesh, int tri,
                                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double r1 = std::sqrt(uni(rng)), r2 = uni(rng);
  const auto& t = mesh.triangles[static_cast<size_t>(tri)];
  return (1 - r1) * mesh.vertices[static_cast<size_t>(t[0])] +
         r1 * (1 - r2) * mesh.vertices[static_cast<size_t>(t[1])] +
         r1 * r2 * mesh.vertices[static_cast<size_t>(t[2])];
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("radtex_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string write_file(const TempDir& dir, const std::string& name,
                              const std::string& contents) {
  std::string p = dir.file(name);
  std::ofstream out(p);
  out << contents;
  return p;
}

inline std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
