#pragma once

#include <string>
#include <vector>

#include "radtex/geometry.hpp"
#include "radtex/mesh.hpp"

namespace radtex {

// Triangles entirely at camera depth <= kZNear are culled; partially-behind
// triangles are handled per pixel by the positive-depth test.
constexpr double kZNear = 1e-3;

struct Camera {
  int width = 0;
  int height = 0;
  double fx = 0, fy = 0, cx = 0, cy = 0;
  Mat4 T_wc = Mat4::Identity();  // world-from-camera

  Vec3 center() const { return T_wc.block<3, 1>(0, 3); }
  Mat3 rotation() const { return T_wc.block<3, 3>(0, 0); }
  Vec3 world_to_camera(const Vec3& p) const {
    return rotation().transpose() * (p - center());
  }
  Vec3 camera_to_world(const Vec3& p) const { return rotation() * p + center(); }

  void validate() const;  // throws on bad intrinsics / non-orthonormal pose
};

struct Projection {
  double x = 0, y = 0;
  double depth = 0;  // camera-space Z
  bool behind = false;
};

/// Pinhole projection, continuous pixel coordinates.
Projection project(const Camera& cam, const Vec3& p_world);

/// Conservative frustum test: every triangle whose near-plane-clipped
/// projection overlaps the image rectangle. Sorted triangle ids.
std::vector<int> frustum_visible(const TriangleMesh& mesh, const Camera& cam,
                                 double z_near = kZNear);

std::vector<Camera> load_cameras_json(const std::string& path);
void save_cameras_json(const std::vector<Camera>& cams, const std::string& path);

}  // namespace radtex
