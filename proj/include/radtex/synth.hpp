#pragma once

#include <array>
#include <string>
#include <vector>

#include "radtex/camera.hpp"
#include "radtex/mesh.hpp"
#include "radtex/texture.hpp"

namespace radtex {

/// Deterministic synthetic scene for teacher-student experiments: a mesh,
/// ground-truth SH textures, and a jittered view ring, all seeded.
struct SynthSpec {
  enum class Kind { QuadGrid, Icosphere, TwoPlane };
  enum class TexMode { Constant, Ramp, Checker, RandomSH };

  Kind kind = Kind::QuadGrid;
  int grid_n = 4;      // quad-grid: n x n quads = 2 n^2 triangles
  double extent = 2.0; // scene size, meters

  TexMode tex_mode = TexMode::RandomSH;
  double gt_density = 0.1;
  SHConfig sh;
  std::array<double, 3> constant_color{0.5, 0.5, 0.5};
  double band1_amp = 0.05;  // random-SH per-order amplitudes
  double band2_amp = 0.02;
  double band3_amp = 0.01;
  double checker_period = 0.25;  // meters

  int num_views = 16;
  double ring_radius = 3.0;
  double ring_height = 2.0;
  double jitter = 0.2;  // relative pose jitter
  int image_width = 64;
  int image_height = 64;
  double focal = 80.0;  // fx = fy, pixels

  uint64_t seed = 0;
};

struct SynthScene {
  TriangleMesh mesh;
  TextureSet gt;
  std::vector<Camera> cameras;
};

SynthScene build_scene(const SynthSpec& spec);

/// Writes mesh.obj, cameras.json, images/ rendered from the ground truth
/// with the standard forward path, gt.mlsh, and scene.json into out_dir.
void generate_scene(const SynthSpec& spec, const std::string& out_dir);

/// Look-at pose helper (camera x right, y down, z forward).
Camera make_lookat_camera(const Vec3& position, const Vec3& target, int width,
                          int height, double focal);

void save_obj(const TriangleMesh& mesh, const std::string& path);

SynthSpec load_synth_spec(const std::string& path);  // JSON

}  // namespace radtex
