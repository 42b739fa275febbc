#pragma once

#include <cstdint>
#include <vector>

#include "radtex/geometry.hpp"
#include "radtex/mesh.hpp"
#include "radtex/sh.hpp"

namespace radtex {

enum class Region { Inside, Edge, Corner, Invalid };

struct TexelRef {
  int tri = -1;
  int row = 0;
  int col = 0;
  bool operator==(const TexelRef&) const = default;
};

/// Rectangular grid of SH texels aligned with one triangle's base/height
/// frame. Texel (row, col) center sits at
///   origin + (col + 0.5) * density * base_dir + (row + 0.5) * density * height_dir
/// which for a normal texture is p_a + Vh/2 + Vv/2 + col*Vh + row*Vv.
/// Slivers whose floor-resolution has zero in-triangle centers collapse to a
/// single valid texel at the centroid (origin shifted so the closed form
/// still holds).
struct SHTexture {
  int tri = -1;
  double density = 0;  // texel spacing, meters
  int width = 0;
  int height = 0;
  int num_coeffs = 9;
  Vec3 origin;      // base_start vertex (or shifted centroid origin)
  Vec3 base_dir;    // unit
  Vec3 height_dir;  // unit
  bool centroid_fallback = false;

  std::vector<uint8_t> valid;  // width * height
  // Layout: [(row * width + col) * 3 * num_coeffs + channel * num_coeffs + k]
  std::vector<float> coeffs;
  int valid_count = 0;

  // Extreme valid centers, for region classification.
  int max_valid_row = -1;
  int min_valid_col = -1;
  int max_valid_col = -1;

  bool allocated() const { return tri >= 0; }
  int texel_index(int row, int col) const { return row * width + col; }
  bool is_valid(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width &&
           valid[static_cast<size_t>(texel_index(row, col))] != 0;
  }
  Vec3 texel_center(int row, int col) const {
    return origin + (col + 0.5) * density * base_dir +
           (row + 0.5) * density * height_dir;
  }
  float* texel_coeffs(int row, int col) {
    return coeffs.data() + static_cast<size_t>(texel_index(row, col)) * 3 *
                               static_cast<size_t>(num_coeffs);
  }
  const float* texel_coeffs(int row, int col) const {
    return coeffs.data() + static_cast<size_t>(texel_index(row, col)) * 3 *
                               static_cast<size_t>(num_coeffs);
  }
  /// Continuous texel coordinates; integer (u, v) coincide with centers.
  Vec2 uv_of(const Vec3& p) const {
    return {(p - origin).dot(base_dir) / density - 0.5,
            (p - origin).dot(height_dir) / density - 0.5};
  }
};

/// One texture per non-degenerate triangle, indexed by triangle id.
struct TextureSet {
  SHConfig sh;
  std::vector<SHTexture> textures;

  const SHTexture* get(int tri) const {
    if (tri < 0 || tri >= static_cast<int>(textures.size())) return nullptr;
    const SHTexture& t = textures[static_cast<size_t>(tri)];
    return t.allocated() ? &t : nullptr;
  }
  SHTexture* get(int tri) {
    return const_cast<SHTexture*>(static_cast<const TextureSet*>(this)->get(tri));
  }
};

SHTexture allocate_texture(const TriangleMesh& mesh, int tri,
                           const TriangleFrame& frame, double density,
                           const SHConfig& cfg);

/// Allocate textures for every non-degenerate triangle at a uniform density.
TextureSet allocate_textures(const TriangleMesh& mesh, double density,
                             const SHConfig& cfg);

Region classify_region(const SHTexture& tex, const TriangleMesh& mesh,
                       const Vec3& p);

struct NearestTexel {
  int row = -1;
  int col = -1;
  double distance = 0;
};
/// Globally nearest valid texel by world distance, ties by lowest (row, col).
NearestTexel nearest_valid_texel(const SHTexture& tex, const Vec3& p);

/// Re-allocate at new_density; new valid texels are filled by the hybrid
/// interpolator evaluated on the old texture (self texels only, since
/// neighbor textures are resampled in the same sweep).
SHTexture resample_texture(const TriangleMesh& mesh, const SHTexture& old_tex,
                           double new_density, const SHConfig& cfg);

}  // namespace radtex
