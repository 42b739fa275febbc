#include "radtex/texture.hpp"

#include <cmath>
#include <stdexcept>

#include "radtex/shade.hpp"

namespace radtex {

SHTexture allocate_texture(const TriangleMesh& mesh, int tri,
                           const TriangleFrame& frame, double density,
                           const SHConfig& cfg) {
  if (density <= 0) throw std::invalid_argument("allocate_texture: density must be positive");

  SHTexture tex;
  tex.tri = tri;
  tex.density = density;
  tex.num_coeffs = cfg.num_coeffs();
  tex.width = std::max(1, static_cast<int>(std::floor(frame.base_length / density)));
  tex.height = std::max(1, static_cast<int>(std::floor(frame.height_length / density)));
  tex.origin = mesh.vertices[static_cast<size_t>(frame.base_start)];
  tex.base_dir = frame.base_dir;
  tex.height_dir = frame.height_dir;

  tex.valid.assign(static_cast<size_t>(tex.width) * static_cast<size_t>(tex.height), 0);
  for (int r = 0; r < tex.height; ++r) {
    for (int c = 0; c < tex.width; ++c) {
      if (point_in_triangle(mesh, tri, tex.texel_center(r, c))) {
        tex.valid[static_cast<size_t>(tex.texel_index(r, c))] = 1;
        ++tex.valid_count;
        tex.max_valid_row = std::max(tex.max_valid_row, r);
        tex.min_valid_col = tex.min_valid_col < 0 ? c : std::min(tex.min_valid_col, c);
        tex.max_valid_col = std::max(tex.max_valid_col, c);
      }
    }
  }

  if (tex.valid_count == 0) {
    // Sliver: keep one texel at the centroid so the triangle stays learnable.
    tex.width = tex.height = 1;
    tex.centroid_fallback = true;
    tex.origin = mesh.centroid(tri) - 0.5 * density * (tex.base_dir + tex.height_dir);
    tex.valid.assign(1, 1);
    tex.valid_count = 1;
    tex.max_valid_row = 0;
    tex.min_valid_col = 0;
    tex.max_valid_col = 0;
  }

  tex.coeffs.assign(static_cast<size_t>(tex.width) * static_cast<size_t>(tex.height) * 3 *
                        static_cast<size_t>(tex.num_coeffs),
                    0.0f);
  // Mid-gray DC start, higher orders zero.
  const float dc = static_cast<float>(0.5 / kShC0);
  for (int i = 0; i < tex.width * tex.height; ++i)
    for (int ch = 0; ch < 3; ++ch)
      if (tex.valid[static_cast<size_t>(i)])
        tex.coeffs[(static_cast<size_t>(i) * 3 + static_cast<size_t>(ch)) *
                   static_cast<size_t>(tex.num_coeffs)] = dc;
  return tex;
}

TextureSet allocate_textures(const TriangleMesh& mesh, double density,
                             const SHConfig& cfg) {
  TextureSet set;
  set.sh = cfg;
  set.textures.resize(static_cast<size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.degenerate[static_cast<size_t>(t)]) continue;
    set.textures[static_cast<size_t>(t)] =
        allocate_texture(mesh, t, triangle_frame(mesh, t), density, cfg);
  }
  return set;
}

Region classify_region(const SHTexture& tex, const TriangleMesh& mesh,
                       const Vec3& p) {
  if (!point_in_triangle(mesh, tex.tri, p)) return Region::Invalid;
  Vec2 uv = tex.uv_of(p);
  // Axis-aligned half-planes through the extreme valid centers.
  if (uv.y() > tex.max_valid_row || uv.x() < tex.min_valid_col ||
      uv.x() > tex.max_valid_col)
    return Region::Corner;
  int c0 = static_cast<int>(std::floor(uv.x()));
  int r0 = static_cast<int>(std::floor(uv.y()));
  if (tex.is_valid(r0, c0) && tex.is_valid(r0, c0 + 1) && tex.is_valid(r0 + 1, c0) &&
      tex.is_valid(r0 + 1, c0 + 1))
    return Region::Inside;
  return Region::Edge;
}

NearestTexel nearest_valid_texel(const SHTexture& tex, const Vec3& p) {
  if (tex.valid_count < 1)
    throw std::runtime_error("nearest_valid_texel: texture has no valid texels");
  NearestTexel best;
  double best_d2 = -1;
  for (int r = 0; r < tex.height; ++r) {
    for (int c = 0; c < tex.width; ++c) {
      if (!tex.valid[static_cast<size_t>(tex.texel_index(r, c))]) continue;
      double d2 = (tex.texel_center(r, c) - p).squaredNorm();
      if (best_d2 < 0 || d2 < best_d2) {
        best_d2 = d2;
        best.row = r;
        best.col = c;
      }
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

SHTexture resample_texture(const TriangleMesh& mesh, const SHTexture& old_tex,
                           double new_density, const SHConfig& cfg) {
  SHTexture fresh =
      allocate_texture(mesh, old_tex.tri, triangle_frame(mesh, old_tex.tri),
                       new_density, cfg);
  std::vector<double> interp(static_cast<size_t>(3 * fresh.num_coeffs));
  for (int r = 0; r < fresh.height; ++r) {
    for (int c = 0; c < fresh.width; ++c) {
      if (!fresh.valid[static_cast<size_t>(fresh.texel_index(r, c))]) continue;
      Vec3 p = fresh.texel_center(r, c);
      auto weights = self_interpolation_weights(old_tex, mesh, p);
      float* dst = fresh.texel_coeffs(r, c);
      for (size_t i = 0; i < interp.size(); ++i) interp[i] = 0;
      for (const auto& [ref, w] : weights) {
        const float* src = old_tex.texel_coeffs(ref.row, ref.col);
        for (size_t i = 0; i < interp.size(); ++i) interp[i] += w * src[i];
      }
      for (size_t i = 0; i < interp.size(); ++i) dst[i] = static_cast<float>(interp[i]);
    }
  }
  return fresh;
}

}  // namespace radtex
