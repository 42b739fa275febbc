#pragma once

#include <vector>

#include "radtex/camera.hpp"
#include "radtex/geometry.hpp"
#include "radtex/mesh.hpp"
#include "radtex/texture.hpp"

namespace radtex {

/// Per-pixel deferred-pass record. tri < 0 means background (all other
/// fields are sentinels).
struct GBufferPixel {
  int tri = -1;
  double u = 0, v = 0;   // continuous texel coords, integers = centers
  Vec3 world_pos = Vec3::Zero();
  Vec3 view_dir = Vec3::Zero();  // unit, surface point -> camera
  Vec2 duv_dx = Vec2::Zero();    // texel units per pixel
  Vec2 duv_dy = Vec2::Zero();
  double lod = 0;
  double depth = 0;  // camera-space Z, > 0 when covered
};

struct GBuffer {
  int width = 0;
  int height = 0;
  std::vector<GBufferPixel> px;

  GBufferPixel& at(int x, int y) { return px[static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)]; }
  const GBufferPixel& at(int x, int y) const {
    return px[static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)];
  }
};

/// Analytic screen-space derivatives of the texel-coordinate mapping of
/// triangle `tri` at continuous pixel position (x, y). Derived from the
/// triangle's plane equation, so silhouette pixels are well-defined.
void uv_derivatives(const TriangleMesh& mesh, const Camera& cam,
                    const SHTexture& tex, double x, double y, Vec2* duv_dx,
                    Vec2* duv_dy);

/// lod = log2(max(|duv_dx|, |duv_dy|)); values above the shading threshold
/// switch the pixel from hybrid interpolation to EWA.
double lod_level(const Vec2& duv_dx, const Vec2& duv_dy);

/// Depth-tested deferred pass over `visible` triangles that carry a texture.
/// Pixel centers at (ix + 0.5, iy + 0.5); top-left fill rule on ties; depth
/// ties resolved to the lower triangle id.
GBuffer rasterize(const TriangleMesh& mesh, const Camera& cam,
                  const std::vector<int>& visible, const TextureSet& textures,
                  double z_near = kZNear);

}  // namespace radtex
