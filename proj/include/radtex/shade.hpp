#pragma once

#include <array>
#include <utility>
#include <vector>

#include "radtex/image.hpp"
#include "radtex/raster.hpp"
#include "radtex/texture.hpp"

namespace radtex {

struct ShadeConfig {
  double lod_threshold = 1.0;    // lod above this switches to EWA
  double idw_exponent = 0.9;
  double normal_gate_deg = 15.0; // neighbor normals beyond this skip EWA
  double max_ewa_radius = 16.0;  // texel units; larger footprints are shrunk
  bool ewa_enabled = true;
  std::array<double, 3> background{0, 0, 0};
};

struct Contribution {
  TexelRef texel;
  double weight = 0;  // per-pixel weights sum to 1
};

/// Forward record for one covered pixel; the backward pass replays it.
struct PixelShade {
  std::array<double, 3> rgb{};      // clamped to [0, 1]
  std::array<double, 3> rgb_raw{};  // pre-clamp; gradients gate on this
  std::array<double, kMaxShCoeffs> basis{};
  std::vector<Contribution> contribs;
  bool used_ewa = false;
};

/// Edge region: the triangle across the nearest edge (empty on a boundary
/// edge). Corner region: all triangles around the nearest vertex, self
/// excluded. Ties go to the lowest edge/vertex slot.
std::vector<int> select_neighbors(const TriangleMesh& mesh, int tri,
                                  Region region, const Vec3& p);

std::vector<Contribution> hybrid_contributions(const TextureSet& textures,
                                               const TriangleMesh& mesh,
                                               const SHTexture& tex,
                                               const Vec3& p, Region region,
                                               const ShadeConfig& cfg);

/// Empty result means no texel fell inside the ellipse; callers fall back to
/// hybrid_contributions.
std::vector<Contribution> ewa_contributions(const TextureSet& textures,
                                            const TriangleMesh& mesh,
                                            const SHTexture& tex,
                                            const GBufferPixel& px,
                                            Region region,
                                            const ShadeConfig& cfg);

PixelShade shade_pixel(const GBufferPixel& px, const TextureSet& textures,
                       const TriangleMesh& mesh, const ShadeConfig& cfg);

/// Sampling weights using only the texture's own texels (bilinear when the
/// enclosing cell is fully valid, IDW otherwise); the resampling kernel.
std::vector<std::pair<TexelRef, double>> self_interpolation_weights(
    const SHTexture& tex, const TriangleMesh& mesh, const Vec3& p,
    double idw_exponent = 0.9);

/// Full forward pass for one view. Background pixels get cfg.background.
Image render(const TriangleMesh& mesh, const TextureSet& textures,
             const Camera& cam, const ShadeConfig& cfg,
             GBuffer* gbuf_out = nullptr,
             std::vector<PixelShade>* shades_out = nullptr);

/// Forward pass over a precomputed G-buffer.
Image shade(const GBuffer& gbuf, const TriangleMesh& mesh,
            const TextureSet& textures, const ShadeConfig& cfg,
            std::vector<PixelShade>* shades_out = nullptr);

}  // namespace radtex
