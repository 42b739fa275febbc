#pragma once

#include <string>

#include "radtex/texture.hpp"

namespace radtex {

// Texture checkpoint, little-endian:
//   magic "MLSH", version u32, sh degree u32, record count u32, then per
//   triangle: tri u32, density f64, width u32, height u32, flags u32
//   (bit 0 = centroid fallback), origin/base_dir/height_dir as 9 f64,
//   validity bitmask ceil(w*h/8) bytes, coefficients w*h*3*(L+1)^2 f32.
constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const TextureSet& textures, const std::string& path);

/// Throws on bad magic, version mismatch, truncation, or an SH degree that
/// differs from expected_degree (pass -1 to accept any).
TextureSet load_checkpoint(const std::string& path, int expected_degree = -1);

}  // namespace radtex
