#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "radtex/camera.hpp"
#include "radtex/image.hpp"
#include "radtex/shade.hpp"
#include "radtex/texture.hpp"

namespace radtex {

struct TrainConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int epochs = 30;      // fixed budget per density round
  uint64_t seed = 0;    // view shuffling
  ShadeConfig shade;
};

struct SmoothL1 {
  double value = 0;
  double derivative = 0;
};
/// 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise.
SmoothL1 smooth_l1(double x);

struct LossResult {
  double loss = 0;
  // dLoss/dRendered per pixel channel; zero outside the mask.
  std::vector<double> grad;  // 3 per pixel
  int masked_pixels = 0;
};
/// Smooth-L1 summed over covered pixels and channels.
LossResult image_loss(const Image& rendered, const Image& target,
                      const GBuffer& gbuf);

/// Per-texture coefficient gradients, dense per touched texture with a
/// per-texel touched mask. std::map keeps merge/update order deterministic.
struct GradientBuffer {
  std::map<int, std::vector<double>> grads;    // tri -> w*h*3*nc
  std::map<int, std::vector<uint8_t>> touched; // tri -> w*h

  void accumulate(const GradientBuffer& other);
  bool any_nonzero() const;
};

/// Exact transpose of the linear forward map; channels clamped in the
/// forward pass contribute nothing.
GradientBuffer backward(const LossResult& loss, const GBuffer& gbuf,
                        const std::vector<PixelShade>& shades,
                        const TextureSet& textures);

/// Adam moments, lazily allocated per texture, per-texel step counts.
struct AdamState {
  std::map<int, std::vector<double>> m;
  std::map<int, std::vector<double>> v;
  std::map<int, std::vector<uint32_t>> steps;  // per texel
};

/// Adaptive-moment update on touched texels only; untouched coefficients are
/// bit-identical afterwards.
void adam_step(TextureSet& textures, const GradientBuffer& grads,
               AdamState& state, const TrainConfig& cfg);

struct StepLog {
  int epoch = 0;
  int view = 0;
  double loss = 0;
  double psnr = 0;  // over covered pixels
};

struct ViewData {
  Camera cam;
  Image target;
};

/// One training round: per epoch, iterate training views (seeded shuffle),
/// restrict work to frustum-visible textures, and apply one optimizer step
/// per view.
std::vector<StepLog> train_round(const TriangleMesh& mesh, TextureSet& textures,
                                 const std::vector<ViewData>& views,
                                 const std::vector<int>& train_indices,
                                 const TrainConfig& cfg, AdamState& state);

}  // namespace radtex
