#include "radtex/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "radtex/parallel.hpp"

namespace radtex {

SmoothL1 smooth_l1(double x) {
  if (std::abs(x) < 1.0) return {0.5 * x * x, x};
  return {std::abs(x) - 0.5, x > 0 ? 1.0 : -1.0};
}

LossResult image_loss(const Image& rendered, const Image& target,
                      const GBuffer& gbuf) {
  if (rendered.width != target.width || rendered.height != target.height ||
      rendered.width != gbuf.width || rendered.height != gbuf.height)
    throw std::invalid_argument("image_loss: dimension mismatch");
  LossResult res;
  res.grad.assign(rendered.data.size(), 0.0);
  for (size_t i = 0; i < gbuf.px.size(); ++i) {
    if (gbuf.px[i].tri < 0) continue;
    ++res.masked_pixels;
    for (size_t ch = 0; ch < 3; ++ch) {
      double x = static_cast<double>(target.data[i * 3 + ch]) -
                 static_cast<double>(rendered.data[i * 3 + ch]);
      SmoothL1 s = smooth_l1(x);
      res.loss += s.value;
      res.grad[i * 3 + ch] = -s.derivative;  // d/dRendered
    }
  }
  return res;
}

void GradientBuffer::accumulate(const GradientBuffer& other) {
  for (const auto& [tri, g] : other.grads) {
    auto& dst = grads[tri];
    if (dst.empty())
      dst = g;
    else
      for (size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
    auto& tdst = touched[tri];
    const auto& tsrc = other.touched.at(tri);
    if (tdst.empty()) tdst.assign(tsrc.size(), 0);
    for (size_t i = 0; i < tsrc.size(); ++i) tdst[i] |= tsrc[i];
  }
}

bool GradientBuffer::any_nonzero() const {
  for (const auto& [tri, g] : grads)
    for (double v : g)
      if (v != 0) return true;
  return false;
}

GradientBuffer backward(const LossResult& loss, const GBuffer& gbuf,
                        const std::vector<PixelShade>& shades,
                        const TextureSet& textures) {
  if (shades.size() != gbuf.px.size())
    throw std::invalid_argument("backward: shade records do not match G-buffer");
  const int nc = textures.sh.num_coeffs();

  const int nbands = (gbuf.height + 15) / 16;
  std::vector<GradientBuffer> bands(static_cast<size_t>(nbands));
  parallel_chunks(gbuf.height, 16, [&](int row0, int row1) {
    GradientBuffer& buf = bands[static_cast<size_t>(row0 / 16)];
    for (int y = row0; y < row1; ++y) {
      for (int x = 0; x < gbuf.width; ++x) {
        size_t i = static_cast<size_t>(y) * static_cast<size_t>(gbuf.width) + static_cast<size_t>(x);
        if (gbuf.px[i].tri < 0) continue;
        const PixelShade& s = shades[i];
        for (int ch = 0; ch < 3; ++ch) {
          // Clamp gate: saturated channels pass no gradient.
          if (s.rgb_raw[static_cast<size_t>(ch)] < 0.0 || s.rgb_raw[static_cast<size_t>(ch)] > 1.0) continue;
          double g = loss.grad[i * 3 + static_cast<size_t>(ch)];
          if (g == 0) continue;
          for (const auto& c : s.contribs) {
            const SHTexture* tex = textures.get(c.texel.tri);
            auto& gvec = buf.grads[c.texel.tri];
            auto& tvec = buf.touched[c.texel.tri];
            if (gvec.empty()) {
              gvec.assign(tex->coeffs.size(), 0.0);
              tvec.assign(static_cast<size_t>(tex->width) * static_cast<size_t>(tex->height), 0);
            }
            int ti = tex->texel_index(c.texel.row, c.texel.col);
            tvec[static_cast<size_t>(ti)] = 1;
            double* dst = gvec.data() +
                          (static_cast<size_t>(ti) * 3 + static_cast<size_t>(ch)) * static_cast<size_t>(nc);
            double gw = g * c.weight;
            for (int k = 0; k < nc; ++k) dst[k] += gw * s.basis[static_cast<size_t>(k)];
          }
        }
      }
    }
  });

  GradientBuffer out;
  for (auto& b : bands) out.accumulate(b);
  return out;
}

void adam_step(TextureSet& textures, const GradientBuffer& grads,
               AdamState& state, const TrainConfig& cfg) {
  const int nc3 = 3 * textures.sh.num_coeffs();
  for (const auto& [tri, gvec] : grads.grads) {
    SHTexture* tex = textures.get(tri);
    if (!tex) continue;
    const auto& touched = grads.touched.at(tri);
    auto& m = state.m[tri];
    auto& v = state.v[tri];
    auto& steps = state.steps[tri];
    if (m.empty()) {
      m.assign(tex->coeffs.size(), 0.0);
      v.assign(tex->coeffs.size(), 0.0);
      steps.assign(touched.size(), 0);
    }
    for (size_t ti = 0; ti < touched.size(); ++ti) {
      if (!touched[ti]) continue;
      uint32_t t = ++steps[ti];
      double bc1 = 1.0 - std::pow(cfg.beta1, t);
      double bc2 = 1.0 - std::pow(cfg.beta2, t);
      for (int k = 0; k < nc3; ++k) {
        size_t idx = ti * static_cast<size_t>(nc3) + static_cast<size_t>(k);
        double g = gvec[idx];
        m[idx] = cfg.beta1 * m[idx] + (1.0 - cfg.beta1) * g;
        v[idx] = cfg.beta2 * v[idx] + (1.0 - cfg.beta2) * g * g;
        double mhat = m[idx] / bc1;
        double vhat = v[idx] / bc2;
        tex->coeffs[idx] = static_cast<float>(
            static_cast<double>(tex->coeffs[idx]) - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
      }
    }
  }
}

namespace {

double covered_psnr(const Image& rendered, const Image& target, const GBuffer& gbuf) {
  double se = 0;
  int n = 0;
  for (size_t i = 0; i < gbuf.px.size(); ++i) {
    if (gbuf.px[i].tri < 0) continue;
    ++n;
    for (size_t ch = 0; ch < 3; ++ch) {
      double d = static_cast<double>(rendered.data[i * 3 + ch]) -
                 static_cast<double>(target.data[i * 3 + ch]);
      se += d * d;
    }
  }
  if (n == 0) return 0;
  double mse = se / (3.0 * n);
  if (mse <= 0) return 100.0;
  return std::min(100.0, -10.0 * std::log10(mse));
}

}  // namespace

std::vector<StepLog> train_round(const TriangleMesh& mesh, TextureSet& textures,
                                 const std::vector<ViewData>& views,
                                 const std::vector<int>& train_indices,
                                 const TrainConfig& cfg, AdamState& state) {
  if (views.empty() || train_indices.empty())
    throw std::invalid_argument("train_round: empty dataset");

  std::mt19937_64 rng(cfg.seed);
  std::vector<StepLog> logs;
  bool any_covered = false;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<int> order = train_indices;
    std::shuffle(order.begin(), order.end(), rng);
    for (int vi : order) {
      const ViewData& view = views[static_cast<size_t>(vi)];
      auto visible = frustum_visible(mesh, view.cam);
      GBuffer gbuf = rasterize(mesh, view.cam, visible, textures);
      std::vector<PixelShade> shades;
      Image rendered = shade(gbuf, mesh, textures, cfg.shade, &shades);
      LossResult loss = image_loss(rendered, view.target, gbuf);
      if (loss.masked_pixels == 0) continue;
      any_covered = true;
      GradientBuffer grads = backward(loss, gbuf, shades, textures);
      adam_step(textures, grads, state, cfg);
      logs.push_back({epoch, vi, loss.loss, covered_psnr(rendered, view.target, gbuf)});
    }
    if (!any_covered)
      throw std::runtime_error("train_round: no view covers any pixel");
  }
  return logs;
}

}  // namespace radtex
