#include "radtex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radtex {

namespace {

void check_aligned(const Image& a, const Image& b, const std::vector<uint8_t>& mask) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("metrics: image dimension mismatch");
  if (mask.size() != static_cast<size_t>(a.width) * static_cast<size_t>(a.height))
    throw std::invalid_argument("metrics: mask dimension mismatch");
}

}  // namespace

double masked_psnr(const Image& a, const Image& b, const std::vector<uint8_t>& mask) {
  check_aligned(a, b, mask);
  double se = 0;
  long n = 0;
  for (size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++n;
    for (size_t ch = 0; ch < 3; ++ch) {
      double d = static_cast<double>(a.data[i * 3 + ch]) - static_cast<double>(b.data[i * 3 + ch]);
      se += d * d;
    }
  }
  if (n == 0) throw std::invalid_argument("masked_psnr: empty mask");
  double mse = se / (3.0 * static_cast<double>(n));
  if (mse <= 0) return kPsnrCap;
  return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

double masked_ssim(const Image& a, const Image& b, const std::vector<uint8_t>& mask) {
  check_aligned(a, b, mask);
  int x0 = a.width, x1 = -1, y0 = a.height, y1 = -1;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x)
      if (mask[static_cast<size_t>(y) * static_cast<size_t>(a.width) + static_cast<size_t>(x)]) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
  if (x1 < 0) throw std::invalid_argument("masked_ssim: empty mask");

  constexpr int kHalf = 5;  // 11x11 window
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
  constexpr double kC2 = 0.03 * 0.03;
  double w[2 * kHalf + 1];
  double wsum = 0;
  for (int i = -kHalf; i <= kHalf; ++i) {
    w[i + kHalf] = std::exp(-0.5 * i * i / (kSigma * kSigma));
    wsum += w[i + kHalf];
  }
  for (auto& v : w) v /= wsum;

  double total = 0;
  long count = 0;
  for (int ch = 0; ch < 3; ++ch) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        double mu_a = 0, mu_b = 0, va = 0, vb = 0, vab = 0, norm = 0;
        for (int dy = -kHalf; dy <= kHalf; ++dy) {
          int yy = y + dy;
          if (yy < y0 || yy > y1) continue;
          for (int dx = -kHalf; dx <= kHalf; ++dx) {
            int xx = x + dx;
            if (xx < x0 || xx > x1) continue;
            double wgt = w[dy + kHalf] * w[dx + kHalf];
            double pa = a.at(xx, yy)[ch], pb = b.at(xx, yy)[ch];
            mu_a += wgt * pa;
            mu_b += wgt * pb;
            va += wgt * pa * pa;
            vb += wgt * pb * pb;
            vab += wgt * pa * pb;
            norm += wgt;
          }
        }
        mu_a /= norm;
        mu_b /= norm;
        va = va / norm - mu_a * mu_a;
        vb = vb / norm - mu_b * mu_b;
        vab = vab / norm - mu_a * mu_b;
        double ssim = ((2 * mu_a * mu_b + kC1) * (2 * vab + kC2)) /
                      ((mu_a * mu_a + mu_b * mu_b + kC1) * (va + vb + kC2));
        total += ssim;
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace radtex
