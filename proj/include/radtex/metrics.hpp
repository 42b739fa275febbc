#pragma once

#include <vector>

#include "radtex/image.hpp"

namespace radtex {

constexpr double kPsnrCap = 100.0;  // zero-MSE cap

/// PSNR over masked pixels (mask: one byte per pixel, nonzero = counted),
/// capped at 100 dB. Throws on an empty mask.
double masked_psnr(const Image& a, const Image& b, const std::vector<uint8_t>& mask);

/// SSIM with the standard 11x11 Gaussian window (sigma 1.5, K1=0.01,
/// K2=0.03, L=1), averaged over channels, evaluated on the mask's bounding
/// box. Throws on an empty mask.
double masked_ssim(const Image& a, const Image& b, const std::vector<uint8_t>& mask);

}  // namespace radtex
