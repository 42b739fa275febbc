#include "radtex/sh.hpp"

#include <cmath>
#include <stdexcept>

namespace radtex {

namespace {
constexpr double kC1 = 0.48860251190291992;
constexpr double kC2[5] = {1.0925484305920792, 1.0925484305920792,
                           0.31539156525252005, 1.0925484305920792,
                           0.54627421529603959};
constexpr double kC3[7] = {0.59004358992664352, 2.8906114426405538,
                           0.45704579946446572, 0.37317633259011546,
                           0.45704579946446572, 1.4453057213202769,
                           0.59004358992664352};
}  // namespace

void sh_basis(const Vec3& dir, int degree, double* out) {
  if (degree < 0 || degree > kMaxShDegree)
    throw std::invalid_argument("sh_basis: degree must be in [0,3]");
  if (std::abs(dir.squaredNorm() - 1.0) > 2e-6)
    throw std::invalid_argument("sh_basis: direction must be unit length");
  const double x = dir.x(), y = dir.y(), z = dir.z();
  out[0] = kShC0;
  if (degree < 1) return;
  out[1] = kC1 * y;
  out[2] = kC1 * z;
  out[3] = kC1 * x;
  if (degree < 2) return;
  const double xx = x * x, yy = y * y, zz = z * z;
  out[4] = kC2[0] * x * y;
  out[5] = kC2[1] * y * z;
  out[6] = kC2[2] * (3.0 * zz - 1.0);
  out[7] = kC2[3] * x * z;
  out[8] = kC2[4] * (xx - yy);
  if (degree < 3) return;
  out[9] = kC3[0] * y * (3.0 * xx - yy);
  out[10] = kC3[1] * x * y * z;
  out[11] = kC3[2] * y * (5.0 * zz - 1.0);
  out[12] = kC3[3] * z * (5.0 * zz - 3.0);
  out[13] = kC3[4] * x * (5.0 * zz - 1.0);
  out[14] = kC3[5] * z * (xx - yy);
  out[15] = kC3[6] * x * (xx - 3.0 * yy);
}

std::array<double, kMaxShCoeffs> sh_basis(const Vec3& dir, const SHConfig& cfg) {
  std::array<double, kMaxShCoeffs> out{};
  sh_basis(dir, cfg.degree, out.data());
  return out;
}

}  // namespace radtex
