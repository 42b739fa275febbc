#pragma once

#include <array>

#include "radtex/geometry.hpp"

namespace radtex {

constexpr int kMaxShDegree = 3;
constexpr int kMaxShCoeffs = (kMaxShDegree + 1) * (kMaxShDegree + 1);

// Y_00 = 1 / (2 sqrt(pi))
constexpr double kShC0 = 0.28209479177387814;

struct SHConfig {
  int degree = 2;  // 0..3
  int num_coeffs() const { return (degree + 1) * (degree + 1); }
};

/// Real spherical harmonics, graphics convention, hard-coded through L=3.
/// Band l occupies components l^2 .. l^2+2l in order m = -l..l:
///   l=0: 0.282095
///   l=1: 0.488603 * {y, z, x}
///   l=2: 1.092548*xy, 1.092548*yz, 0.315392*(3z^2-1), 1.092548*xz,
///        0.546274*(x^2-y^2)
///   l=3: 0.590044*y(3x^2-y^2), 2.890611*xyz, 0.457046*y(5z^2-1),
///        0.373176*z(5z^2-3), 0.457046*x(5z^2-1), 1.445306*z(x^2-y^2),
///        0.590044*x(x^2-3y^2)
/// dir must be unit length within 1e-6.
void sh_basis(const Vec3& dir, int degree, double* out);

std::array<double, kMaxShCoeffs> sh_basis(const Vec3& dir, const SHConfig& cfg);

}  // namespace radtex
