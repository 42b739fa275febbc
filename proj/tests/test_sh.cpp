#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "radtex/sh.hpp"

using namespace radtex;

TEST_CASE("sh_basis: L=0 is the constant 1/(2 sqrt(pi))") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 50; ++i) {
    Vec3 d(gauss(rng), gauss(rng), gauss(rng));
    d.normalize();
    auto b = sh_basis(d, SHConfig{0});
    CHECK(b[0] == doctest::Approx(0.28209479177387814).epsilon(1e-12));
  }
}

TEST_CASE("sh_basis: +z direction at L=1") {
  auto b = sh_basis(Vec3(0, 0, 1), SHConfig{1});
  CHECK(b[0] == doctest::Approx(0.28209479177387814).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(0.0));                             // y term
  CHECK(b[2] == doctest::Approx(0.48860251190291992).epsilon(1e-12));  // z term
  CHECK(b[3] == doctest::Approx(0.0));                             // x term
}

TEST_CASE("sh_basis: axis directions isolate the matching L=1 component") {
  auto bx = sh_basis(Vec3(1, 0, 0), SHConfig{1});
  CHECK(bx[3] == doctest::Approx(0.48860251190291992).epsilon(1e-12));
  CHECK(bx[1] == doctest::Approx(0.0));
  CHECK(bx[2] == doctest::Approx(0.0));
  auto by = sh_basis(Vec3(0, 1, 0), SHConfig{1});
  CHECK(by[1] == doctest::Approx(0.48860251190291992).epsilon(1e-12));
}

TEST_CASE("sh_basis: Monte-Carlo orthonormality through L=3") {
  // Uniform directions: Gram matrix of Y_lm approximates identity * (1/4pi)
  // after averaging; with the 4pi measure folded in it approximates delta.
  // Spherical Fibonacci lattice: quasi-uniform, integration error well under
  // the Monte-Carlo noise of the same sample count.
  const int n = 10000;
  const int nc = 16;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  double gram[nc][nc] = {};
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * i;
    Vec3 d(r * std::cos(phi), r * std::sin(phi), z);
    d.normalize();
    auto b = sh_basis(d, SHConfig{3});
    for (int p = 0; p < nc; ++p)
      for (int q = 0; q < nc; ++q) gram[p][q] += b[static_cast<size_t>(p)] * b[static_cast<size_t>(q)];
  }
  const double measure = 4.0 * kPi / n;
  for (int p = 0; p < nc; ++p)
    for (int q = 0; q < nc; ++q) {
      double expected = p == q ? 1.0 : 0.0;
      CHECK(gram[p][q] * measure == doctest::Approx(expected).epsilon(0.02).scale(1.0));
    }
}

TEST_CASE("sh_basis: non-unit direction throws") {
  CHECK_THROWS(sh_basis(Vec3(0, 0, 2), SHConfig{1}));
  CHECK_THROWS(sh_basis(Vec3(0, 0, 0), SHConfig{0}));
}

TEST_CASE("sh_basis: degree controls vector length") {
  for (int L = 0; L <= 3; ++L) {
    SHConfig cfg{L};
    CHECK(cfg.num_coeffs() == (L + 1) * (L + 1));
    auto b = sh_basis(Vec3(0, 1, 0), cfg);
    // Components beyond (L+1)^2 stay zero in the fixed-size return.
    for (int k = cfg.num_coeffs(); k < kMaxShCoeffs; ++k)
      CHECK(b[static_cast<size_t>(k)] == 0.0);
  }
}
