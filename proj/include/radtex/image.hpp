#pragma once

#include <string>
#include <vector>

namespace radtex {

/// RGB float image, values in [0, 1], row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // 3 floats per pixel

  Image() = default;
  Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h) * 3, 0.0f) {}

  float* at(int x, int y) {
    return data.data() + (static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)) * 3;
  }
  const float* at(int x, int y) const {
    return data.data() + (static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)) * 3;
  }
};

/// 8-bit RGB PNG I/O. Decode maps byte b to b/255; encode rounds to nearest.
/// No gamma handling anywhere.
Image load_png(const std::string& path);
void save_png(const Image& img, const std::string& path);

}  // namespace radtex
