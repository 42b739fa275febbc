#pragma once

#include <string>
#include <vector>

#include "radtex/camera.hpp"
#include "radtex/image.hpp"
#include "radtex/train.hpp"

namespace radtex {

/// Scene file schema (JSON):
///   {
///     "mesh": "mesh.obj",
///     "cameras": "cameras.json",
///     "images": ["images/view_000.png", ...],
///     "test_indices": [7, 15, ...]   // optional; default: every 8th view
///   }
/// Paths are relative to the scene file's directory. The default split puts
/// 0-based indices congruent to 7 mod 8 in the test set.
struct SceneDataset {
  std::string mesh_path;
  std::vector<ViewData> views;
  std::vector<std::string> image_paths;
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

SceneDataset load_dataset(const std::string& scene_path);

/// Default every-8th split over n views: test = {7, 15, 23, ...}.
void default_split(int n, std::vector<int>* train, std::vector<int>* test);

}  // namespace radtex
