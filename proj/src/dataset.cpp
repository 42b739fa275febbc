#include "radtex/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace radtex {

void default_split(int n, std::vector<int>* train, std::vector<int>* test) {
  train->clear();
  test->clear();
  for (int i = 0; i < n; ++i) {
    if (i % 8 == 7)
      test->push_back(i);
    else
      train->push_back(i);
  }
}

SceneDataset load_dataset(const std::string& scene_path) {
  std::ifstream in(scene_path);
  if (!in) throw std::runtime_error("cannot open scene file '" + scene_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed scene JSON '" + scene_path + "': " + e.what());
  }

  const auto dir = std::filesystem::path(scene_path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (dir / fp).string();
  };

  SceneDataset ds;
  ds.mesh_path = resolve(j.at("mesh").get<std::string>());
  auto cams = load_cameras_json(resolve(j.at("cameras").get<std::string>()));
  if (cams.empty()) throw std::runtime_error("scene '" + scene_path + "' has no cameras");

  auto images = j.at("images");
  if (!images.is_array() || images.size() != cams.size())
    throw std::runtime_error("scene '" + scene_path + "': camera count (" +
                             std::to_string(cams.size()) + ") != image count (" +
                             std::to_string(images.size()) + ")");

  for (size_t i = 0; i < cams.size(); ++i) {
    std::string path = resolve(images[i].get<std::string>());
    Image img = load_png(path);
    if (img.width != cams[i].width || img.height != cams[i].height)
      throw std::runtime_error("image '" + path + "' does not match camera dimensions");
    ds.views.push_back({cams[i], std::move(img)});
    ds.image_paths.push_back(path);
  }

  if (j.contains("test_indices")) {
    for (const auto& e : j["test_indices"]) {
      int idx = e.get<int>();
      if (idx < 0 || idx >= static_cast<int>(ds.views.size()))
        throw std::runtime_error("scene test index out of range");
      ds.test_indices.push_back(idx);
    }
    std::sort(ds.test_indices.begin(), ds.test_indices.end());
    for (int i = 0; i < static_cast<int>(ds.views.size()); ++i)
      if (!std::binary_search(ds.test_indices.begin(), ds.test_indices.end(), i))
        ds.train_indices.push_back(i);
  } else {
    default_split(static_cast<int>(ds.views.size()), &ds.train_indices, &ds.test_indices);
  }
  return ds;
}

}  // namespace radtex
