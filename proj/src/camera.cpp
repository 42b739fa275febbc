#include "radtex/camera.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace radtex {

void Camera::validate() const {
  if (width <= 0 || height <= 0) throw std::runtime_error("camera: bad image size");
  if (fx <= 0 || fy <= 0) throw std::runtime_error("camera: focal lengths must be positive");
  Mat3 R = rotation();
  if ((R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
    throw std::runtime_error("camera: pose rotation is not orthonormal");
}

Projection project(const Camera& cam, const Vec3& p_world) {
  Vec3 pc = cam.world_to_camera(p_world);
  Projection pr;
  pr.depth = pc.z();
  if (pc.z() <= 0) {
    pr.behind = true;
    return pr;
  }
  pr.x = cam.fx * pc.x() / pc.z() + cam.cx;
  pr.y = cam.fy * pc.y() / pc.z() + cam.cy;
  return pr;
}

std::vector<int> frustum_visible(const TriangleMesh& mesh, const Camera& cam,
                                 double z_near) {
  std::vector<int> out;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    Vec3 pc[3];
    for (int k = 0; k < 3; ++k)
      pc[k] = cam.world_to_camera(mesh.vertices[static_cast<size_t>(tri[static_cast<size_t>(k)])]);

    // Clip the camera-space triangle against z = z_near.
    std::vector<Vec3> poly;
    for (int k = 0; k < 3; ++k) {
      const Vec3& a = pc[k];
      const Vec3& b = pc[(k + 1) % 3];
      bool ain = a.z() > z_near, bin = b.z() > z_near;
      if (ain) poly.push_back(a);
      if (ain != bin) {
        double s = (z_near - a.z()) / (b.z() - a.z());
        poly.push_back(a + s * (b - a));
      }
    }
    if (poly.empty()) continue;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : poly) {
      double x = cam.fx * p.x() / p.z() + cam.cx;
      double y = cam.fy * p.y() / p.z() + cam.cy;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    if (xmax < 0 || xmin > cam.width || ymax < 0 || ymin > cam.height) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<Camera> load_cameras_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open camera file '" + path + "'");
  nlohmann::json j;
  in >> j;
  if (!j.is_array()) throw std::runtime_error("camera file must be a JSON array");
  std::vector<Camera> cams;
  for (const auto& e : j) {
    Camera c;
    c.width = e.at("width").get<int>();
    c.height = e.at("height").get<int>();
    c.fx = e.at("fx").get<double>();
    c.fy = e.at("fy").get<double>();
    c.cx = e.at("cx").get<double>();
    c.cy = e.at("cy").get<double>();
    auto m = e.at("T_wc");
    if (!m.is_array() || m.size() != 16)
      throw std::runtime_error("camera T_wc must hold 16 row-major floats");
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col)
        c.T_wc(r, col) = m[static_cast<size_t>(r * 4 + col)].get<double>();
    c.validate();
    cams.push_back(c);
  }
  return cams;
}

void save_cameras_json(const std::vector<Camera>& cams, const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : cams) {
    nlohmann::json e;
    e["width"] = c.width;
    e["height"] = c.height;
    e["fx"] = c.fx;
    e["fy"] = c.fy;
    e["cx"] = c.cx;
    e["cy"] = c.cy;
    std::vector<double> m(16);
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col) m[static_cast<size_t>(r * 4 + col)] = c.T_wc(r, col);
    e["T_wc"] = m;
    j.push_back(e);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write camera file '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace radtex
