#include "radtex/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "radtex/checkpoint.hpp"
#include "radtex/shade.hpp"

namespace radtex {

namespace {

void add_quad(TriangleMesh* mesh, int v00, int v10, int v01, int v11) {
  mesh->triangles.push_back({v00, v10, v11});
  mesh->triangles.push_back({v00, v11, v01});
}

TriangleMesh quad_grid(int n, double extent) {
  TriangleMesh mesh;
  const double step = extent / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(-extent / 2 + i * step, -extent / 2 + j * step, 0.0);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      add_quad(&mesh, vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
  return mesh;
}

TriangleMesh icosahedron(double radius) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  const double verts[12][3] = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& v : verts)
    mesh.vertices.push_back(radius * Vec3(v[0], v[1], v[2]).normalized());
  const int faces[20][3] = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10},
                            {0, 10, 11}, {1, 5, 9},   {5, 11, 4},  {11, 10, 2},
                            {10, 7, 6},  {7, 1, 8},   {3, 9, 4},   {3, 4, 2},
                            {3, 2, 6},   {3, 6, 8},   {3, 8, 9},   {4, 9, 5},
                            {2, 4, 11},  {6, 2, 10},  {8, 6, 7},   {9, 8, 1}};
  for (const auto& f : faces) mesh.triangles.push_back({f[0], f[1], f[2]});
  return mesh;
}

TriangleMesh two_plane(double extent) {
  TriangleMesh mesh = quad_grid(1, extent);  // back plane at z = 0
  const double s = extent / 6.0;             // small front occluder
  const double z = extent / 4.0;
  int base = mesh.num_vertices();
  mesh.vertices.emplace_back(-s, -s, z);
  mesh.vertices.emplace_back(s, -s, z);
  mesh.vertices.emplace_back(-s, s, z);
  mesh.vertices.emplace_back(s, s, z);
  add_quad(&mesh, base, base + 1, base + 2, base + 3);
  return mesh;
}

void fill_gt_textures(const SynthSpec& spec, const TriangleMesh& mesh,
                      TextureSet* set) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> dc_dist(0.35, 0.65);
  const int nc = set->sh.num_coeffs();
  const double amps[4] = {0.0, spec.band1_amp, spec.band2_amp, spec.band3_amp};

  for (auto& tex : set->textures) {
    if (!tex.allocated()) continue;
    for (int r = 0; r < tex.height; ++r) {
      for (int c = 0; c < tex.width; ++c) {
        if (!tex.valid[static_cast<size_t>(tex.texel_index(r, c))]) continue;
        float* coeffs = tex.texel_coeffs(r, c);
        Vec3 p = tex.texel_center(r, c);
        for (int ch = 0; ch < 3; ++ch) {
          double dc = 0.5;
          switch (spec.tex_mode) {
            case SynthSpec::TexMode::Constant:
              dc = spec.constant_color[static_cast<size_t>(ch)];
              break;
            case SynthSpec::TexMode::Ramp:
              dc = 0.25 + 0.5 * (p.x() + spec.extent / 2) / spec.extent;
              break;
            case SynthSpec::TexMode::Checker: {
              long k = static_cast<long>(std::floor(p.x() / spec.checker_period)) +
                       static_cast<long>(std::floor(p.y() / spec.checker_period)) +
                       static_cast<long>(std::floor(p.z() / spec.checker_period));
              dc = (k % 2 + 2) % 2 == 0 ? 0.8 : 0.2;
              break;
            }
            case SynthSpec::TexMode::RandomSH:
              dc = dc_dist(rng);
              break;
          }
          coeffs[ch * nc + 0] = static_cast<float>(dc / kShC0);
          if (spec.tex_mode == SynthSpec::TexMode::RandomSH) {
            for (int l = 1; l <= set->sh.degree; ++l) {
              std::uniform_real_distribution<double> band(-amps[l], amps[l]);
              for (int m = l * l; m < (l + 1) * (l + 1); ++m)
                coeffs[ch * nc + m] = static_cast<float>(band(rng) / kShC0);
            }
          }
        }
      }
    }
  }
}

}  // namespace

Camera make_lookat_camera(const Vec3& position, const Vec3& target, int width,
                          int height, double focal) {
  Camera cam;
  cam.width = width;
  cam.height = height;
  cam.fx = cam.fy = focal;
  cam.cx = width / 2.0;
  cam.cy = height / 2.0;

  Vec3 forward = (target - position).normalized();
  Vec3 up(0, 0, 1);
  if (std::abs(forward.dot(up)) > 0.999) up = Vec3(0, 1, 0);
  Vec3 right = forward.cross(-up).normalized();  // y points down in image
  Vec3 down = forward.cross(right).normalized();

  cam.T_wc.setIdentity();
  cam.T_wc.block<3, 1>(0, 0) = right;
  cam.T_wc.block<3, 1>(0, 1) = down;
  cam.T_wc.block<3, 1>(0, 2) = forward;
  cam.T_wc.block<3, 1>(0, 3) = position;
  cam.validate();
  return cam;
}

SynthScene build_scene(const SynthSpec& spec) {
  SynthScene scene;
  switch (spec.kind) {
    case SynthSpec::Kind::QuadGrid:
      scene.mesh = quad_grid(spec.grid_n, spec.extent);
      break;
    case SynthSpec::Kind::Icosphere:
      scene.mesh = icosahedron(spec.extent / 2);
      break;
    case SynthSpec::Kind::TwoPlane:
      scene.mesh = two_plane(spec.extent);
      break;
  }
  scene.mesh.build_adjacency();

  scene.gt = allocate_textures(scene.mesh, spec.gt_density, spec.sh);
  fill_gt_textures(spec, scene.mesh, &scene.gt);

  // Jittered ring above the scene, looking at the origin.
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> jit(-spec.jitter, spec.jitter);
  for (int v = 0; v < spec.num_views; ++v) {
    double theta = 2.0 * kPi * v / spec.num_views + jit(rng) * 0.5;
    double r = spec.ring_radius * (1.0 + jit(rng));
    double h = spec.ring_height * (1.0 + jit(rng));
    Vec3 pos(r * std::cos(theta), r * std::sin(theta), h);
    Vec3 target = Vec3(jit(rng), jit(rng), 0) * spec.extent * 0.25;
    scene.cameras.push_back(make_lookat_camera(pos, target, spec.image_width,
                                               spec.image_height, spec.focal));
  }
  return scene;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh '" + path + "'");
  out.precision(17);
  for (const auto& v : mesh.vertices)
    out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void generate_scene(const SynthSpec& spec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "images");

  SynthScene scene = build_scene(spec);
  save_obj(scene.mesh, (fs::path(out_dir) / "mesh.obj").string());
  save_cameras_json(scene.cameras, (fs::path(out_dir) / "cameras.json").string());

  ShadeConfig shade_cfg;
  std::vector<std::string> image_names;
  for (size_t v = 0; v < scene.cameras.size(); ++v) {
    Image img = render(scene.mesh, scene.gt, scene.cameras[v], shade_cfg);
    char name[64];
    std::snprintf(name, sizeof(name), "images/view_%03zu.png", v);
    save_png(img, (fs::path(out_dir) / name).string());
    image_names.emplace_back(name);
  }

  // Ground-truth textures in the same format as training checkpoints.
  save_checkpoint(scene.gt, (fs::path(out_dir) / "gt.mlsh").string());

  nlohmann::json j;
  j["mesh"] = "mesh.obj";
  j["cameras"] = "cameras.json";
  j["images"] = image_names;
  std::ofstream out(fs::path(out_dir) / "scene.json");
  out << j.dump(2) << "\n";
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open synth spec '" + path + "'");
  nlohmann::json j;
  in >> j;
  SynthSpec spec;
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  if (j.contains("kind")) {
    std::string k = j["kind"].get<std::string>();
    if (k == "quad-grid")
      spec.kind = SynthSpec::Kind::QuadGrid;
    else if (k == "icosphere")
      spec.kind = SynthSpec::Kind::Icosphere;
    else if (k == "two-plane")
      spec.kind = SynthSpec::Kind::TwoPlane;
    else
      throw std::runtime_error("unknown scene kind '" + k + "'");
  }
  if (j.contains("texture")) {
    std::string t = j["texture"].get<std::string>();
    if (t == "constant")
      spec.tex_mode = SynthSpec::TexMode::Constant;
    else if (t == "ramp")
      spec.tex_mode = SynthSpec::TexMode::Ramp;
    else if (t == "checker")
      spec.tex_mode = SynthSpec::TexMode::Checker;
    else if (t == "random-sh")
      spec.tex_mode = SynthSpec::TexMode::RandomSH;
    else
      throw std::runtime_error("unknown texture mode '" + t + "'");
  }
  opt("grid_n", spec.grid_n);
  opt("extent", spec.extent);
  opt("gt_density", spec.gt_density);
  opt("sh_degree", spec.sh.degree);
  opt("band1_amp", spec.band1_amp);
  opt("band2_amp", spec.band2_amp);
  opt("band3_amp", spec.band3_amp);
  opt("checker_period", spec.checker_period);
  opt("num_views", spec.num_views);
  opt("ring_radius", spec.ring_radius);
  opt("ring_height", spec.ring_height);
  opt("jitter", spec.jitter);
  opt("image_width", spec.image_width);
  opt("image_height", spec.image_height);
  opt("focal", spec.focal);
  opt("seed", spec.seed);
  return spec;
}

}  // namespace radtex
