// radtex: view-dependent SH textures on triangle meshes.
// Subcommands: synth, train, render, eval, export.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "radtex/adapt.hpp"
#include "radtex/checkpoint.hpp"
#include "radtex/dataset.hpp"
#include "radtex/metrics.hpp"
#include "radtex/parallel.hpp"
#include "radtex/shade.hpp"
#include "radtex/synth.hpp"
#include "radtex/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_config(const std::string& path, const std::vector<std::string>& sets) {
  json cfg = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    in >> cfg;
  }
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json parsed;
    try {
      parsed = json::parse(val);
    } catch (...) {
      parsed = val;  // plain string
    }
    cfg[key] = parsed;
  }
  return cfg;
}

template <typename T>
T cfg_get(const json& cfg, const char* key, T fallback) {
  return cfg.contains(key) ? cfg[key].get<T>() : fallback;
}

radtex::TrainConfig train_config(const json& cfg) {
  radtex::TrainConfig t;
  t.lr = cfg_get(cfg, "lr", t.lr);
  t.beta1 = cfg_get(cfg, "beta1", t.beta1);
  t.beta2 = cfg_get(cfg, "beta2", t.beta2);
  t.eps = cfg_get(cfg, "eps", t.eps);
  t.epochs = cfg_get(cfg, "epochs", t.epochs);
  t.seed = cfg_get(cfg, "seed", t.seed);
  t.shade.lod_threshold = cfg_get(cfg, "lod_threshold", t.shade.lod_threshold);
  t.shade.idw_exponent = cfg_get(cfg, "idw_exponent", t.shade.idw_exponent);
  t.shade.ewa_enabled = cfg_get(cfg, "ewa", t.shade.ewa_enabled);
  return t;
}

radtex::AdaptConfig adapt_config(const json& cfg) {
  radtex::AdaptConfig a;
  a.initial_density = cfg_get(cfg, "density", a.initial_density);
  a.refine_ratio = cfg_get(cfg, "refine_ratio", a.refine_ratio);
  a.additive_update = cfg_get(cfg, "additive_update", a.additive_update);
  a.additive_step = cfg_get(cfg, "additive_step", a.additive_step);
  a.min_density = cfg_get(cfg, "min_density", a.min_density);
  a.converged_fraction = cfg_get(cfg, "converged_fraction", a.converged_fraction);
  a.patience = cfg_get(cfg, "patience", a.patience);
  a.min_pixels = cfg_get(cfg, "min_pixels", a.min_pixels);
  a.max_rounds = cfg_get(cfg, "max_rounds", a.max_rounds);
  return a;
}

void write_train_log(const std::vector<radtex::StepLog>& logs, const std::string& path) {
  std::ofstream out(path);
  out << "epoch,view,loss,psnr\n";
  for (const auto& l : logs)
    out << l.epoch << ',' << l.view << ',' << l.loss << ',' << l.psnr << '\n';
}

int cmd_train(const std::string& scene, const std::string& out_dir, const json& cfg) {
  auto ds = radtex::load_dataset(scene);
  auto mesh = radtex::load_mesh(ds.mesh_path);
  radtex::SHConfig sh{cfg_get(cfg, "sh_degree", 2)};
  auto tcfg = train_config(cfg);
  fs::create_directories(out_dir);

  radtex::TextureSet textures;
  if (cfg_get(cfg, "adaptive", false)) {
    auto acfg = adapt_config(cfg);
    auto result = radtex::adaptive_loop(mesh, ds.views, ds.train_indices, sh, tcfg, acfg);
    textures = std::move(result.textures);
    radtex::write_round_reports_csv(result.rounds, (fs::path(out_dir) / "rounds.csv").string());
    if (result.hit_max_rounds)
      std::cerr << "warning: max rounds exceeded before convergence threshold\n";
  } else {
    textures = radtex::allocate_textures(mesh, cfg_get(cfg, "density", 0.2), sh);
    radtex::AdamState state;
    auto logs = radtex::train_round(mesh, textures, ds.views, ds.train_indices, tcfg, state);
    write_train_log(logs, (fs::path(out_dir) / "train_log.csv").string());
  }
  radtex::save_checkpoint(textures, (fs::path(out_dir) / "checkpoint.mlsh").string());
  std::cout << "checkpoint written to " << (fs::path(out_dir) / "checkpoint.mlsh").string() << "\n";
  return 0;
}

int cmd_render(const std::string& scene, const std::string& ckpt,
               const std::string& out_dir, std::vector<int> views, const json& cfg) {
  auto ds = radtex::load_dataset(scene);
  auto mesh = radtex::load_mesh(ds.mesh_path);
  auto textures = radtex::load_checkpoint(ckpt);
  radtex::ShadeConfig shade = train_config(cfg).shade;
  fs::create_directories(out_dir);
  if (views.empty())
    for (int i = 0; i < static_cast<int>(ds.views.size()); ++i) views.push_back(i);
  for (int v : views) {
    if (v < 0 || v >= static_cast<int>(ds.views.size()))
      throw std::runtime_error("view index " + std::to_string(v) + " out of range");
    auto img = radtex::render(mesh, textures, ds.views[static_cast<size_t>(v)].cam, shade);
    char name[64];
    std::snprintf(name, sizeof(name), "render_%03d.png", v);
    radtex::save_png(img, (fs::path(out_dir) / name).string());
  }
  std::cout << "rendered " << views.size() << " view(s) to " << out_dir << "\n";
  return 0;
}

int cmd_eval(const std::string& scene, const std::string& ckpt,
             const std::string& split, const std::string& out_csv, const json& cfg) {
  auto ds = radtex::load_dataset(scene);
  auto mesh = radtex::load_mesh(ds.mesh_path);
  auto textures = radtex::load_checkpoint(ckpt);
  radtex::ShadeConfig shade = train_config(cfg).shade;

  std::vector<int> indices;
  if (split == "train")
    indices = ds.train_indices;
  else if (split == "test")
    indices = ds.test_indices;
  else if (split == "all") {
    indices = ds.train_indices;
    indices.insert(indices.end(), ds.test_indices.begin(), ds.test_indices.end());
    std::sort(indices.begin(), indices.end());
  } else {
    throw std::runtime_error("split must be train, test, or all");
  }

  std::ofstream out(out_csv);
  if (!out) throw std::runtime_error("cannot write '" + out_csv + "'");
  out << "view,split,psnr,ssim\n";
  double mean_psnr = 0;
  int n = 0;
  for (int v : indices) {
    const auto& view = ds.views[static_cast<size_t>(v)];
    radtex::GBuffer gbuf;
    auto img = radtex::render(mesh, textures, view.cam, shade, &gbuf);
    std::vector<uint8_t> mask(gbuf.px.size());
    for (size_t i = 0; i < mask.size(); ++i) mask[i] = gbuf.px[i].tri >= 0;
    double psnr = radtex::masked_psnr(img, view.target, mask);
    double ssim = radtex::masked_ssim(img, view.target, mask);
    bool is_test = std::find(ds.test_indices.begin(), ds.test_indices.end(), v) !=
                   ds.test_indices.end();
    out << v << ',' << (is_test ? "test" : "train") << ',' << psnr << ',' << ssim << '\n';
    mean_psnr += psnr;
    ++n;
  }
  if (n > 0) std::cout << "mean PSNR (" << split << "): " << mean_psnr / n << " dB\n";
  return 0;
}

int cmd_export(const std::string& ckpt, const std::string& out_dir) {
  auto textures = radtex::load_checkpoint(ckpt);
  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "summary.txt");
  out << "sh_degree " << textures.sh.degree << "\n";
  out << "tri density width height valid coeff_min coeff_max coeff_mean\n";
  for (const auto& t : textures.textures) {
    if (!t.allocated()) continue;
    double lo = 0, hi = 0, sum = 0;
    bool first = true;
    for (float c : t.coeffs) {
      if (first) { lo = hi = c; first = false; }
      lo = std::min(lo, static_cast<double>(c));
      hi = std::max(hi, static_cast<double>(c));
      sum += c;
    }
    out << t.tri << ' ' << t.density << ' ' << t.width << ' ' << t.height << ' '
        << t.valid_count << ' ' << lo << ' ' << hi << ' '
        << (t.coeffs.empty() ? 0.0 : sum / static_cast<double>(t.coeffs.size())) << "\n";
  }
  fs::copy_file(ckpt, fs::path(out_dir) / "checkpoint.mlsh",
                fs::copy_options::overwrite_existing);
  std::cout << "exported to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"view-dependent SH textures on triangle meshes"};
  app.require_subcommand(1);

  std::string scene, out_path, config_path, ckpt, split = "test", spec_path;
  std::vector<std::string> sets;
  std::vector<int> views;
  int threads = 0;
  long seed_override = -1;
  app.add_option("--threads", threads, "worker threads (0 = all cores); does not change results");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", spec_path, "synthetic scene spec (JSON)");
  synth->add_option("--out", out_path, "output directory")->required();
  synth->add_option("--seed", seed_override, "override the spec seed");

  auto* train = app.add_subcommand("train", "optimize SH textures from posed images");
  train->add_option("--scene", scene, "scene JSON")->required();
  train->add_option("--out", out_path, "output directory")->required();
  train->add_option("--config", config_path, "config JSON");
  train->add_option("--set", sets, "config override key=value");

  auto* rnd = app.add_subcommand("render", "render views from a checkpoint");
  rnd->add_option("--scene", scene, "scene JSON")->required();
  rnd->add_option("--checkpoint", ckpt, "texture checkpoint")->required();
  rnd->add_option("--out", out_path, "output directory")->required();
  rnd->add_option("--views", views, "view indices (default: all)");
  rnd->add_option("--config", config_path, "config JSON");
  rnd->add_option("--set", sets, "config override key=value");

  auto* eval = app.add_subcommand("eval", "PSNR/SSIM metrics against a dataset");
  eval->add_option("--scene", scene, "scene JSON")->required();
  eval->add_option("--checkpoint", ckpt, "texture checkpoint")->required();
  eval->add_option("--split", split, "train | test | all");
  eval->add_option("--out", out_path, "metrics CSV path")->required();
  eval->add_option("--config", config_path, "config JSON");
  eval->add_option("--set", sets, "config override key=value");

  auto* exp = app.add_subcommand("export", "human-readable texture summary");
  exp->add_option("--checkpoint", ckpt, "texture checkpoint")->required();
  exp->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);
  radtex::set_num_threads(threads == 0 ? 0 : threads);

  try {
    json cfg = load_config(config_path, sets);
    if (synth->parsed()) {
      radtex::SynthSpec spec =
          spec_path.empty() ? radtex::SynthSpec{} : radtex::load_synth_spec(spec_path);
      if (seed_override >= 0) spec.seed = static_cast<uint64_t>(seed_override);
      radtex::generate_scene(spec, out_path);
      std::cout << "dataset written to " << out_path << "\n";
      return 0;
    }
    if (train->parsed()) return cmd_train(scene, out_path, cfg);
    if (rnd->parsed()) return cmd_render(scene, ckpt, out_path, views, cfg);
    if (eval->parsed()) return cmd_eval(scene, ckpt, split, out_path, cfg);
    if (exp->parsed()) return cmd_export(ckpt, out_path);
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
