#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "radtex/adapt.hpp"

using namespace radtex;

TEST_CASE("per_mesh_psnr: exact match caps at 100 dB with zero variance") {
  Image img(8, 8);
  for (auto& v : img.data) v = 0.5f;
  GBuffer gbuf;
  gbuf.width = gbuf.height = 8;
  gbuf.px.resize(64);
  for (auto& px : gbuf.px) px.tri = 0;
  auto stats = per_mesh_psnr({img, img}, {img, img}, {gbuf, gbuf}, 1, 32);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].views_counted == 2);
  CHECK(stats[0].mean == doctest::Approx(100.0));
  CHECK(stats[0].variance == doctest::Approx(0.0));
}

TEST_CASE("per_mesh_psnr: MSE 0.01 gives 20 dB") {
  Image a(8, 8), b(8, 8);
  for (auto& v : b.data) v = 0.1f;  // per-channel diff 0.1 -> MSE 0.01
  GBuffer gbuf;
  gbuf.width = gbuf.height = 8;
  gbuf.px.resize(64);
  for (auto& px : gbuf.px) px.tri = 0;
  auto stats = per_mesh_psnr({a}, {b}, {gbuf}, 1, 32);
  CHECK(stats[0].mean == doctest::Approx(20.0).epsilon(1e-5));
}

TEST_CASE("per_mesh_psnr: views below min_pixels are skipped") {
  Image img(8, 8);
  GBuffer gbuf;
  gbuf.width = gbuf.height = 8;
  gbuf.px.resize(64);
  for (int i = 0; i < 10; ++i) gbuf.px[static_cast<size_t>(i)].tri = 0;  // 10 < 32
  auto stats = per_mesh_psnr({img}, {img}, {gbuf}, 1, 32);
  CHECK(stats[0].views_counted == 0);
  CHECK_FALSE(stats[0].measured());
}

TEST_CASE("density_round_update: accept, patience, revert-converge") {
  AdaptConfig cfg;  // ratio 0.7, patience 1
  std::vector<MeshAdaptState> states(1);
  states[0].density = states[0].prev_density = 0.2;

  // Round 1: first update refines unconditionally.
  std::vector<MeshViewStats> stats{{28.0, 5.0, 4}};
  auto a1 = density_round_update(states, stats, cfg);
  CHECK(a1[0] == AdaptAction::Refined);
  CHECK(states[0].density == doctest::Approx(0.14).epsilon(1e-12));
  CHECK(states[0].prev_density == doctest::Approx(0.2));
  CHECK(states[0].prev_mean == doctest::Approx(28.0));

  // Round 2: mean improved (30 > 28) -> accept and refine again.
  stats[0] = {30.0, 6.0, 4};
  auto a2 = density_round_update(states, stats, cfg);
  CHECK(a2[0] == AdaptAction::Refined);
  CHECK(states[0].density == doctest::Approx(0.098).epsilon(1e-12));
  CHECK(states[0].prev_density == doctest::Approx(0.14));

  // Round 3: worse mean AND higher variance -> patience.
  stats[0] = {29.0, 8.0, 4};
  auto a3 = density_round_update(states, stats, cfg);
  CHECK(a3[0] == AdaptAction::Patience);
  CHECK(states[0].patience_count == 1);
  CHECK(states[0].density == doctest::Approx(0.098));
  CHECK_FALSE(states[0].converged);

  // Round 4: fails again -> revert to last accepted density and converge.
  stats[0] = {28.5, 9.0, 4};
  auto a4 = density_round_update(states, stats, cfg);
  CHECK(a4[0] == AdaptAction::Converged);
  CHECK(states[0].converged);
  CHECK(states[0].density == doctest::Approx(0.14).epsilon(1e-12));

  // Converged meshes never move again.
  stats[0] = {50.0, 0.1, 4};
  auto a5 = density_round_update(states, stats, cfg);
  CHECK(a5[0] == AdaptAction::None);
  CHECK(states[0].density == doctest::Approx(0.14));
}

TEST_CASE("density_round_update: variance decrease alone accepts") {
  AdaptConfig cfg;
  std::vector<MeshAdaptState> states(1);
  states[0].density = states[0].prev_density = 0.2;
  std::vector<MeshViewStats> stats{{30.0, 5.0, 4}};
  density_round_update(states, stats, cfg);  // first refine
  stats[0] = {29.0, 3.0, 4};                 // worse mean, lower variance
  auto a = density_round_update(states, stats, cfg);
  CHECK(a[0] == AdaptAction::Refined);
}

TEST_CASE("density_round_update: floor stops refinement") {
  AdaptConfig cfg;
  cfg.min_density = 0.15;
  std::vector<MeshAdaptState> states(1);
  states[0].density = states[0].prev_density = 0.2;
  std::vector<MeshViewStats> stats{{30.0, 5.0, 4}};
  auto a1 = density_round_update(states, stats, cfg);  // 0.2 -> max(0.14, 0.15)
  CHECK(a1[0] == AdaptAction::Refined);
  CHECK(states[0].density == doctest::Approx(0.15));
  stats[0] = {32.0, 4.0, 4};
  auto a2 = density_round_update(states, stats, cfg);  // cannot go finer
  CHECK(a2[0] == AdaptAction::Converged);
  CHECK(states[0].density == doctest::Approx(0.15));
}

namespace {

struct AdaptScene {
  TriangleMesh mesh;
  std::vector<ViewData> views;
  std::vector<int> train_indices;
};

/// Two disjoint triangles: triangle 0 carries a high-frequency checker DC
/// field, triangle 1 a constant field equal to the fresh-texture DC init so
/// its very first render already reproduces the targets bit-exactly (zero
/// gradients, capped PSNR with zero variance every round).
AdaptScene make_mixed_scene() {
  AdaptScene out;
  out.mesh = testutil::make_mesh(
      {{-2.2, -1, 0}, {-0.2, -1, 0}, {-1.2, 1, 0},
       {0.2, -1, 0}, {2.2, -1, 0}, {1.2, 1, 0}},
      {{0, 1, 2}, {3, 4, 5}});
  auto gt = allocate_textures(out.mesh, 0.05, SHConfig{0});
  for (int tri = 0; tri < 2; ++tri) {
    auto& tex = *gt.get(tri);
    for (int r = 0; r < tex.height; ++r)
      for (int c = 0; c < tex.width; ++c) {
        if (!tex.is_valid(r, c)) continue;
        Vec3 p = tex.texel_center(r, c);
        double v = tri == 1 ? 0.5
                            : ((static_cast<long>(std::floor(p.x() / 0.35)) +
                                static_cast<long>(std::floor(p.y() / 0.35))) % 2
                                   ? 0.85
                                   : 0.15);
        for (int ch = 0; ch < 3; ++ch)
          tex.texel_coeffs(r, c)[ch] = static_cast<float>(v / kShC0);
      }
  }
  ShadeConfig scfg;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> jit(-0.2, 0.2);
  for (int v = 0; v < 6; ++v) {
    ViewData vd;
    vd.cam = testutil::lookat(Vec3(jit(rng), jit(rng), 5.5 + jit(rng)),
                              {0, 0, 0}, 64, 64, 50);
    vd.target = render(out.mesh, gt, vd.cam, scfg);
    out.views.push_back(std::move(vd));
    out.train_indices.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("adaptive_loop: converged fraction 0 exits after the first round") {
  auto scene = make_mixed_scene();
  TrainConfig tcfg;
  tcfg.epochs = 2;
  AdaptConfig acfg;
  acfg.converged_fraction = 0.0;
  auto result = adaptive_loop(scene.mesh, scene.views, scene.train_indices,
                              SHConfig{0}, tcfg, acfg);
  CHECK(result.rounds.size() == 1);
  CHECK_FALSE(result.hit_max_rounds);
}

TEST_CASE("adaptive_loop: high-frequency triangle ends with finer density") {
  auto scene = make_mixed_scene();
  TrainConfig tcfg;
  tcfg.epochs = 8;
  AdaptConfig acfg;
  acfg.initial_density = 0.3;
  acfg.max_rounds = 6;
  acfg.min_pixels = 16;
  auto result = adaptive_loop(scene.mesh, scene.views, scene.train_indices,
                              SHConfig{0}, tcfg, acfg);
  REQUIRE(!result.rounds.empty());
  const auto& final_round = result.rounds.back();
  double d0 = 0, d1 = 0;
  for (const auto& m : final_round.meshes) {
    if (m.mesh == 0) d0 = result.textures.get(0)->density;
    if (m.mesh == 1) d1 = result.textures.get(1)->density;
  }
  CHECK(d0 < d1);  // checkerboard needs finer texels than constant gray
}

TEST_CASE("adaptive_loop: invisible meshes converge at round 0") {
  auto mesh = testutil::make_mesh(
      {{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0, 0.5, 0},
       {100, 100, -50}, {101, 100, -50}, {100, 101, -50}},
      {{0, 1, 2}, {3, 4, 5}});
  auto gt = allocate_textures(mesh, 0.1, SHConfig{0});
  ShadeConfig scfg;
  std::vector<ViewData> views(2);
  views[0].cam = testutil::lookat({0, 0.2, 2}, {0, 0, 0}, 48, 48, 60);
  views[1].cam = testutil::lookat({0.3, 0, 2}, {0, 0, 0}, 48, 48, 60);
  views[0].target = render(mesh, gt, views[0].cam, scfg);
  views[1].target = render(mesh, gt, views[1].cam, scfg);

  TrainConfig tcfg;
  tcfg.epochs = 2;
  AdaptConfig acfg;
  acfg.max_rounds = 3;
  auto result = adaptive_loop(mesh, views, {0, 1}, SHConfig{0}, tcfg, acfg);
  for (const auto& round : result.rounds) {
    const auto& m1 = round.meshes[1];
    CHECK(m1.converged);
    CHECK(m1.action == AdaptAction::None);
  }
  CHECK(result.textures.get(1)->density == doctest::Approx(acfg.initial_density));
}

TEST_CASE("adaptive_loop: logged trace matches a hand simulation") {
  auto scene = make_mixed_scene();
  TrainConfig tcfg;
  tcfg.epochs = 5;
  AdaptConfig acfg;
  acfg.initial_density = 0.25;
  acfg.max_rounds = 5;
  acfg.min_pixels = 16;
  auto result = adaptive_loop(scene.mesh, scene.views, scene.train_indices,
                              SHConfig{0}, tcfg, acfg);

  // Replay Algorithm 1's bookkeeping from the logged per-round statistics and
  // confirm the recorded actions and densities agree.
  std::vector<MeshAdaptState> sim(2);
  for (auto& st : sim) st.density = st.prev_density = acfg.initial_density;
  for (const auto& round : result.rounds) {
    std::vector<MeshViewStats> stats(2);
    for (const auto& m : round.meshes) {
      CHECK(sim[static_cast<size_t>(m.mesh)].density == doctest::Approx(m.density).epsilon(1e-12));
      stats[static_cast<size_t>(m.mesh)] = {m.mean, m.variance,
                                            sim[static_cast<size_t>(m.mesh)].converged ? 0 : 1};
    }
    auto actions = density_round_update(sim, stats, acfg);
    for (const auto& m : round.meshes)
      CHECK(actions[static_cast<size_t>(m.mesh)] == m.action);
  }
}

TEST_CASE("write_round_reports_csv emits one line per mesh per round") {
  testutil::TempDir dir("rounds");
  std::vector<RoundReport> rounds(2);
  rounds[0].round = 1;
  rounds[0].meshes = {{0, 0.2, 30.0, 2.0, 0, false, AdaptAction::Refined}};
  rounds[1].round = 2;
  rounds[1].meshes = {{0, 0.14, 31.0, 1.5, 0, true, AdaptAction::Converged}};
  write_round_reports_csv(rounds, dir.file("r.csv"));
  std::ifstream in(dir.file("r.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);  // header + 2
}
