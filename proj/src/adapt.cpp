#include "radtex/adapt.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "radtex/metrics.hpp"

namespace radtex {

std::vector<MeshViewStats> per_mesh_psnr(const std::vector<Image>& renders,
                                         const std::vector<Image>& targets,
                                         const std::vector<GBuffer>& gbufs,
                                         int num_meshes, int min_pixels) {
  if (renders.size() != targets.size() || renders.size() != gbufs.size())
    throw std::invalid_argument("per_mesh_psnr: misaligned inputs");

  std::vector<std::vector<double>> psnrs(static_cast<size_t>(num_meshes));
  std::vector<double> se(static_cast<size_t>(num_meshes));
  std::vector<int> count(static_cast<size_t>(num_meshes));

  for (size_t v = 0; v < renders.size(); ++v) {
    std::fill(se.begin(), se.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    const GBuffer& g = gbufs[v];
    for (size_t i = 0; i < g.px.size(); ++i) {
      int m = g.px[i].tri;
      if (m < 0 || m >= num_meshes) continue;
      ++count[static_cast<size_t>(m)];
      for (size_t ch = 0; ch < 3; ++ch) {
        double d = static_cast<double>(renders[v].data[i * 3 + ch]) -
                   static_cast<double>(targets[v].data[i * 3 + ch]);
        se[static_cast<size_t>(m)] += d * d;
      }
    }
    for (int m = 0; m < num_meshes; ++m) {
      if (count[static_cast<size_t>(m)] < min_pixels) continue;
      double mse = se[static_cast<size_t>(m)] / (3.0 * count[static_cast<size_t>(m)]);
      double psnr = mse <= 0 ? kPsnrCap : std::min(kPsnrCap, -10.0 * std::log10(mse));
      psnrs[static_cast<size_t>(m)].push_back(psnr);
    }
  }

  std::vector<MeshViewStats> out(static_cast<size_t>(num_meshes));
  for (int m = 0; m < num_meshes; ++m) {
    const auto& p = psnrs[static_cast<size_t>(m)];
    auto& s = out[static_cast<size_t>(m)];
    s.views_counted = static_cast<int>(p.size());
    if (p.empty()) continue;
    for (double x : p) s.mean += x;
    s.mean /= static_cast<double>(p.size());
    for (double x : p) s.variance += (x - s.mean) * (x - s.mean);
    s.variance /= static_cast<double>(p.size());
  }
  return out;
}

namespace {

double refined_density(double density, const AdaptConfig& cfg) {
  double next = cfg.additive_update ? density + cfg.additive_step
                                    : density * cfg.refine_ratio;
  return std::max(next, cfg.min_density);
}

}  // namespace

std::vector<AdaptAction> density_round_update(std::vector<MeshAdaptState>& states,
                                              const std::vector<MeshViewStats>& stats,
                                              const AdaptConfig& cfg) {
  if (states.size() != stats.size())
    throw std::invalid_argument("density_round_update: misaligned inputs");

  std::vector<AdaptAction> actions(states.size(), AdaptAction::None);
  for (size_t i = 0; i < states.size(); ++i) {
    MeshAdaptState& st = states[i];
    const MeshViewStats& cur = stats[i];
    if (st.converged || !cur.measured()) continue;

    auto refine = [&] {
      double next = refined_density(st.density, cfg);
      if (next >= st.density) {
        // Already at the floor; nothing finer to try.
        st.converged = true;
        st.prev_density = st.density;
        actions[i] = AdaptAction::Converged;
        return;
      }
      st.prev_density = st.density;
      st.prev_mean = cur.mean;
      st.prev_variance = cur.variance;
      st.density = next;
      st.patience_count = 0;
      actions[i] = AdaptAction::Refined;
    };

    if (!st.first_update_done) {
      st.first_update_done = true;
      refine();
    } else if (cur.mean > st.prev_mean || cur.variance < st.prev_variance) {
      refine();
    } else if (st.patience_count < cfg.patience) {
      ++st.patience_count;
      actions[i] = AdaptAction::Patience;
    } else {
      st.density = st.prev_density;
      st.converged = true;
      actions[i] = AdaptAction::Converged;
    }
  }
  return actions;
}

AdaptiveResult adaptive_loop(const TriangleMesh& mesh,
                             const std::vector<ViewData>& views,
                             const std::vector<int>& train_indices,
                             const SHConfig& sh, const TrainConfig& tcfg,
                             const AdaptConfig& acfg) {
  const int n = mesh.num_triangles();
  AdaptiveResult result;
  result.textures = allocate_textures(mesh, acfg.initial_density, sh);

  std::vector<MeshAdaptState> states(static_cast<size_t>(n));
  for (auto& st : states) st.density = st.prev_density = acfg.initial_density;

  // Triangles with no coverage in any training view carry no signal.
  std::vector<uint8_t> ever_covered(static_cast<size_t>(n), 0);
  for (int vi : train_indices) {
    const auto& view = views[static_cast<size_t>(vi)];
    GBuffer g = rasterize(mesh, view.cam, frustum_visible(mesh, view.cam), result.textures);
    for (const auto& px : g.px)
      if (px.tri >= 0) ever_covered[static_cast<size_t>(px.tri)] = 1;
  }
  int num_converged = 0;
  for (int m = 0; m < n; ++m) {
    if (!ever_covered[static_cast<size_t>(m)] || mesh.degenerate[static_cast<size_t>(m)]) {
      states[static_cast<size_t>(m)].converged = true;
      ++num_converged;
    }
  }

  for (int round = 1; round <= acfg.max_rounds; ++round) {
    AdamState optim;  // densities changed; moments restart each round
    TrainConfig round_cfg = tcfg;
    round_cfg.seed = tcfg.seed + static_cast<uint64_t>(round);
    train_round(mesh, result.textures, views, train_indices, round_cfg, optim);

    std::vector<Image> renders, targets;
    std::vector<GBuffer> gbufs;
    for (int vi : train_indices) {
      const auto& view = views[static_cast<size_t>(vi)];
      GBuffer g;
      renders.push_back(render(mesh, result.textures, view.cam, tcfg.shade, &g));
      gbufs.push_back(std::move(g));
      targets.push_back(view.target);
    }
    auto stats = per_mesh_psnr(renders, targets, gbufs, n, acfg.min_pixels);

    std::vector<double> round_density(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) round_density[static_cast<size_t>(m)] = states[static_cast<size_t>(m)].density;

    auto actions = density_round_update(states, stats, acfg);

    RoundReport report;
    report.round = round;
    for (int m = 0; m < n; ++m) {
      const auto& st = states[static_cast<size_t>(m)];
      report.meshes.push_back({m, round_density[static_cast<size_t>(m)], stats[static_cast<size_t>(m)].mean,
                               stats[static_cast<size_t>(m)].variance, st.patience_count,
                               st.converged, actions[static_cast<size_t>(m)]});
      if (actions[static_cast<size_t>(m)] == AdaptAction::Converged) ++num_converged;
      // Refined meshes and reverted densities both need new resolutions.
      if (actions[static_cast<size_t>(m)] == AdaptAction::Refined ||
          (actions[static_cast<size_t>(m)] == AdaptAction::Converged &&
           st.density != round_density[static_cast<size_t>(m)])) {
        SHTexture* tex = result.textures.get(m);
        if (tex) *tex = resample_texture(mesh, *tex, st.density, sh);
      }
    }
    report.num_converged = num_converged;
    result.rounds.push_back(std::move(report));

    if (static_cast<double>(num_converged) / static_cast<double>(n) >=
        acfg.converged_fraction)
      return result;
  }
  result.hit_max_rounds = true;
  return result;
}

void write_round_reports_csv(const std::vector<RoundReport>& rounds,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write round report '" + path + "'");
  out << "round,mesh,density,psnr_mean,psnr_variance,patience,converged,action\n";
  auto action_name = [](AdaptAction a) {
    switch (a) {
      case AdaptAction::Refined: return "refined";
      case AdaptAction::Patience: return "patience";
      case AdaptAction::Converged: return "converged";
      default: return "none";
    }
  };
  for (const auto& r : rounds)
    for (const auto& m : r.meshes)
      out << r.round << ',' << m.mesh << ',' << m.density << ',' << m.mean << ','
          << m.variance << ',' << m.patience_count << ',' << (m.converged ? 1 : 0)
          << ',' << action_name(m.action) << '\n';
}

}  // namespace radtex
