#pragma once

#include <vector>

#include "radtex/train.hpp"

namespace radtex {

struct AdaptConfig {
  double initial_density = 0.2;      // meters
  double refine_ratio = 0.7;         // refinement multiplies spacing by this
  bool additive_update = false;      // literal spacing += step instead
  double additive_step = 0.05;
  double min_density = 1e-3;         // refinement floor, meters
  double converged_fraction = 0.95;  // stop once this share has converged
  int patience = 1;
  int min_pixels = 32;               // views covering fewer pixels are skipped
  int max_rounds = 8;
};

struct MeshViewStats {
  double mean = 0;
  double variance = 0;  // population variance across counted views
  int views_counted = 0;
  bool measured() const { return views_counted > 0; }
};

/// Per-mesh PSNR mean/variance across views, restricted to pixels the mesh
/// covers; views covering fewer than min_pixels are skipped for that mesh.
std::vector<MeshViewStats> per_mesh_psnr(const std::vector<Image>& renders,
                                         const std::vector<Image>& targets,
                                         const std::vector<GBuffer>& gbufs,
                                         int num_meshes, int min_pixels);

enum class AdaptAction { None, Refined, Patience, Converged };

struct MeshAdaptState {
  double density = 0;
  double prev_density = 0;  // last accepted density
  double prev_mean = 0;
  double prev_variance = 0;
  int patience_count = 0;
  bool converged = false;
  bool first_update_done = false;
};

/// One round of density bookkeeping. First measured round refines
/// unconditionally; afterwards mean-improved OR variance-decreased refines
/// and resets patience, exhausted patience reverts to the last accepted
/// density and marks the mesh converged. Returns the action per mesh;
/// Refined and Converged-with-revert require resampling by the caller.
std::vector<AdaptAction> density_round_update(std::vector<MeshAdaptState>& states,
                                              const std::vector<MeshViewStats>& stats,
                                              const AdaptConfig& cfg);

struct RoundMeshReport {
  int mesh = 0;
  double density = 0;  // density used during this round's training
  double mean = 0;
  double variance = 0;
  int patience_count = 0;
  bool converged = false;
  AdaptAction action = AdaptAction::None;
};

struct RoundReport {
  int round = 0;
  std::vector<RoundMeshReport> meshes;
  int num_converged = 0;
};

struct AdaptiveResult {
  TextureSet textures;
  std::vector<RoundReport> rounds;
  bool hit_max_rounds = false;
};

/// Alternates training rounds with density updates until the converged
/// fraction reaches the threshold or max_rounds is exhausted. Meshes never
/// covered in any training view are converged from the start (counted in
/// both numerator and denominator of the fraction).
AdaptiveResult adaptive_loop(const TriangleMesh& mesh,
                             const std::vector<ViewData>& views,
                             const std::vector<int>& train_indices,
                             const SHConfig& sh, const TrainConfig& tcfg,
                             const AdaptConfig& acfg);

void write_round_reports_csv(const std::vector<RoundReport>& rounds,
                             const std::string& path);

}  // namespace radtex
