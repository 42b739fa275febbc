#include "radtex/shade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radtex/parallel.hpp"
#include "radtex/sh.hpp"

namespace radtex {

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double t = (p - a).dot(ab) / ab.squaredNorm();
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

struct Candidate {
  TexelRef texel;
  Vec3 center;
};

// Eq-style IDW with exponent p; a zero-distance texel wins outright.
std::vector<Contribution> idw(const std::vector<Candidate>& cands, const Vec3& p,
                              double exponent) {
  for (const auto& c : cands) {
    if ((c.center - p).norm() < 1e-12) return {{c.texel, 1.0}};
  }
  std::vector<Contribution> out;
  out.reserve(cands.size());
  double sum = 0;
  for (const auto& c : cands) {
    double w = std::pow((c.center - p).norm(), -exponent);
    out.push_back({c.texel, w});
    sum += w;
  }
  for (auto& c : out) c.weight /= sum;
  return out;
}

// Valid texels of the enclosing grid cell.
void gather_enclosing(const SHTexture& tex, const Vec3& p,
                      std::vector<Candidate>* out) {
  Vec2 uv = tex.uv_of(p);
  int c0 = static_cast<int>(std::floor(uv.x()));
  int r0 = static_cast<int>(std::floor(uv.y()));
  for (int dr = 0; dr <= 1; ++dr)
    for (int dc = 0; dc <= 1; ++dc)
      if (tex.is_valid(r0 + dr, c0 + dc))
        out->push_back({{tex.tri, r0 + dr, c0 + dc}, tex.texel_center(r0 + dr, c0 + dc)});
}

std::vector<Contribution> bilinear(const SHTexture& tex, const Vec3& p) {
  Vec2 uv = tex.uv_of(p);
  int c0 = static_cast<int>(std::floor(uv.x()));
  int r0 = static_cast<int>(std::floor(uv.y()));
  double fu = uv.x() - c0, fv = uv.y() - r0;
  const double w[2][2] = {{(1 - fu) * (1 - fv), fu * (1 - fv)},
                          {(1 - fu) * fv, fu * fv}};
  std::vector<Contribution> out;
  for (int dr = 0; dr <= 1; ++dr)
    for (int dc = 0; dc <= 1; ++dc)
      if (w[dr][dc] > 0)
        out.push_back({{tex.tri, r0 + dr, c0 + dc}, w[dr][dc]});
  return out;
}

struct Conic {
  double A = 1, B = 0, C = 1, F = 1;
  double r_major = 0;
};

Conic ewa_conic(const GBufferPixel& px, double max_radius) {
  const double dux = px.duv_dx.x(), dvx = px.duv_dx.y();
  const double duy = px.duv_dy.x(), dvy = px.duv_dy.y();
  Conic k;
  k.A = dvx * dvx + dvy * dvy;
  k.B = -2.0 * (dux * dvx + duy * dvy);
  k.C = dux * dux + duy * duy;
  k.F = k.A * k.C - 0.25 * k.B * k.B;
  if (k.F <= 1e-12) {
    // Derivatives (near-)parallel: fall back to an isotropic footprint.
    double r = std::max(px.duv_dx.norm(), px.duv_dy.norm());
    r = std::max(r, 1e-6);
    k.A = k.C = 1;
    k.B = 0;
    k.F = r * r;
  }
  double tr = k.A + k.C;
  double det = std::sqrt(std::max(0.0, (k.A - k.C) * (k.A - k.C) + k.B * k.B));
  double lmin = 0.5 * (tr - det);
  k.r_major = std::sqrt(k.F / std::max(lmin, 1e-12));
  if (k.r_major > max_radius) {
    double s2 = (max_radius / k.r_major) * (max_radius / k.r_major);
    k.A *= s2;
    k.B *= s2;
    k.C *= s2;
    k.F *= s2 * s2;
    k.r_major = max_radius;
  }
  return k;
}

}  // namespace

std::vector<int> select_neighbors(const TriangleMesh& mesh, int tri,
                                  Region region, const Vec3& p) {
  const auto& t = mesh.triangles[static_cast<size_t>(tri)];
  if (region == Region::Edge) {
    int best_k = 0;
    double best_d = -1;
    for (int k = 0; k < 3; ++k) {
      double d = point_segment_distance(
          p, mesh.vertices[static_cast<size_t>(t[static_cast<size_t>(k)])],
          mesh.vertices[static_cast<size_t>(t[static_cast<size_t>((k + 1) % 3)])]);
      if (best_d < 0 || d < best_d) {
        best_d = d;
        best_k = k;
      }
    }
    int nb = mesh.edge_neighbor(
        tri, make_edge(t[static_cast<size_t>(best_k)], t[static_cast<size_t>((best_k + 1) % 3)]));
    if (nb < 0) return {};
    return {nb};
  }
  if (region == Region::Corner) {
    int best_v = t[0];
    double best_d = -1;
    for (int k = 0; k < 3; ++k) {
      double d = (p - mesh.vertices[static_cast<size_t>(t[static_cast<size_t>(k)])]).norm();
      if (best_d < 0 || d < best_d) {
        best_d = d;
        best_v = t[static_cast<size_t>(k)];
      }
    }
    std::vector<int> out;
    for (int nb : mesh.vertex_adjacency[static_cast<size_t>(best_v)])
      if (nb != tri) out.push_back(nb);
    return out;
  }
  return {};
}

std::vector<std::pair<TexelRef, double>> self_interpolation_weights(
    const SHTexture& tex, const TriangleMesh& mesh, const Vec3& p,
    double idw_exponent) {
  Region region = classify_region(tex, mesh, p);
  std::vector<Contribution> contribs;
  if (region == Region::Inside) {
    contribs = bilinear(tex, p);
  } else {
    std::vector<Candidate> cands;
    gather_enclosing(tex, p, &cands);
    if (cands.empty()) {
      auto n = nearest_valid_texel(tex, p);
      contribs = {{{tex.tri, n.row, n.col}, 1.0}};
    } else {
      contribs = idw(cands, p, idw_exponent);
    }
  }
  std::vector<std::pair<TexelRef, double>> out;
  out.reserve(contribs.size());
  for (const auto& c : contribs) out.emplace_back(c.texel, c.weight);
  return out;
}

std::vector<Contribution> hybrid_contributions(const TextureSet& textures,
                                               const TriangleMesh& mesh,
                                               const SHTexture& tex,
                                               const Vec3& p, Region region,
                                               const ShadeConfig& cfg) {
  if (region == Region::Inside) return bilinear(tex, p);

  std::vector<Candidate> cands;
  gather_enclosing(tex, p, &cands);
  for (int nb : select_neighbors(mesh, tex.tri, region, p)) {
    const SHTexture* nt = textures.get(nb);
    if (!nt || nt->valid_count < 1) continue;
    auto n = nearest_valid_texel(*nt, p);
    cands.push_back({{nb, n.row, n.col}, nt->texel_center(n.row, n.col)});
  }
  if (cands.empty()) {
    // No reachable texel; degrade to the nearest own texel.
    auto n = nearest_valid_texel(tex, p);
    return {{{tex.tri, n.row, n.col}, 1.0}};
  }
  return idw(cands, p, cfg.idw_exponent);
}

std::vector<Contribution> ewa_contributions(const TextureSet& textures,
                                            const TriangleMesh& mesh,
                                            const SHTexture& tex,
                                            const GBufferPixel& px,
                                            Region region,
                                            const ShadeConfig& cfg) {
  const Conic k = ewa_conic(px, cfg.max_ewa_radius);
  const Vec3& p = px.world_pos;
  const Vec2 uv = tex.uv_of(p);

  std::vector<Contribution> out;
  double sum = 0;
  auto add = [&](const TexelRef& ref, double du, double dv) {
    double q = k.A * du * du + k.B * du * dv + k.C * dv * dv;
    if (q > k.F) return;
    double w = std::exp(-2.0 * q / k.F);
    out.push_back({ref, w});
    sum += w;
  };

  int c0 = std::max(0, static_cast<int>(std::ceil(uv.x() - k.r_major)));
  int c1 = std::min(tex.width - 1, static_cast<int>(std::floor(uv.x() + k.r_major)));
  int r0 = std::max(0, static_cast<int>(std::ceil(uv.y() - k.r_major)));
  int r1 = std::min(tex.height - 1, static_cast<int>(std::floor(uv.y() + k.r_major)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c)
      if (tex.valid[static_cast<size_t>(tex.texel_index(r, c))])
        add({tex.tri, r, c}, c - uv.x(), r - uv.y());

  if (region == Region::Edge || region == Region::Corner) {
    const double cos_gate = std::cos(cfg.normal_gate_deg * kPi / 180.0);
    const Vec3& n_self = mesh.normals[static_cast<size_t>(tex.tri)];
    for (int nb : select_neighbors(mesh, tex.tri, region, p)) {
      const SHTexture* nt = textures.get(nb);
      if (!nt || nt->valid_count < 1) continue;
      if (n_self.dot(mesh.normals[static_cast<size_t>(nb)]) < cos_gate) continue;
      // Neighbor texels evaluated in the self texture's frame (coplanarity
      // assumption, bounded by the normal gate).
      for (int r = 0; r < nt->height; ++r) {
        for (int c = 0; c < nt->width; ++c) {
          if (!nt->valid[static_cast<size_t>(nt->texel_index(r, c))]) continue;
          Vec3 delta = nt->texel_center(r, c) - p;
          add({nb, r, c}, delta.dot(tex.base_dir) / tex.density,
              delta.dot(tex.height_dir) / tex.density);
        }
      }
    }
  }

  if (out.empty()) return {};
  for (auto& c : out) c.weight /= sum;
  return out;
}

PixelShade shade_pixel(const GBufferPixel& px, const TextureSet& textures,
                       const TriangleMesh& mesh, const ShadeConfig& cfg) {
  const SHTexture* tex = textures.get(px.tri);
  if (!tex) throw std::logic_error("shade_pixel: no texture for covered pixel");

  Region region = classify_region(*tex, mesh, px.world_pos);
  if (region == Region::Invalid) region = Region::Edge;  // fp slop on silhouettes

  PixelShade out;
  if (cfg.ewa_enabled && px.lod > cfg.lod_threshold) {
    out.contribs = ewa_contributions(textures, mesh, *tex, px, region, cfg);
    out.used_ewa = !out.contribs.empty();
  }
  if (out.contribs.empty())
    out.contribs = hybrid_contributions(textures, mesh, *tex, px.world_pos, region, cfg);

  out.basis = sh_basis(px.view_dir, textures.sh);
  const int nc = textures.sh.num_coeffs();
  for (const auto& c : out.contribs) {
    const SHTexture* src = textures.get(c.texel.tri);
    const float* coeffs = src->texel_coeffs(c.texel.row, c.texel.col);
    for (int ch = 0; ch < 3; ++ch) {
      double v = 0;
      for (int i = 0; i < nc; ++i) v += out.basis[static_cast<size_t>(i)] * coeffs[ch * nc + i];
      out.rgb_raw[static_cast<size_t>(ch)] += c.weight * v;
    }
  }
  for (int ch = 0; ch < 3; ++ch)
    out.rgb[static_cast<size_t>(ch)] = std::clamp(out.rgb_raw[static_cast<size_t>(ch)], 0.0, 1.0);
  return out;
}

Image shade(const GBuffer& gbuf, const TriangleMesh& mesh,
            const TextureSet& textures, const ShadeConfig& cfg,
            std::vector<PixelShade>* shades_out) {
  Image img(gbuf.width, gbuf.height);
  if (shades_out) {
    shades_out->clear();
    shades_out->resize(gbuf.px.size());
  }
  parallel_chunks(gbuf.height, 16, [&](int row0, int row1) {
    for (int y = row0; y < row1; ++y) {
      for (int x = 0; x < gbuf.width; ++x) {
        const GBufferPixel& px = gbuf.at(x, y);
        float* dst = img.at(x, y);
        if (px.tri < 0) {
          for (int ch = 0; ch < 3; ++ch) dst[ch] = static_cast<float>(cfg.background[static_cast<size_t>(ch)]);
          continue;
        }
        PixelShade s = shade_pixel(px, textures, mesh, cfg);
        for (int ch = 0; ch < 3; ++ch) dst[ch] = static_cast<float>(s.rgb[static_cast<size_t>(ch)]);
        if (shades_out)
          (*shades_out)[static_cast<size_t>(y) * static_cast<size_t>(gbuf.width) + static_cast<size_t>(x)] = std::move(s);
      }
    }
  });
  return img;
}

Image render(const TriangleMesh& mesh, const TextureSet& textures,
             const Camera& cam, const ShadeConfig& cfg, GBuffer* gbuf_out,
             std::vector<PixelShade>* shades_out) {
  GBuffer gbuf = rasterize(mesh, cam, frustum_visible(mesh, cam), textures);
  Image img = shade(gbuf, mesh, textures, cfg, shades_out);
  if (gbuf_out) *gbuf_out = std::move(gbuf);
  return img;
}

}  // namespace radtex
