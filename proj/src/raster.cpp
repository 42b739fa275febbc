#include "radtex/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radtex/parallel.hpp"

namespace radtex {

namespace {

double edge_fn(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

// Interior is where the edge function is positive; a zero pixel belongs to
// the triangle only on top or left edges so shared edges are owned once.
bool covers(double e, const Vec2& a, const Vec2& b) {
  if (e > 0) return true;
  if (e < 0) return false;
  double dx = b.x() - a.x(), dy = b.y() - a.y();
  return (dy == 0 && dx > 0) || dy < 0;
}

struct TriScreen {
  int tri = -1;
  int vids[3];          // vertex ids in orientation-normalized order
  Vec2 s[3];            // screen positions
  double z[3];          // camera depths
  bool all_front = false;
  int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inclusive pixel bbox
};

}  // namespace

void uv_derivatives(const TriangleMesh& mesh, const Camera& cam,
                    const SHTexture& tex, double x, double y, Vec2* duv_dx,
                    Vec2* duv_dy) {
  const Mat3 R = cam.rotation();
  const Vec3 o = cam.center();
  const Vec3& n = mesh.normals[static_cast<size_t>(tex.tri)];
  const Vec3 q0 = mesh.vertices[static_cast<size_t>(
      mesh.triangles[static_cast<size_t>(tex.tri)][0])];

  Vec3 d = R * Vec3((x - cam.cx) / cam.fx, (y - cam.cy) / cam.fy, 1.0);
  Vec3 dd_dx = R.col(0) / cam.fx;
  Vec3 dd_dy = R.col(1) / cam.fy;

  double dn = d.dot(n);
  double a = (q0 - o).dot(n);
  double t = a / dn;
  Vec3 dP_dx = (-a * dd_dx.dot(n) / (dn * dn)) * d + t * dd_dx;
  Vec3 dP_dy = (-a * dd_dy.dot(n) / (dn * dn)) * d + t * dd_dy;

  *duv_dx = Vec2(dP_dx.dot(tex.base_dir), dP_dx.dot(tex.height_dir)) / tex.density;
  *duv_dy = Vec2(dP_dy.dot(tex.base_dir), dP_dy.dot(tex.height_dir)) / tex.density;
}

double lod_level(const Vec2& duv_dx, const Vec2& duv_dy) {
  double m = std::max(duv_dx.norm(), duv_dy.norm());
  return std::log2(std::max(m, 1e-12));
}

GBuffer rasterize(const TriangleMesh& mesh, const Camera& cam,
                  const std::vector<int>& visible, const TextureSet& textures,
                  double z_near) {
  GBuffer g;
  g.width = cam.width;
  g.height = cam.height;
  g.px.assign(static_cast<size_t>(g.width) * static_cast<size_t>(g.height), {});
  for (auto& p : g.px) p.depth = std::numeric_limits<double>::infinity();

  std::vector<TriScreen> tris;
  tris.reserve(visible.size());
  for (int t : visible) {
    if (mesh.degenerate[static_cast<size_t>(t)] || !textures.get(t)) continue;
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    TriScreen ts;
    ts.tri = t;
    Vec3 pc[3];
    int front = 0;
    for (int k = 0; k < 3; ++k) {
      ts.vids[k] = tri[static_cast<size_t>(k)];
      pc[k] = cam.world_to_camera(mesh.vertices[static_cast<size_t>(ts.vids[k])]);
      if (pc[k].z() > z_near) ++front;
    }
    if (front == 0) continue;
    ts.all_front = front == 3;

    double xmin, xmax, ymin, ymax;
    if (ts.all_front) {
      for (int k = 0; k < 3; ++k) {
        ts.z[k] = pc[k].z();
        ts.s[k] = Vec2(cam.fx * pc[k].x() / pc[k].z() + cam.cx,
                       cam.fy * pc[k].y() / pc[k].z() + cam.cy);
      }
      if (edge_fn(ts.s[0], ts.s[1], ts.s[2]) == 0) continue;
      if (edge_fn(ts.s[0], ts.s[1], ts.s[2]) < 0) {
        std::swap(ts.s[1], ts.s[2]);
        std::swap(ts.z[1], ts.z[2]);
        std::swap(ts.vids[1], ts.vids[2]);
      }
      xmin = std::min({ts.s[0].x(), ts.s[1].x(), ts.s[2].x()});
      xmax = std::max({ts.s[0].x(), ts.s[1].x(), ts.s[2].x()});
      ymin = std::min({ts.s[0].y(), ts.s[1].y(), ts.s[2].y()});
      ymax = std::max({ts.s[0].y(), ts.s[1].y(), ts.s[2].y()});
    } else {
      // Straddles the near plane: bound by the clipped polygon, shade by
      // per-pixel ray casting inside the bound.
      xmin = ymin = std::numeric_limits<double>::infinity();
      xmax = ymax = -xmin;
      for (int k = 0; k < 3; ++k) {
        const Vec3& a = pc[k];
        const Vec3& b = pc[(k + 1) % 3];
        auto add = [&](const Vec3& p) {
          double sx = cam.fx * p.x() / p.z() + cam.cx;
          double sy = cam.fy * p.y() / p.z() + cam.cy;
          xmin = std::min(xmin, sx);
          xmax = std::max(xmax, sx);
          ymin = std::min(ymin, sy);
          ymax = std::max(ymax, sy);
        };
        if (a.z() > z_near) add(a);
        if ((a.z() > z_near) != (b.z() > z_near))
          add(a + (z_near - a.z()) / (b.z() - a.z()) * (b - a));
      }
    }
    ts.x0 = std::max(0, static_cast<int>(std::floor(xmin - 0.5)));
    ts.x1 = std::min(g.width - 1, static_cast<int>(std::ceil(xmax - 0.5)));
    ts.y0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
    ts.y1 = std::min(g.height - 1, static_cast<int>(std::ceil(ymax - 0.5)));
    if (ts.x0 > ts.x1 || ts.y0 > ts.y1) continue;
    tris.push_back(ts);
  }

  const Vec3 cam_center = cam.center();
  const Mat3 R = cam.rotation();

  auto fill_pixel = [&](GBufferPixel& px, const TriScreen& ts, double depth,
                        const Vec3& world_pos, double pxx, double pxy) {
    px.tri = ts.tri;
    px.depth = depth;
    px.world_pos = world_pos;
    px.view_dir = (cam_center - world_pos).normalized();
    const SHTexture& tex = *textures.get(ts.tri);
    Vec2 uv = tex.uv_of(world_pos);
    px.u = uv.x();
    px.v = uv.y();
    uv_derivatives(mesh, cam, tex, pxx, pxy, &px.duv_dx, &px.duv_dy);
    px.lod = lod_level(px.duv_dx, px.duv_dy);
  };

  // Row bands own disjoint z-buffer regions; every band scans the same
  // triangle list in the same order, so output is thread-count independent.
  parallel_chunks(g.height, 16, [&](int row0, int row1) {
    for (const TriScreen& ts : tris) {
      if (ts.y1 < row0 || ts.y0 >= row1) continue;
      int ya = std::max(ts.y0, row0);
      int yb = std::min(ts.y1, row1 - 1);
      for (int iy = ya; iy <= yb; ++iy) {
        for (int ix = ts.x0; ix <= ts.x1; ++ix) {
          const Vec2 p(ix + 0.5, iy + 0.5);
          GBufferPixel& px = g.at(ix, iy);
          if (ts.all_front) {
            double w0 = edge_fn(ts.s[1], ts.s[2], p);
            double w1 = edge_fn(ts.s[2], ts.s[0], p);
            double w2 = edge_fn(ts.s[0], ts.s[1], p);
            if (!covers(w0, ts.s[1], ts.s[2]) || !covers(w1, ts.s[2], ts.s[0]) ||
                !covers(w2, ts.s[0], ts.s[1]))
              continue;
            // Perspective-correct barycentrics.
            double b0 = w0 / ts.z[0], b1 = w1 / ts.z[1], b2 = w2 / ts.z[2];
            double s = b0 + b1 + b2;
            b0 /= s;
            b1 /= s;
            b2 /= s;
            Vec3 world_pos = b0 * mesh.vertices[static_cast<size_t>(ts.vids[0])] +
                             b1 * mesh.vertices[static_cast<size_t>(ts.vids[1])] +
                             b2 * mesh.vertices[static_cast<size_t>(ts.vids[2])];
            double depth = b0 * ts.z[0] + b1 * ts.z[1] + b2 * ts.z[2];
            if (depth <= z_near || depth >= px.depth) continue;
            fill_pixel(px, ts, depth, world_pos, p.x(), p.y());
          } else {
            // Ray cast through the pixel center.
            Vec3 d = R * Vec3((p.x() - cam.cx) / cam.fx, (p.y() - cam.cy) / cam.fy, 1.0);
            const Vec3& n = mesh.normals[static_cast<size_t>(ts.tri)];
            double dn = d.dot(n);
            if (dn == 0) continue;
            const Vec3& q0 = mesh.vertices[static_cast<size_t>(ts.vids[0])];
            double depth = (q0 - cam_center).dot(n) / dn;  // = camera Z
            if (depth <= z_near || depth >= px.depth) continue;
            Vec3 world_pos = cam_center + depth * d;
            auto bc = barycentric(q0, mesh.vertices[static_cast<size_t>(ts.vids[1])],
                                  mesh.vertices[static_cast<size_t>(ts.vids[2])],
                                  world_pos);
            if (bc[0] < 0 || bc[1] < 0 || bc[2] < 0) continue;
            fill_pixel(px, ts, depth, world_pos, p.x(), p.y());
          }
        }
      }
    }
  });

  for (auto& p : g.px)
    if (p.tri < 0) p.depth = 0;
  return g;
}

}  // namespace radtex
