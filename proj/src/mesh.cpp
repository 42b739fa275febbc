#include "radtex/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radtex {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("failed to load mesh '" + path + "': " + what);
}

TriangleMesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail(path, "cannot open file");
  TriangleMesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z()))
        parse_fail(path, "bad vertex at line " + std::to_string(lineno));
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // accept "i", "i/t", "i/t/n", "i//n"
        int v = 0;
        try {
          v = std::stoi(tok.substr(0, tok.find('/')));
        } catch (...) {
          parse_fail(path, "bad face index at line " + std::to_string(lineno));
        }
        if (v < 0) v = static_cast<int>(mesh.vertices.size()) + v + 1;
        idx.push_back(v - 1);  // OBJ is 1-based
      }
      if (idx.size() != 3)
        parse_fail(path, "non-triangular face at line " + std::to_string(lineno));
      mesh.triangles.push_back({idx[0], idx[1], idx[2]});
    }
  }
  return mesh;
}

struct PlyProperty {
  std::string type;
  std::string name;
  bool is_list = false;
  std::string count_type;
};

size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw std::runtime_error("unknown PLY type " + t);
}

double read_binary_value(std::istream& in, const std::string& type) {
  unsigned char buf[8];
  size_t n = ply_type_size(type);
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated PLY payload");
  auto as = [&](auto v) {
    std::memcpy(&v, buf, sizeof(v));
    return static_cast<double>(v);
  };
  if (type == "char" || type == "int8") return as(int8_t{});
  if (type == "uchar" || type == "uint8") return as(uint8_t{});
  if (type == "short" || type == "int16") return as(int16_t{});
  if (type == "ushort" || type == "uint16") return as(uint16_t{});
  if (type == "int" || type == "int32") return as(int32_t{});
  if (type == "uint" || type == "uint32") return as(uint32_t{});
  if (type == "float" || type == "float32") return as(float{});
  return as(double{});
}

TriangleMesh load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail(path, "cannot open file");
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) parse_fail(path, "missing ply magic");

  enum class Fmt { Ascii, BinaryLE } fmt = Fmt::Ascii;
  struct Element {
    std::string name;
    size_t count = 0;
    std::vector<PlyProperty> props;
  };
  std::vector<Element> elements;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "format") {
      std::string f;
      ss >> f;
      if (f == "ascii")
        fmt = Fmt::Ascii;
      else if (f == "binary_little_endian")
        fmt = Fmt::BinaryLE;
      else
        parse_fail(path, "unsupported PLY format " + f);
    } else if (tag == "element") {
      Element e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) parse_fail(path, "property before element");
      PlyProperty p;
      ss >> p.type;
      if (p.type == "list") {
        p.is_list = true;
        ss >> p.count_type >> p.type >> p.name;
      } else {
        ss >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    }
  }

  TriangleMesh mesh;
  auto read_value = [&](std::istringstream* ascii, const std::string& type) {
    if (fmt == Fmt::Ascii) {
      double v;
      if (!(*ascii >> v)) throw std::runtime_error("truncated PLY payload");
      return v;
    }
    return read_binary_value(in, type);
  };

  try {
    for (const auto& e : elements) {
      for (size_t i = 0; i < e.count; ++i) {
        std::istringstream ascii;
        if (fmt == Fmt::Ascii) {
          if (!std::getline(in, line)) throw std::runtime_error("truncated PLY payload");
          ascii.str(line);
        }
        Vec3 p = Vec3::Zero();
        bool has_xyz = false;
        for (const auto& prop : e.props) {
          if (prop.is_list) {
            int n = static_cast<int>(read_value(&ascii, prop.count_type));
            std::vector<double> vals(static_cast<size_t>(n));
            for (auto& v : vals) v = read_value(&ascii, prop.type);
            if (e.name == "face" &&
                (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
              if (n != 3) parse_fail(path, "non-triangular face (quads are rejected)");
              mesh.triangles.push_back({static_cast<int>(vals[0]),
                                        static_cast<int>(vals[1]),
                                        static_cast<int>(vals[2])});
            }
          } else {
            double v = read_value(&ascii, prop.type);
            if (e.name == "vertex") {
              if (prop.name == "x") { p.x() = v; has_xyz = true; }
              if (prop.name == "y") p.y() = v;
              if (prop.name == "z") p.z() = v;
            }
          }
        }
        if (e.name == "vertex" && has_xyz) mesh.vertices.push_back(p);
      }
    }
  } catch (const std::exception& ex) {
    parse_fail(path, ex.what());
  }
  return mesh;
}

}  // namespace

int TriangleMesh::edge_neighbor(int tri, const EdgeKey& e) const {
  auto it = edge_adjacency.find(e);
  if (it == edge_adjacency.end()) return -1;
  if (it->second.first == tri) return it->second.second;
  if (it->second.second == tri) return it->second.first;
  return -1;
}

Vec3 TriangleMesh::centroid(int tri) const {
  const auto& t = triangles[static_cast<size_t>(tri)];
  return (vertices[static_cast<size_t>(t[0])] + vertices[static_cast<size_t>(t[1])] +
          vertices[static_cast<size_t>(t[2])]) /
         3.0;
}

void TriangleMesh::build_adjacency() {
  const int nv = num_vertices();
  normals.assign(triangles.size(), Vec3::Zero());
  areas.assign(triangles.size(), 0.0);
  degenerate.assign(triangles.size(), false);
  edge_adjacency.clear();
  vertex_adjacency.assign(static_cast<size_t>(nv), {});
  nonmanifold_ignored = 0;

  for (int t = 0; t < num_triangles(); ++t) {
    const auto& tri = triangles[static_cast<size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      if (tri[static_cast<size_t>(k)] < 0 || tri[static_cast<size_t>(k)] >= nv)
        throw std::runtime_error("triangle " + std::to_string(t) +
                                 " references out-of-range vertex");
    }
    const Vec3& a = vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = vertices[static_cast<size_t>(tri[2])];
    Vec3 n = (b - a).cross(c - a);
    double area = 0.5 * n.norm();
    areas[static_cast<size_t>(t)] = area;
    if (area <= kDegenerateArea) {
      degenerate[static_cast<size_t>(t)] = true;
    } else {
      normals[static_cast<size_t>(t)] = n.normalized();
    }

    for (int k = 0; k < 3; ++k) {
      EdgeKey e = make_edge(tri[static_cast<size_t>(k)], tri[static_cast<size_t>((k + 1) % 3)]);
      auto it = edge_adjacency.find(e);
      if (it == edge_adjacency.end()) {
        edge_adjacency[e] = {t, -1};
      } else if (it->second.second < 0) {
        it->second.second = t;
      } else {
        ++nonmanifold_ignored;
      }
      vertex_adjacency[static_cast<size_t>(tri[static_cast<size_t>(k)])].push_back(t);
    }
  }
  for (auto& adj : vertex_adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
}

TriangleMesh load_mesh(const std::string& path) {
  TriangleMesh mesh;
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == "obj")
    mesh = load_obj(path);
  else if (ext == "ply")
    mesh = load_ply(path);
  else
    parse_fail(path, "unsupported extension '" + ext + "' (OBJ or PLY only)");
  mesh.build_adjacency();
  return mesh;
}

std::array<double, 3> barycentric(const Vec3& a, const Vec3& b, const Vec3& c,
                                  const Vec3& p) {
  Vec3 v0 = b - a, v1 = c - a, v2 = p - a;
  double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  double d20 = v2.dot(v0), d21 = v2.dot(v1);
  double denom = d00 * d11 - d01 * d01;
  double v = (d11 * d20 - d01 * d21) / denom;
  double w = (d00 * d21 - d01 * d20) / denom;
  return {1.0 - v - w, v, w};
}

bool point_in_triangle(const TriangleMesh& mesh, int tri, const Vec3& p,
                       double eps_bary, double eps_plane) {
  if (mesh.degenerate[static_cast<size_t>(tri)]) return false;
  const auto& t = mesh.triangles[static_cast<size_t>(tri)];
  const Vec3& a = mesh.vertices[static_cast<size_t>(t[0])];
  if (std::abs((p - a).dot(mesh.normals[static_cast<size_t>(tri)])) > eps_plane)
    return false;
  auto bc = barycentric(a, mesh.vertices[static_cast<size_t>(t[1])],
                        mesh.vertices[static_cast<size_t>(t[2])], p);
  return bc[0] >= -eps_bary && bc[1] >= -eps_bary && bc[2] >= -eps_bary;
}

TriangleFrame triangle_frame(const TriangleMesh& mesh, int tri) {
  if (mesh.degenerate[static_cast<size_t>(tri)])
    throw std::runtime_error("triangle_frame: triangle " + std::to_string(tri) +
                             " is degenerate");
  const auto& t = mesh.triangles[static_cast<size_t>(tri)];

  // Longest edge wins; ties go to the smallest (min id, max id) edge key.
  EdgeKey best_key{-1, -1};
  double best_len = -1.0;
  int best_apex = -1;
  for (int k = 0; k < 3; ++k) {
    int i = t[static_cast<size_t>(k)];
    int j = t[static_cast<size_t>((k + 1) % 3)];
    int apex = t[static_cast<size_t>((k + 2) % 3)];
    EdgeKey key = make_edge(i, j);
    double len = (mesh.vertices[static_cast<size_t>(i)] -
                  mesh.vertices[static_cast<size_t>(j)])
                     .norm();
    if (len > best_len + 1e-15 ||
        (std::abs(len - best_len) <= 1e-15 && key < best_key)) {
      best_len = len;
      best_key = key;
      best_apex = apex;
    }
  }

  TriangleFrame f;
  f.base_start = best_key.first;
  f.base_end = best_key.second;
  f.apex = best_apex;
  const Vec3& a = mesh.vertices[static_cast<size_t>(f.base_start)];
  const Vec3& b = mesh.vertices[static_cast<size_t>(f.base_end)];
  const Vec3& c = mesh.vertices[static_cast<size_t>(f.apex)];
  f.base_length = (b - a).norm();
  f.base_dir = (b - a) / f.base_length;
  f.foot = a + (c - a).dot(f.base_dir) * f.base_dir;
  f.height_length = (c - f.foot).norm();
  f.height_dir = (c - f.foot) / f.height_length;
  return f;
}

}  // namespace radtex
