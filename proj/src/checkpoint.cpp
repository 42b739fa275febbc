#include "radtex/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace radtex {

namespace {

// Little-endian host assumed; asserted at save/load time.
bool host_is_little_endian() {
  uint32_t x = 1;
  uint8_t b;
  std::memcpy(&b, &x, 1);
  return b == 1;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const TextureSet& textures, const std::string& path) {
  if (!host_is_little_endian())
    throw std::runtime_error("checkpoint: big-endian hosts are unsupported");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write '" + path + "'");

  out.write("MLSH", 4);
  write_pod<uint32_t>(out, kCheckpointVersion);
  write_pod<uint32_t>(out, static_cast<uint32_t>(textures.sh.degree));
  uint32_t count = 0;
  for (const auto& t : textures.textures)
    if (t.allocated()) ++count;
  write_pod<uint32_t>(out, count);

  for (const auto& t : textures.textures) {
    if (!t.allocated()) continue;
    write_pod<uint32_t>(out, static_cast<uint32_t>(t.tri));
    write_pod<double>(out, t.density);
    write_pod<uint32_t>(out, static_cast<uint32_t>(t.width));
    write_pod<uint32_t>(out, static_cast<uint32_t>(t.height));
    write_pod<uint32_t>(out, t.centroid_fallback ? 1u : 0u);
    for (int i = 0; i < 3; ++i) write_pod<double>(out, t.origin[i]);
    for (int i = 0; i < 3; ++i) write_pod<double>(out, t.base_dir[i]);
    for (int i = 0; i < 3; ++i) write_pod<double>(out, t.height_dir[i]);
    const size_t n = t.valid.size();
    std::vector<uint8_t> bits((n + 7) / 8, 0);
    for (size_t i = 0; i < n; ++i)
      if (t.valid[i]) bits[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
    out.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    out.write(reinterpret_cast<const char*>(t.coeffs.data()),
              static_cast<std::streamsize>(t.coeffs.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("checkpoint: write to '" + path + "' failed");
}

TextureSet load_checkpoint(const std::string& path, int expected_degree) {
  if (!host_is_little_endian())
    throw std::runtime_error("checkpoint: big-endian hosts are unsupported");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MLSH", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
  uint32_t version = read_pod<uint32_t>(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  uint32_t degree = read_pod<uint32_t>(in);
  if (degree > static_cast<uint32_t>(kMaxShDegree))
    throw std::runtime_error("checkpoint: invalid SH degree");
  if (expected_degree >= 0 && static_cast<int>(degree) != expected_degree)
    throw std::runtime_error("checkpoint: SH degree " + std::to_string(degree) +
                             " does not match configured degree " +
                             std::to_string(expected_degree));
  uint32_t count = read_pod<uint32_t>(in);

  TextureSet set;
  set.sh.degree = static_cast<int>(degree);
  const int nc = set.sh.num_coeffs();
  for (uint32_t rec = 0; rec < count; ++rec) {
    SHTexture t;
    t.tri = static_cast<int>(read_pod<uint32_t>(in));
    t.density = read_pod<double>(in);
    t.width = static_cast<int>(read_pod<uint32_t>(in));
    t.height = static_cast<int>(read_pod<uint32_t>(in));
    t.centroid_fallback = read_pod<uint32_t>(in) != 0;
    t.num_coeffs = nc;
    for (int i = 0; i < 3; ++i) t.origin[i] = read_pod<double>(in);
    for (int i = 0; i < 3; ++i) t.base_dir[i] = read_pod<double>(in);
    for (int i = 0; i < 3; ++i) t.height_dir[i] = read_pod<double>(in);
    const size_t n = static_cast<size_t>(t.width) * static_cast<size_t>(t.height);
    std::vector<uint8_t> bits((n + 7) / 8);
    in.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    t.valid.assign(n, 0);
    for (size_t i = 0; i < n; ++i) {
      t.valid[i] = (bits[i / 8] >> (i % 8)) & 1u;
      if (t.valid[i]) {
        ++t.valid_count;
        int r = static_cast<int>(i) / t.width, c = static_cast<int>(i) % t.width;
        t.max_valid_row = std::max(t.max_valid_row, r);
        t.min_valid_col = t.min_valid_col < 0 ? c : std::min(t.min_valid_col, c);
        t.max_valid_col = std::max(t.max_valid_col, c);
      }
    }
    t.coeffs.resize(n * 3 * static_cast<size_t>(nc));
    in.read(reinterpret_cast<char*>(t.coeffs.data()),
            static_cast<std::streamsize>(t.coeffs.size() * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    if (t.tri >= static_cast<int>(set.textures.size()))
      set.textures.resize(static_cast<size_t>(t.tri) + 1);
    set.textures[static_cast<size_t>(t.tri)] = std::move(t);
  }
  return set;
}

}  // namespace radtex
