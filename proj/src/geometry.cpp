#include "lbmlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace lbmlab {

namespace {

void check_dims(int nx, int ny, int nz) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("zero dimension");
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

constexpr char kMagic[8] = {'L', 'B', 'M', 'G', 'E', 'O', '1', '\0'};

void put_u32(std::FILE* f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  if (std::fwrite(b, 1, 4, f) != 4) throw std::runtime_error("write failed");
}

std::uint32_t get_u32(std::FILE* f) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw std::runtime_error("short read");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::size_t GridGeometry::fluid_count() const {
  std::size_t n = 0;
  for (std::uint8_t m : mask) n += (m != 0);
  return n;
}

LinkTarget resolve_link(const GridGeometry& g, int x, int y, int z,
                        const std::array<int, 3>& c) {
  const int n[3] = {g.nx, g.ny, g.nz};
  int t[3] = {x + c[0], y + c[1], z + c[2]};
  for (int k = 0; k < 3; ++k) {
    if (t[k] >= 0 && t[k] < n[k]) continue;
    if (g.axis_policy[k] == AxisPolicy::wall) return {true, 0, 0, 0};
    t[k] = t[k] < 0 ? t[k] + n[k] : t[k] - n[k];
  }
  if (!g.is_fluid(t[0], t[1], t[2])) return {true, 0, 0, 0};
  return {false, t[0], t[1], t[2]};
}

GridGeometry gen_channel(int nx, int ny, int nz) {
  check_dims(nx, ny, nz);
  GridGeometry g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.axis_policy = {AxisPolicy::periodic, AxisPolicy::wall, AxisPolicy::wall};
  g.mask.assign(g.cells(), 1);
  return g;
}

GridGeometry gen_packed_bed(int nx, int ny, int nz, double radius, double pitch) {
  check_dims(nx, ny, nz);
  if (radius < 0.0) throw std::invalid_argument("radius must be non-negative");
  if (!(pitch > 0.0)) throw std::invalid_argument("pitch must be positive");
  if (radius > pitch) throw std::invalid_argument("overlapping spheres");

  GridGeometry g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.axis_policy = {AxisPolicy::periodic, AxisPolicy::wall, AxisPolicy::wall};
  g.mask.assign(g.cells(), 1);
  if (radius == 0.0) return g;

  const double r2 = radius * radius;
  std::size_t cell = 0;
  for (int z = 0; z < nz; ++z) {
    const double cz = z + 0.5;
    const int k_lo = static_cast<int>(std::floor((cz - radius) / pitch));
    const int k_hi = static_cast<int>(std::ceil((cz + radius) / pitch));
    for (int y = 0; y < ny; ++y) {
      const double cy = y + 0.5;
      for (int x = 0; x < nx; ++x, ++cell) {
        const double cx = x + 0.5;
        bool solid = false;
        for (int k = k_lo; k <= k_hi && !solid; ++k) {
          const double off = (k & 1) ? 0.5 * pitch : 0.0;
          const double dz = cz - k * pitch;
          const int i_lo = static_cast<int>(std::floor((cx - radius - off) / pitch));
          const int i_hi = static_cast<int>(std::ceil((cx + radius - off) / pitch));
          const int j_lo = static_cast<int>(std::floor((cy - radius - off) / pitch));
          const int j_hi = static_cast<int>(std::ceil((cy + radius - off) / pitch));
          for (int j = j_lo; j <= j_hi && !solid; ++j) {
            const double dy = cy - (j * pitch + off);
            for (int i = i_lo; i <= i_hi; ++i) {
              const double dx = cx - (i * pitch + off);
              if (dx * dx + dy * dy + dz * dz < r2) {
                solid = true;
                break;
              }
            }
          }
        }
        if (solid) g.mask[cell] = 0;
      }
    }
  }
  return g;
}

void save_geo(const GridGeometry& g, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  if (std::fwrite(kMagic, 1, 8, f.get()) != 8) throw std::runtime_error("write failed");
  put_u32(f.get(), static_cast<std::uint32_t>(g.nx));
  put_u32(f.get(), static_cast<std::uint32_t>(g.ny));
  put_u32(f.get(), static_cast<std::uint32_t>(g.nz));
  unsigned char pol[3];
  for (int k = 0; k < 3; ++k) pol[k] = static_cast<unsigned char>(g.axis_policy[k]);
  if (std::fwrite(pol, 1, 3, f.get()) != 3) throw std::runtime_error("write failed");
  if (std::fwrite(g.mask.data(), 1, g.mask.size(), f.get()) != g.mask.size())
    throw std::runtime_error("write failed");
  if (std::fflush(f.get()) != 0) throw std::runtime_error("write failed");
}

GridGeometry load_geo(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8) throw std::runtime_error("not a geometry file");
  if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a geometry file");

  const std::uint32_t nx = get_u32(f.get());
  const std::uint32_t ny = get_u32(f.get());
  const std::uint32_t nz = get_u32(f.get());
  constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 40;
  if (nx == 0 || ny == 0 || nz == 0 ||
      nx > static_cast<std::uint32_t>(INT32_MAX) ||
      ny > static_cast<std::uint32_t>(INT32_MAX) ||
      nz > static_cast<std::uint32_t>(INT32_MAX) ||
      static_cast<std::uint64_t>(nx) * ny * nz > kMaxCells)
    throw std::runtime_error("dimension overflow");

  unsigned char pol[3];
  if (std::fread(pol, 1, 3, f.get()) != 3) throw std::runtime_error("short read");
  GridGeometry g;
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  g.nz = static_cast<int>(nz);
  for (int k = 0; k < 3; ++k) {
    if (pol[k] > 1) throw std::runtime_error("not a geometry file");
    g.axis_policy[k] = static_cast<AxisPolicy>(pol[k]);
  }
  g.mask.resize(g.cells());
  if (std::fread(g.mask.data(), 1, g.mask.size(), f.get()) != g.mask.size())
    throw std::runtime_error("short read");
  for (std::uint8_t& m : g.mask) m = (m != 0);
  return g;
}

SparseRepresentation build_sparse(const GridGeometry& g, const Stencil& s) {
  if ((s.d == 2 && g.nz != 1) || g.nx < 1)
    throw std::invalid_argument("stencil/geometry dimension mismatch");

  const std::size_t nfluid = g.fluid_count();
  if (nfluid >= (std::size_t{1} << 31))
    throw std::runtime_error("fluid count exceeds 32-bit index range");

  SparseRepresentation sp;
  sp.fluid_count = static_cast<std::uint32_t>(nfluid);
  sp.q = s.q;
  sp.coords.reserve(nfluid);
  sp.node_of.assign(g.cells(), ~std::uint32_t{0});

  std::size_t cell = 0;
  for (int z = 0; z < g.nz; ++z)
    for (int y = 0; y < g.ny; ++y)
      for (int x = 0; x < g.nx; ++x, ++cell)
        if (g.mask[cell]) {
          sp.node_of[cell] = static_cast<std::uint32_t>(sp.coords.size());
          sp.coords.push_back({x, y, z});
        }

  const int qm1 = s.q - 1;
  sp.adjacency.resize(nfluid * static_cast<std::size_t>(qm1));
  for (std::uint32_t n = 0; n < sp.fluid_count; ++n) {
    const auto& p = sp.coords[n];
    for (int i = 1; i < s.q; ++i) {
      const LinkTarget t = resolve_link(g, p[0], p[1], p[2], s.c[i]);
      sp.adjacency[static_cast<std::size_t>(n) * qm1 + (i - 1)] =
          t.bounce ? n : sp.node_of[g.index(t.x, t.y, t.z)];
    }
  }
  return sp;
}

}  // namespace lbmlab
