#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "lbmlab/geometry.hpp"
#include "lbmlab/stencil.hpp"

using namespace lbmlab;

namespace {

GridGeometry seeded_mask(std::uint64_t seed) {
  GridGeometry g;
  g.nx = 16;
  g.ny = 8;
  g.nz = 8;
  g.axis_policy = {AxisPolicy::periodic, AxisPolicy::wall, AxisPolicy::periodic};
  g.mask.assign(g.cells(), 1);
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < g.cells(); ++c)
    if (rng() % 5 == 0) g.mask[c] = 0;
  return g;
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name) : path(std::string("./") + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("indexing is x-fastest") {
  GridGeometry g;
  g.nx = 4;
  g.ny = 3;
  g.nz = 2;
  g.mask.assign(g.cells(), 1);
  CHECK(g.cells() == 24);
  CHECK(g.index(0, 0, 0) == 0);
  CHECK(g.index(1, 0, 0) == 1);
  CHECK(g.index(0, 1, 0) == 4);
  CHECK(g.index(0, 0, 1) == 12);
  CHECK(g.index(3, 2, 1) == 23);
}

TEST_CASE("channel generator") {
  const GridGeometry g = gen_channel(16, 8, 8);
  CHECK(g.fluid_count() == 1024);  // walls are links, not cells
  CHECK(g.axis_policy[0] == AxisPolicy::periodic);
  CHECK(g.axis_policy[1] == AxisPolicy::wall);
  CHECK(g.axis_policy[2] == AxisPolicy::wall);
  CHECK(gen_channel(4, 4, 4).fluid_count() == 64);
  CHECK_THROWS_AS(gen_channel(0, 4, 4), std::invalid_argument);
}

TEST_CASE("link resolution: wrap, wall, solid") {
  GridGeometry g = gen_channel(4, 4, 4);
  g.mask[g.index(2, 1, 1)] = 0;

  LinkTarget t = resolve_link(g, 3, 1, 1, {1, 0, 0});  // periodic x wrap
  CHECK(!t.bounce);
  CHECK(t.x == 0);
  CHECK(t.y == 1);
  CHECK(t.z == 1);

  t = resolve_link(g, 1, 0, 1, {0, -1, 0});  // y wall face
  CHECK(t.bounce);

  t = resolve_link(g, 1, 1, 1, {1, 0, 0});  // solid destination
  CHECK(t.bounce);

  t = resolve_link(g, 1, 1, 1, {0, 1, 0});  // plain interior move
  CHECK(!t.bounce);
  CHECK(t.y == 2);

  t = resolve_link(g, 0, 3, 3, {-1, 0, 0});  // wrap down in x
  CHECK(!t.bounce);
  CHECK(t.x == 3);

  t = resolve_link(g, 0, 3, 3, {0, 0, 1});  // z wall face
  CHECK(t.bounce);
}

TEST_CASE("packed bed: determinism, bounds, calibrated count") {
  const GridGeometry a = gen_packed_bed(40, 20, 20, kBedRadius, kBedPitch);
  const GridGeometry b = gen_packed_bed(40, 20, 20, kBedRadius, kBedPitch);
  CHECK(a.mask == b.mask);
  CHECK(a.fluid_count() > 0);
  CHECK(a.fluid_count() < a.cells());

  CHECK(gen_packed_bed(8, 8, 8, 0.0, 10.0).fluid_count() == 512);
  CHECK_THROWS_WITH_AS(gen_packed_bed(8, 8, 8, 11.0, 10.0),
                       "overlapping spheres", std::invalid_argument);

  // frozen result of the radius/pitch sweep against the ~2.1e6 target
  const GridGeometry big =
      gen_packed_bed(500, 100, 100, kBedRadius, kBedPitch);
  CHECK(big.fluid_count() == 2103037);
  CHECK(big.fluid_count() > 2100000 * 0.85);
  CHECK(big.fluid_count() < 2100000 * 1.15);
}

TEST_CASE("sparse representation basics") {
  const Stencil s = make_stencil("d3q19");

  SUBCASE("fully periodic all-fluid box has no bounce entries") {
    GridGeometry g;
    g.nx = g.ny = g.nz = 4;
    g.axis_policy = {AxisPolicy::periodic, AxisPolicy::periodic,
                     AxisPolicy::periodic};
    g.mask.assign(g.cells(), 1);
    const SparseRepresentation sp = build_sparse(g, s);
    CHECK(sp.fluid_count == 64);
    CHECK(sp.adjacency.size() == 64u * 18u);
    for (std::uint32_t n = 0; n < sp.fluid_count; ++n)
      for (int i = 1; i < s.q; ++i) {
        CHECK(sp.adjacency[n * 18 + (i - 1)] != n);
        CHECK(sp.adjacency[n * 18 + (i - 1)] < sp.fluid_count);
      }
  }

  SUBCASE("isolated all-wall cell bounces everywhere") {
    GridGeometry g;
    g.nx = g.ny = g.nz = 1;
    g.axis_policy = {AxisPolicy::wall, AxisPolicy::wall, AxisPolicy::wall};
    g.mask.assign(1, 1);
    const SparseRepresentation sp = build_sparse(g, s);
    CHECK(sp.fluid_count == 1);
    for (int i = 1; i < s.q; ++i) CHECK(sp.adjacency[i - 1] == 0);
  }

  SUBCASE("node enumeration is x-fastest and stable") {
    const GridGeometry g = seeded_mask(9);
    const SparseRepresentation sp1 = build_sparse(g, s);
    const SparseRepresentation sp2 = build_sparse(g, s);
    CHECK(sp1.coords == sp2.coords);
    CHECK(sp1.adjacency == sp2.adjacency);
    std::size_t n = 0;
    for (int z = 0; z < g.nz; ++z)
      for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x)
          if (g.mask[g.index(x, y, z)]) {
            CHECK(sp1.node_of[g.index(x, y, z)] == n);
            CHECK(sp1.coords[n] == std::array<int, 3>{x, y, z});
            ++n;
          }
  }
}

TEST_CASE("adjacency reciprocity on seeded masks") {
  const Stencil s = make_stencil("d3q19");
  for (std::uint64_t seed : {1ull, 42ull, 1234ull}) {
    CAPTURE(seed);
    const GridGeometry g = seeded_mask(seed);
    const SparseRepresentation sp = build_sparse(g, s);
    for (std::uint32_t n = 0; n < sp.fluid_count; ++n)
      for (int i = 1; i < s.q; ++i) {
        const std::uint32_t m = sp.adjacency[n * 18 + (i - 1)];
        const int j = s.opposite[i];
        if (m == n) continue;  // bounce self-link
        // a real link must lead back along the opposite direction
        CHECK(sp.adjacency[m * 18 + (j - 1)] == n);
      }
  }
}

TEST_CASE("sparse adjacency matches direct link resolution") {
  const Stencil s = make_stencil("d3q19");
  const GridGeometry g = seeded_mask(7);
  const SparseRepresentation sp = build_sparse(g, s);
  for (std::uint32_t n = 0; n < sp.fluid_count; ++n) {
    const auto& p = sp.coords[n];
    for (int i = 1; i < s.q; ++i) {
      const LinkTarget t = resolve_link(g, p[0], p[1], p[2], s.c[i]);
      const std::uint32_t a = sp.adjacency[n * 18 + (i - 1)];
      if (t.bounce)
        CHECK(a == n);
      else
        CHECK(a == sp.node_of[g.index(t.x, t.y, t.z)]);
    }
  }
}

TEST_CASE("2-D stencil wants a flat geometry") {
  const Stencil s = make_stencil("d2q9");
  GridGeometry flat = gen_channel(8, 8, 1);
  CHECK_NOTHROW(build_sparse(flat, s));
  GridGeometry thick = gen_channel(8, 8, 2);
  CHECK_THROWS_AS(build_sparse(thick, s), std::invalid_argument);
}

TEST_CASE("geometry file round trip and error paths") {
  GridGeometry g = seeded_mask(4);
  const TempFile tmp("geo_roundtrip.bin");
  save_geo(g, tmp.path);
  const GridGeometry r = load_geo(tmp.path);
  CHECK(r.nx == g.nx);
  CHECK(r.ny == g.ny);
  CHECK(r.nz == g.nz);
  CHECK(r.axis_policy == g.axis_policy);
  CHECK(r.mask == g.mask);

  CHECK_THROWS_WITH_AS(load_geo("./no_such_geometry_file.bin"),
                       "cannot open ./no_such_geometry_file.bin",
                       std::runtime_error);

  const TempFile bad("geo_badmagic.bin");
  {
    std::FILE* f = std::fopen(bad.path.c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("NOTGEO!!garbage", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(load_geo(bad.path), "not a geometry file",
                       std::runtime_error);

  const TempFile cut("geo_truncated.bin");
  {
    std::FILE* f = std::fopen(cut.path.c_str(), "wb");
    REQUIRE(f != nullptr);
    // valid header + dims + policies, then a mask cut short
    std::fwrite("LBMGEO1", 1, 8, f);
    const unsigned char dims[12] = {4, 0, 0, 0, 4, 0, 0, 0, 4, 0, 0, 0};
    std::fwrite(dims, 1, 12, f);
    const unsigned char pol[3] = {0, 1, 1};
    std::fwrite(pol, 1, 3, f);
    const unsigned char some[10] = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    std::fwrite(some, 1, 10, f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(load_geo(cut.path), "short read", std::runtime_error);
}
