#pragma once

#include <array>
#include <string_view>
#include <utility>
#include <vector>

namespace lbmlab {

// Discrete velocity set in a fixed canonical order: rest direction first,
// then the axis pairs (+x, -x, +y, -y, +z, -z), then the diagonal vectors
// sorted lexicographically by (cx, cy, cz). Every kernel, adjacency table
// and snapshot uses this enumeration.
struct Stencil {
  std::string_view name;
  int d = 0;  // spatial dimensions
  int q = 0;  // discrete velocities, including rest
  std::vector<std::array<int, 3>> c;  // c[0] == {0,0,0}; cz == 0 for 2-D
  std::vector<double> w;              // lattice weights
  std::vector<int> opposite;          // c[opposite[i]] == -c[i]

  int pairs() const { return (q - 1) / 2; }
};

// name: "d3q19" or "d2q9" (case-insensitive).
// Throws std::invalid_argument("unsupported stencil: <name>") otherwise.
Stencil make_stencil(std::string_view name);

// Non-rest directions grouped as (i, opposite[i]) with i < opposite[i],
// ascending in i. Useful wherever opposing pairs share work (TRT, 2S stores,
// ET region pairs).
std::vector<std::pair<int, int>> direction_pairs(const Stencil& s);

}  // namespace lbmlab
