#include "lbmlab/stencil.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace lbmlab {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

Stencil assemble(std::string_view name, int d, double w_rest, double w_axis,
                 double w_diag) {
  Stencil s;
  s.name = name;
  s.d = d;

  s.c.push_back({0, 0, 0});
  s.w.push_back(w_rest);
  for (int axis = 0; axis < d; ++axis) {
    for (int sign : {+1, -1}) {
      std::array<int, 3> v{0, 0, 0};
      v[axis] = sign;
      s.c.push_back(v);
      s.w.push_back(w_axis);
    }
  }

  std::vector<std::array<int, 3>> diag;
  const int zlo = (d == 3) ? -1 : 0, zhi = (d == 3) ? 1 : 0;
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y)
      for (int z = zlo; z <= zhi; ++z) {
        const int nonzero = (x != 0) + (y != 0) + (z != 0);
        if (nonzero == 2) diag.push_back({x, y, z});
      }
  std::sort(diag.begin(), diag.end());
  for (const auto& v : diag) {
    s.c.push_back(v);
    s.w.push_back(w_diag);
  }

  s.q = static_cast<int>(s.c.size());
  s.opposite.assign(s.q, -1);
  for (int i = 0; i < s.q; ++i) {
    const std::array<int, 3> neg{-s.c[i][0], -s.c[i][1], -s.c[i][2]};
    for (int j = 0; j < s.q; ++j)
      if (s.c[j] == neg) s.opposite[i] = j;
  }
  return s;
}

}  // namespace

Stencil make_stencil(std::string_view name) {
  const std::string key = lower(name);
  if (key == "d3q19")
    return assemble("d3q19", 3, 1.0 / 3.0, 1.0 / 18.0, 1.0 / 36.0);
  if (key == "d2q9")
    return assemble("d2q9", 2, 4.0 / 9.0, 1.0 / 9.0, 1.0 / 36.0);
  throw std::invalid_argument("unsupported stencil: " + std::string(name));
}

std::vector<std::pair<int, int>> direction_pairs(const Stencil& s) {
  std::vector<std::pair<int, int>> out;
  out.reserve(s.pairs());
  for (int i = 1; i < s.q; ++i)
    if (i < s.opposite[i]) out.emplace_back(i, s.opposite[i]);
  return out;
}

}  // namespace lbmlab
