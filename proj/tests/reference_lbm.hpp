#pragma once

// Naive full-grid reference stepper, written for obviousness rather than
// speed: textbook TRT collision on even/odd pair halves, then a pull sweep
// with its own wall/wrap handling (deliberately not sharing resolve_link or
// TrtOperator with the kernels under test). Values agree with the optimized
// collision to rounding, not bitwise, so comparisons use a tolerance.

#include <array>
#include <cstddef>
#include <vector>

#include "lbmlab/collision.hpp"
#include "lbmlab/geometry.hpp"
#include "lbmlab/stencil.hpp"

namespace refimpl {

class ReferenceLbm {
 public:
  ReferenceLbm(const lbmlab::GridGeometry& g, const lbmlab::Stencil& s,
               const lbmlab::FlowParams& p)
      : g_(g),
        s_(s),
        le_(p.lambda_even),
        lo_(lbmlab::lambda_odd(p)),
        gforce_(p.body_force),
        f_(g.cells() * s.q, 0.0),
        post_(g.cells() * s.q, 0.0) {
    for (std::size_t c = 0; c < g_.cells(); ++c)
      if (g_.mask[c])
        for (int i = 0; i < s_.q; ++i)
          f_[c * s_.q + i] = s_.w[i] * p.rho0;
  }

  // natural layout over fluid nodes in cell order, matching extract_natural
  void load(const double* in) {
    std::size_t n = 0;
    for (std::size_t c = 0; c < g_.cells(); ++c) {
      if (!g_.mask[c]) continue;
      for (int i = 0; i < s_.q; ++i) f_[c * s_.q + i] = in[n * s_.q + i];
      ++n;
    }
  }

  void extract(double* out) const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < g_.cells(); ++c) {
      if (!g_.mask[c]) continue;
      for (int i = 0; i < s_.q; ++i) out[n * s_.q + i] = f_[c * s_.q + i];
      ++n;
    }
  }

  void step() {
    collide_all();
    stream_pull();
  }

  std::size_t node_count() const { return g_.fluid_count(); }
  int q() const { return s_.q; }

 private:
  void collide_all() {
    const int q = s_.q;
    std::vector<double> feq(q);
    for (std::size_t c = 0; c < g_.cells(); ++c) {
      if (!g_.mask[c]) continue;
      const double* f = f_.data() + c * q;
      double* out = post_.data() + c * q;

      double rho = 0.0;
      std::array<double, 3> m{0.0, 0.0, 0.0};
      for (int i = 0; i < q; ++i) {
        rho += f[i];
        for (int k = 0; k < 3; ++k) m[k] += f[i] * s_.c[i][k];
      }
      std::array<double, 3> u{m[0] / rho, m[1] / rho, m[2] / rho};
      for (int i = 0; i < q; ++i)
        feq[i] = lbmlab::equilibrium(s_, rho, u, i);

      for (int i = 0; i < q; ++i) {
        const int j = s_.opposite[i];
        const double fe = 0.5 * (f[i] + f[j]);
        const double fo = 0.5 * (f[i] - f[j]);
        const double ee = 0.5 * (feq[i] + feq[j]);
        const double eo = 0.5 * (feq[i] - feq[j]);
        const double cg = s_.c[i][0] * gforce_[0] + s_.c[i][1] * gforce_[1] +
                          s_.c[i][2] * gforce_[2];
        out[i] = f[i] - le_ * (fe - ee) - lo_ * (fo - eo) +
                 3.0 * s_.w[i] * cg * rho;
      }
    }
  }

  // the post-collision PDF arriving at (x,y,z) with velocity c_i came from
  // (x,y,z) - c_i; a wall face on the way or a solid source bounces it back
  // as the opposite direction of the same cell
  void stream_pull() {
    const int q = s_.q;
    const int n[3] = {g_.nx, g_.ny, g_.nz};
    for (int z = 0; z < g_.nz; ++z)
      for (int y = 0; y < g_.ny; ++y)
        for (int x = 0; x < g_.nx; ++x) {
          const std::size_t c = g_.index(x, y, z);
          if (!g_.mask[c]) continue;
          double* dst = f_.data() + c * q;
          dst[0] = post_[c * q];
          for (int i = 1; i < q; ++i) {
            int src[3] = {x - s_.c[i][0], y - s_.c[i][1], z - s_.c[i][2]};
            bool blocked = false;
            for (int k = 0; k < 3; ++k) {
              if (src[k] >= 0 && src[k] < n[k]) continue;
              if (g_.axis_policy[k] == lbmlab::AxisPolicy::wall) {
                blocked = true;
                break;
              }
              src[k] = (src[k] + n[k]) % n[k];
            }
            std::size_t sc = 0;
            if (!blocked) {
              sc = g_.index(src[0], src[1], src[2]);
              blocked = !g_.mask[sc];
            }
            dst[i] = blocked ? post_[c * q + s_.opposite[i]]
                             : post_[sc * q + i];
          }
        }
  }

  lbmlab::GridGeometry g_;
  lbmlab::Stencil s_;
  double le_, lo_;
  std::array<double, 3> gforce_;
  std::vector<double> f_;
  std::vector<double> post_;
};

}  // namespace refimpl
