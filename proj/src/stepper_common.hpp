#pragma once

// Internal shared pieces for the propagation kernels. Not installed.

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>

#include "lbmlab/stepper.hpp"

namespace lbmlab::detail {

// Direction-major storage: per (grid, direction) one contiguous region,
// 64-byte aligned, length rounded up to a whole cache line of doubles.
class SoaField {
 public:
  SoaField() = default;
  SoaField(int grids, int q, std::size_t nodes) : grids_(grids), q_(q) {
    stride_ = (nodes + 7) & ~std::size_t{7};
    if (stride_ == 0) stride_ = 8;
    const std::size_t total = stride_ * static_cast<std::size_t>(grids) * q;
    data_.reset(static_cast<double*>(std::aligned_alloc(64, total * sizeof(double))));
    if (!data_) throw std::bad_alloc();
    std::memset(data_.get(), 0, total * sizeof(double));
  }

  double* dir(int grid, int i) {
    return data_.get() + (static_cast<std::size_t>(grid) * q_ + i) * stride_;
  }
  const double* dir(int grid, int i) const {
    return data_.get() + (static_cast<std::size_t>(grid) * q_ + i) * stride_;
  }
  std::size_t stride() const { return stride_; }

 private:
  struct Free {
    void operator()(double* p) const { std::free(p); }
  };
  std::unique_ptr<double, Free> data_;
  int grids_ = 0, q_ = 0;
  std::size_t stride_ = 0;
};

// Dense-grid kernel support: per-cell classification plus constant linear
// offsets so interior updates skip the generic link resolution.
struct DirectDomain {
  static constexpr std::uint8_t kFluid = 1;
  static constexpr std::uint8_t kSimple = 2;  // all links plain (no wrap/bounce)

  GridGeometry geo;
  Stencil st;
  int nx = 0, ny = 0, nz = 0;
  std::size_t ncells = 0, nfluid = 0;
  std::array<std::ptrdiff_t, 19> off{};
  std::vector<std::uint8_t> info;

  DirectDomain(const GridGeometry& g, const Stencil& s) : geo(g), st(s) {
    nx = g.nx;
    ny = g.ny;
    nz = g.nz;
    ncells = g.cells();
    nfluid = g.fluid_count();
    for (int i = 0; i < s.q; ++i)
      off[i] = s.c[i][0] +
               static_cast<std::ptrdiff_t>(nx) *
                   (s.c[i][1] + static_cast<std::ptrdiff_t>(ny) * s.c[i][2]);
    info.assign(ncells, 0);
    std::size_t cell = 0;
    for (int z = 0; z < nz; ++z)
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x, ++cell) {
          if (!g.mask[cell]) continue;
          std::uint8_t f = kFluid | kSimple;
          for (int i = 1; i < s.q && (f & kSimple); ++i) {
            const int tx = x + s.c[i][0], ty = y + s.c[i][1], tz = z + s.c[i][2];
            if (tx < 0 || tx >= nx || ty < 0 || ty >= ny || tz < 0 || tz >= nz ||
                !g.mask[g.index(tx, ty, tz)])
              f &= ~kSimple;
          }
          info[cell] = f;
        }
  }

  struct Link {
    std::size_t cell;
    bool bounce;
  };

  // Target of the link leaving (x,y,z) along direction i.
  Link link(int x, int y, int z, int i) const {
    const LinkTarget t = resolve_link(geo, x, y, z, st.c[i]);
    if (t.bounce) return {0, true};
    return {geo.index(t.x, t.y, t.z), false};
  }
};

int resolve_workers(int workers);

// The single collision operator every kernel carries. The zero_collision
// option builds the identity operator (rates 0, no force) for the pure-
// streaming property tests.
inline TrtOperator make_operator(const Stencil& s, const FlowParams& p,
                                 const StepperOptions& opt) {
  if (opt.zero_collision) return TrtOperator(s, 0.0, 0.0, {0.0, 0.0, 0.0});
  return TrtOperator(s, p);
}

// Canonical-snapshot helpers shared by the kernels: plain copies for natural
// layouts, and the streaming gather used when the stored state is the
// previous post-collision field.
void copy_out_direct(const SoaField& f, int grid, const DirectDomain& d, int q, double* out);
void copy_out_indirect(const SoaField& f, int grid, std::size_t nfluid, int q, double* out);
void gather_out_direct(const SoaField& f, int grid, const DirectDomain& d, int q,
                       double* out);
void gather_out_indirect(const SoaField& f, int grid, const SparseRepresentation& sp,
                         const int* opp, int q, double* out);
void load_in_direct(SoaField& f, int grid, const DirectDomain& d, int q, const double* in);
void load_in_indirect(SoaField& f, int grid, std::size_t nfluid, int q, const double* in);

std::unique_ptr<Stepper> make_ts(const GridGeometry&, const Stencil&, const FlowParams&,
                                 const StepperOptions&);
std::unique_ptr<Stepper> make_os(SchemeId, Addressing, const GridGeometry&, const Stencil&,
                                 const FlowParams&, const StepperOptions&);
std::unique_ptr<Stepper> make_osnt(SchemeId, Addressing, const GridGeometry&, const Stencil&,
                                   const FlowParams&, const StepperOptions&);
std::unique_ptr<Stepper> make_cg(const GridGeometry&, const Stencil&, const FlowParams&,
                                 const StepperOptions&);
std::unique_ptr<Stepper> make_swap(SchemeId, const GridGeometry&, const Stencil&,
                                   const FlowParams&, const StepperOptions&);
std::unique_ptr<Stepper> make_aap(Addressing, const GridGeometry&, const Stencil&,
                                  const FlowParams&, const StepperOptions&);
std::unique_ptr<Stepper> make_et(Addressing, const GridGeometry&, const Stencil&,
                                 const FlowParams&, const StepperOptions&);

}  // namespace lbmlab::detail
