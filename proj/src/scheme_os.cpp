#include <array>

#include "stepper_common.hpp"

namespace lbmlab::detail {
namespace {

// Fused one-step scheme over two grids. Push: read local, collide, scatter to
// neighbors. Pull: gather from neighbors, collide, store local. The pull
// variant keeps post-collision values between steps, so the initial raw field
// is collided in place on the first step and extraction gathers (streams)
// from the idle grid, which still holds the previous post-collision state.
class OsStepper final : public Stepper {
 public:
  OsStepper(SchemeId id, Addressing a, const GridGeometry& g, const Stencil& s,
            const FlowParams& p, const StepperOptions& opt)
      : Stepper(id, a, s.q, g.fluid_count()),
        pull_(id == SchemeId::os_pull),
        op_(make_operator(s, p, opt)),
        nw_(resolve_workers(opt.workers)) {
    if (a == Addressing::direct) {
      dom_ = std::make_unique<DirectDomain>(g, s);
      field_ = SoaField(2, s.q, g.cells());
      storage_nodes_ = dom_->ncells;
    } else {
      sp_ = build_sparse(g, s);
      opp_ = s.opposite;
      field_ = SoaField(2, s.q, sp_.fluid_count);
      storage_nodes_ = sp_.fluid_count;
    }
    for (int i = 0; i < q_; ++i) {
      double* f = field_.dir(active_, i);
      const double v = s.w[i] * p.rho0;
      for (std::size_t c = 0; c < storage_nodes_; ++c) f[c] = v;
    }
    fresh_ = pull_;
  }

  void step() override {
    if (pull_ && fresh_) {
      precollide();
      fresh_ = false;
    }
    if (addressing_ == Addressing::direct)
      pull_ ? sweep_pull_direct() : sweep_push_direct();
    else
      pull_ ? sweep_pull_indirect() : sweep_push_indirect();
    active_ ^= 1;
    ++t_;
  }

  void extract_natural(double* out) const override {
    if (!pull_ || fresh_) {
      if (addressing_ == Addressing::direct)
        copy_out_direct(field_, active_, *dom_, q_, out);
      else
        copy_out_indirect(field_, active_, nodes_, q_, out);
      return;
    }
    // idle grid holds the previous post-collision state; stream it
    if (addressing_ == Addressing::direct)
      gather_out_direct(field_, active_ ^ 1, *dom_, q_, out);
    else
      gather_out_indirect(field_, active_ ^ 1, sp_, opp_.data(), q_, out);
  }

  void load_natural(const double* in) override {
    if (addressing_ == Addressing::direct)
      load_in_direct(field_, active_, *dom_, q_, in);
    else
      load_in_indirect(field_, active_, nodes_, q_, in);
    t_ = 0;
    fresh_ = pull_;
  }

  LayoutPhase layout_phase() const override { return LayoutPhase::natural; }

 private:
  void precollide() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(active_, i);
    if (addressing_ == Addressing::direct) {
      const std::uint8_t* info = dom_->info.data();
      const std::size_t nc = dom_->ncells;
#pragma omp parallel for schedule(static) num_threads(nw_)
      for (long long c = 0; c < static_cast<long long>(nc); ++c) {
        if (!(info[c] & DirectDomain::kFluid)) continue;
        double tmp[19];
        for (int i = 0; i < q_; ++i) tmp[i] = f[i][c];
        op_.collide(tmp);
        for (int i = 0; i < q_; ++i) f[i][c] = tmp[i];
      }
    } else {
#pragma omp parallel for schedule(static) num_threads(nw_)
      for (long long n = 0; n < static_cast<long long>(sp_.fluid_count); ++n) {
        double tmp[19];
        for (int i = 0; i < q_; ++i) tmp[i] = f[i][n];
        op_.collide(tmp);
        for (int i = 0; i < q_; ++i) f[i][n] = tmp[i];
      }
    }
  }

  void sweep_push_direct() {
    std::array<const double*, 19> a{};
    std::array<double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(active_, i);
      b[i] = field_.dir(active_ ^ 1, i);
    }
    const int q = q_, nx = dom_->nx, ny = dom_->ny;
    const long long nzy = static_cast<long long>(dom_->nz) * ny;
    const std::uint8_t* info = dom_->info.data();
    const int* opp = dom_->st.opposite.data();
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long zy = 0; zy < nzy; ++zy) {
      const int z = static_cast<int>(zy / ny), y = static_cast<int>(zy % ny);
      std::size_t cell = static_cast<std::size_t>(zy) * nx;
      double tmp[19];
      for (int x = 0; x < nx; ++x, ++cell) {
        const std::uint8_t fi = info[cell];
        if (!(fi & DirectDomain::kFluid)) continue;
        for (int i = 0; i < q; ++i) tmp[i] = a[i][cell];
        op_.collide(tmp);
        b[0][cell] = tmp[0];
        if (fi & DirectDomain::kSimple) {
          for (int i = 1; i < q; ++i) b[i][cell + dom_->off[i]] = tmp[i];
        } else {
          for (int i = 1; i < q; ++i) {
            const DirectDomain::Link L = dom_->link(x, y, z, i);
            if (L.bounce)
              b[opp[i]][cell] = tmp[i];
            else
              b[i][L.cell] = tmp[i];
          }
        }
      }
    }
  }

  void sweep_pull_direct() {
    std::array<const double*, 19> a{};
    std::array<double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(active_, i);
      b[i] = field_.dir(active_ ^ 1, i);
    }
    const int q = q_, nx = dom_->nx, ny = dom_->ny;
    const long long nzy = static_cast<long long>(dom_->nz) * ny;
    const std::uint8_t* info = dom_->info.data();
    const int* opp = dom_->st.opposite.data();
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long zy = 0; zy < nzy; ++zy) {
      const int z = static_cast<int>(zy / ny), y = static_cast<int>(zy % ny);
      std::size_t cell = static_cast<std::size_t>(zy) * nx;
      double tmp[19];
      for (int x = 0; x < nx; ++x, ++cell) {
        const std::uint8_t fi = info[cell];
        if (!(fi & DirectDomain::kFluid)) continue;
        tmp[0] = a[0][cell];
        if (fi & DirectDomain::kSimple) {
          for (int i = 1; i < q; ++i) tmp[i] = a[i][cell - dom_->off[i]];
        } else {
          for (int i = 1; i < q; ++i) {
            const int j = opp[i];
            const DirectDomain::Link L = dom_->link(x, y, z, j);
            tmp[i] = L.bounce ? a[j][cell] : a[i][L.cell];
          }
        }
        op_.collide(tmp);
        for (int i = 0; i < q; ++i) b[i][cell] = tmp[i];
      }
    }
  }

  void sweep_push_indirect() {
    std::array<const double*, 19> a{};
    std::array<double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(active_, i);
      b[i] = field_.dir(active_ ^ 1, i);
    }
    const int q = q_, qm1 = q_ - 1;
    const std::uint32_t* adj = sp_.adjacency.data();
    const int* opp = opp_.data();
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long n = 0; n < static_cast<long long>(sp_.fluid_count); ++n) {
      double tmp[19];
      for (int i = 0; i < q; ++i) tmp[i] = a[i][n];
      op_.collide(tmp);
      b[0][n] = tmp[0];
      const std::uint32_t* row = adj + n * qm1;
      for (int i = 1; i < q; ++i) {
        const std::uint32_t nb = row[i - 1];
        if (nb == static_cast<std::uint32_t>(n))
          b[opp[i]][n] = tmp[i];
        else
          b[i][nb] = tmp[i];
      }
    }
  }

  void sweep_pull_indirect() {
    std::array<const double*, 19> a{};
    std::array<double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(active_, i);
      b[i] = field_.dir(active_ ^ 1, i);
    }
    const int q = q_, qm1 = q_ - 1;
    const std::uint32_t* adj = sp_.adjacency.data();
    const int* opp = opp_.data();
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long n = 0; n < static_cast<long long>(sp_.fluid_count); ++n) {
      double tmp[19];
      tmp[0] = a[0][n];
      const std::uint32_t* row = adj + n * qm1;
      for (int i = 1; i < q; ++i) {
        const int j = opp[i];
        const std::uint32_t src = row[j - 1];
        tmp[i] = src == static_cast<std::uint32_t>(n) ? a[j][n] : a[i][src];
      }
      op_.collide(tmp);
      for (int i = 0; i < q; ++i) b[i][n] = tmp[i];
    }
  }

  bool pull_;
  TrtOperator op_;
  int nw_;
  std::unique_ptr<DirectDomain> dom_;
  SparseRepresentation sp_;
  std::vector<int> opp_;
  SoaField field_;
  std::size_t storage_nodes_ = 0;
  int active_ = 0;
  bool fresh_ = false;
};

}  // namespace

std::unique_ptr<Stepper> make_os(SchemeId id, Addressing a, const GridGeometry& g,
                                 const Stencil& s, const FlowParams& p,
                                 const StepperOptions& opt) {
  return std::make_unique<OsStepper>(id, a, g, s, p, opt);
}

}  // namespace lbmlab::detail
