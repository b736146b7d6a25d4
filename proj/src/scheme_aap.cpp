#include <array>
#include <vector>

#include "stepper_common.hpp"

namespace lbmlab::detail {
namespace {

// Single-grid scheme alternating two sweep flavours. Even sweeps are purely
// node-local: collide and park the results in the opposite slots. Odd sweeps
// hide both streamings: each node gathers its post-collision inputs from the
// neighbours' opposite slots, collides, and scatters into the neighbours'
// natural slots. Every storage location is touched by exactly one node per
// sweep, so both flavours parallelize without a second grid.
class AapStepper final : public Stepper {
 public:
  AapStepper(Addressing a, const GridGeometry& g, const Stencil& s,
             const FlowParams& p, const StepperOptions& opt)
      : Stepper(SchemeId::aap, a, s.q, g.fluid_count()),
        op_(make_operator(s, p, opt)),
        nw_(resolve_workers(opt.workers)) {
    opp_ = s.opposite;
    if (a == Addressing::direct) {
      dom_ = std::make_unique<DirectDomain>(g, s);
      field_ = SoaField(1, s.q, g.cells());
      storage_nodes_ = g.cells();
    } else {
      sp_ = build_sparse(g, s);
      field_ = SoaField(1, s.q, sp_.fluid_count);
      storage_nodes_ = sp_.fluid_count;
    }
    for (int i = 0; i < q_; ++i) {
      double* f = field_.dir(0, i);
      const double v = s.w[i] * p.rho0;
      for (std::size_t c = 0; c < storage_nodes_; ++c) f[c] = v;
    }
  }

  void step() override {
    if ((t_ & 1) == 0) {
      sweep_even();
    } else if (addressing_ == Addressing::direct) {
      sweep_odd_direct();
    } else {
      sweep_odd_indirect();
    }
    ++t_;
  }

  void extract_natural(double* out) const override {
    const bool odd = (t_ & 1) != 0;
    if (addressing_ == Addressing::direct) {
      if (!odd) {
        copy_out_direct(field_, 0, *dom_, q_, out);
        return;
      }
      std::array<const double*, 19> f{};
      for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
      const int q = q_, nx = dom_->nx, ny = dom_->ny;
      const int* opp = opp_.data();
      std::size_t n = 0;
      for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
        const std::uint8_t fi = dom_->info[cell];
        if (!(fi & DirectDomain::kFluid)) continue;
        double* o = out + n++ * q;
        o[0] = f[0][cell];
        if (fi & DirectDomain::kSimple) {
          for (int i = 1; i < q; ++i) o[i] = f[opp[i]][cell - dom_->off[i]];
        } else {
          const int x = static_cast<int>(cell % nx);
          const int y = static_cast<int>((cell / nx) % ny);
          const int z = static_cast<int>(cell / nx / ny);
          for (int i = 1; i < q; ++i) {
            const DirectDomain::Link L = dom_->link(x, y, z, opp[i]);
            o[i] = L.bounce ? f[i][cell] : f[opp[i]][L.cell];
          }
        }
      }
    } else {
      if (!odd) {
        copy_out_indirect(field_, 0, nodes_, q_, out);
        return;
      }
      std::array<const double*, 19> f{};
      for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
      const int q = q_, qm1 = q_ - 1;
      const int* opp = opp_.data();
      const std::uint32_t* adj = sp_.adjacency.data();
      for (std::size_t n = 0; n < nodes_; ++n) {
        double* o = out + n * q;
        const std::uint32_t* row = adj + n * qm1;
        o[0] = f[0][n];
        for (int i = 1; i < q; ++i) {
          const std::uint32_t e = row[opp[i] - 1];
          o[i] = e == n ? f[i][n] : f[opp[i]][e];
        }
      }
    }
  }

  void load_natural(const double* in) override {
    if (addressing_ == Addressing::direct)
      load_in_direct(field_, 0, *dom_, q_, in);
    else
      load_in_indirect(field_, 0, nodes_, q_, in);
    t_ = 0;
  }

  LayoutPhase layout_phase() const override {
    return (t_ & 1) ? LayoutPhase::opposed : LayoutPhase::natural;
  }

 private:
  void sweep_even() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const bool direct = addressing_ == Addressing::direct;
    const std::uint8_t* info = direct ? dom_->info.data() : nullptr;
    const int q = q_;
    const int* opp = opp_.data();
    const long long nn = static_cast<long long>(storage_nodes_);
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long c = 0; c < nn; ++c) {
      if (direct && !(info[c] & DirectDomain::kFluid)) continue;
      double tmp[19];
      for (int i = 0; i < q; ++i) tmp[i] = f[i][c];
      op_.collide(tmp);
      f[0][c] = tmp[0];
      for (int i = 1; i < q; ++i) f[opp[i]][c] = tmp[i];
    }
  }

  void sweep_odd_direct() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const int q = q_, nx = dom_->nx, ny = dom_->ny, nz = dom_->nz;
    const std::uint8_t* info = dom_->info.data();
    const int* opp = opp_.data();
    const long long nrows = static_cast<long long>(ny) * nz;
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long zy = 0; zy < nrows; ++zy) {
      const int z = static_cast<int>(zy / ny);
      const int y = static_cast<int>(zy % ny);
      const std::size_t row0 = (static_cast<std::size_t>(z) * ny + y) * nx;
      for (int x = 0; x < nx; ++x) {
        const std::size_t cell = row0 + x;
        const std::uint8_t fi = info[cell];
        if (!(fi & DirectDomain::kFluid)) continue;
        double tmp[19];
        tmp[0] = f[0][cell];
        if (fi & DirectDomain::kSimple) {
          for (int i = 1; i < q; ++i) tmp[i] = f[opp[i]][cell - dom_->off[i]];
          op_.collide(tmp);
          f[0][cell] = tmp[0];
          for (int j = 1; j < q; ++j) f[j][cell + dom_->off[j]] = tmp[j];
        } else {
          for (int i = 1; i < q; ++i) {
            const DirectDomain::Link L = dom_->link(x, y, z, opp[i]);
            tmp[i] = L.bounce ? f[i][cell] : f[opp[i]][L.cell];
          }
          op_.collide(tmp);
          f[0][cell] = tmp[0];
          for (int j = 1; j < q; ++j) {
            const DirectDomain::Link L = dom_->link(x, y, z, j);
            if (L.bounce)
              f[opp[j]][cell] = tmp[j];
            else
              f[j][L.cell] = tmp[j];
          }
        }
      }
    }
  }

  void sweep_odd_indirect() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const int q = q_, qm1 = q_ - 1;
    const int* opp = opp_.data();
    const std::uint32_t* adj = sp_.adjacency.data();
    const long long nn = static_cast<long long>(sp_.fluid_count);
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long n = 0; n < nn; ++n) {
      const std::uint32_t* row = adj + static_cast<std::size_t>(n) * qm1;
      double tmp[19];
      tmp[0] = f[0][n];
      for (int i = 1; i < q; ++i) {
        const std::uint32_t e = row[opp[i] - 1];
        tmp[i] = e == static_cast<std::uint32_t>(n) ? f[i][n] : f[opp[i]][e];
      }
      op_.collide(tmp);
      f[0][n] = tmp[0];
      for (int j = 1; j < q; ++j) {
        const std::uint32_t e = row[j - 1];
        if (e == static_cast<std::uint32_t>(n))
          f[opp[j]][n] = tmp[j];
        else
          f[j][e] = tmp[j];
      }
    }
  }

  TrtOperator op_;
  int nw_;
  std::vector<int> opp_;
  std::unique_ptr<DirectDomain> dom_;
  SparseRepresentation sp_;
  SoaField field_;
  std::size_t storage_nodes_ = 0;
};

}  // namespace

std::unique_ptr<Stepper> make_aap(Addressing a, const GridGeometry& g, const Stencil& s,
                                  const FlowParams& p, const StepperOptions& opt) {
  return std::make_unique<AapStepper>(a, g, s, p, opt);
}

}  // namespace lbmlab::detail
