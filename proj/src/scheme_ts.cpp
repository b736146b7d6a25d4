#include <array>

#include "stepper_common.hpp"

namespace lbmlab::detail {
namespace {

// Two-grid, two-sweep scheme: a collision sweep A -> B over all fluid cells,
// then a streaming sweep gathering B -> A. Serves as the reference every
// other scheme is compared against.
class TsStepper final : public Stepper {
 public:
  TsStepper(const GridGeometry& g, const Stencil& s, const FlowParams& p,
            const StepperOptions& opt)
      : Stepper(SchemeId::ts, Addressing::direct, s.q, g.fluid_count()),
        dom_(g, s),
        op_(make_operator(s, p, opt)),
        field_(2, s.q, g.cells()),
        nw_(resolve_workers(opt.workers)) {
    for (int i = 0; i < q_; ++i) {
      double* a = field_.dir(0, i);
      const double v = s.w[i] * p.rho0;
      for (std::size_t c = 0; c < dom_.ncells; ++c) a[c] = v;
    }
  }

  void step() override {
    collide_sweep();
    stream_sweep();
    ++t_;
  }

  void extract_natural(double* out) const override {
    std::array<const double*, 19> a{};
    for (int i = 0; i < q_; ++i) a[i] = field_.dir(0, i);
    std::size_t n = 0;
    for (std::size_t c = 0; c < dom_.ncells; ++c) {
      if (!(dom_.info[c] & DirectDomain::kFluid)) continue;
      for (int i = 0; i < q_; ++i) out[n * q_ + i] = a[i][c];
      ++n;
    }
  }

  void load_natural(const double* in) override {
    std::array<double*, 19> a{};
    for (int i = 0; i < q_; ++i) a[i] = field_.dir(0, i);
    std::size_t n = 0;
    for (std::size_t c = 0; c < dom_.ncells; ++c) {
      if (!(dom_.info[c] & DirectDomain::kFluid)) continue;
      for (int i = 0; i < q_; ++i) a[i][c] = in[n * q_ + i];
      ++n;
    }
    t_ = 0;
  }

  LayoutPhase layout_phase() const override { return LayoutPhase::natural; }

 private:
  void collide_sweep() {
    std::array<const double*, 19> a{};
    std::array<double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(0, i);
      b[i] = field_.dir(1, i);
    }
    const int q = q_, nx = dom_.nx;
    const long long nzy = static_cast<long long>(dom_.nz) * dom_.ny;
    const std::uint8_t* info = dom_.info.data();
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long zy = 0; zy < nzy; ++zy) {
      std::size_t cell = static_cast<std::size_t>(zy) * nx;
      double tmp[19];
      for (int x = 0; x < nx; ++x, ++cell) {
        if (!(info[cell] & DirectDomain::kFluid)) continue;
        for (int i = 0; i < q; ++i) tmp[i] = a[i][cell];
        op_.collide(tmp);
        for (int i = 0; i < q; ++i) b[i][cell] = tmp[i];
      }
    }
  }

  void stream_sweep() {
    std::array<double*, 19> a{};
    std::array<const double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(0, i);
      b[i] = field_.dir(1, i);
    }
    const int q = q_, nx = dom_.nx, ny = dom_.ny;
    const long long nzy = static_cast<long long>(dom_.nz) * ny;
    const std::uint8_t* info = dom_.info.data();
    const int* opp = dom_.st.opposite.data();
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long zy = 0; zy < nzy; ++zy) {
      const int z = static_cast<int>(zy / ny), y = static_cast<int>(zy % ny);
      std::size_t cell = static_cast<std::size_t>(zy) * nx;
      for (int x = 0; x < nx; ++x, ++cell) {
        const std::uint8_t fi = info[cell];
        if (!(fi & DirectDomain::kFluid)) continue;
        a[0][cell] = b[0][cell];
        if (fi & DirectDomain::kSimple) {
          for (int i = 1; i < q; ++i) a[i][cell] = b[i][cell - dom_.off[i]];
        } else {
          for (int i = 1; i < q; ++i) {
            const int j = opp[i];
            const DirectDomain::Link L = dom_.link(x, y, z, j);
            a[i][cell] = L.bounce ? b[j][cell] : b[i][L.cell];
          }
        }
      }
    }
  }

  DirectDomain dom_;
  TrtOperator op_;
  SoaField field_;
  int nw_;
};

}  // namespace

std::unique_ptr<Stepper> make_ts(const GridGeometry& g, const Stencil& s,
                                 const FlowParams& p, const StepperOptions& opt) {
  return std::make_unique<TsStepper>(g, s, p, opt);
}

}  // namespace lbmlab::detail
