#include <array>
#include <vector>

#include "stepper_common.hpp"

namespace lbmlab::detail {
namespace {

// Single grid padded by 3 cells per axis; collide and stream fused. Each
// sweep writes one cell further along +1^3 than it reads (even sweeps) or one
// cell back (odd sweeps); traversing in reverse lexicographic order on even
// sweeps and forward on odd ones guarantees every node is read before any
// write can land on it, so no second grid is needed. Plain writes always use
// unwrapped coordinates — values crossing a periodic seam land in the padding
// and are copied to their wrapped slot in a fix-up pass after the sweep.
class CgStepper final : public Stepper {
 public:
  CgStepper(const GridGeometry& g, const Stencil& s, const FlowParams& p,
            const StepperOptions& opt)
      : Stepper(SchemeId::cg, Addressing::direct, s.q, g.fluid_count()),
        op_(make_operator(s, p, opt)) {
    if (resolve_workers(opt.workers) != 1)
      throw std::invalid_argument("scheme is sequential; workers must be 1");
    opp_ = s.opposite;
    dom_ = std::make_unique<DirectDomain>(g, s);
    px_ = g.nx + 3;
    py_ = g.ny + 3;
    pz_ = g.nz + 3;
    const std::size_t len = static_cast<std::size_t>(px_) * py_ * pz_;
    for (int i = 0; i < q_; ++i)
      poff_[i] = s.c[i][0] + static_cast<long long>(px_) * s.c[i][1] +
                 static_cast<long long>(px_) * py_ * s.c[i][2];
    shift1_ = 1 + static_cast<long long>(px_) + static_cast<long long>(px_) * py_;
    field_ = SoaField(1, q_, len);
    // plain links that cross a periodic seam: their value lands unwrapped in
    // the padding and must be copied to the wrapped slot after the sweep
    for (int z = 0; z < g.nz; ++z)
      for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
          if (!g.is_fluid(x, y, z)) continue;
          for (int i = 1; i < q_; ++i) {
            const LinkTarget L = resolve_link(g, x, y, z, s.c[i]);
            if (L.bounce) continue;
            const int tx = x + s.c[i][0], ty = y + s.c[i][1], tz = z + s.c[i][2];
            if (tx == L.x && ty == L.y && tz == L.z) continue;
            fixup_.push_back({pidx(tx + 2, ty + 2, tz + 2),
                              pidx(L.x + 2, L.y + 2, L.z + 2), i});
          }
        }
    const std::vector<double>& w = s.w;
    for (int i = 0; i < q_; ++i) {
      double* f = field_.dir(0, i);
      const double v = w[i] * p.rho0;
      for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
        if (!(dom_->info[cell] & DirectDomain::kFluid)) continue;
        f[shift1_ + unpadded_to_padded(cell)] = v;
      }
    }
  }

  void step() override {
    if ((t_ & 1) == 0)
      sweep<true>();
    else
      sweep<false>();
    ++t_;
  }

  void extract_natural(double* out) const override {
    std::array<const double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const long long s = (t_ & 1) ? 2 * shift1_ : shift1_;
    const int q = q_;
    std::size_t n = 0;
    for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
      if (!(dom_->info[cell] & DirectDomain::kFluid)) continue;
      const std::size_t slot = s + unpadded_to_padded(cell);
      double* o = out + n++ * q;
      for (int i = 0; i < q; ++i) o[i] = f[i][slot];
    }
  }

  void load_natural(const double* in) override {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const int q = q_;
    std::size_t n = 0;
    for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
      if (!(dom_->info[cell] & DirectDomain::kFluid)) continue;
      const std::size_t slot = shift1_ + unpadded_to_padded(cell);
      const double* src = in + n++ * q;
      for (int i = 0; i < q; ++i) f[i][slot] = src[i];
    }
    t_ = 0;
  }

  LayoutPhase layout_phase() const override {
    return (t_ & 1) ? LayoutPhase::shifted_even : LayoutPhase::shifted_odd;
  }

 private:
  struct Fixup {
    std::size_t src2, dst2;  // padded slots at the +2 origin; -shift1_ for odd
    int dir;
  };

  std::size_t pidx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * py_ + y) * px_ + x;
  }

  std::size_t unpadded_to_padded(std::size_t cell) const {
    const int x = static_cast<int>(cell % dom_->nx);
    const int y = static_cast<int>((cell / dom_->nx) % dom_->ny);
    const int z = static_cast<int>(cell / dom_->nx / dom_->ny);
    return pidx(x, y, z);
  }

  template <bool Even>
  void sweep() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const int q = q_, nx = dom_->nx, ny = dom_->ny, nz = dom_->nz;
    const std::uint8_t* info = dom_->info.data();
    const int* opp = opp_.data();
    const int z0 = Even ? nz - 1 : 0, zs = Even ? -1 : 1;
    const int y0 = Even ? ny - 1 : 0;
    const int x0 = Even ? nx - 1 : 0;
    for (int z = z0; z >= 0 && z < nz; z += zs)
      for (int y = y0; y >= 0 && y < ny; y += zs)
        for (int x = x0; x >= 0 && x < nx; x += zs) {
          const std::size_t cell =
              (static_cast<std::size_t>(z) * ny + y) * nx + x;
          const std::uint8_t fi = info[cell];
          if (!(fi & DirectDomain::kFluid)) continue;
          // even: read at +1 origin, write at +2; odd: read +2, write +1
          const std::size_t base = pidx(x + 1, y + 1, z + 1);
          const std::size_t rd = Even ? base : base + shift1_;
          const std::size_t wr = Even ? base + shift1_ : base;
          double tmp[19];
          for (int i = 0; i < q; ++i) tmp[i] = f[i][rd];
          op_.collide(tmp);
          f[0][wr] = tmp[0];
          if (fi & DirectDomain::kSimple) {
            for (int i = 1; i < q; ++i) f[i][wr + poff_[i]] = tmp[i];
          } else {
            for (int i = 1; i < q; ++i) {
              if (dom_->link(x, y, z, i).bounce)
                f[opp[i]][wr] = tmp[i];
              else
                f[i][wr + poff_[i]] = tmp[i];
            }
          }
        }
    const long long d = Even ? 0 : shift1_;
    for (const Fixup& fx : fixup_) {
      double* fd = f[fx.dir];
      fd[fx.dst2 - d] = fd[fx.src2 - d];
    }
  }

  TrtOperator op_;
  std::vector<int> opp_;
  std::unique_ptr<DirectDomain> dom_;
  SoaField field_;
  std::vector<Fixup> fixup_;
  int px_ = 0, py_ = 0, pz_ = 0;
  long long poff_[19] = {};
  long long shift1_ = 0;
};

}  // namespace

std::unique_ptr<Stepper> make_cg(const GridGeometry& g, const Stencil& s,
                                 const FlowParams& p, const StepperOptions& opt) {
  return std::make_unique<CgStepper>(g, s, p, opt);
}

}  // namespace lbmlab::detail
