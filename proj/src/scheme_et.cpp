#include <array>
#include <vector>

#include "stepper_common.hpp"

namespace lbmlab::detail {
namespace {

// In-place scheme keeping one storage region per direction plus a handle
// table that is permuted instead of moving data. For an opposing pair (i, j)
// the population f_i of a node sits in the node's own slot of region
// handle[i], while f_j sits one c_i-hop away in region handle[j]; swapping
// the two handles after a sweep then performs most of the propagation for
// free. Links into walls or solids park their value in the blocked cell
// itself (direct) or in mailbox slots appended after the fluid range
// (indirect), which replays as bounce-back one step later. Every slot has a
// single reader and a single writer per sweep, so the sweep parallelizes.
class EtStepper final : public Stepper {
 public:
  EtStepper(Addressing a, const GridGeometry& g, const Stencil& s,
            const FlowParams& p, const StepperOptions& opt)
      : Stepper(SchemeId::et, a, s.q, g.fluid_count()),
        op_(make_operator(s, p, opt)),
        nw_(resolve_workers(opt.workers)),
        c_(s.c),
        pairs_(direction_pairs(s)) {
    base_.resize(q_);
    for (int i = 0; i < q_; ++i) base_[i] = i;
    if (a == Addressing::direct) {
      dom_ = std::make_unique<DirectDomain>(g, s);
      for (int k = 0; k < 3; ++k)
        halo_[k] = g.axis_policy[k] == AxisPolicy::wall ? 1 : 0;
      ex_ = g.nx + 2 * halo_[0];
      ey_ = g.ny + 2 * halo_[1];
      ez_ = g.nz + 2 * halo_[2];
      const std::size_t len =
          static_cast<std::size_t>(ex_) * ey_ * ez_;
      for (int i = 0; i < q_; ++i)
        eoff_[i] = c_[i][0] + static_cast<long long>(ex_) * c_[i][1] +
                   static_cast<long long>(ex_) * ey_ * c_[i][2];
      field_ = SoaField(1, q_, len);
    } else {
      sp_ = build_sparse(g, s);
      const int np = static_cast<int>(pairs_.size());
      rem_.resize(nodes_ * np);
      std::vector<std::uint32_t> mail(np, 0);
      const std::uint32_t* adj = sp_.adjacency.data();
      const int qm1 = q_ - 1;
      for (std::size_t n = 0; n < nodes_; ++n) {
        const std::uint32_t* row = adj + n * qm1;
        for (int pi = 0; pi < np; ++pi) {
          const auto [i, j] = pairs_[pi];
          std::uint32_t r = row[i - 1];
          if (r == n) r = static_cast<std::uint32_t>(nodes_) + mail[pi]++;
          const bool ub = row[j - 1] == n;
          rem_[n * np + pi] = r | (ub ? 0x80000000u : 0u);
        }
      }
      std::uint32_t nmail = 0;
      for (std::uint32_t m : mail) nmail = std::max(nmail, m);
      field_ = SoaField(1, q_, nodes_ + nmail);
    }
    const std::vector<double>& w = s.w;
    const double rho0 = p.rho0;
    fill([&](std::size_t, int i) { return w[i] * rho0; });
  }

  void step() override {
    if (addressing_ == Addressing::direct)
      sweep_direct();
    else
      sweep_indirect();
    for (const auto& [i, j] : pairs_) std::swap(base_[i], base_[j]);
    ++t_;
  }

  bool exchange_opposite_handles() override {
    for (const auto& [i, j] : pairs_) std::swap(base_[i], base_[j]);
    return true;
  }

  void extract_natural(double* out) const override {
    std::array<const double*, 19> F{};
    for (int r = 0; r < q_; ++r) F[r] = field_.dir(0, r);
    const int q = q_;
    if (addressing_ == Addressing::direct) {
      const int nx = dom_->nx, ny = dom_->ny;
      std::size_t n = 0;
      for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
        const std::uint8_t fi = dom_->info[cell];
        if (!(fi & DirectDomain::kFluid)) continue;
        const int x = static_cast<int>(cell % nx);
        const int y = static_cast<int>((cell / nx) % ny);
        const int z = static_cast<int>(cell / nx / ny);
        const std::size_t X = eidx(x, y, z);
        double* o = out + n++ * q;
        o[0] = F[0][X];
        if (fi & DirectDomain::kSimple) {
          for (const auto& [i, j] : pairs_) {
            o[i] = F[base_[i]][X];
            o[j] = F[base_[j]][X + eoff_[i]];
          }
        } else {
          for (const auto& [i, j] : pairs_) {
            const bool db = dom_->link(x, y, z, i).bounce;
            o[i] = F[base_[i]][X];
            o[j] = F[base_[db ? i : j]][ext_slot(x, y, z, i)];
          }
        }
      }
    } else {
      const int np = static_cast<int>(pairs_.size());
      for (std::size_t n = 0; n < nodes_; ++n) {
        double* o = out + n * q;
        o[0] = F[0][n];
        for (int pi = 0; pi < np; ++pi) {
          const auto [i, j] = pairs_[pi];
          const std::uint32_t r = rem_[n * np + pi] & 0x7fffffffu;
          const bool db = r >= nodes_;
          o[i] = F[base_[i]][n];
          o[j] = F[base_[db ? i : j]][r];
        }
      }
    }
  }

  void load_natural(const double* in) override {
    for (int i = 0; i < q_; ++i) base_[i] = i;
    fill([&](std::size_t n, int i) { return in[n * q_ + i]; });
    t_ = 0;
  }

  LayoutPhase layout_phase() const override {
    for (int i = 0; i < q_; ++i)
      if (base_[i] != i) return LayoutPhase::twisted;
    return LayoutPhase::natural;
  }

 private:
  std::size_t eidx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z + halo_[2]) * ey_ + (y + halo_[1])) * ex_ +
           (x + halo_[0]);
  }

  // extended-grid slot of x + c_i: periodic axes wrap, wall axes run into the
  // halo; solid targets are their own (mailbox) slot
  std::size_t ext_slot(int x, int y, int z, int i) const {
    int t[3] = {x + c_[i][0], y + c_[i][1], z + c_[i][2]};
    const int n[3] = {dom_->nx, dom_->ny, dom_->nz};
    for (int k = 0; k < 3; ++k)
      if (!halo_[k]) t[k] = (t[k] + n[k]) % n[k];
    return eidx(t[0], t[1], t[2]);
  }

  template <class Get>
  void fill(Get get) {
    std::array<double*, 19> F{};
    for (int r = 0; r < q_; ++r) F[r] = field_.dir(0, r);
    if (addressing_ == Addressing::direct) {
      const int nx = dom_->nx, ny = dom_->ny;
      std::size_t n = 0;
      for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
        if (!(dom_->info[cell] & DirectDomain::kFluid)) continue;
        const int x = static_cast<int>(cell % nx);
        const int y = static_cast<int>((cell / nx) % ny);
        const int z = static_cast<int>(cell / nx / ny);
        const std::size_t X = eidx(x, y, z);
        F[0][X] = get(n, 0);
        for (const auto& [i, j] : pairs_) {
          const bool db = dom_->link(x, y, z, i).bounce;
          F[i][X] = get(n, i);
          F[db ? i : j][ext_slot(x, y, z, i)] = get(n, j);
        }
        ++n;
      }
    } else {
      const int np = static_cast<int>(pairs_.size());
      for (std::size_t n = 0; n < nodes_; ++n) {
        F[0][n] = get(n, 0);
        for (int pi = 0; pi < np; ++pi) {
          const auto [i, j] = pairs_[pi];
          const std::uint32_t r = rem_[n * np + pi] & 0x7fffffffu;
          const bool db = r >= nodes_;
          F[i][n] = get(n, i);
          F[db ? i : j][r] = get(n, j);
        }
      }
    }
  }

  void sweep_direct() {
    std::array<double*, 19> F{};
    for (int r = 0; r < q_; ++r) F[r] = field_.dir(0, r);
    const int nx = dom_->nx, ny = dom_->ny, nz = dom_->nz;
    const std::uint8_t* info = dom_->info.data();
    const int np = static_cast<int>(pairs_.size());
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
        const std::size_t X = eidx(x, y, z);
        double tmp[19];
        std::size_t rs[9];
        bool ub[9];
        tmp[0] = F[0][X];
        if (fi & DirectDomain::kSimple) {
          for (int pi = 0; pi < np; ++pi) {
            const auto [i, j] = pairs_[pi];
            rs[pi] = X + eoff_[i];
            ub[pi] = false;
            tmp[i] = F[base_[i]][X];
            tmp[j] = F[base_[j]][rs[pi]];
          }
        } else {
          for (int pi = 0; pi < np; ++pi) {
            const auto [i, j] = pairs_[pi];
            const bool db = dom_->link(x, y, z, i).bounce;
            rs[pi] = ext_slot(x, y, z, i);
            ub[pi] = dom_->link(x, y, z, j).bounce;
            tmp[i] = F[base_[i]][X];
            tmp[j] = F[base_[db ? i : j]][rs[pi]];
          }
        }
        op_.collide(tmp);
        F[0][X] = tmp[0];
        for (int pi = 0; pi < np; ++pi) {
          const auto [i, j] = pairs_[pi];
          F[base_[ub[pi] ? j : i]][X] = tmp[j];
          F[base_[j]][rs[pi]] = tmp[i];
        }
      }
    }
  }

  void sweep_indirect() {
    std::array<double*, 19> F{};
    for (int r = 0; r < q_; ++r) F[r] = field_.dir(0, r);
    const int np = static_cast<int>(pairs_.size());
    const std::uint32_t* rem = rem_.data();
    const long long nn = static_cast<long long>(nodes_);
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long n = 0; n < nn; ++n) {
      const std::uint32_t* rrow = rem + static_cast<std::size_t>(n) * np;
      double tmp[19];
      std::uint32_t rs[9];
      bool ub[9];
      tmp[0] = F[0][n];
      for (int pi = 0; pi < np; ++pi) {
        const auto [i, j] = pairs_[pi];
        const std::uint32_t packed = rrow[pi];
        const std::uint32_t r = packed & 0x7fffffffu;
        const bool db = r >= nn;
        rs[pi] = r;
        ub[pi] = (packed & 0x80000000u) != 0;
        tmp[i] = F[base_[i]][n];
        tmp[j] = F[base_[db ? i : j]][r];
      }
      op_.collide(tmp);
      F[0][n] = tmp[0];
      for (int pi = 0; pi < np; ++pi) {
        const auto [i, j] = pairs_[pi];
        F[base_[ub[pi] ? j : i]][n] = tmp[j];
        F[base_[j]][rs[pi]] = tmp[i];
      }
    }
  }

  TrtOperator op_;
  int nw_;
  std::vector<std::array<int, 3>> c_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> base_;
  std::unique_ptr<DirectDomain> dom_;
  SparseRepresentation sp_;
  std::vector<std::uint32_t> rem_;
  SoaField field_;
  int ex_ = 0, ey_ = 0, ez_ = 0;
  int halo_[3] = {0, 0, 0};
  long long eoff_[19] = {};
};

}  // namespace

std::unique_ptr<Stepper> make_et(Addressing a, const GridGeometry& g, const Stencil& s,
                                 const FlowParams& p, const StepperOptions& opt) {
  return std::make_unique<EtStepper>(a, g, s, p, opt);
}

}  // namespace lbmlab::detail
