#include <array>
#include <vector>

#include "stepper_common.hpp"

namespace lbmlab::detail {
namespace {

// is c lexicographically negative by (cz, cy, cx)? Splits the non-rest
// directions into the half pointing at already-visited nodes of a forward
// row-major traversal and the half pointing ahead.
bool lex_negative(const std::array<int, 3>& c) {
  if (c[2] != 0) return c[2] < 0;
  if (c[1] != 0) return c[1] < 0;
  return c[0] < 0;
}

// Single-grid scheme streaming by swapping pairs of slots across each link,
// one traversal-half of the directions per node. The push flavour collides
// from opposed slots, stores naturally, then swaps with the already-visited
// neighbours, leaving the opposed convention for the next sweep. The pull
// flavour keeps post-collision values in natural slots between sweeps,
// swap-first with the not-yet-visited neighbours, and runs one collision
// behind: extraction streams the stored state on the fly. Both walk nodes in
// strictly ascending row-major order, so neither admits concurrent workers.
// Links across a periodic seam cannot be swapped mid-sweep (their partner is
// not adjacent in traversal order); they are listed up front and exchanged in
// a fix-up pass between sweeps, optionally deferred until the state is next
// touched.
class SwapStepper final : public Stepper {
 public:
  SwapStepper(SchemeId id, const GridGeometry& g, const Stencil& s,
              const FlowParams& p, const StepperOptions& opt)
      : Stepper(id, Addressing::direct, s.q, g.fluid_count()),
        pull_(id == SchemeId::swap_pull),
        defer_(opt.swap_deferred_fixup),
        op_(make_operator(s, p, opt)) {
    if (resolve_workers(opt.workers) != 1)
      throw std::invalid_argument("scheme is sequential; workers must be 1");
    opp_ = s.opposite;
    for (int i = 1; i < s.q; ++i)
      if (lex_negative(s.c[i]))
        back_.push_back(i);
    dom_ = std::make_unique<DirectDomain>(g, s);
    field_ = SoaField(1, q_, g.cells());
    // links across a periodic seam, one entry per link (from the backward side)
    std::vector<std::uint32_t> node_of(g.cells(), 0);
    std::uint32_t n = 0;
    for (std::size_t cell = 0; cell < g.cells(); ++cell)
      if (dom_->info[cell] & DirectDomain::kFluid) node_of[cell] = n++;
    for (int z = 0; z < g.nz; ++z)
      for (int y = 0; y < g.ny; ++y)
        for (int x = 0; x < g.nx; ++x) {
          if (!g.is_fluid(x, y, z)) continue;
          const std::size_t cell = g.index(x, y, z);
          for (int i : back_) {
            const LinkTarget L = resolve_link(g, x, y, z, s.c[i]);
            if (L.bounce) continue;
            const std::size_t w = g.index(L.x, L.y, L.z);
            if (static_cast<long long>(w) ==
                static_cast<long long>(cell) + dom_->off[i])
              continue;  // not wrapped
            fixup_.push_back({cell, w, node_of[cell], node_of[w], i});
          }
        }
    const std::vector<double>& w = s.w;
    for (int i = 0; i < q_; ++i) {
      double* f = field_.dir(0, pull_ ? i : opp_[i]);
      const double v = w[i] * p.rho0;
      for (std::size_t cell = 0; cell < dom_->ncells; ++cell)
        if (dom_->info[cell] & DirectDomain::kFluid) f[cell] = v;
    }
    fresh_ = pull_;
  }

  void step() override {
    if (pull_) {
      if (fresh_) {
        precollide();
        fresh_ = false;
      } else {
        apply_fixup();
        sweep_pull();
      }
    } else {
      if (pending_) {
        apply_fixup();
        pending_ = false;
      }
      sweep_push();
      if (defer_ && !fixup_.empty())
        pending_ = true;
      else
        apply_fixup();
    }
    ++t_;
  }

  void extract_natural(double* out) const override {
    if (pull_) {
      if (fresh_)
        copy_out_direct(field_, 0, *dom_, q_, out);
      else
        gather_out_direct(field_, 0, *dom_, q_, out);
      return;
    }
    std::array<const double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const int q = q_;
    std::size_t n = 0;
    for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
      if (!(dom_->info[cell] & DirectDomain::kFluid)) continue;
      double* o = out + n++ * q;
      for (int i = 0; i < q; ++i) o[i] = f[opp_[i]][cell];
    }
    if (pending_)
      for (const Fixup& fx : fixup_)
        std::swap(out[fx.node_a * static_cast<std::size_t>(q) + opp_[fx.dir]],
                  out[fx.node_b * static_cast<std::size_t>(q) + fx.dir]);
  }

  void load_natural(const double* in) override {
    if (pull_) {
      load_in_direct(field_, 0, *dom_, q_, in);
      fresh_ = true;
    } else {
      std::array<double*, 19> f{};
      for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
      std::size_t n = 0;
      for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
        if (!(dom_->info[cell] & DirectDomain::kFluid)) continue;
        const double* src = in + n++ * q_;
        for (int i = 0; i < q_; ++i) f[opp_[i]][cell] = src[i];
      }
      pending_ = false;
    }
    t_ = 0;
  }

  LayoutPhase layout_phase() const override {
    if (pull_) return LayoutPhase::natural;
    return pending_ ? LayoutPhase::swap_partial : LayoutPhase::opposed;
  }

 private:
  struct Fixup {
    std::size_t cell_a, cell_b;
    std::uint32_t node_a, node_b;
    int dir;
  };

  void apply_fixup() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    for (const Fixup& fx : fixup_)
      std::swap(f[fx.dir][fx.cell_a], f[opp_[fx.dir]][fx.cell_b]);
  }

  void precollide() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const std::uint8_t* info = dom_->info.data();
    for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
      if (!(info[cell] & DirectDomain::kFluid)) continue;
      double tmp[19];
      for (int i = 0; i < q_; ++i) tmp[i] = f[i][cell];
      op_.collide(tmp);
      for (int i = 0; i < q_; ++i) f[i][cell] = tmp[i];
    }
  }

  void sweep_push() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const int q = q_, nx = dom_->nx, ny = dom_->ny;
    const std::uint8_t* info = dom_->info.data();
    for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
      const std::uint8_t fi = info[cell];
      if (!(fi & DirectDomain::kFluid)) continue;
      double tmp[19];
      for (int i = 0; i < q; ++i) tmp[i] = f[opp_[i]][cell];
      op_.collide(tmp);
      for (int i = 0; i < q; ++i) f[i][cell] = tmp[i];
      if (fi & DirectDomain::kSimple) {
        for (int i : back_)
          std::swap(f[i][cell], f[opp_[i]][cell + dom_->off[i]]);
      } else {
        const int x = static_cast<int>(cell % nx);
        const int y = static_cast<int>((cell / nx) % ny);
        const int z = static_cast<int>(cell / nx / ny);
        for (int i : back_) {
          const DirectDomain::Link L = dom_->link(x, y, z, i);
          if (L.bounce) continue;
          if (static_cast<long long>(L.cell) !=
              static_cast<long long>(cell) + dom_->off[i])
            continue;  // wrapped: fix-up pass
          std::swap(f[i][cell], f[opp_[i]][L.cell]);
        }
      }
    }
  }

  void sweep_pull() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(0, i);
    const int q = q_, nx = dom_->nx, ny = dom_->ny;
    const std::uint8_t* info = dom_->info.data();
    for (std::size_t cell = 0; cell < dom_->ncells; ++cell) {
      const std::uint8_t fi = info[cell];
      if (!(fi & DirectDomain::kFluid)) continue;
      if (fi & DirectDomain::kSimple) {
        for (int i : back_) {
          const int j = opp_[i];
          std::swap(f[j][cell], f[i][cell + dom_->off[j]]);
        }
      } else {
        const int x = static_cast<int>(cell % nx);
        const int y = static_cast<int>((cell / nx) % ny);
        const int z = static_cast<int>(cell / nx / ny);
        for (int i : back_) {
          const int j = opp_[i];
          const DirectDomain::Link L = dom_->link(x, y, z, j);
          if (L.bounce) continue;
          if (static_cast<long long>(L.cell) !=
              static_cast<long long>(cell) + dom_->off[j])
            continue;  // wrapped: handled before the sweep
          std::swap(f[j][cell], f[i][L.cell]);
        }
      }
      double tmp[19];
      for (int i = 0; i < q; ++i) tmp[i] = f[opp_[i]][cell];
      op_.collide(tmp);
      for (int i = 0; i < q; ++i) f[i][cell] = tmp[i];
    }
  }

  bool pull_;
  bool defer_;
  TrtOperator op_;
  std::vector<int> opp_;
  std::vector<int> back_;
  std::unique_ptr<DirectDomain> dom_;
  SoaField field_;
  std::vector<Fixup> fixup_;
  bool pending_ = false;
  bool fresh_ = false;
};

}  // namespace

std::unique_ptr<Stepper> make_swap(SchemeId id, const GridGeometry& g,
                                   const Stencil& s, const FlowParams& p,
                                   const StepperOptions& opt) {
  return std::make_unique<SwapStepper>(id, g, s, p, opt);
}

}  // namespace lbmlab::detail
