#include <array>
#include <bit>
#include <vector>

#if defined(__SSE2__) && defined(__x86_64__)
#include <emmintrin.h>
#define LBMLAB_NT_STORES 1
#endif

#include "stepper_common.hpp"

namespace lbmlab::detail {
namespace {

#ifdef LBMLAB_NT_STORES
inline void nt_store(double* p, double v) {
  _mm_stream_si64(reinterpret_cast<long long*>(p), std::bit_cast<long long>(v));
}
#endif

bool streaming_stores_available() {
#ifdef LBMLAB_NT_STORES
  return true;
#else
  return false;
#endif
}

// Pull variant of the one-step scheme, blocked into chunks: originals are
// staged into a scratch buffer and collided there, then written out in
// per-direction store loops — one loop per direction (1S) or one per
// opposing pair plus rest (2S) — through non-temporal stores when enabled,
// so the destination grid is never read (no write allocate).
class OsntStepper final : public Stepper {
 public:
  OsntStepper(SchemeId id, Addressing a, const GridGeometry& g, const Stencil& s,
              const FlowParams& p, const StepperOptions& opt)
      : Stepper(id, a, s.q, g.fluid_count()),
        two_s_(id == SchemeId::osnt_pull_2s),
        op_(make_operator(s, p, opt)),
        nw_(resolve_workers(opt.workers)),
        nt_(opt.streaming_stores && streaming_stores_available()) {
    if (opt.chunk_length < 1) throw std::invalid_argument("chunk_length must be >= 1");
    chunk_ = static_cast<std::size_t>(opt.chunk_length);
    opp_ = s.opposite;
    pairs_ = direction_pairs(s);
    if (a == Addressing::direct) {
      dom_ = std::make_unique<DirectDomain>(g, s);
      field_ = SoaField(2, s.q, g.cells());
      // chunk boundaries: cell index where each run of chunk_ fluid cells starts
      chunk_cell_.push_back(0);
      std::size_t infl = 0;
      for (std::size_t c = 0; c < dom_->ncells; ++c) {
        if (!(dom_->info[c] & DirectDomain::kFluid)) continue;
        if (infl == chunk_) {
          chunk_cell_.push_back(c);
          infl = 0;
        }
        ++infl;
      }
      chunk_cell_.push_back(dom_->ncells);
      storage_nodes_ = dom_->ncells;
    } else {
      sp_ = build_sparse(g, s);
      field_ = SoaField(2, s.q, sp_.fluid_count);
      storage_nodes_ = sp_.fluid_count;
    }
    for (int i = 0; i < q_; ++i) {
      double* f = field_.dir(active_, i);
      const double v = s.w[i] * p.rho0;
      for (std::size_t c = 0; c < storage_nodes_; ++c) f[c] = v;
    }
  }

  void step() override {
    if (fresh_) {
      precollide();
      fresh_ = false;
    }
    if (addressing_ == Addressing::direct)
      sweep_direct();
    else
      sweep_indirect();
    active_ ^= 1;
    ++t_;
  }

  void extract_natural(double* out) const override {
    if (fresh_) {
      if (addressing_ == Addressing::direct)
        copy_out_direct(field_, active_, *dom_, q_, out);
      else
        copy_out_indirect(field_, active_, nodes_, q_, out);
      return;
    }
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
    fresh_ = true;
  }

  LayoutPhase layout_phase() const override { return LayoutPhase::natural; }

 private:
  void precollide() {
    std::array<double*, 19> f{};
    for (int i = 0; i < q_; ++i) f[i] = field_.dir(active_, i);
    const bool direct = addressing_ == Addressing::direct;
    const std::uint8_t* info = direct ? dom_->info.data() : nullptr;
    const long long nn =
        static_cast<long long>(direct ? dom_->ncells : sp_.fluid_count);
#pragma omp parallel for schedule(static) num_threads(nw_)
    for (long long c = 0; c < nn; ++c) {
      if (direct && !(info[c] & DirectDomain::kFluid)) continue;
      double tmp[19];
      for (int i = 0; i < q_; ++i) tmp[i] = f[i][c];
      op_.collide(tmp);
      for (int i = 0; i < q_; ++i) f[i][c] = tmp[i];
    }
  }

  template <bool NT>
  void store_chunk(const std::array<double*, 19>& b, const double* scr,
                   const std::size_t* idx, int count) {
    const int q = q_;
    if (!two_s_) {
      for (int i = 0; i < q; ++i) {
        double* bi = b[i];
        for (int k = 0; k < count; ++k) {
          const double v = scr[k * q + i];
          if constexpr (NT)
            nt_store(bi + idx[k], v);
          else
            bi[idx[k]] = v;
        }
      }
    } else {
      double* b0 = b[0];
      for (int k = 0; k < count; ++k) {
        const double v = scr[k * q];
        if constexpr (NT)
          nt_store(b0 + idx[k], v);
        else
          b0[idx[k]] = v;
      }
      for (const auto& [i, j] : pairs_) {
        double* bi = b[i];
        double* bj = b[j];
        for (int k = 0; k < count; ++k) {
          const double vi = scr[k * q + i], vj = scr[k * q + j];
          if constexpr (NT) {
            nt_store(bi + idx[k], vi);
            nt_store(bj + idx[k], vj);
          } else {
            bi[idx[k]] = vi;
            bj[idx[k]] = vj;
          }
        }
      }
    }
#ifdef LBMLAB_NT_STORES
    if constexpr (NT) _mm_sfence();
#endif
  }

  void sweep_direct() {
    std::array<const double*, 19> a{};
    std::array<double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(active_, i);
      b[i] = field_.dir(active_ ^ 1, i);
    }
    const int q = q_, nx = dom_->nx, ny = dom_->ny;
    const std::uint8_t* info = dom_->info.data();
    const int* opp = opp_.data();
    const long long nch = static_cast<long long>(chunk_cell_.size()) - 1;
#pragma omp parallel num_threads(nw_)
    {
      std::vector<double> scratch(chunk_ * q);
      std::vector<std::size_t> cells(chunk_);
#pragma omp for schedule(static)
      for (long long ch = 0; ch < nch; ++ch) {
        int count = 0;
        for (std::size_t cell = chunk_cell_[ch]; cell < chunk_cell_[ch + 1]; ++cell) {
          const std::uint8_t fi = info[cell];
          if (!(fi & DirectDomain::kFluid)) continue;
          double* tmp = scratch.data() + static_cast<std::size_t>(count) * q;
          tmp[0] = a[0][cell];
          if (fi & DirectDomain::kSimple) {
            for (int i = 1; i < q; ++i) tmp[i] = a[i][cell - dom_->off[i]];
          } else {
            const int x = static_cast<int>(cell % nx);
            const int y = static_cast<int>((cell / nx) % ny);
            const int z = static_cast<int>(cell / nx / ny);
            for (int i = 1; i < q; ++i) {
              const int j = opp[i];
              const DirectDomain::Link L = dom_->link(x, y, z, j);
              tmp[i] = L.bounce ? a[j][cell] : a[i][L.cell];
            }
          }
          op_.collide(tmp);
          cells[count++] = cell;
        }
        if (nt_)
          store_chunk<true>(b, scratch.data(), cells.data(), count);
        else
          store_chunk<false>(b, scratch.data(), cells.data(), count);
      }
    }
  }

  void sweep_indirect() {
    std::array<const double*, 19> a{};
    std::array<double*, 19> b{};
    for (int i = 0; i < q_; ++i) {
      a[i] = field_.dir(active_, i);
      b[i] = field_.dir(active_ ^ 1, i);
    }
    const int q = q_, qm1 = q_ - 1;
    const std::uint32_t* adj = sp_.adjacency.data();
    const int* opp = opp_.data();
    const std::size_t nfl = sp_.fluid_count;
    const long long nch = static_cast<long long>((nfl + chunk_ - 1) / chunk_);
#pragma omp parallel num_threads(nw_)
    {
      std::vector<double> scratch(chunk_ * q);
      std::vector<std::size_t> idx(chunk_);
#pragma omp for schedule(static)
      for (long long ch = 0; ch < nch; ++ch) {
        const std::size_t n0 = static_cast<std::size_t>(ch) * chunk_;
        const std::size_t n1 = std::min(n0 + chunk_, nfl);
        const int count = static_cast<int>(n1 - n0);
        for (std::size_t n = n0; n < n1; ++n) {
          double* tmp = scratch.data() + (n - n0) * q;
          tmp[0] = a[0][n];
          const std::uint32_t* row = adj + n * qm1;
          for (int i = 1; i < q; ++i) {
            const int j = opp[i];
            const std::uint32_t src = row[j - 1];
            tmp[i] = src == n ? a[j][n] : a[i][src];
          }
          op_.collide(tmp);
          idx[n - n0] = n;
        }
        if (nt_)
          store_chunk<true>(b, scratch.data(), idx.data(), count);
        else
          store_chunk<false>(b, scratch.data(), idx.data(), count);
      }
    }
  }

  bool two_s_;
  TrtOperator op_;
  int nw_;
  bool nt_;
  std::size_t chunk_ = 150;
  std::vector<int> opp_;
  std::vector<std::pair<int, int>> pairs_;
  std::unique_ptr<DirectDomain> dom_;
  SparseRepresentation sp_;
  SoaField field_;
  std::vector<std::size_t> chunk_cell_;
  std::size_t storage_nodes_ = 0;
  int active_ = 0;
  bool fresh_ = true;
};

}  // namespace

std::unique_ptr<Stepper> make_osnt(SchemeId id, Addressing a, const GridGeometry& g,
                                   const Stencil& s, const FlowParams& p,
                                   const StepperOptions& opt) {
  return std::make_unique<OsntStepper>(id, a, g, s, p, opt);
}

}  // namespace lbmlab::detail
