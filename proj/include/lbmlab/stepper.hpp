#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lbmlab/collision.hpp"
#include "lbmlab/geometry.hpp"
#include "lbmlab/stencil.hpp"

namespace lbmlab {

enum class SchemeId {
  ts,
  os_push,
  os_pull,
  osnt_pull_1s,
  osnt_pull_2s,
  cg,
  swap_push,
  swap_pull,
  aap,
  et,
};

// Traffic-model granularity: the seven propagation families.
enum class SchemeFamily { ts, os, osnt, cg, swap, aap, et };

enum class Addressing { direct, indirect };

SchemeFamily family_of(SchemeId id);
std::string_view to_string(SchemeId id);
std::string_view to_string(SchemeFamily f);
std::string_view to_string(Addressing a);
SchemeId parse_scheme(std::string_view name);
Addressing parse_addressing(std::string_view name);
const std::vector<SchemeId>& all_schemes();

bool kernel_available(SchemeId id, Addressing a);

// How stored slots currently map to physical PDFs (between steps).
enum class LayoutPhase {
  natural,
  opposed,
  shifted_even,
  shifted_odd,
  twisted,
  swap_partial,
};

std::string_view to_string(LayoutPhase p);

struct StepperOptions {
  int workers = 1;        // 0 = all hardware threads
  int chunk_length = 150;  // staging block, nodes (streaming-store kernels)
  bool streaming_stores = true;   // use the write-allocate-bypassing store path
  bool swap_deferred_fixup = false;  // swap scheme: run the wrapped-link
                                     // fix-up lazily instead of post-sweep
  bool zero_collision = false;  // property-test hook: identity collision
                                // (both relaxation rates 0, no force), so a
                                // step is pure streaming
};

// One propagation scheme bound to a geometry. step() advances one LBM time
// step (collision + streaming); extract_natural/load_natural convert between
// the scheme's internal layout and the canonical snapshot: fluid nodes in
// x-fastest order, directions in stencil order, physical-time PDFs.
class Stepper {
 public:
  virtual ~Stepper() = default;

  virtual void step() = 0;
  virtual void extract_natural(double* out) const = 0;
  virtual void load_natural(const double* in) = 0;
  virtual LayoutPhase layout_phase() const = 0;

  // Exchanges the opposite-direction storage handles (the twist scheme's
  // propagation primitive, exposed for its involution test). Returns false
  // for schemes without a handle table.
  virtual bool exchange_opposite_handles() { return false; }

  std::vector<double> extract_natural() const {
    std::vector<double> out(values());
    extract_natural(out.data());
    return out;
  }

  SchemeId scheme() const { return scheme_; }
  Addressing addressing() const { return addressing_; }
  long long time_step() const { return t_; }
  std::size_t node_count() const { return nodes_; }
  int q() const { return q_; }
  std::size_t values() const { return nodes_ * static_cast<std::size_t>(q_); }

 protected:
  Stepper(SchemeId id, Addressing a, int q, std::size_t nodes)
      : scheme_(id), addressing_(a), q_(q), nodes_(nodes) {}

  SchemeId scheme_;
  Addressing addressing_;
  int q_ = 0;
  std::size_t nodes_ = 0;
  long long t_ = 0;
};

// Initial field: equilibrium at (rho0, u = 0). Unsupported (scheme,
// addressing) pairs throw "kernel not implemented; traffic model only".
std::unique_ptr<Stepper> create_stepper(SchemeId id, Addressing a,
                                        const GridGeometry& g, const Stencil& s,
                                        const FlowParams& p,
                                        const StepperOptions& opt = {});

struct MacroFields {
  std::vector<double> rho;                  // per fluid node
  std::vector<std::array<double, 3>> u;     // per fluid node
};

MacroFields macroscopic_fields(const Stepper& st, const Stencil& s, const FlowParams& p);

}  // namespace lbmlab
