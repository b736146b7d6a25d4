#include "lbmlab/stepper.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stepper_common.hpp"

namespace lbmlab {

namespace {

struct SchemeName {
  SchemeId id;
  std::string_view name;
};

constexpr SchemeName kSchemeNames[] = {
    {SchemeId::ts, "ts"},
    {SchemeId::os_push, "os-push"},
    {SchemeId::os_pull, "os-pull"},
    {SchemeId::osnt_pull_1s, "osnt-pull-1s"},
    {SchemeId::osnt_pull_2s, "osnt-pull-2s"},
    {SchemeId::cg, "cg"},
    {SchemeId::swap_push, "swap-push"},
    {SchemeId::swap_pull, "swap-pull"},
    {SchemeId::aap, "aap"},
    {SchemeId::et, "et"},
};

std::string normalize(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

SchemeFamily family_of(SchemeId id) {
  switch (id) {
    case SchemeId::ts:
      return SchemeFamily::ts;
    case SchemeId::os_push:
    case SchemeId::os_pull:
      return SchemeFamily::os;
    case SchemeId::osnt_pull_1s:
    case SchemeId::osnt_pull_2s:
      return SchemeFamily::osnt;
    case SchemeId::cg:
      return SchemeFamily::cg;
    case SchemeId::swap_push:
    case SchemeId::swap_pull:
      return SchemeFamily::swap;
    case SchemeId::aap:
      return SchemeFamily::aap;
    case SchemeId::et:
      return SchemeFamily::et;
  }
  throw std::invalid_argument("unknown scheme");
}

std::string_view to_string(SchemeId id) {
  for (const auto& n : kSchemeNames)
    if (n.id == id) return n.name;
  throw std::invalid_argument("unknown scheme");
}

std::string_view to_string(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::ts:
      return "TS";
    case SchemeFamily::os:
      return "OS";
    case SchemeFamily::osnt:
      return "OSNT";
    case SchemeFamily::cg:
      return "CG";
    case SchemeFamily::swap:
      return "SWAP";
    case SchemeFamily::aap:
      return "AAP";
    case SchemeFamily::et:
      return "ET";
  }
  throw std::invalid_argument("unknown scheme family");
}

std::string_view to_string(Addressing a) {
  return a == Addressing::direct ? "direct" : "indirect";
}

std::string_view to_string(LayoutPhase p) {
  switch (p) {
    case LayoutPhase::natural:
      return "natural";
    case LayoutPhase::opposed:
      return "opposed";
    case LayoutPhase::shifted_even:
      return "shifted_even";
    case LayoutPhase::shifted_odd:
      return "shifted_odd";
    case LayoutPhase::twisted:
      return "twisted";
    case LayoutPhase::swap_partial:
      return "swap_partial";
  }
  throw std::invalid_argument("unknown layout phase");
}

SchemeId parse_scheme(std::string_view name) {
  const std::string n = normalize(name);
  for (const auto& e : kSchemeNames)
    if (n == e.name) return e.id;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

Addressing parse_addressing(std::string_view name) {
  const std::string n = normalize(name);
  if (n == "direct" || n == "full") return Addressing::direct;
  if (n == "indirect" || n == "sparse") return Addressing::indirect;
  throw std::invalid_argument("unknown addressing: " + std::string(name));
}

const std::vector<SchemeId>& all_schemes() {
  static const std::vector<SchemeId> ids = {
      SchemeId::ts,           SchemeId::os_push,   SchemeId::os_pull,
      SchemeId::osnt_pull_1s, SchemeId::osnt_pull_2s, SchemeId::cg,
      SchemeId::swap_push,    SchemeId::swap_pull, SchemeId::aap,
      SchemeId::et,
  };
  return ids;
}

bool kernel_available(SchemeId id, Addressing a) {
  if (a == Addressing::direct) return true;
  switch (id) {
    case SchemeId::os_push:
    case SchemeId::os_pull:
    case SchemeId::osnt_pull_1s:
    case SchemeId::osnt_pull_2s:
    case SchemeId::aap:
    case SchemeId::et:
      return true;
    default:
      return false;
  }
}

std::unique_ptr<Stepper> create_stepper(SchemeId id, Addressing a, const GridGeometry& g,
                                        const Stencil& s, const FlowParams& p,
                                        const StepperOptions& opt) {
  if (!kernel_available(id, a))
    throw std::invalid_argument("kernel not implemented; traffic model only");
  switch (id) {
    case SchemeId::ts:
      return detail::make_ts(g, s, p, opt);
    case SchemeId::os_push:
    case SchemeId::os_pull:
      return detail::make_os(id, a, g, s, p, opt);
    case SchemeId::osnt_pull_1s:
    case SchemeId::osnt_pull_2s:
      return detail::make_osnt(id, a, g, s, p, opt);
    case SchemeId::cg:
      return detail::make_cg(g, s, p, opt);
    case SchemeId::swap_push:
    case SchemeId::swap_pull:
      return detail::make_swap(id, g, s, p, opt);
    case SchemeId::aap:
      return detail::make_aap(a, g, s, p, opt);
    case SchemeId::et:
      return detail::make_et(a, g, s, p, opt);
  }
  throw std::invalid_argument("unknown scheme");
}

MacroFields macroscopic_fields(const Stepper& st, const Stencil& s, const FlowParams& p) {
  const std::vector<double> f = st.extract_natural();
  MacroFields out;
  out.rho.resize(st.node_count());
  out.u.resize(st.node_count());
  for (std::size_t n = 0; n < st.node_count(); ++n) {
    const Moments m = moments(s, f.data() + n * s.q, p.body_force);
    out.rho[n] = m.rho;
    out.u[n] = m.u;
  }
  return out;
}

namespace detail {

int resolve_workers(int workers) {
  if (workers < 0) throw std::invalid_argument("workers must be >= 0");
  if (workers != 0) return workers;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void copy_out_direct(const SoaField& f, int grid, const DirectDomain& d, int q,
                     double* out) {
  std::array<const double*, 19> a{};
  for (int i = 0; i < q; ++i) a[i] = f.dir(grid, i);
  std::size_t n = 0;
  for (std::size_t c = 0; c < d.ncells; ++c) {
    if (!(d.info[c] & DirectDomain::kFluid)) continue;
    for (int i = 0; i < q; ++i) out[n * q + i] = a[i][c];
    ++n;
  }
}

void copy_out_indirect(const SoaField& f, int grid, std::size_t nfluid, int q,
                       double* out) {
  std::array<const double*, 19> a{};
  for (int i = 0; i < q; ++i) a[i] = f.dir(grid, i);
  for (std::size_t n = 0; n < nfluid; ++n)
    for (int i = 0; i < q; ++i) out[n * q + i] = a[i][n];
}

void gather_out_direct(const SoaField& f, int grid, const DirectDomain& d, int q,
                       double* out) {
  std::array<const double*, 19> a{};
  for (int i = 0; i < q; ++i) a[i] = f.dir(grid, i);
  const int* opp = d.st.opposite.data();
  std::size_t cell = 0, n = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x, ++cell) {
        const std::uint8_t fi = d.info[cell];
        if (!(fi & DirectDomain::kFluid)) continue;
        double* o = out + n * q;
        o[0] = a[0][cell];
        if (fi & DirectDomain::kSimple) {
          for (int i = 1; i < q; ++i) o[i] = a[i][cell - d.off[i]];
        } else {
          for (int i = 1; i < q; ++i) {
            const int j = opp[i];
            const DirectDomain::Link L = d.link(x, y, z, j);
            o[i] = L.bounce ? a[j][cell] : a[i][L.cell];
          }
        }
        ++n;
      }
}

void gather_out_indirect(const SoaField& f, int grid, const SparseRepresentation& sp,
                         const int* opp, int q, double* out) {
  std::array<const double*, 19> a{};
  for (int i = 0; i < q; ++i) a[i] = f.dir(grid, i);
  const int qm1 = q - 1;
  const std::uint32_t* adj = sp.adjacency.data();
  for (std::size_t n = 0; n < sp.fluid_count; ++n) {
    double* o = out + n * q;
    o[0] = a[0][n];
    const std::uint32_t* row = adj + n * qm1;
    for (int i = 1; i < q; ++i) {
      const int j = opp[i];
      const std::uint32_t src = row[j - 1];
      o[i] = src == n ? a[j][n] : a[i][src];
    }
  }
}

void load_in_direct(SoaField& f, int grid, const DirectDomain& d, int q,
                    const double* in) {
  std::array<double*, 19> a{};
  for (int i = 0; i < q; ++i) a[i] = f.dir(grid, i);
  std::size_t n = 0;
  for (std::size_t c = 0; c < d.ncells; ++c) {
    if (!(d.info[c] & DirectDomain::kFluid)) continue;
    for (int i = 0; i < q; ++i) a[i][c] = in[n * q + i];
    ++n;
  }
}

void load_in_indirect(SoaField& f, int grid, std::size_t nfluid, int q,
                      const double* in) {
  std::array<double*, 19> a{};
  for (int i = 0; i < q; ++i) a[i] = f.dir(grid, i);
  for (std::size_t n = 0; n < nfluid; ++n)
    for (int i = 0; i < q; ++i) a[i][n] = in[n * q + i];
}

}  // namespace detail

}  // namespace lbmlab
