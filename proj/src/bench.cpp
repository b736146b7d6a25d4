#include "lbmlab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <random>
#include <stdexcept>

#include <unistd.h>

#if defined(__SSE2__) && defined(__x86_64__)
#include <emmintrin.h>
#define LBMLAB_STREAM_SSE2 1
#endif

#include "lbmlab/perfmodel.hpp"
#include "json.hpp"
#include "stepper_common.hpp"

namespace lbmlab {
namespace {

using Clock = std::chrono::steady_clock;

struct FreeDeleter {
  void operator()(double* p) const { std::free(p); }
};

using Buffer = std::unique_ptr<double, FreeDeleter>;

Buffer alloc_doubles(std::size_t n) {
  void* p = std::aligned_alloc(64, n * sizeof(double));
  if (!p) throw std::bad_alloc();
  return Buffer(static_cast<double*>(p));
}

std::size_t detect_llc() {
  long best = 0;
#ifdef _SC_LEVEL2_CACHE_SIZE
  for (int name : {
#ifdef _SC_LEVEL4_CACHE_SIZE
           _SC_LEVEL4_CACHE_SIZE,
#endif
#ifdef _SC_LEVEL3_CACHE_SIZE
           _SC_LEVEL3_CACHE_SIZE,
#endif
           _SC_LEVEL2_CACHE_SIZE}) {
    const long v = sysconf(name);
    if (v > 0) {
      best = v;
      break;
    }
  }
#endif
  if (best <= 0) best = 32l << 20;
  return static_cast<std::size_t>(best);
}

// Explicit SSE2 copy loops: keeps the store flavour under our control (the
// compiler would otherwise recognize the loop as memcpy and pick for itself).
#ifdef LBMLAB_STREAM_SSE2
void copy_streaming(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; i += 8) {
    _mm_stream_pd(dst + i, _mm_load_pd(src + i));
    _mm_stream_pd(dst + i + 2, _mm_load_pd(src + i + 2));
    _mm_stream_pd(dst + i + 4, _mm_load_pd(src + i + 4));
    _mm_stream_pd(dst + i + 6, _mm_load_pd(src + i + 6));
  }
  _mm_sfence();
}

void copy_allocate(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; i += 8) {
    _mm_store_pd(dst + i, _mm_load_pd(src + i));
    _mm_store_pd(dst + i + 2, _mm_load_pd(src + i + 2));
    _mm_store_pd(dst + i + 4, _mm_load_pd(src + i + 4));
    _mm_store_pd(dst + i + 6, _mm_load_pd(src + i + 6));
  }
}
#else
void copy_allocate(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
  __asm__ volatile("" ::"r"(dst) : "memory");
}
#endif

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::size_t last_level_cache_bytes() {
  static const std::size_t v = detect_llc();
  return v;
}

StreamResult stream_copy_bw(std::size_t buffer_bytes, int repetitions,
                            StoreMode mode) {
  if (repetitions < 5)
    throw std::invalid_argument("repetitions must be at least 5");
  if (buffer_bytes < 4 * last_level_cache_bytes())
    throw std::invalid_argument("buffer too small");
  StreamResult r;
  r.requested = mode;
  r.used = mode;
#ifndef LBMLAB_STREAM_SSE2
  if (mode == StoreMode::streaming) {
    r.used = StoreMode::allocate;
    r.fallback = true;
  }
#endif
  std::size_t n = buffer_bytes / sizeof(double);
  n &= ~static_cast<std::size_t>(7);
  Buffer src = alloc_doubles(n);
  Buffer dst = alloc_doubles(n);
  for (std::size_t i = 0; i < n; ++i) src.get()[i] = 1.0 + static_cast<double>(i % 512);
  std::memset(dst.get(), 0, n * sizeof(double));
  const double factor = r.used == StoreMode::streaming ? 2.0 : 3.0;
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto t0 = Clock::now();
#ifdef LBMLAB_STREAM_SSE2
    if (r.used == StoreMode::streaming)
      copy_streaming(dst.get(), src.get(), n);
    else
      copy_allocate(dst.get(), src.get(), n);
#else
    copy_allocate(dst.get(), src.get(), n);
#endif
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    r.samples.push_back(factor * static_cast<double>(n) * sizeof(double) / dt /
                        1.0e9);
  }
  r.gbps = median(r.samples);
  return r;
}

double host_node_bandwidth(StoreMode mode) {
  static double cache[2] = {0, 0};
  double& slot = cache[mode == StoreMode::streaming ? 1 : 0];
  if (slot <= 0)
    slot = stream_copy_bw(4 * last_level_cache_bytes(), 5, mode).gbps;
  return slot;
}

int effective_workers(int workers) { return detail::resolve_workers(workers); }

BenchResult run_bench(SchemeId scheme, Addressing a, const GridGeometry& g,
                      const Stencil& s, const FlowParams& p, int steps,
                      int workers, int warmup_steps, const BenchOptions& opt) {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  StepperOptions so;
  so.workers = workers;
  so.chunk_length = opt.chunk_length;
  so.streaming_stores = opt.streaming_stores;
  so.swap_deferred_fixup = opt.swap_deferred_fixup;
  auto st = create_stepper(scheme, a, g, s, p, so);

  for (int i = 0; i < warmup_steps; ++i) st->step();
  const int runs = std::max(1, opt.timed_runs);
  std::vector<double> times;
  times.reserve(runs);
  for (int r = 0; r < runs; ++r) {
    const auto t0 = Clock::now();
    for (int i = 0; i < steps; ++i) st->step();
    times.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }

  BenchResult res;
  res.scheme = scheme;
  res.addressing = a;
  res.geometry = opt.geometry_name;
  res.fluid_count = g.fluid_count();
  res.steps = steps;
  res.workers = effective_workers(workers);
  res.seconds = median(times);
  res.mlups = static_cast<double>(res.fluid_count) * steps / res.seconds / 1.0e6;
  const TrafficSpec t = traffic(scheme, a, s);
  res.bytes_per_lup = t.bytes_per_lup();
  const SchemeFamily fam = family_of(scheme);
  const bool streaming = fam == SchemeFamily::osnt || fam == SchemeFamily::aap ||
                         fam == SchemeFamily::et;
  double bw = streaming ? opt.gbps_streaming : opt.gbps_allocate;
  if (bw <= 0)
    bw = host_node_bandwidth(streaming ? StoreMode::streaming
                                       : StoreMode::allocate);
  res.predicted_mlups = predict_mlups(bw, res.bytes_per_lup);
  res.model_fraction = res.mlups / res.predicted_mlups;
  res.model_violated = res.model_fraction > 1.1;
  return res;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<BenchResult>& results) {
  std::string out =
      "scheme,addressing,geometry,fluid_count,steps,workers,seconds,mlups,"
      "bytes_per_lup,predicted_mlups,model_fraction\n";
  for (const BenchResult& r : results) {
    out += to_string(r.scheme);
    out += ',';
    out += to_string(r.addressing);
    out += ',';
    out += r.geometry;
    out += ',';
    out += std::to_string(r.fluid_count);
    out += ',';
    out += std::to_string(r.steps);
    out += ',';
    out += std::to_string(r.workers);
    out += ',';
    out += fmt(r.seconds);
    out += ',';
    out += fmt(r.mlups);
    out += ',';
    out += fmt(r.bytes_per_lup);
    out += ',';
    out += fmt(r.predicted_mlups);
    out += ',';
    out += fmt(r.model_fraction);
    out += '\n';
  }
  return out;
}

std::string to_json(const std::vector<BenchResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchResult& r : results) {
    arr.push_back({{"scheme", std::string(to_string(r.scheme))},
                   {"addressing", std::string(to_string(r.addressing))},
                   {"geometry", r.geometry},
                   {"fluid_count", r.fluid_count},
                   {"steps", r.steps},
                   {"workers", r.workers},
                   {"seconds", r.seconds},
                   {"mlups", r.mlups},
                   {"bytes_per_lup", r.bytes_per_lup},
                   {"predicted_mlups", r.predicted_mlups},
                   {"model_fraction", r.model_fraction}});
  }
  return arr.dump(2) + "\n";
}

GridGeometry make_seeded_geometry(std::uint64_t seed) {
  GridGeometry g;
  g.nx = 16;
  g.ny = 8;
  g.nz = 8;
  g.axis_policy = {AxisPolicy::periodic, AxisPolicy::wall, AxisPolicy::periodic};
  g.mask.assign(g.cells(), 1);
  std::mt19937_64 rng(seed);
  // sprinkle solids away from the y walls so both bounce flavours occur
  for (int z = 0; z < g.nz; ++z)
    for (int y = 1; y < g.ny - 1; ++y)
      for (int x = 0; x < g.nx; ++x)
        if (rng() % 100 < 12) g.mask[g.index(x, y, z)] = 0;
  return g;
}

VerifyReport verify_suite(std::uint64_t seed, int steps) {
  const Stencil s = make_stencil("d3q19");
  const GridGeometry g = make_seeded_geometry(seed);
  const FlowParams p;
  const std::size_t nodes = g.fluid_count();
  const std::size_t nvals = nodes * s.q;

  // seeded positive start state, shared by every stepper
  std::vector<double> f0(nvals);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (std::size_t n = 0; n < nodes; ++n)
    for (int i = 0; i < s.q; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      f0[n * s.q + i] = s.w[i] * p.rho0 * (0.9 + 0.2 * u);
    }

  auto ref = create_stepper(SchemeId::ts, Addressing::direct, g, s, p);
  ref->load_natural(f0.data());

  struct Probe {
    VerifyEntry entry;
    std::unique_ptr<Stepper> st;
  };
  std::vector<Probe> probes;
  for (SchemeId id : all_schemes())
    for (Addressing a : {Addressing::direct, Addressing::indirect}) {
      if (!kernel_available(id, a)) continue;
      if (id == SchemeId::ts && a == Addressing::direct) continue;  // reference
      Probe pr;
      pr.entry.scheme = id;
      pr.entry.addressing = a;
      pr.entry.bitwise = true;
      pr.entry.pass = true;
      pr.st = create_stepper(id, a, g, s, p);
      pr.st->load_natural(f0.data());
      probes.push_back(std::move(pr));
    }

  std::vector<double> want(nvals), got(nvals);
  for (int k = 0; k < steps; ++k) {
    ref->step();
    ref->extract_natural(want.data());
    for (Probe& pr : probes) {
      pr.st->step();
      pr.st->extract_natural(got.data());
      if (std::memcmp(want.data(), got.data(), nvals * sizeof(double)) == 0)
        continue;
      pr.entry.bitwise = false;
      for (std::size_t v = 0; v < nvals; ++v) {
        const double denom = std::max(std::abs(want[v]), 1.0e-300);
        pr.entry.max_rel_linf =
            std::max(pr.entry.max_rel_linf, std::abs(got[v] - want[v]) / denom);
      }
    }
  }

  VerifyReport rep;
  rep.fluid_count = nodes;
  rep.steps = steps;
  rep.all_pass = true;
  for (Probe& pr : probes) {
    pr.entry.pass = pr.entry.bitwise || pr.entry.max_rel_linf <= 1.0e-13;
    rep.all_pass = rep.all_pass && pr.entry.pass;
    rep.entries.push_back(pr.entry);
  }
  return rep;
}

}  // namespace lbmlab
