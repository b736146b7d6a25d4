#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbmlab/collision.hpp"
#include "lbmlab/geometry.hpp"
#include "lbmlab/stencil.hpp"
#include "lbmlab/stepper.hpp"

namespace lbmlab {

enum class StoreMode { allocate, streaming };

struct StreamResult {
  double gbps = 0;  // median over repetitions
  StoreMode requested = StoreMode::allocate;
  StoreMode used = StoreMode::allocate;  // streaming falls back if unsupported
  bool fallback = false;
  std::vector<double> samples;  // per-repetition GB/s
};

std::size_t last_level_cache_bytes();

// Copies one buffer_bytes region to another `repetitions` times and reports
// the median effective bandwidth: 2 bytes of traffic per copied byte pair
// with streaming (non-temporal) stores, 3 with regular stores (the write
// allocate counts). buffer_bytes must be at least 4x the last-level cache.
StreamResult stream_copy_bw(std::size_t buffer_bytes, int repetitions,
                            StoreMode mode);

// node copy bandwidth of this host, measured once per mode and cached
double host_node_bandwidth(StoreMode mode);

int effective_workers(int workers);  // 0 resolves to all hardware threads

struct BenchOptions {
  int timed_runs = 3;  // median of these
  int chunk_length = 150;
  bool streaming_stores = true;
  bool swap_deferred_fixup = false;
  // bandwidths for the prediction; <= 0 means measure on this host (cached)
  double gbps_allocate = 0;
  double gbps_streaming = 0;
  std::string geometry_name = "custom";
};

struct BenchResult {
  SchemeId scheme;
  Addressing addressing;
  std::string geometry;
  std::size_t fluid_count = 0;
  int steps = 0;
  int workers = 0;  // resolved count
  double seconds = 0;
  double mlups = 0;
  double bytes_per_lup = 0;
  double predicted_mlups = 0;
  double model_fraction = 0;
  bool model_violated = false;  // model_fraction > 1.1: investigate timing
};

// Warm up untimed, then time `steps` sweeps (median of opt.timed_runs) on a
// monotonic clock. The prediction uses streaming-store bandwidth for schemes
// that avoid the write allocate (OSNT, AAP, ET) and allocate-mode bandwidth
// for the rest.
BenchResult run_bench(SchemeId scheme, Addressing a, const GridGeometry& g,
                      const Stencil& s, const FlowParams& p, int steps,
                      int workers, int warmup_steps,
                      const BenchOptions& opt = {});

std::string to_csv(const std::vector<BenchResult>& results);
std::string to_json(const std::vector<BenchResult>& results);

// 16x8x8 box, periodic in x and z, walls in y, with seeded interior solids
GridGeometry make_seeded_geometry(std::uint64_t seed);

struct VerifyEntry {
  SchemeId scheme;
  Addressing addressing;
  double max_rel_linf = 0;
  bool bitwise = false;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  bool all_pass = false;
  std::size_t fluid_count = 0;
  int steps = 0;
};

// Marches every implemented (scheme, addressing) pair against the two-step
// direct reference on the seeded geometry, comparing extracted states after
// every step; pairs must agree bitwise (tolerance 1e-13 relative is the
// recorded fallback).
VerifyReport verify_suite(std::uint64_t seed, int steps = 10);

}  // namespace lbmlab
