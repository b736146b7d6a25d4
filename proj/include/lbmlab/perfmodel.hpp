#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lbmlab/stencil.hpp"
#include "lbmlab/stepper.hpp"

namespace lbmlab {

// Memory traffic of one node update, in array elements. IDX counts can be
// half-integral (AA pattern averages its odd-step lookups over both
// parities), so they are kept as exact halves; per-parity counts are also
// reported.
struct TrafficSpec {
  SchemeFamily scheme;
  Addressing addressing;
  int pdf_loads = 0;
  int pdf_write_allocates = 0;
  int pdf_stores = 0;
  int idx_loads_halves = 0;  // average IDX loads per update, in half-elements
  int idx_loads_even = 0;    // elements at even / odd steps (differ for AAP)
  int idx_loads_odd = 0;
  int pdf_bytes = 8;
  int idx_bytes = 4;

  int pdf_elements() const { return pdf_loads + pdf_write_allocates + pdf_stores; }
  double idx_loads() const { return idx_loads_halves / 2.0; }
  double bytes_per_lup() const {
    return static_cast<double>(pdf_elements()) * pdf_bytes +
           static_cast<double>(idx_loads_halves) * idx_bytes / 2.0;
  }
};

TrafficSpec traffic(SchemeFamily scheme, Addressing a, const Stencil& s);
TrafficSpec traffic(SchemeId scheme, Addressing a, const Stencil& s);

// bytes per floating-point operation the kernel must move
double code_balance(const TrafficSpec& t, int flops_per_update = 200);

struct MachineSpec {
  std::string name;
  double frequency_ghz = 0;
  int cores = 0;  // whole node
  int flops_per_cycle_per_core = 0;
  double peak_gflops = 0;
  double copy_bw_core = 0;    // GB/s
  double copy_bw_socket = 0;  // GB/s
  double copy_bw_node = 0;    // GB/s
  int sockets = 0;
  int numa_domains = 0;
};

enum class BandwidthLevel { core, socket, node };

double copy_bw(const MachineSpec& m, BandwidthLevel level);

// bytes per FLOP the machine can supply; node-level bandwidth against
// node-level peak by default
double machine_balance(const MachineSpec& m,
                       BandwidthLevel level = BandwidthLevel::node);

bool is_memory_bound(double b_code, double b_machine);

double predict_mlups(double bandwidth_gbps, double bytes_per_lup);

// peak must match frequency x cores x flops/cycle within 1% (turbo-adjusted
// entries), all bandwidths present
void validate_machine(const MachineSpec& m);

const std::vector<MachineSpec>& builtin_machines();
std::vector<MachineSpec> parse_machine_registry(std::istream& in);
std::vector<MachineSpec> load_machine_registry(const std::string& path);
const MachineSpec* find_machine(const std::vector<MachineSpec>& reg,
                                std::string_view name);

struct Table8Row {
  SchemeFamily scheme;
  Addressing addressing;
  int pdf_elements;
  double idx_elements;
  double bytes_per_lup;
  double b_code;
};

// the full scheme x addressing traffic table at the default 200-FLOP update
std::vector<Table8Row> balance_table(const Stencil& s);
std::vector<Table8Row> balance_table();  // D3Q19

}  // namespace lbmlab
