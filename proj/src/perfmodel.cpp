#include "lbmlab/perfmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lbmlab {

TrafficSpec traffic(SchemeFamily scheme, Addressing a, const Stencil& s) {
  const int q = s.q;
  TrafficSpec t;
  t.scheme = scheme;
  t.addressing = a;
  int idx = 0;  // IDX elements per update for indirect addressing
  switch (scheme) {
    case SchemeFamily::ts:  // two sweeps, each load + write-allocate + store
      t.pdf_loads = 2 * q;
      t.pdf_write_allocates = 2 * q;
      t.pdf_stores = 2 * q;
      idx = 2 * (q - 1);
      break;
    case SchemeFamily::os:
      t.pdf_loads = q;
      t.pdf_write_allocates = q;
      t.pdf_stores = q;
      idx = q - 1;
      break;
    case SchemeFamily::osnt:  // non-temporal stores skip the write allocate
      t.pdf_loads = q;
      t.pdf_write_allocates = 0;
      t.pdf_stores = q;
      idx = q - 1;
      break;
    case SchemeFamily::cg:  // rest direction stays in place: one allocate less
      t.pdf_loads = q;
      t.pdf_write_allocates = q - 1;
      t.pdf_stores = q;
      idx = q - 1;
      break;
    case SchemeFamily::swap:  // swaps touch lines already present in cache
      t.pdf_loads = (3 * q - 1) / 2;
      t.pdf_write_allocates = 0;
      t.pdf_stores = (3 * q - 1) / 2;
      idx = (q - 1) / 2;
      break;
    case SchemeFamily::aap:  // stores only to previously read locations
      t.pdf_loads = q;
      t.pdf_write_allocates = 0;
      t.pdf_stores = q;
      // adjacency walked at odd steps only; averaged over both parities
      if (a == Addressing::indirect) {
        t.idx_loads_even = 0;
        t.idx_loads_odd = q - 1;
        t.idx_loads_halves = q - 1;
      }
      break;
    case SchemeFamily::et:  // stores only to previously read locations
      t.pdf_loads = q;
      t.pdf_write_allocates = 0;
      t.pdf_stores = q;
      idx = (q + 1) / 2;
      break;
    default:
      throw std::invalid_argument("unknown scheme");
  }
  if (scheme != SchemeFamily::aap && a == Addressing::indirect) {
    t.idx_loads_even = idx;
    t.idx_loads_odd = idx;
    t.idx_loads_halves = 2 * idx;
  }
  return t;
}

TrafficSpec traffic(SchemeId scheme, Addressing a, const Stencil& s) {
  return traffic(family_of(scheme), a, s);
}

double code_balance(const TrafficSpec& t, int flops_per_update) {
  if (flops_per_update <= 0)
    throw std::invalid_argument("flops_per_update must be positive");
  return t.bytes_per_lup() / flops_per_update;
}

double copy_bw(const MachineSpec& m, BandwidthLevel level) {
  double bw = 0;
  switch (level) {
    case BandwidthLevel::core:
      bw = m.copy_bw_core;
      break;
    case BandwidthLevel::socket:
      bw = m.copy_bw_socket;
      break;
    case BandwidthLevel::node:
      bw = m.copy_bw_node;
      break;
  }
  if (bw <= 0)
    throw std::invalid_argument("missing copy bandwidth for requested level");
  return bw;
}

double machine_balance(const MachineSpec& m, BandwidthLevel level) {
  if (m.peak_gflops <= 0)
    throw std::invalid_argument("machine peak performance missing");
  return copy_bw(m, level) / m.peak_gflops;
}

bool is_memory_bound(double b_code, double b_machine) {
  return b_code > b_machine;
}

double predict_mlups(double bandwidth_gbps, double bytes_per_lup) {
  if (bandwidth_gbps <= 0 || bytes_per_lup <= 0)
    throw std::invalid_argument("bandwidth and bytes/LUP must be positive");
  return bandwidth_gbps * 1.0e9 / bytes_per_lup / 1.0e6;
}

void validate_machine(const MachineSpec& m) {
  if (m.name.empty()) throw std::invalid_argument("machine entry missing name");
  if (m.frequency_ghz <= 0 || m.cores <= 0 || m.flops_per_cycle_per_core <= 0)
    throw std::invalid_argument("machine " + m.name + ": core data missing");
  const double nominal =
      m.frequency_ghz * m.cores * m.flops_per_cycle_per_core;
  if (std::abs(m.peak_gflops - nominal) > 0.01 * nominal)
    throw std::invalid_argument("machine " + m.name +
                                ": peak_gflops inconsistent with "
                                "frequency x cores x flops/cycle");
  if (m.copy_bw_core <= 0 || m.copy_bw_socket <= 0 || m.copy_bw_node <= 0)
    throw std::invalid_argument("machine " + m.name + ": copy bandwidth missing");
  if (m.sockets <= 0 || m.numa_domains <= 0)
    throw std::invalid_argument("machine " + m.name + ": topology missing");
}

const std::vector<MachineSpec>& builtin_machines() {
  static const std::vector<MachineSpec> reg = {
      {"harpertown", 3.20, 8, 4, 102.4, 5.4, 7.2, 7.0, 2, 1},
      {"westmere", 2.67, 12, 4, 128.16, 10.1, 21.0, 40.6, 2, 2},
      {"sandybridge", 3.50, 4, 4, 56.0, 17.5, 18.4, 18.4, 1, 1},
      {"magnycours", 2.30, 16, 4, 147.2, 12.3, 25.0, 49.0, 2, 4},
  };
  return reg;
}

namespace {

std::string lower(std::string_view s) {
  std::string r(s);
  std::transform(r.begin(), r.end(), r.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return r;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<MachineSpec> parse_machine_registry(std::istream& in) {
  std::vector<MachineSpec> reg;
  MachineSpec cur;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    validate_machine(cur);
    reg.push_back(cur);
    cur = MachineSpec{};
    open = false;
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) {
      flush();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("machine registry line " +
                                  std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));
    open = true;
    try {
      if (key == "name")
        cur.name = val;
      else if (key == "frequency_ghz")
        cur.frequency_ghz = std::stod(val);
      else if (key == "cores")
        cur.cores = std::stoi(val);
      else if (key == "flops_per_cycle_per_core")
        cur.flops_per_cycle_per_core = std::stoi(val);
      else if (key == "peak_gflops")
        cur.peak_gflops = std::stod(val);
      else if (key == "copy_bw_core")
        cur.copy_bw_core = std::stod(val);
      else if (key == "copy_bw_socket")
        cur.copy_bw_socket = std::stod(val);
      else if (key == "copy_bw_node")
        cur.copy_bw_node = std::stod(val);
      else if (key == "sockets")
        cur.sockets = std::stoi(val);
      else if (key == "numa_domains")
        cur.numa_domains = std::stoi(val);
      else
        throw std::invalid_argument("unknown machine field: " + key);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("machine registry line " +
                                  std::to_string(lineno) + ": bad value for " + key);
    }
  }
  flush();
  return reg;
}

std::vector<MachineSpec> load_machine_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open machine registry: " + path);
  return parse_machine_registry(in);
}

const MachineSpec* find_machine(const std::vector<MachineSpec>& reg,
                                std::string_view name) {
  const std::string want = lower(name);
  for (const MachineSpec& m : reg)
    if (lower(m.name) == want) return &m;
  return nullptr;
}

std::vector<Table8Row> balance_table(const Stencil& s) {
  std::vector<Table8Row> rows;
  for (SchemeFamily f : {SchemeFamily::ts, SchemeFamily::os, SchemeFamily::osnt,
                         SchemeFamily::cg, SchemeFamily::swap, SchemeFamily::aap,
                         SchemeFamily::et})
    for (Addressing a : {Addressing::direct, Addressing::indirect}) {
      const TrafficSpec t = traffic(f, a, s);
      rows.push_back({f, a, t.pdf_elements(), t.idx_loads(), t.bytes_per_lup(),
                      code_balance(t)});
    }
  return rows;
}

std::vector<Table8Row> balance_table() { return balance_table(make_stencil("d3q19")); }

}  // namespace lbmlab
