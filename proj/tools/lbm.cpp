// lbm — propagation-scheme laboratory front end.
//
//   lbm model   traffic/balance table, optionally with MLUPs predictions
//   lbm verify  march every implemented kernel against the reference
//   lbm bench   time kernels on a geometry and compare with the model
//   lbm geom    generate/save/inspect geometries
//   lbm stream  copy-bandwidth microbenchmark

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lbmlab/bench.hpp"
#include "lbmlab/collision.hpp"
#include "lbmlab/geometry.hpp"
#include "lbmlab/perfmodel.hpp"
#include "lbmlab/stencil.hpp"
#include "lbmlab/stepper.hpp"

namespace {

using nlohmann::json;

constexpr int kUsageError = 2;

struct Dims {
  int nx = 0, ny = 0, nz = 0;
};

Dims parse_dims(const std::string& s) {
  Dims d;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(s);
  if (!(in >> d.nx >> sep1 >> d.ny >> sep2 >> d.nz) || sep1 != 'x' ||
      sep2 != 'x' || d.nx < 1 || d.ny < 1 || d.nz < 1 || !(in >> std::ws).eof())
    throw CLI::ValidationError("--dims", "expected WxHxD, e.g. 500x100x100");
  return d;
}

// generator spec ("channel:WxHxD", "bed:WxHxD") or a saved-geometry path
lbmlab::GridGeometry load_geometry_spec(const std::string& spec,
                                        std::string& name) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    if (kind == "channel" || kind == "bed") {
      const Dims d = parse_dims(spec.substr(colon + 1));
      name = kind;
      return kind == "channel"
                 ? lbmlab::gen_channel(d.nx, d.ny, d.nz)
                 : lbmlab::gen_packed_bed(d.nx, d.ny, d.nz, lbmlab::kBedRadius,
                                          lbmlab::kBedPitch);
    }
  }
  name = spec;
  return lbmlab::load_geo(spec);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmtg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------- model ----

struct ModelArgs {
  std::string stencil = "d3q19";
  std::string addressing = "all";
  std::string machine;   // registry entry for predictions
  std::string registry;  // extra registry file
  double bw = 0;         // explicit GB/s override
  bool measure = false;  // measure this host instead
  std::string format = "csv";
  std::string output;
};

int run_model(const ModelArgs& a) {
  const lbmlab::Stencil st = lbmlab::make_stencil(a.stencil);

  std::optional<double> gbps;
  std::string bw_source;
  if (a.bw > 0) {
    gbps = a.bw;
    bw_source = "explicit";
  } else if (a.measure) {
    gbps = lbmlab::host_node_bandwidth(lbmlab::StoreMode::allocate);
    bw_source = "host";
  } else {
    std::string name = a.machine;
    if (name.empty())
      if (const char* env = std::getenv("LBMLAB_MACHINE")) name = env;
    if (!name.empty()) {
      std::vector<lbmlab::MachineSpec> reg = lbmlab::builtin_machines();
      if (!a.registry.empty()) {
        auto extra = lbmlab::load_machine_registry(a.registry);
        reg.insert(reg.end(), extra.begin(), extra.end());
      }
      const lbmlab::MachineSpec* m = lbmlab::find_machine(reg, name);
      if (!m) throw std::runtime_error("unknown machine: " + name);
      gbps = lbmlab::copy_bw(*m, lbmlab::BandwidthLevel::node);
      bw_source = m->name;
    }
  }

  std::vector<lbmlab::Table8Row> rows = lbmlab::balance_table(st);
  if (a.addressing != "all") {
    const lbmlab::Addressing want = lbmlab::parse_addressing(a.addressing);
    std::erase_if(rows, [&](const lbmlab::Table8Row& r) {
      return r.addressing != want;
    });
  }

  std::string text;
  if (a.format == "csv") {
    text =
        "scheme,addressing,pdf_elems,idx_elems,bytes_per_lup,b_code,"
        "predicted_mlups_at_bw\n";
    for (const auto& r : rows) {
      text += std::string(lbmlab::to_string(r.scheme)) + ',';
      text += std::string(lbmlab::to_string(r.addressing)) + ',';
      text += std::to_string(r.pdf_elements) + ',';
      text += fmtg(r.idx_elements) + ',';
      text += fmtg(r.bytes_per_lup) + ',';
      text += fmt2(r.b_code) + ',';
      if (gbps) text += fmt2(lbmlab::predict_mlups(*gbps, r.bytes_per_lup));
      text += '\n';
    }
  } else {
    json arr = json::array();
    for (const auto& r : rows) {
      json row = {{"scheme", std::string(lbmlab::to_string(r.scheme))},
                  {"addressing", std::string(lbmlab::to_string(r.addressing))},
                  {"pdf_elems", r.pdf_elements},
                  {"idx_elems", r.idx_elements},
                  {"bytes_per_lup", r.bytes_per_lup},
                  {"b_code", r.b_code}};
      if (gbps)
        row["predicted_mlups_at_bw"] =
            lbmlab::predict_mlups(*gbps, r.bytes_per_lup);
      else
        row["predicted_mlups_at_bw"] = nullptr;
      arr.push_back(row);
    }
    text = arr.dump(2) + "\n";
  }
  write_text(a.output, text);
  if (gbps && (a.output.empty() || a.output == "-"))
    std::cerr << "# predictions at " << fmt2(*gbps) << " GB/s (" << bw_source
              << ")\n";
  return 0;
}

// --------------------------------------------------------------- verify ----

int run_verify(std::uint64_t seed, int steps) {
  const lbmlab::VerifyReport rep = lbmlab::verify_suite(seed, steps);
  std::printf("verify: seed %llu, %zu fluid nodes, %d steps\n",
              static_cast<unsigned long long>(seed), rep.fluid_count,
              rep.steps);
  for (const auto& e : rep.entries) {
    std::printf("  %-12s %-8s %s", std::string(to_string(e.scheme)).c_str(),
                std::string(to_string(e.addressing)).c_str(),
                e.bitwise ? "bitwise" : "differs");
    if (!e.bitwise) std::printf(" (max rel Linf %.3e)", e.max_rel_linf);
    std::printf("  %s\n", e.pass ? "ok" : "FAIL");
  }
  std::printf("verify: %s\n", rep.all_pass ? "all pass" : "FAILURES");
  return rep.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------- bench ----

struct BenchArgs {
  std::vector<std::string> schemes{"all"};
  std::vector<std::string> addressings{"all"};
  std::string geometry = "channel:128x64x64";
  int steps = 20;
  int workers = 0;
  int warmup = 2;
  int chunk_length = 150;
  bool no_streaming_stores = false;
  bool deferred_fixup = false;
  std::string machine;
  std::string format = "csv";
  std::string output;
  double tau = 0.9;
  double force = 1.0e-5;
};

int run_bench_cmd(const BenchArgs& a) {
  // expand the selectors
  std::vector<lbmlab::SchemeId> ids;
  bool scheme_wildcard = false;
  for (const std::string& s : a.schemes) {
    if (s == "all") {
      scheme_wildcard = true;
      for (lbmlab::SchemeId id : lbmlab::all_schemes()) ids.push_back(id);
    } else {
      ids.push_back(lbmlab::parse_scheme(s));
    }
  }
  std::vector<lbmlab::Addressing> addrs;
  for (const std::string& s : a.addressings) {
    if (s == "all") {
      addrs.push_back(lbmlab::Addressing::direct);
      addrs.push_back(lbmlab::Addressing::indirect);
    } else {
      addrs.push_back(lbmlab::parse_addressing(s));
    }
  }

  const int nw = lbmlab::effective_workers(a.workers);
  if (nw > 1 && !scheme_wildcard)
    for (lbmlab::SchemeId id : ids) {
      const auto fam = lbmlab::family_of(id);
      if (fam == lbmlab::SchemeFamily::cg || fam == lbmlab::SchemeFamily::swap)
        throw CLI::ValidationError(
            "--workers", std::string(lbmlab::to_string(id)) +
                             " is sequential; workers must be 1");
    }

  std::string geom_name;
  const lbmlab::GridGeometry g = load_geometry_spec(a.geometry, geom_name);

  lbmlab::FlowParams p;
  p.lambda_even = 1.0 / a.tau;
  p.body_force = {a.force, 0.0, 0.0};

  lbmlab::BenchOptions opt;
  opt.chunk_length = a.chunk_length;
  opt.streaming_stores = !a.no_streaming_stores;
  opt.swap_deferred_fixup = a.deferred_fixup;
  opt.geometry_name = geom_name;
  if (!a.machine.empty()) {
    const lbmlab::MachineSpec* m =
        lbmlab::find_machine(lbmlab::builtin_machines(), a.machine);
    if (!m) throw std::runtime_error("unknown machine: " + a.machine);
    opt.gbps_allocate = opt.gbps_streaming =
        lbmlab::copy_bw(*m, lbmlab::BandwidthLevel::node);
  }

  const lbmlab::Stencil st = lbmlab::make_stencil("d3q19");
  std::vector<lbmlab::BenchResult> results;
  for (lbmlab::SchemeId id : ids)
    for (lbmlab::Addressing ad : addrs) {
      if (!lbmlab::kernel_available(id, ad)) {
        std::cerr << "# skip " << lbmlab::to_string(id) << "/"
                  << lbmlab::to_string(ad)
                  << ": kernel not implemented; traffic model only\n";
        continue;
      }
      int workers = a.workers;
      const auto fam = lbmlab::family_of(id);
      if (nw > 1 && (fam == lbmlab::SchemeFamily::cg ||
                     fam == lbmlab::SchemeFamily::swap)) {
        std::cerr << "# skip " << lbmlab::to_string(id) << "/"
                  << lbmlab::to_string(ad)
                  << ": sequential scheme at workers > 1\n";
        continue;
      }
      lbmlab::BenchResult r = lbmlab::run_bench(id, ad, g, st, p, a.steps,
                                                workers, a.warmup, opt);
      if (r.model_violated)
        std::cerr << "# " << lbmlab::to_string(id) << "/"
                  << lbmlab::to_string(ad)
                  << ": model violated — investigate timing (fraction "
                  << fmt2(r.model_fraction) << ")\n";
      results.push_back(r);
    }

  write_text(a.output,
             a.format == "csv" ? lbmlab::to_csv(results)
                               : lbmlab::to_json(results));
  return 0;
}

// ----------------------------------------------------------------- geom ----

int run_geom(const std::string& kind, const std::string& dims,
             const std::string& save, const std::string& file) {
  lbmlab::GridGeometry g;
  std::string name = kind;
  if (kind == "file") {
    if (file.empty())
      throw CLI::ValidationError("geom", "file kind needs --path");
    g = lbmlab::load_geo(file);
    name = file;
  } else {
    const Dims d = parse_dims(dims);
    g = kind == "channel"
            ? lbmlab::gen_channel(d.nx, d.ny, d.nz)
            : lbmlab::gen_packed_bed(d.nx, d.ny, d.nz, lbmlab::kBedRadius,
                                     lbmlab::kBedPitch);
  }
  std::printf("geometry %s\n", name.c_str());
  std::printf("dims %dx%dx%d\n", g.nx, g.ny, g.nz);
  std::printf("cells %zu\n", g.cells());
  std::printf("fluid_count %zu\n", g.fluid_count());
  if (!save.empty()) {
    lbmlab::save_geo(g, save);
    std::printf("saved %s\n", save.c_str());
  }
  return 0;
}

// --------------------------------------------------------------- stream ----

int run_stream(std::size_t bytes, int reps, const std::string& mode) {
  if (bytes == 0) bytes = 4 * lbmlab::last_level_cache_bytes();
  auto report = [&](lbmlab::StoreMode m) {
    const lbmlab::StreamResult r = lbmlab::stream_copy_bw(bytes, reps, m);
    std::printf("%s%s: %.2f GB/s (buffer %zu MB, %d reps)\n",
                m == lbmlab::StoreMode::streaming ? "streaming" : "allocate",
                r.fallback ? " [fallback to allocate]" : "", r.gbps,
                bytes >> 20, reps);
  };
  if (mode == "allocate" || mode == "both") report(lbmlab::StoreMode::allocate);
  if (mode == "streaming" || mode == "both")
    report(lbmlab::StoreMode::streaming);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice Boltzmann propagation-scheme laboratory"};
  app.require_subcommand(1);

  ModelArgs ma;
  CLI::App* model = app.add_subcommand("model", "print the traffic table");
  model->add_option("--stencil", ma.stencil)
      ->check(CLI::IsMember({"d3q19", "d2q9"}));
  model->add_option("--addressing", ma.addressing)
      ->check(CLI::IsMember({"direct", "indirect", "all"}));
  model->add_option("--machine", ma.machine,
                    "registry entry for MLUPs predictions");
  model->add_option("--registry", ma.registry, "extra machine registry file");
  model->add_option("--bw", ma.bw, "prediction bandwidth in GB/s");
  model->add_flag("--measure-host", ma.measure,
                  "measure this host's bandwidth for predictions");
  model->add_option("--format", ma.format)
      ->check(CLI::IsMember({"csv", "json"}));
  model->add_option("--output,-o", ma.output);

  std::uint64_t vseed = 42;
  int vsteps = 10;
  CLI::App* verify =
      app.add_subcommand("verify", "check kernels against the reference");
  verify->add_option("--seed", vseed);
  verify->add_option("--steps", vsteps)->check(CLI::PositiveNumber);

  BenchArgs ba;
  CLI::App* bench = app.add_subcommand("bench", "time kernels");
  bench->add_option("--scheme", ba.schemes, "scheme name or 'all' (repeatable)");
  bench->add_option("--addressing", ba.addressings,
                    "direct, indirect or all (repeatable)");
  bench->add_option("--geometry", ba.geometry,
                    "channel:WxHxD, bed:WxHxD or a saved-geometry file");
  bench->add_option("--steps", ba.steps)->check(CLI::PositiveNumber);
  bench->add_option("--workers", ba.workers,
                    "thread count, 0 = all hardware threads");
  bench->add_option("--warmup", ba.warmup)->check(CLI::NonNegativeNumber);
  bench->add_option("--chunk-length", ba.chunk_length)
      ->check(CLI::PositiveNumber);
  bench->add_flag("--no-streaming-stores", ba.no_streaming_stores);
  bench->add_flag("--deferred-fixup", ba.deferred_fixup,
                  "defer swap wrap fixups to the next step");
  bench->add_option("--machine", ba.machine,
                    "predict from a registry machine instead of this host");
  bench->add_option("--format", ba.format)
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--output,-o", ba.output);
  bench->add_option("--tau", ba.tau, "even relaxation time");
  bench->add_option("--force", ba.force, "body force along x");

  std::string gkind, gdims = "16x16x16", gsave, gfile;
  CLI::App* geom = app.add_subcommand("geom", "generate or inspect geometries");
  geom->add_option("kind", gkind, "channel, bed or file")
      ->required()
      ->check(CLI::IsMember({"channel", "bed", "file"}));
  geom->add_option("--dims", gdims, "WxHxD");
  geom->add_option("--save", gsave, "write the geometry to this path");
  geom->add_option("--path", gfile, "saved geometry to load (kind 'file')");

  std::size_t sbytes = 0;
  int sreps = 10;
  std::string smode = "both";
  CLI::App* stream =
      app.add_subcommand("stream", "copy-bandwidth microbenchmark");
  stream->add_option("--bytes", sbytes, "buffer size, default 4x LLC");
  stream->add_option("--reps", sreps)->check(CLI::PositiveNumber);
  stream->add_option("--mode", smode)
      ->check(CLI::IsMember({"allocate", "streaming", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kUsageError;
  }

  try {
    if (model->parsed()) return run_model(ma);
    if (verify->parsed()) return run_verify(vseed, vsteps);
    if (bench->parsed()) return run_bench_cmd(ba);
    if (geom->parsed()) return run_geom(gkind, gdims, gsave, gfile);
    if (stream->parsed()) return run_stream(sbytes, sreps, smode);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
