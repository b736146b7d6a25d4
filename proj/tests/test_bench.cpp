#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lbmlab/bench.hpp"
#include "lbmlab/perfmodel.hpp"

using namespace lbmlab;

TEST_CASE("stream measurement rejects bad setups before allocating") {
  CHECK(last_level_cache_bytes() > 0);
  CHECK_THROWS_WITH_AS(stream_copy_bw(1 << 20, 4, StoreMode::allocate),
                       "repetitions must be at least 5", std::invalid_argument);
  CHECK_THROWS_WITH_AS(stream_copy_bw(1024, 5, StoreMode::streaming),
                       "buffer too small", std::invalid_argument);
}

TEST_CASE("worker resolution") {
  CHECK(effective_workers(1) == 1);
  CHECK(effective_workers(3) == 3);
  CHECK(effective_workers(0) >= 1);
  CHECK_THROWS_AS(effective_workers(-1), std::invalid_argument);
}

TEST_CASE("seeded geometry is deterministic with the documented shape") {
  const GridGeometry a = make_seeded_geometry(42);
  const GridGeometry b = make_seeded_geometry(42);
  const GridGeometry c = make_seeded_geometry(43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.nx == 16);
  CHECK(a.ny == 8);
  CHECK(a.nz == 8);
  CHECK(a.axis_policy[0] == AxisPolicy::periodic);
  CHECK(a.axis_policy[1] == AxisPolicy::wall);
  CHECK(a.axis_policy[2] == AxisPolicy::periodic);
  // solids stay off the wall-adjacent y layers
  for (int z = 0; z < a.nz; ++z)
    for (int x = 0; x < a.nx; ++x) {
      CHECK(a.is_fluid(x, 0, z));
      CHECK(a.is_fluid(x, a.ny - 1, z));
    }
  const std::size_t solids = a.cells() - a.fluid_count();
  CHECK(solids > 50);   // ~12% of the 768 interior cells
  CHECK(solids < 150);
}

TEST_CASE("verify suite marches every implemented pair to agreement") {
  const VerifyReport rep = verify_suite(42, 5);
  CHECK(rep.steps == 5);
  CHECK(rep.fluid_count == make_seeded_geometry(42).fluid_count());
  CHECK(rep.entries.size() == 15);  // 16 implemented pairs minus the reference
  CHECK(rep.all_pass);
  for (const VerifyEntry& e : rep.entries) {
    CAPTURE(to_string(e.scheme));
    CAPTURE(to_string(e.addressing));
    CHECK(e.pass);
    CHECK(e.bitwise);
    CHECK(e.max_rel_linf == 0.0);
  }
}

TEST_CASE("run_bench fills the result record consistently") {
  const Stencil s = make_stencil("d3q19");
  const GridGeometry g = gen_channel(8, 8, 8);
  const FlowParams p;
  BenchOptions opt;
  opt.timed_runs = 3;
  opt.gbps_allocate = 10.0;
  opt.gbps_streaming = 8.0;
  opt.geometry_name = "channel-8x8x8";

  const BenchResult os =
      run_bench(SchemeId::os_push, Addressing::direct, g, s, p, 3, 1, 1, opt);
  CHECK(os.scheme == SchemeId::os_push);
  CHECK(os.addressing == Addressing::direct);
  CHECK(os.geometry == "channel-8x8x8");
  CHECK(os.fluid_count == 512);
  CHECK(os.steps == 3);
  CHECK(os.workers == 1);
  CHECK(os.seconds > 0.0);
  CHECK(os.mlups > 0.0);
  CHECK(os.bytes_per_lup ==
        traffic(SchemeId::os_push, Addressing::direct, s).bytes_per_lup());
  // write-allocating scheme: prediction from the allocate-mode bandwidth
  CHECK(os.predicted_mlups ==
        doctest::Approx(predict_mlups(10.0, os.bytes_per_lup)));
  CHECK(os.model_fraction == doctest::Approx(os.mlups / os.predicted_mlups));
  CHECK(os.model_violated == (os.model_fraction > 1.1));

  const BenchResult aap =
      run_bench(SchemeId::aap, Addressing::indirect, g, s, p, 3, 1, 1, opt);
  CHECK(aap.predicted_mlups ==
        doctest::Approx(predict_mlups(8.0, aap.bytes_per_lup)));

  CHECK_THROWS_AS(
      run_bench(SchemeId::os_push, Addressing::direct, g, s, p, 0, 1, 0, opt),
      std::invalid_argument);
}

TEST_CASE("CSV serialization uses the fixed header and one line per run") {
  BenchResult r;
  r.scheme = SchemeId::osnt_pull_1s;
  r.addressing = Addressing::indirect;
  r.geometry = "bed";
  r.fluid_count = 2103037;
  r.steps = 50;
  r.workers = 4;
  r.seconds = 1.25;
  r.mlups = 84.1;
  r.bytes_per_lup = 376;
  r.predicted_mlups = 90.0;
  r.model_fraction = 84.1 / 90.0;
  r.model_violated = false;

  const std::string csv = to_csv({r, r});
  const std::string header =
      "scheme,addressing,geometry,fluid_count,steps,workers,seconds,mlups,"
      "bytes_per_lup,predicted_mlups,model_fraction\n";
  CHECK(csv.substr(0, header.size()) == header);
  const std::string body = csv.substr(header.size());
  const std::string row =
      "osnt-pull-1s,indirect,bed,2103037,50,4,1.25,84.1,376,90,0.934444\n";
  CHECK(body == row + row);
}

TEST_CASE("JSON serialization mirrors the CSV fields") {
  BenchResult r;
  r.scheme = SchemeId::et;
  r.addressing = Addressing::direct;
  r.geometry = "channel";
  r.fluid_count = 5000000;
  r.steps = 20;
  r.workers = 2;
  r.seconds = 2.0;
  r.mlups = 50.0;
  r.bytes_per_lup = 304.0;
  r.predicted_mlups = 60.0;
  r.model_fraction = 50.0 / 60.0;

  const nlohmann::json arr = nlohmann::json::parse(to_json({r}));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 1);
  const nlohmann::json& j = arr[0];
  CHECK(j.at("scheme") == "et");
  CHECK(j.at("addressing") == "direct");
  CHECK(j.at("geometry") == "channel");
  CHECK(j.at("fluid_count") == 5000000);
  CHECK(j.at("steps") == 20);
  CHECK(j.at("workers") == 2);
  CHECK(j.at("seconds") == doctest::Approx(2.0));
  CHECK(j.at("mlups") == doctest::Approx(50.0));
  CHECK(j.at("bytes_per_lup") == doctest::Approx(304.0));
  CHECK(j.at("predicted_mlups") == doctest::Approx(60.0));
  CHECK(j.at("model_fraction") == doctest::Approx(50.0 / 60.0));
}
