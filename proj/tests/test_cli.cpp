#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// Drives the installed binary end to end through a shell; LBM_CLI_PATH is
// injected by the build so the test finds the executable wherever it lands.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, const std::string& prefix = "") {
  const std::string cmd =
      prefix + LBM_CLI_PATH + (args.empty() ? "" : " " + args) +
      " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t nl = s.find('\n', pos);
    if (nl == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

constexpr const char* kModelHeader =
    "scheme,addressing,pdf_elems,idx_elems,bytes_per_lup,b_code,"
    "predicted_mlups_at_bw";

}  // namespace

TEST_CASE("usage errors exit with the usage code") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("model --stencil d3q27").code == 2);
  CHECK(run_cli("model --no-such-flag").code == 2);
  CHECK(run_cli("geom channel --dims 5x5").code == 2);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("runtime failures exit 1") {
  CHECK(run_cli("model --machine notamachine").code == 1);
  CHECK(run_cli("stream --bytes 1024 --reps 5 --mode allocate").code == 1);
  CHECK(run_cli("geom file --path ./no_such_geometry_file.bin").code == 1);
}

TEST_CASE("model table is deterministic and complete") {
  const RunResult a = run_cli("model");
  const RunResult b = run_cli("model");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const std::vector<std::string> ls = lines(a.out);
  REQUIRE(ls.size() == 15);  // header + 7 schemes x 2 addressings
  CHECK(ls[0] == kModelHeader);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    CAPTURE(ls[i]);
    CHECK(ls[i].back() == ',');  // no bandwidth source: prediction empty
  }
}

TEST_CASE("model indirect rows carry the index traffic") {
  const RunResult r = run_cli("model --addressing indirect");
  REQUIRE(r.code == 0);
  const std::vector<std::string> ls = lines(r.out);
  REQUIRE(ls.size() == 8);
  CHECK(ls[0] == kModelHeader);
  CHECK(ls[1] == "TS,indirect,114,36,1056,5.28,");
  CHECK(ls[2] == "OS,indirect,57,18,528,2.64,");
  CHECK(ls[3] == "OSNT,indirect,38,18,376,1.88,");
  CHECK(ls[4] == "CG,indirect,56,18,520,2.60,");
  CHECK(ls[5] == "SWAP,indirect,56,9,484,2.42,");
  CHECK(ls[6] == "AAP,indirect,38,9,340,1.70,");
  CHECK(ls[7] == "ET,indirect,38,10,344,1.72,");
}

TEST_CASE("model predictions from an explicit bandwidth") {
  const RunResult r = run_cli("model --bw 40.6 --addressing direct");
  REQUIRE(r.code == 0);
  const std::vector<std::string> ls = lines(r.out);
  REQUIRE(ls.size() == 8);
  // 40.6 GB/s over 304 bytes -> 133.55 MLUPs for the three lean schemes
  CHECK(ls[3] == "OSNT,direct,38,0,304,1.52,133.55");
  CHECK(ls[6] == "AAP,direct,38,0,304,1.52,133.55");
  CHECK(ls[7] == "ET,direct,38,0,304,1.52,133.55");
  CHECK(ls[1] == "TS,direct,114,0,912,4.56,44.52");
}

TEST_CASE("machine is picked up from the environment") {
  const RunResult r =
      run_cli("model --addressing direct", "LBMLAB_MACHINE=westmere ");
  REQUIRE(r.code == 0);
  const std::vector<std::string> ls = lines(r.out);
  REQUIRE(ls.size() == 8);
  // westmere node copy bandwidth is 40.6 GB/s
  CHECK(ls[3] == "OSNT,direct,38,0,304,1.52,133.55");
}

TEST_CASE("model json output carries null predictions") {
  const RunResult r = run_cli("model --format json --addressing direct");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"scheme\": \"OSNT\"") != std::string::npos);
  CHECK(r.out.find("\"predicted_mlups_at_bw\": null") != std::string::npos);
}

TEST_CASE("geometry inspection and round trip") {
  const RunResult big = run_cli("geom channel --dims 500x100x100");
  CHECK(big.code == 0);
  CHECK(big.out.find("fluid_count 5000000") != std::string::npos);

  const std::string tmp = "./test_cli_roundtrip.geo";
  const RunResult saved =
      run_cli("geom channel --dims 6x4x4 --save " + tmp);
  CHECK(saved.code == 0);
  CHECK(saved.out.find("fluid_count 96") != std::string::npos);
  const RunResult loaded = run_cli("geom file --path " + tmp);
  CHECK(loaded.code == 0);
  CHECK(loaded.out.find("dims 6x4x4") != std::string::npos);
  CHECK(loaded.out.find("fluid_count 96") != std::string::npos);
  std::remove(tmp.c_str());
}

TEST_CASE("verify reports every pair and exits clean") {
  const RunResult r = run_cli("verify --seed 42 --steps 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("verify: all pass") != std::string::npos);
  std::size_t ok = 0, pos = 0;
  while ((pos = r.out.find("bitwise  ok", pos)) != std::string::npos) {
    ++ok;
    pos += 1;
  }
  CHECK(ok == 15);
}

TEST_CASE("bench times an explicit selection") {
  const RunResult r = run_cli(
      "bench --scheme os-push --addressing direct "
      "--geometry channel:16x16x16 --steps 2 --warmup 0 --workers 1 "
      "--machine westmere");
  REQUIRE(r.code == 0);
  const std::vector<std::string> ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0].substr(0, 17) == "scheme,addressing");
  CHECK(ls[1].substr(0, 32) == "os-push,direct,channel,4096,2,1,");
}

TEST_CASE("bench skips unimplemented pairs instead of failing") {
  const RunResult r = run_cli(
      "bench --scheme ts --addressing indirect --geometry channel:8x8x8 "
      "--steps 1 --warmup 0 --workers 1 --machine westmere");
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 1);  // header only; the skip note goes to stderr
}

TEST_CASE("explicitly selecting a sequential scheme with workers fails fast") {
  const RunResult r = run_cli(
      "bench --scheme cg --addressing direct --geometry channel:8x8x8 "
      "--steps 1 --workers 2 --machine westmere");
  CHECK(r.code == 2);
  const RunResult swp = run_cli(
      "bench --scheme swap-pull --addressing direct --geometry channel:8x8x8 "
      "--steps 1 --workers 2 --machine westmere");
  CHECK(swp.code == 2);
}
