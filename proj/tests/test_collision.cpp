#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

#include "lbmlab/collision.hpp"
#include "lbmlab/stencil.hpp"

using namespace lbmlab;

namespace {

std::vector<double> random_positive(const Stencil& s, std::uint64_t seed) {
  std::vector<double> f(s.q);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < s.q; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    f[i] = s.w[i] * (0.8 + 0.4 * u);
  }
  return f;
}

}  // namespace

TEST_CASE("magic relation fixes the odd rate") {
  FlowParams p;  // tau = 0.9, magic 3/16
  // (0.9 - 0.5)(tau_o - 0.5) = 3/16  =>  tau_o = 0.96875 = 31/32
  CHECK(lambda_odd(p) == doctest::Approx(32.0 / 31.0).epsilon(1e-15));

  p.lambda_even = 1.0;  // tau = 1: SRT limit, both rates collapse
  CHECK(lambda_odd(p) == doctest::Approx(1.0 / (3.0 / 16.0 / 0.5 + 0.5)));
}

TEST_CASE("equilibrium against a hand-computed value") {
  const Stencil s = make_stencil("d3q19");
  const std::array<double, 3> u{0.1, -0.05, 0.02};
  // i = 1 is +x: cu = 0.1, |u|^2 = 0.0129
  // w rho (1 + 0.3 + 4.5*0.01 - 1.5*0.0129) = 1.2/18 * 1.32565
  CHECK(equilibrium(s, 1.2, u, 1) ==
        doctest::Approx(1.2 * 1.32565 / 18.0).epsilon(1e-15));
  // i = 7 is (-1,-1,0): cu = -0.05
  CHECK(equilibrium(s, 1.2, u, 7) ==
        doctest::Approx(1.2 / 36.0 * (1.0 - 0.15 + 4.5 * 0.0025 - 1.5 * 0.0129))
            .epsilon(1e-15));
  // rest direction
  CHECK(equilibrium(s, 1.2, u, 0) ==
        doctest::Approx(1.2 / 3.0 * (1.0 - 1.5 * 0.0129)).epsilon(1e-15));
}

TEST_CASE("moments: sums, division by rho, half-force shift") {
  const Stencil s = make_stencil("d2q9");
  std::vector<double> f(s.w.begin(), s.w.end());
  f[1] += 0.1;  // extra mass moving +x
  const std::array<double, 3> g{0.002, -0.004, 0.0};
  const Moments m = moments(s, f.data(), g);
  CHECK(m.rho == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(m.u[0] == doctest::Approx(0.1 / 1.1 + 0.001).epsilon(1e-14));
  CHECK(m.u[1] == doctest::Approx(-0.002).epsilon(1e-14));
  CHECK(m.u[2] == 0.0);
}

TEST_CASE("moments throws on vacuum") {
  const Stencil s = make_stencil("d3q19");
  std::vector<double> f(s.q, 0.0);
  CHECK_THROWS_WITH_AS(moments(s, f.data(), {0, 0, 0}), "vacuum node",
                       std::domain_error);
}

TEST_CASE("collide conserves mass and adds rho*g of momentum") {
  for (const char* name : {"d3q19", "d2q9"}) {
    CAPTURE(name);
    const Stencil s = make_stencil(name);
    FlowParams p;
    p.body_force = {1e-4, -2e-4, name[1] == '3' ? 3e-4 : 0.0};
    const TrtOperator op(s, p);
    std::vector<double> f = random_positive(s, 7);

    double rho0 = 0.0;
    std::array<double, 3> mom0{};
    for (int i = 0; i < s.q; ++i) {
      rho0 += f[i];
      for (int k = 0; k < 3; ++k) mom0[k] += f[i] * s.c[i][k];
    }
    op.collide(f.data());
    double rho1 = 0.0;
    std::array<double, 3> mom1{};
    for (int i = 0; i < s.q; ++i) {
      rho1 += f[i];
      for (int k = 0; k < 3; ++k) mom1[k] += f[i] * s.c[i][k];
    }
    CHECK(rho1 == doctest::Approx(rho0).epsilon(1e-14));
    for (int k = 0; k < 3; ++k)
      CHECK(mom1[k] ==
            doctest::Approx(mom0[k] + rho0 * p.body_force[k]).epsilon(1e-13));
  }
}

TEST_CASE("equilibrium is a fixed point without forcing") {
  const Stencil s = make_stencil("d3q19");
  const TrtOperator op(s, FlowParams{}.lambda_even, lambda_odd(FlowParams{}),
                       {0.0, 0.0, 0.0});
  const std::array<double, 3> u{0.03, -0.01, 0.02};
  std::vector<double> f(s.q);
  for (int i = 0; i < s.q; ++i) f[i] = equilibrium(s, 1.05, u, i);
  std::vector<double> f0 = f;
  op.collide(f.data());
  for (int i = 0; i < s.q; ++i)
    CHECK(f[i] == doctest::Approx(f0[i]).epsilon(1e-13));
}

TEST_CASE("parity equivariance is exact without forcing") {
  for (const char* name : {"d3q19", "d2q9"}) {
    const Stencil s = make_stencil(name);
    const TrtOperator op(s, 1.0 / 0.9, 32.0 / 31.0, {0.0, 0.0, 0.0});
    std::vector<double> f = random_positive(s, 11);
    std::vector<double> rf(s.q);
    for (int i = 0; i < s.q; ++i) rf[s.opposite[i]] = f[i];
    op.collide(f.data());
    op.collide(rf.data());
    for (int i = 0; i < s.q; ++i) {
      CAPTURE(i);
      CHECK(std::memcmp(&rf[s.opposite[i]], &f[i], sizeof(double)) == 0);
    }
  }
}

TEST_CASE("zero-rate operator is the exact identity") {
  const Stencil s = make_stencil("d3q19");
  const TrtOperator op(s, 0.0, 0.0, {0.0, 0.0, 0.0});
  std::vector<double> f = random_positive(s, 3);
  const std::vector<double> f0 = f;
  op.collide(f.data());
  CHECK(std::memcmp(f.data(), f0.data(), s.q * sizeof(double)) == 0);
}

TEST_CASE("parameter and explicit-rate constructors agree bitwise") {
  const Stencil s = make_stencil("d3q19");
  FlowParams p;
  const TrtOperator a(s, p);
  const TrtOperator b(s, p.lambda_even, lambda_odd(p), p.body_force);
  std::vector<double> fa = random_positive(s, 5), fb = fa;
  a.collide(fa.data());
  b.collide(fb.data());
  CHECK(std::memcmp(fa.data(), fb.data(), s.q * sizeof(double)) == 0);
}

TEST_CASE("equal relaxation rates reduce to plain BGK") {
  // independent oracle: f_i' = f_i - lambda (f_i - feq_i) + 3 w_i (c_i.g) rho
  for (const char* name : {"d3q19", "d2q9"}) {
    const Stencil s = make_stencil(name);
    const double lam = 1.0 / 0.8;
    const std::array<double, 3> g{2e-5, -1e-5, name[1] == '3' ? 3e-6 : 0.0};
    std::vector<double> f = random_positive(s, 11), want(s.q);
    const Moments m = moments(s, f.data(), {0, 0, 0});
    for (int i = 0; i < s.q; ++i) {
      const double cg = s.c[i][0] * g[0] + s.c[i][1] * g[1] + s.c[i][2] * g[2];
      want[i] = f[i] - lam * (f[i] - equilibrium(s, m.rho, m.u, i)) +
                3.0 * s.w[i] * cg * m.rho;
    }
    const TrtOperator op(s, lam, lam, g);
    op.collide(f.data());
    for (int i = 0; i < s.q; ++i) {
      CAPTURE(name);
      CAPTURE(i);
      CHECK(f[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("operation count sits at the ~200 FLOP budget") {
  const TrtOperator op3(make_stencil("d3q19"), FlowParams{});
  CHECK(op3.flops_per_update() == 216);
  CHECK(op3.flops_per_update() >= 180);
  CHECK(op3.flops_per_update() <= 220);
  const TrtOperator op2(make_stencil("d2q9"), FlowParams{});
  CHECK(op2.flops_per_update() == 100);
}

TEST_CASE("parameter validation") {
  FlowParams p;
  CHECK_NOTHROW(validate(p));
  p.lambda_even = 2.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = FlowParams{};
  p.magic_lambda = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = FlowParams{};
  p.rho0 = -1.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = FlowParams{};
  p.body_force[1] = std::nan("");
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}
