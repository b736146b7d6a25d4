#pragma once

#include <array>
#include <cstdint>

#include "lbmlab/stencil.hpp"

namespace lbmlab {

struct FlowParams {
  double lambda_even = 1.0 / 0.9;                    // even-moment relaxation rate (= 1/tau)
  double magic_lambda = 3.0 / 16.0;                  // TRT magic parameter
  std::array<double, 3> body_force{1e-5, 0.0, 0.0};  // constant acceleration g
  double rho0 = 1.0;
};

// Odd relaxation rate from the magic relation (tau_e - 1/2)(tau_o - 1/2) = magic_lambda.
double lambda_odd(const FlowParams& p);

// Boundary validation for user-supplied parameters (CLI/bench). The struct
// itself stays permissive: property tests use lambda_even = lambda_odd = 0
// (zero-collision mode, collide == identity).
void validate(const FlowParams& p);

struct Moments {
  double rho = 0.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
};

// rho = sum_i f_i, u = (sum_i f_i c_i)/rho + g/2 (half-force correction).
// Throws std::domain_error("vacuum node") when rho <= 0.
Moments moments(const Stencil& s, const double* f, const std::array<double, 3>& g);

double equilibrium(const Stencil& s, double rho, const std::array<double, 3>& u, int i);

// TRT collision + simple linear body-force term, applied in place to one
// node's q PDFs (stencil order). This is the single authoritative collision
// routine: every propagation kernel funnels through it with a fixed operand
// order, which is what makes cross-scheme results bit-identical. Opposing
// pairs are processed together so even/odd parts share subexpressions.
class TrtOperator {
 public:
  TrtOperator(const Stencil& s, const FlowParams& p);
  TrtOperator(const Stencil& s, double lambda_even, double lambda_odd,
              const std::array<double, 3>& body_force);

  void collide(double* f) const noexcept;

  // Static count of +,-,*,/ in collide() for this stencil (sign flips free).
  // D3Q19 lands at 216, consistent with the ~200 FLOP/node budget the
  // performance model divides by.
  int flops_per_update() const;

  int q() const { return q_; }

 private:
  void build(const Stencil& s, const std::array<double, 3>& g);

  static constexpr int kMaxPairs = 13;

  struct PairCoef {
    std::uint8_t i, j;       // direction indices, i < j = opposite(i)
    std::uint8_t nterms;     // nonzero components of c_i (1 axis, 2 diagonal)
    std::uint8_t k0, k1;     // component indices of those terms
    std::int8_t s0, s1;      // their signs
    double w2;               // 2 w_i
    double f3w;              // 3 w_i (c_i . g)
  };

  int q_ = 0, d_ = 0, np_ = 0;
  double lambda_e_ = 0.0, le_half_ = 0.0, lo_half_ = 0.0;
  double w0_ = 0.0;
  std::array<PairCoef, kMaxPairs> pair_{};
  // momentum gather: per component, signed references into the pair
  // difference array
  std::array<int, 3> nmom_{0, 0, 0};
  std::array<std::array<std::uint8_t, kMaxPairs>, 3> mom_idx_{};
  std::array<std::array<std::int8_t, kMaxPairs>, 3> mom_sgn_{};
};

}  // namespace lbmlab
