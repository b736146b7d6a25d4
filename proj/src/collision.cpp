#include "lbmlab/collision.hpp"

#include <cmath>
#include <stdexcept>

namespace lbmlab {

double lambda_odd(const FlowParams& p) {
  const double tau_e_m = 1.0 / p.lambda_even - 0.5;  // tau_e - 1/2
  return 1.0 / (p.magic_lambda / tau_e_m + 0.5);
}

void validate(const FlowParams& p) {
  if (!(p.lambda_even > 0.0) || !(p.lambda_even < 2.0))
    throw std::invalid_argument("lambda_even out of range (0, 2)");
  if (!(p.magic_lambda > 0.0))
    throw std::invalid_argument("magic_lambda must be positive");
  if (!(p.rho0 > 0.0)) throw std::invalid_argument("rho0 must be positive");
  if (!std::isfinite(p.body_force[0]) || !std::isfinite(p.body_force[1]) ||
      !std::isfinite(p.body_force[2]))
    throw std::invalid_argument("body_force must be finite");
}

Moments moments(const Stencil& s, const double* f, const std::array<double, 3>& g) {
  double rho = 0.0;
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (int i = 0; i < s.q; ++i) {
    rho += f[i];
    for (int k = 0; k < s.d; ++k) m[k] += f[i] * s.c[i][k];
  }
  if (!(rho > 0.0)) throw std::domain_error("vacuum node");
  Moments out;
  out.rho = rho;
  for (int k = 0; k < 3; ++k) out.u[k] = m[k] / rho + 0.5 * g[k];
  return out;
}

double equilibrium(const Stencil& s, double rho, const std::array<double, 3>& u, int i) {
  double cu = 0.0, usq = 0.0;
  for (int k = 0; k < s.d; ++k) {
    cu += s.c[i][k] * u[k];
    usq += u[k] * u[k];
  }
  return s.w[i] * rho * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq);
}

TrtOperator::TrtOperator(const Stencil& s, const FlowParams& p)
    : TrtOperator(s, p.lambda_even, lambda_odd(p), p.body_force) {}

TrtOperator::TrtOperator(const Stencil& s, double lambda_even, double lambda_odd,
                         const std::array<double, 3>& body_force) {
  q_ = s.q;
  d_ = s.d;
  np_ = s.pairs();
  if (np_ > kMaxPairs) throw std::invalid_argument("stencil has too many pairs");
  lambda_e_ = lambda_even;
  le_half_ = 0.5 * lambda_even;
  lo_half_ = 0.5 * lambda_odd;
  w0_ = s.w[0];
  build(s, body_force);
}

void TrtOperator::build(const Stencil& s, const std::array<double, 3>& g) {
  const auto pairs = direction_pairs(s);
  for (int p = 0; p < np_; ++p) {
    const int i = pairs[p].first, j = pairs[p].second;
    PairCoef& pc = pair_[p];
    pc.i = static_cast<std::uint8_t>(i);
    pc.j = static_cast<std::uint8_t>(j);
    pc.nterms = 0;
    pc.k0 = pc.k1 = 0;
    pc.s0 = pc.s1 = 1;
    double cg = 0.0;
    for (int k = 0; k < d_; ++k) {
      const int ck = s.c[i][k];
      if (ck == 0) continue;
      cg += ck * g[k];
      if (pc.nterms == 0) {
        pc.k0 = static_cast<std::uint8_t>(k);
        pc.s0 = static_cast<std::int8_t>(ck);
      } else {
        pc.k1 = static_cast<std::uint8_t>(k);
        pc.s1 = static_cast<std::int8_t>(ck);
      }
      ++pc.nterms;
      mom_idx_[k][nmom_[k]] = static_cast<std::uint8_t>(p);
      mom_sgn_[k][nmom_[k]] = static_cast<std::int8_t>(ck);
      ++nmom_[k];
    }
    pc.w2 = 2.0 * s.w[i];
    pc.f3w = 3.0 * s.w[i] * cg;
  }
}

void TrtOperator::collide(double* f) const noexcept {
  double fsum[kMaxPairs], fdif[kMaxPairs];
  const int np = np_;

  double rho = f[0];
  for (int p = 0; p < np; ++p) {
    const PairCoef& pc = pair_[p];
    const double fi = f[pc.i], fj = f[pc.j];
    fsum[p] = fi + fj;
    fdif[p] = fi - fj;
    rho += fsum[p];
  }

  double u[3] = {0.0, 0.0, 0.0};
  for (int k = 0; k < d_; ++k) {
    double m = 0.0;
    for (int t = 0; t < nmom_[k]; ++t)
      m += mom_sgn_[k][t] > 0 ? fdif[mom_idx_[k][t]] : -fdif[mom_idx_[k][t]];
    u[k] = m / rho;
  }

  double usq = u[0] * u[0];
  for (int k = 1; k < d_; ++k) usq += u[k] * u[k];
  const double base = 1.0 - 1.5 * usq;

  const double wr0 = w0_ * rho;
  const double e0 = wr0 * base;
  f[0] -= lambda_e_ * (f[0] - e0);

  for (int p = 0; p < np; ++p) {
    const PairCoef& pc = pair_[p];
    double cu = pc.s0 > 0 ? u[pc.k0] : -u[pc.k0];
    if (pc.nterms == 2) cu += pc.s1 > 0 ? u[pc.k1] : -u[pc.k1];
    const double cu3 = 3.0 * cu;
    const double cusq45 = 0.5 * (cu3 * cu3);
    const double wr2 = pc.w2 * rho;
    const double esum = wr2 * (base + cusq45);
    const double edif = wr2 * cu3;
    const double dp = le_half_ * (fsum[p] - esum);
    const double dm = lo_half_ * (fdif[p] - edif);
    const double dmf = dm - pc.f3w * rho;
    f[pc.i] = f[pc.i] - dp - dmf;
    f[pc.j] = f[pc.j] - dp + dmf;
  }
}

int TrtOperator::flops_per_update() const {
  int n = 3 * np_;                              // pair sums/differences + density
  for (int k = 0; k < d_; ++k) n += nmom_[k] + 1;  // momentum adds + divide
  n += d_ + (d_ - 1);                           // |u|^2
  n += 2;                                       // 1 - 1.5 usq
  n += 5;                                       // rest-direction update
  for (int p = 0; p < np_; ++p) n += 17 + (pair_[p].nterms - 1);
  return n;
}

}  // namespace lbmlab
