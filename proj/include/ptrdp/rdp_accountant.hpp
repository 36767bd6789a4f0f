//
// Copyright 2026 The ptr-accountant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PTRDP_RDP_ACCOUNTANT_HPP_
#define PTRDP_RDP_ACCOUNTANT_HPP_

#include <limits>
#include <vector>

#include "ptrdp/ptr_config.hpp"

namespace ptrdp {

struct DpGuarantee {
  double eps = 0.0;
  double delta = 0.0;
};

// A Renyi-DP curve: eps as a function of the order alpha, stored on an
// explicit grid. Conversions and compositions only ever read stored points;
// there is no interpolation, so every reported epsilon is a certified bound.
class RdpCurve {
 public:
  RdpCurve() = default;
  RdpCurve(std::vector<double> alphas, std::vector<double> eps);

  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& eps() const { return eps_; }
  std::size_t size() const { return alphas_.size(); }
  bool empty() const { return alphas_.empty(); }

  bool has_alpha(double alpha) const;
  double eps_at(double alpha) const;  // throws config_error if not stored

  // Pure-DP cap, i.e. the alpha -> infinity limit. +inf when none is known.
  double eps_infinity = std::numeric_limits<double>::infinity();

  RdpCurve scaled(double k) const;  // pointwise k * eps

 private:
  std::vector<double> alphas_;
  std::vector<double> eps_;
};

// Dense near 1 where conversions tend to minimize, integer out to 200.
std::vector<double> default_alpha_grid();

// Moment helpers: f_alpha(eps) = exp((alpha-1) eps) and its inverse.
double f_alpha(double eps, double alpha);
double f_alpha_inv(double moment, double alpha);
double f_alpha_inv_log(double log_moment, double alpha);

// Moment of a two-component mechanism mixture,
//   (1 - delta0) f_alpha(eps1) + delta0 f_alpha(eps2),
// evaluated in log space.
double mixture_rdp_log_moment(double eps1, double eps2, double delta0, double alpha);
double mixture_rdp_moment(double eps1, double eps2, double delta0, double alpha);

struct PtrRdpArms {
  double mixture_arm;      // f_alpha^{-1} of the branch-probability mixture
  double composition_arm;  // Gaussian (sigma1) + Laplace test, composed
};

// Both candidate bounds, on raw parameters (no clamping of delta0) so that
// arm equality at the balancing delta0 can be checked exactly.
PtrRdpArms ptr_rdp_arms(double sigma1, double sigma2, double b, double delta0,
                        double alpha);

// Renyi-DP bound for propose-test-release at order alpha:
// max of the two arms. Requires a normalized config (unit global
// sensitivity) with sigma1 = sigma2 / tau.
double ptr_rdp(const PtrConfig& config, double alpha);

RdpCurve ptr_rdp_curve(const PtrConfig& config, const std::vector<double>& alphas);

// Direct (eps, delta)-DP bound for propose-test-release:
//   ( 1/b + gaussian_dp_eps(sigma1, delta), delta0 + delta ).
// gs_f1 and gs_f2 must agree; parameters are normalized by them internally.
DpGuarantee ptr_direct_dp(const PtrConfig& config, double delta, double gs_f1,
                          double gs_f2);

struct OptimalDelta0 {
  double value;  // clamped into (0, 1/2)
  double raw;    // balancing value before clamping
};

// The delta0 at which the two arms of the PTR bound coincide:
//   f(eps_g1) (f(eps_lap) - 1) / (f(eps_g2) - f(eps_g1))
// with f = f_alpha and eps_gi the Gaussian RDP at sigma_i.
OptimalDelta0 optimal_delta0(double sigma1, double sigma2, double b, double alpha);

struct DpConversion {
  DpGuarantee tight;          // hypothesis-testing-style conversion
  DpGuarantee classic;        // eps(alpha) + ln(1/delta)/(alpha-1)
  double alpha_tight = 0.0;   // minimizing grid orders
  double alpha_classic = 0.0;
};

// Converts an RDP curve to (eps, delta)-DP by minimizing over stored orders.
// Tight rule: eps(a) + ln((a-1)/a) - (ln delta + ln a)/(a-1).
DpConversion rdp_to_dp(const RdpCurve& curve, double delta);

// Pointwise sum over identical alpha grids.
RdpCurve compose(const std::vector<RdpCurve>& curves);

// k-fold composition of a fixed (eps, delta)-DP step: best of the linear
// bound and the two sublinear candidates; delta_total = k delta + delta_prime.
DpGuarantee strong_composition(double eps, double delta, int k, double delta_prime);

}  // namespace ptrdp

#endif  // PTRDP_RDP_ACCOUNTANT_HPP_
