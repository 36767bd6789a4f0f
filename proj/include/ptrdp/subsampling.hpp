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

#ifndef PTRDP_SUBSAMPLING_HPP_
#define PTRDP_SUBSAMPLING_HPP_

#include <vector>

#include "ptrdp/ptr_config.hpp"
#include "ptrdp/rdp_accountant.hpp"

namespace ptrdp {

struct SubsampleParams {
  double q = 0.0;  // Poisson inclusion probability, in [0, 1)
  PtrConfig config;

  void validate() const {
    if (!(q >= 0.0 && q < 1.0)) throw config_error("q must lie in [0, 1)");
    config.validate();
  }
};

// Moment query against the Laplace mixture pair
//   mu0 = Lap(0, b),   mu = (1-q) Lap(0, b) + q Lap(1, b).
// The likelihood ratio r(s) = mu(s)/mu0(s) = (1-q) + q exp((|s|-|s-1|)/b)
// is constant outside [0, 1], which keeps every moment finite.
struct MixtureMomentQuery {
  double q = 0.0;
  double b = 1.0;
  double order = 1.0;  // may be negative or fractional

  double ratio_min() const;  // r on s < 0
  double ratio_max() const;  // r on s > 1
};

// E_{s ~ mu0} [ r(s)^order ]. Tails are closed form; the varying part on
// [0, 1] is integrated by adaptive Gauss-Kronrod to ~1e-12 relative error.
double mixture_moment_R(const MixtureMomentQuery& query);

// E_{s ~ mu} [ (1/r(s))^order ], computed through the identity
// Rtilde(order) = R(1 - order).
double mixture_moment_Rtilde(const MixtureMomentQuery& query);

enum class Constraint {
  none,
  q_bound,          // q <= exp(-1/b) / (4 + exp(-1/b))
  sigma_floor,      // sigma1 >= sigma2 >= 4
  alpha_cap_linear, // alpha <= sigma2^2 L / 2 - 2 ln sigma2
  alpha_cap_log,    // alpha <= (sigma2^2 L^2/2 - ln5 - 2 ln sigma2) / (L + ln(q' a) + 1/(2 sigma2^2))
};

struct ConditionReport {
  bool satisfied = false;
  double L = 0.0;        // ln(1 + 1/(q' (alpha-1)))
  double q_prime = 0.0;  // q / (q + (1-q) exp(-1/b))
  Constraint binding = Constraint::none;  // first violated constraint
};

// Applicability conditions of the subsampled white-box bound. Report-only.
ConditionReport check_conditions(const SubsampleParams& params, double alpha);

// White-box Renyi-DP bound for Poisson-subsampled propose-test-release:
//   f_alpha^{-1}( max(B0, B1, B2) )
// with B0 the Gaussian pair term and B1/B2 built from the Laplace mixture
// moments at shifted orders. Throws bound_not_applicable when
// check_conditions fails; callers fall back to the black-box bound.
double subsampled_ptr_rdp(const SubsampleParams& params, double alpha);

// Curve restricted to the grid orders where the conditions hold.
RdpCurve subsampled_ptr_rdp_curve(const SubsampleParams& params,
                                  const std::vector<double>& alphas);

// Generic amplification upper bound for a base mechanism given its RDP at
// integer orders j <= alpha (and its pure-DP cap through base.eps_infinity).
// Integer orders only.
double blackbox_subsampled_rdp(const RdpCurve& base, double q, int alpha);

// Matching generic lower bound.
double subsampled_rdp_lower_bound(const RdpCurve& base, double q, int alpha);

// (eps, delta)-DP amplification under Poisson subsampling:
//   eps -> ln(1 + q (e^eps - 1)),  delta -> q delta.
double amplify_dp_eps(double eps, double q);

// Subsampled Gaussian moment bound 1 + 2 q^2 a (a-1) / sigma^2, the plain
// aggregation counterpart used when no margin test runs. Same condition
// family with the Laplace scale taken to infinity (q' = q).
ConditionReport check_gaussian_conditions(double q, double sigma_tilde, double alpha);
double subsampled_gaussian_rdp(double q, double sigma_tilde, double alpha);

}  // namespace ptrdp

#endif  // PTRDP_SUBSAMPLING_HPP_
