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

#ifndef PTRDP_NOISE_MECHANISMS_HPP_
#define PTRDP_NOISE_MECHANISMS_HPP_

#include <vector>

#include "ptrdp/random.hpp"

namespace ptrdp {

// Dimensionless noise-to-sensitivity ratio (noise scale divided by the L2
// global sensitivity of the released function). All analytic privacy
// formulas below consume this quantity.
struct NoiseToSensitivityRatio {
  double value;
  explicit NoiseToSensitivityRatio(double v);
};

// Draws from the Laplace density exp(-|x - center| / scale) / (2 * scale).
double sample_laplace(double center, double scale, Rng& rng);

// Draws a vector with i.i.d. Normal(center[i], sigma^2) coordinates.
std::vector<double> sample_gaussian_vec(const std::vector<double>& center,
                                        double sigma, Rng& rng);

// Pure-DP epsilon of the Laplace mechanism: 1 / b_tilde.
double laplace_pure_dp_eps(NoiseToSensitivityRatio b_tilde);

// Renyi-DP epsilon of the Laplace mechanism at order alpha > 1:
//   (1/(alpha-1)) * log( alpha/(2 alpha - 1) * exp((alpha-1)/b)
//                      + (alpha-1)/(2 alpha - 1) * exp(-alpha/b) )
// Evaluated in log space so large orders do not overflow.
double laplace_rdp_eps(NoiseToSensitivityRatio b_tilde, double alpha);

// Renyi-DP epsilon of the Gaussian mechanism: alpha / (2 sigma_tilde^2).
double gaussian_rdp_eps(NoiseToSensitivityRatio sigma_tilde, double alpha);

struct GaussianDpResult {
  double eps;
  // The classic closed form is only valid for eps <= 1; false signals the
  // caller left that regime.
  bool classic_regime;
};

// (eps, delta)-DP of the Gaussian mechanism, classic closed form:
//   eps = sqrt(2 * ln(1.25 / delta)) / sigma_tilde.
GaussianDpResult gaussian_dp_eps(NoiseToSensitivityRatio sigma_tilde, double delta);

// log(x + y) given log x and log y.
double log_add_exp(double log_x, double log_y);

}  // namespace ptrdp

#endif  // PTRDP_NOISE_MECHANISMS_HPP_
