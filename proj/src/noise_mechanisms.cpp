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

#include "ptrdp/noise_mechanisms.hpp"

#include <algorithm>
#include <cmath>

#include "ptrdp/errors.hpp"

namespace ptrdp {

NoiseToSensitivityRatio::NoiseToSensitivityRatio(double v) : value(v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw config_error("noise-to-sensitivity ratio must be positive and finite");
  }
}

double log_add_exp(double log_x, double log_y) {
  if (log_x < log_y) std::swap(log_x, log_y);
  if (std::isinf(log_y) && log_y < 0) return log_x;
  return log_x + std::log1p(std::exp(log_y - log_x));
}

double sample_laplace(double center, double scale, Rng& rng) {
  if (!(scale > 0.0)) throw config_error("Laplace scale must be positive");
  const double v = rng.uniform() - 0.5;  // (-1/2, 1/2)
  const double sign = v < 0.0 ? -1.0 : 1.0;
  return center - scale * sign * std::log(1.0 - 2.0 * std::abs(v));
}

std::vector<double> sample_gaussian_vec(const std::vector<double>& center,
                                        double sigma, Rng& rng) {
  if (!(sigma > 0.0)) throw config_error("Gaussian sigma must be positive");
  std::vector<double> out(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    out[i] = center[i] + sigma * z;
  }
  return out;
}

double laplace_pure_dp_eps(NoiseToSensitivityRatio b_tilde) {
  return 1.0 / b_tilde.value;
}

double laplace_rdp_eps(NoiseToSensitivityRatio b_tilde, double alpha) {
  if (!(alpha > 1.0)) throw config_error("Renyi order must exceed 1");
  const double b = b_tilde.value;
  const double t1 = std::log(alpha / (2.0 * alpha - 1.0)) + (alpha - 1.0) / b;
  const double t2 = std::log((alpha - 1.0) / (2.0 * alpha - 1.0)) - alpha / b;
  return log_add_exp(t1, t2) / (alpha - 1.0);
}

double gaussian_rdp_eps(NoiseToSensitivityRatio sigma_tilde, double alpha) {
  if (!(alpha > 1.0)) throw config_error("Renyi order must exceed 1");
  return alpha / (2.0 * sigma_tilde.value * sigma_tilde.value);
}

GaussianDpResult gaussianDpEpsImpl(double sigma_tilde, double delta) {
  const double eps = std::sqrt(2.0 * std::log(1.25 / delta)) / sigma_tilde;
  return {eps, eps <= 1.0};
}

GaussianDpResult gaussian_dp_eps(NoiseToSensitivityRatio sigma_tilde, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw config_error("delta must lie in (0, 1)");
  }
  return gaussianDpEpsImpl(sigma_tilde.value, delta);
}

}  // namespace ptrdp
