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

#ifndef PTRDP_PTR_CONFIG_HPP_
#define PTRDP_PTR_CONFIG_HPP_

#include <cmath>

#include "ptrdp/errors.hpp"

namespace ptrdp {

// Noise and threshold parameters of the propose-test-release mechanism.
//
// sigma1 is the Gaussian scale of the fallback branch (noisy target
// function), sigma2 the scale of the preferred branch (noisy robust
// statistic), tau the proposed local-sensitivity bound, b the Laplace scale
// of the private margin test, and delta0 the tolerated test failure
// probability. The test threshold is derived, never stored:
//   B = ln(1 / (2 delta0)) * b.
//
// sigma1 >= sigma2 is required. The analytic bounds additionally assume the
// calibration sigma1 = sigma2 / tau after normalizing sensitivities to 1;
// equality of the two scales corresponds to tau = 1.
struct PtrConfig {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double tau = 0.0;
  double b = 0.0;
  double delta0 = 0.0;

  void validate() const {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) {
      throw config_error("Gaussian scales must be positive");
    }
    if (sigma1 < sigma2) {
      throw config_error("sigma1 must be at least sigma2");
    }
    if (!(tau > 0.0)) throw config_error("tau must be positive");
    if (!(b > 0.0)) throw config_error("Laplace scale b must be positive");
    if (!(delta0 > 0.0 && delta0 < 0.5)) {
      throw config_error("delta0 must lie in (0, 1/2)");
    }
  }

  double threshold_b() const { return std::log(1.0 / (2.0 * delta0)) * b; }

  // Rescales to unit global sensitivity of the released statistics. The
  // margin's own sensitivity is 1 regardless, so b is untouched.
  PtrConfig normalized(double gs) const {
    if (!(gs > 0.0)) throw config_error("global sensitivity must be positive");
    return PtrConfig{sigma1 / gs, sigma2 / gs, tau / gs, b, delta0};
  }

  // The accountant's bounds assume sigma1 = sigma2 / tau (in normalized
  // units); tolerate only floating-point slack.
  void require_scale_relation() const {
    validate();
    const double want = sigma2 / tau;
    if (std::abs(sigma1 - want) > 1e-9 * std::max(1.0, std::abs(sigma1))) {
      throw config_error("scale relation sigma1 = sigma2 / tau violated");
    }
  }
};

}  // namespace ptrdp

#endif  // PTRDP_PTR_CONFIG_HPP_
