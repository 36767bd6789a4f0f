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

#ifndef PTRDP_PTR_CORE_HPP_
#define PTRDP_PTR_CORE_HPP_

#include <cstdint>
#include <vector>

#include "ptrdp/ptr_config.hpp"
#include "ptrdp/random.hpp"

namespace ptrdp {

// A dataset is a multiset of real vectors; adjacency is one addition or
// removal.
using Dataset = std::vector<std::vector<double>>;

// Target function f1, robust statistic f2, and the margin computation:
// safety_margin returns the minimum number of single-element edits after
// which the local sensitivity of f2 exceeds tau (+infinity when no dataset
// reaches that, i.e. tau is at least the global sensitivity). Adding or
// removing one element changes the margin by at most 1.
class SensitivityOracle {
 public:
  virtual ~SensitivityOracle() = default;
  virtual std::vector<double> eval_f1(const Dataset& data) const = 0;
  virtual std::vector<double> eval_f2(const Dataset& data) const = 0;
  virtual double safety_margin(const Dataset& data, double tau) const = 0;
};

enum class Branch {
  large_noise,  // noisy margin at or below the threshold: release f1
  small_noise,  // margin comfortably large: release f2
};

struct PtrOutcome {
  double delta_hat = 0.0;  // noisy margin; part of the release
  Branch branch = Branch::large_noise;
  std::vector<double> release;
};

// One run of the propose-test-release mechanism: privatize the safety
// margin with Laplace noise, compare against the derived threshold, release
// the branch statistic under the branch's Gaussian scale. The noisy margin
// is always part of the outcome. Exactly one Laplace draw decides the
// branch; an infinite margin still consumes that draw so replay traces stay
// aligned.
PtrOutcome run_ptr(const Dataset& data, const PtrConfig& config,
                   const SensitivityOracle& oracle, Rng& rng);

struct AdjacentPair {
  Dataset s;
  Dataset s_prime;
};

struct MomentEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

// Monte-Carlo estimate of the order-alpha moment
//   E_{o ~ M(S')} [ (density_S(o) / density_S'(o))^alpha ]
// of the mechanism's joint output (noisy margin, release), using the exact
// per-branch densities (Laplace times the branch-selected Gaussian), so the
// only error is sampling error. Restricted to scalar releases; requires at
// least 1e5 samples. Work is split into fixed chunks with forked RNG
// streams; results do not depend on how many threads execute them.
MomentEstimate empirical_renyi_moment(const AdjacentPair& pair,
                                      const PtrConfig& config,
                                      const SensitivityOracle& oracle,
                                      double alpha, std::int64_t n_samples,
                                      Rng& rng);

}  // namespace ptrdp

#endif  // PTRDP_PTR_CORE_HPP_
