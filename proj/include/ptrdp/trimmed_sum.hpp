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

#ifndef PTRDP_TRIMMED_SUM_HPP_
#define PTRDP_TRIMMED_SUM_HPP_

#include <vector>

#include "ptrdp/ptr_core.hpp"

namespace ptrdp {

// A batch of clipped vectors. Every vector's L2 norm is at most
// clip_bound_r; insertion order is preserved and used to break norm ties.
struct GradientBatch {
  int dim = 0;
  double clip_bound_r = 0.0;
  std::vector<std::vector<double>> vectors;

  void validate() const;
};

double l2_norm(const std::vector<double>& v);

// v * min(1, r / ||v||); the zero vector maps to itself.
std::vector<double> clip(std::vector<double> v, double r);

// Indices of the batch ordered by ascending norm, ties by original index.
std::vector<int> norm_sorted_indices(const GradientBatch& batch);

// Sum of the (m - f) smallest-by-norm vectors; the zero vector when m <= f.
std::vector<double> tsum(const GradientBatch& batch, int f);

// Plain sum over the batch.
std::vector<double> sum_all(const GradientBatch& batch);

struct SensitivityProfile {
  int f = 0;        // trim count
  double tau = 0.0; // proposed local-sensitivity bound
  double gs = 0.0;  // global sensitivity of the trimmed sum (= clip bound)

  void validate() const;
};

// Worst local sensitivity of the f-trimmed sum reachable with r edits. The
// adversary's best move is adding max-norm points, which yields the norm of
// the (m - f + 1 + r)-th smallest element; indices past the end hit the
// added points themselves (gs), indices before the start mean the trimmed
// sum is still identically zero.
double local_sensitivity_r(const GradientBatch& batch,
                           const SensitivityProfile& profile, int r);

// Smallest r with local_sensitivity_r > tau; +infinity when tau >= gs. The
// scan is closed-form: it never needs to look past r = f.
double safety_margin(const GradientBatch& batch, const SensitivityProfile& profile);

// Propose-test-release oracle with f1 = SUM and f2 = the f-trimmed sum.
// Datasets handed to the oracle interface are clipped on entry.
class TrimmedSumOracle : public SensitivityOracle {
 public:
  TrimmedSumOracle(int dim, double clip_bound_r, int f);

  std::vector<double> eval_f1(const Dataset& data) const override;
  std::vector<double> eval_f2(const Dataset& data) const override;
  double safety_margin(const Dataset& data, double tau) const override;

  int trim_count() const { return f_; }
  double clip_bound() const { return clip_bound_r_; }

 private:
  GradientBatch to_batch(const Dataset& data) const;

  int dim_;
  double clip_bound_r_;
  int f_;
};

}  // namespace ptrdp

#endif  // PTRDP_TRIMMED_SUM_HPP_
