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

#include "ptrdp/trimmed_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ptrdp {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> clip(std::vector<double> v, double r) {
  if (!(r > 0.0)) throw config_error("clip bound must be positive");
  const double norm = l2_norm(v);
  if (norm > r) {
    const double scale = r / norm;
    for (double& x : v) x *= scale;
  }
  return v;
}

void GradientBatch::validate() const {
  if (dim <= 0) throw config_error("batch dimension must be positive");
  if (!(clip_bound_r > 0.0)) throw config_error("clip bound must be positive");
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != dim) {
      throw config_error("batch vector dimension mismatch");
    }
    if (l2_norm(v) > clip_bound_r * (1.0 + 1e-12)) {
      throw config_error("batch vector exceeds the clip bound");
    }
  }
}

void SensitivityProfile::validate() const {
  if (f < 0) throw config_error("trim count must be nonnegative");
  if (!(tau > 0.0)) throw config_error("tau must be positive");
  if (!(gs > 0.0)) throw config_error("global sensitivity must be positive");
}

std::vector<int> norm_sorted_indices(const GradientBatch& batch) {
  std::vector<int> idx(batch.vectors.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return l2_norm(batch.vectors[a]) < l2_norm(batch.vectors[b]);
  });
  return idx;
}

std::vector<double> tsum(const GradientBatch& batch, int f) {
  if (f < 0) throw config_error("trim count must be nonnegative");
  std::vector<double> out(batch.dim, 0.0);
  const int m = static_cast<int>(batch.vectors.size());
  if (m <= f) return out;
  const std::vector<int> order = norm_sorted_indices(batch);
  for (int i = 0; i < m - f; ++i) {
    const std::vector<double>& v = batch.vectors[order[i]];
    for (int k = 0; k < batch.dim; ++k) out[k] += v[k];
  }
  return out;
}

std::vector<double> sum_all(const GradientBatch& batch) { return tsum(batch, 0); }

double local_sensitivity_r(const GradientBatch& batch,
                           const SensitivityProfile& profile, int r) {
  profile.validate();
  if (r < 0) throw config_error("edit count must be nonnegative");
  const int m = static_cast<int>(batch.vectors.size());
  // Index of the surviving element after r max-norm additions, 1-based into
  // the norm-sorted batch.
  const long long k = static_cast<long long>(m) - profile.f + 1 + r;
  if (k <= 0) return 0.0;       // trimmed sum still identically zero
  if (k > m) return profile.gs; // the added max-norm points themselves
  const std::vector<int> order = norm_sorted_indices(batch);
  return l2_norm(batch.vectors[order[static_cast<std::size_t>(k - 1)]]);
}

double safety_margin(const GradientBatch& batch, const SensitivityProfile& profile) {
  profile.validate();
  if (profile.tau >= profile.gs) {
    return std::numeric_limits<double>::infinity();
  }
  for (int r = 0; r <= profile.f; ++r) {
    if (local_sensitivity_r(batch, profile, r) > profile.tau) {
      return static_cast<double>(r);
    }
  }
  // r = f already yields gs > tau, so the scan cannot fall through.
  return static_cast<double>(profile.f);
}

TrimmedSumOracle::TrimmedSumOracle(int dim, double clip_bound_r, int f)
    : dim_(dim), clip_bound_r_(clip_bound_r), f_(f) {
  if (dim <= 0) throw config_error("oracle dimension must be positive");
  if (!(clip_bound_r > 0.0)) throw config_error("clip bound must be positive");
  if (f < 0) throw config_error("trim count must be nonnegative");
}

GradientBatch TrimmedSumOracle::to_batch(const Dataset& data) const {
  GradientBatch batch;
  batch.dim = dim_;
  batch.clip_bound_r = clip_bound_r_;
  batch.vectors.reserve(data.size());
  for (const auto& v : data) {
    if (static_cast<int>(v.size()) != dim_) {
      throw config_error("dataset vector dimension mismatch");
    }
    batch.vectors.push_back(clip(v, clip_bound_r_));
  }
  return batch;
}

std::vector<double> TrimmedSumOracle::eval_f1(const Dataset& data) const {
  return sum_all(to_batch(data));
}

std::vector<double> TrimmedSumOracle::eval_f2(const Dataset& data) const {
  return tsum(to_batch(data), f_);
}

double TrimmedSumOracle::safety_margin(const Dataset& data, double tau) const {
  return ptrdp::safety_margin(to_batch(data), {f_, tau, clip_bound_r_});
}

}  // namespace ptrdp
