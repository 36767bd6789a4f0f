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

#ifndef PTRDP_ROBUST_SGD_SIM_HPP_
#define PTRDP_ROBUST_SGD_SIM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ptrdp/rdp_accountant.hpp"
#include "ptrdp/subsampling.hpp"
#include "ptrdp/trimmed_sum.hpp"

namespace ptrdp {

// ---------------------------------------------------------------------------
// Synthetic data and models

struct SimDataset {
  std::vector<std::vector<double>> x;
  std::vector<double> y;   // regression target, or class index as a double
  int num_classes = 0;     // 0 means regression
};

class Model {
 public:
  virtual ~Model() = default;
  virtual int param_dim(int feature_dim, int num_classes) const = 0;
  virtual double example_loss(const std::vector<double>& w,
                              const std::vector<double>& x, double y,
                              int num_classes) const = 0;
  virtual void example_grad(const std::vector<double>& w,
                            const std::vector<double>& x, double y,
                            int num_classes, std::vector<double>& out) const = 0;
};

// Squared loss 0.5 (w.x - y)^2 with gradient (w.x - y) x.
class LinearRegressionModel : public Model {
 public:
  int param_dim(int feature_dim, int num_classes) const override;
  double example_loss(const std::vector<double>& w, const std::vector<double>& x,
                      double y, int num_classes) const override;
  void example_grad(const std::vector<double>& w, const std::vector<double>& x,
                    double y, int num_classes, std::vector<double>& out) const override;
};

// Multinomial logistic regression; parameters are a row-major C x d matrix.
class LogisticRegressionModel : public Model {
 public:
  int param_dim(int feature_dim, int num_classes) const override;
  double example_loss(const std::vector<double>& w, const std::vector<double>& x,
                      double y, int num_classes) const override;
  void example_grad(const std::vector<double>& w, const std::vector<double>& x,
                    double y, int num_classes, std::vector<double>& out) const override;
};

// Features are i.i.d. Normal(0, 1/d) per coordinate (unit expected norm);
// y = w*.x + label_noise * N(0,1), with w* of the given norm.
SimDataset make_regression_data(int n, int d, double wstar_norm,
                                double label_noise, Rng& rng,
                                std::vector<double>* wstar_out = nullptr);

// Gaussian blobs, one per class, centers of the given norm.
SimDataset make_blob_classification_data(int n, int d, int num_classes,
                                         double center_norm, Rng& rng);

// ---------------------------------------------------------------------------
// Corruption

enum class CorruptionKind {
  none,
  label_flip,          // uniform random relabel
  targeted_label_flip, // label -> (C-1) - label
  feature_noise,       // additive per-coordinate Gaussian on features
  gradient_noise,      // additive per-coordinate Gaussian on gradients
  gradient_bit_flip,   // gradient -> -gradient
};

bool is_gradient_corruption(CorruptionKind kind);
const char* corruption_kind_name(CorruptionKind kind);
CorruptionKind corruption_kind_from_name(const std::string& name);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::none;
  double ratio = 0.0;        // fraction corrupted, in [0, 0.5)
  double noise_sigma = 10.0; // scale of the additive-noise kinds

  void validate() const;
};

// Applies a data-level corruption (label/feature kinds) to exactly
// floor(ratio * n) examples, chosen once. Gradient kinds are a no-op here.
void inject_corruption(SimDataset& data, const CorruptionSpec& spec, Rng& rng);

// Applies a gradient-level corruption to exactly floor(ratio * m) of the
// given per-example gradients.
void inject_gradient_corruption(std::vector<std::vector<double>>& grads,
                                const CorruptionSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Training

enum class Aggregator { ptr_tmean, mean };

enum class StepBranch : char {
  plus = '+',        // margin test failed: full sum, large noise
  minus = '-',       // margin test passed: trimmed sum, small noise
  degenerate = '0',  // empty batch, no release
};

struct TrainConfig {
  double q = 0.0;            // Poisson sampling probability
  double eta_b = 0.0;        // base learning rate (applied to the noisy sum)
  int f_init = 0;
  double f_adapt_frac = 0.02;
  double f_min_frac = 0.05;  // clamp fractions of the expected batch
  double f_max_frac = 0.45;
  double clip_r = 1.0;
  double tau = 0.5;          // in the same units as clip_r
  double sigma = 1.0;        // noise multiplier: sigma * R and sigma * tau
  double b = 1.0;
  double delta0 = 1e-5;
  int t_max = 0;
  DpGuarantee budget;        // stop before the converted eps would exceed it
  std::uint64_t seed = 0;
  Aggregator aggregator = Aggregator::ptr_tmean;
  double mean_sigma = 0.0;   // noise multiplier for the mean aggregator; 0 -> sigma

  void validate() const;
  int expected_batch(int n_examples) const;
  PtrConfig release_config() const;     // absolute noise scales sigma*R, sigma*tau
  PtrConfig accounting_config() const;  // normalized to unit sensitivity
};

struct IterationRecord {
  int iter = 0;
  double loss = 0.0;  // clean-data loss after the step
  StepBranch branch = StepBranch::degenerate;
  int f = 0;
  double delta_hat = 0.0;
  int batch_size = 0;
  double eps_so_far = 0.0;
};

struct TrainReport {
  std::vector<IterationRecord> trace;
  RdpCurve cumulative_curve;        // on the default grid restricted to valid orders
  RdpCurve per_step_curve;
  DpGuarantee final_guarantee;
  std::vector<double> final_params;
  int steps_charged = 0;
  bool stopped_on_budget = false;
};

struct AggregateResult {
  std::vector<double> release;
  StepBranch branch = StepBranch::degenerate;
  double delta_hat = 0.0;
};

// One noisy aggregation: the margin test against the trimmed sum decides
// between SUM + sigma R noise ('+') and TSUM_f + sigma tau noise ('-').
// An empty batch yields a zero release and a degenerate branch.
AggregateResult aggregate_ptr_tmean(const GradientBatch& gradients, int f,
                                    const TrainConfig& config, Rng& rng);

// Margin test failed ('+') raises the trim count, passed ('-') lowers it;
// steps of round(f_adapt_frac * expected_batch), clamped to the configured
// fraction band.
int adapt_f(int current_f, StepBranch branch, const TrainConfig& config,
            int n_examples);

// Per-step privacy curve of one aggregation on the default grid: white-box
// subsampled bound where its conditions hold, generic black-box bound at the
// next integer order otherwise.
RdpCurve per_step_privacy_curve(const TrainConfig& config);

// Noise multiplier for the mean aggregator whose converted epsilon after
// t_steps matches the PTR configuration's, found by bisection. Never
// returns less than the bound's validity floor.
double match_mean_sigma(const TrainConfig& config, int t_steps, double delta);

TrainReport train(const Model& model, const SimDataset& data,
                  const TrainConfig& config, const CorruptionSpec& corruption);

// ---------------------------------------------------------------------------
// Convergence constants

struct ConvergenceParams {
  double alpha_sc = 0.0;    // strong convexity
  double beta_sm = 0.0;     // smoothness
  double r_lip = 0.0;       // Lipschitz bound
  double sigma_grad = 0.0;  // gradient variance bound
  int n = 0;                // oracles per step
  int f = 0;                // trim count
  double sigma1_noise = 0.0;
  double sigma2_noise = 0.0;
  int d = 0;
  double eta_b = 0.0;

  void validate() const;
};

struct ConvergenceBound {
  double eta_max = 0.0;
  bool eta_admissible = false;
  bool sigma2_floor_ok = false;
  double rho_b = 0.0;
  double m_b = 0.0;
  double rho_a = 0.0;
  double m_a = 0.0;
  double limit_radius = 0.0;
};

// Contraction factors and noise offsets of the two training routines, and
// the limiting squared-error radius m_b / (1 - rho_b). When eta_b is outside
// the admissible range only eta_max and the flags are meaningful.
ConvergenceBound convergence_bound(const ConvergenceParams& params);

}  // namespace ptrdp

#endif  // PTRDP_ROBUST_SGD_SIM_HPP_
