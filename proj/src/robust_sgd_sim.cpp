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

#include "ptrdp/robust_sgd_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ptrdp/noise_mechanisms.hpp"

namespace ptrdp {

// ---------------------------------------------------------------------------
// Models

int LinearRegressionModel::param_dim(int feature_dim, int) const { return feature_dim; }

double LinearRegressionModel::example_loss(const std::vector<double>& w,
                                           const std::vector<double>& x, double y,
                                           int) const {
  double pred = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) pred += w[i] * x[i];
  const double r = pred - y;
  return 0.5 * r * r;
}

void LinearRegressionModel::example_grad(const std::vector<double>& w,
                                         const std::vector<double>& x, double y,
                                         int, std::vector<double>& out) const {
  double pred = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) pred += w[i] * x[i];
  const double r = pred - y;
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = r * x[i];
}

int LogisticRegressionModel::param_dim(int feature_dim, int num_classes) const {
  if (num_classes < 2) throw config_error("classification needs at least 2 classes");
  return feature_dim * num_classes;
}

namespace {

void softmaxLogits(const std::vector<double>& w, const std::vector<double>& x,
                   int num_classes, std::vector<double>& probs) {
  const int d = static_cast<int>(x.size());
  probs.assign(num_classes, 0.0);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < num_classes; ++c) {
    double z = 0.0;
    for (int i = 0; i < d; ++i) z += w[c * d + i] * x[i];
    probs[c] = z;
    max_logit = std::max(max_logit, z);
  }
  double total = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    probs[c] = std::exp(probs[c] - max_logit);
    total += probs[c];
  }
  for (int c = 0; c < num_classes; ++c) probs[c] /= total;
}

}  // namespace

double LogisticRegressionModel::example_loss(const std::vector<double>& w,
                                             const std::vector<double>& x, double y,
                                             int num_classes) const {
  std::vector<double> probs;
  softmaxLogits(w, x, num_classes, probs);
  const int label = static_cast<int>(y);
  return -std::log(std::max(probs[label], 1e-300));
}

void LogisticRegressionModel::example_grad(const std::vector<double>& w,
                                           const std::vector<double>& x, double y,
                                           int num_classes,
                                           std::vector<double>& out) const {
  std::vector<double> probs;
  softmaxLogits(w, x, num_classes, probs);
  const int d = static_cast<int>(x.size());
  const int label = static_cast<int>(y);
  out.assign(num_classes * d, 0.0);
  for (int c = 0; c < num_classes; ++c) {
    const double coef = probs[c] - (c == label ? 1.0 : 0.0);
    for (int i = 0; i < d; ++i) out[c * d + i] = coef * x[i];
  }
}

// ---------------------------------------------------------------------------
// Data

SimDataset make_regression_data(int n, int d, double wstar_norm, double label_noise,
                                Rng& rng, std::vector<double>* wstar_out) {
  if (n <= 0 || d <= 0) throw config_error("dataset shape must be positive");
  std::vector<double> wstar(d);
  double norm = 0.0;
  for (double& w : wstar) {
    const double u1 = rng.uniform(), u2 = rng.uniform();
    w = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    norm += w * w;
  }
  norm = std::sqrt(norm);
  for (double& w : wstar) w *= wstar_norm / norm;

  SimDataset data;
  data.num_classes = 0;
  data.x.resize(n);
  data.y.resize(n);
  const double coord_sigma = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < n; ++i) {
    data.x[i].resize(d);
    double dot = 0.0;
    for (int k = 0; k < d; ++k) {
      const double u1 = rng.uniform(), u2 = rng.uniform();
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      data.x[i][k] = coord_sigma * z;
      dot += wstar[k] * data.x[i][k];
    }
    const double u1 = rng.uniform(), u2 = rng.uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    data.y[i] = dot + label_noise * z;
  }
  if (wstar_out) *wstar_out = std::move(wstar);
  return data;
}

SimDataset make_blob_classification_data(int n, int d, int num_classes,
                                         double center_norm, Rng& rng) {
  if (n <= 0 || d <= 0 || num_classes < 2) {
    throw config_error("dataset shape must be positive with >= 2 classes");
  }
  std::vector<std::vector<double>> centers(num_classes, std::vector<double>(d));
  for (auto& c : centers) {
    double norm = 0.0;
    for (double& v : c) {
      const double u1 = rng.uniform(), u2 = rng.uniform();
      v = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : c) v *= center_norm / norm;
  }
  SimDataset data;
  data.num_classes = num_classes;
  data.x.resize(n);
  data.y.resize(n);
  const double coord_sigma = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng.uniform_index(num_classes));
    data.x[i].resize(d);
    for (int k = 0; k < d; ++k) {
      const double u1 = rng.uniform(), u2 = rng.uniform();
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      data.x[i][k] = centers[label][k] + coord_sigma * z;
    }
    data.y[i] = label;
  }
  return data;
}

// ---------------------------------------------------------------------------
// Corruption

bool is_gradient_corruption(CorruptionKind kind) {
  return kind == CorruptionKind::gradient_noise ||
         kind == CorruptionKind::gradient_bit_flip;
}

const char* corruption_kind_name(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::none: return "none";
    case CorruptionKind::label_flip: return "label_flip";
    case CorruptionKind::targeted_label_flip: return "targeted_label_flip";
    case CorruptionKind::feature_noise: return "feature_noise";
    case CorruptionKind::gradient_noise: return "gradient_noise";
    case CorruptionKind::gradient_bit_flip: return "gradient_bit_flip";
  }
  return "none";
}

CorruptionKind corruption_kind_from_name(const std::string& name) {
  if (name == "none") return CorruptionKind::none;
  if (name == "label_flip") return CorruptionKind::label_flip;
  if (name == "targeted_label_flip") return CorruptionKind::targeted_label_flip;
  if (name == "feature_noise") return CorruptionKind::feature_noise;
  if (name == "gradient_noise") return CorruptionKind::gradient_noise;
  if (name == "gradient_bit_flip" || name == "bit_flip") {
    return CorruptionKind::gradient_bit_flip;
  }
  throw config_error("unknown corruption kind: " + name);
}

void CorruptionSpec::validate() const {
  if (!(ratio >= 0.0 && ratio < 0.5)) throw config_error("corruption ratio must lie in [0, 0.5)");
  if (!(noise_sigma > 0.0)) throw config_error("corruption noise sigma must be positive");
}

namespace {

// Exactly k distinct indices out of m, order irrelevant.
std::vector<int> drawSubset(int m, int k, Rng& rng) {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(m - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

int corruptCount(std::size_t m, double ratio) {
  const int k = static_cast<int>(std::floor(ratio * static_cast<double>(m)));
  if (m > 0 && k * 2 >= static_cast<int>(m)) {
    throw config_error("corruption would reach half the collection");
  }
  return k;
}

double gaussianDraw(Rng& rng) {
  const double u1 = rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

void inject_corruption(SimDataset& data, const CorruptionSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.kind == CorruptionKind::none || is_gradient_corruption(spec.kind)) return;
  const int k = corruptCount(data.x.size(), spec.ratio);
  const std::vector<int> idx = drawSubset(static_cast<int>(data.x.size()), k, rng);
  switch (spec.kind) {
    case CorruptionKind::label_flip:
      if (data.num_classes < 2) throw config_error("label corruption needs classes");
      for (int i : idx) {
        data.y[i] = static_cast<double>(rng.uniform_index(data.num_classes));
      }
      break;
    case CorruptionKind::targeted_label_flip:
      if (data.num_classes < 2) throw config_error("label corruption needs classes");
      for (int i : idx) {
        data.y[i] = static_cast<double>(data.num_classes - 1) - data.y[i];
      }
      break;
    case CorruptionKind::feature_noise:
      for (int i : idx) {
        for (double& v : data.x[i]) v += spec.noise_sigma * gaussianDraw(rng);
      }
      break;
    default:
      break;
  }
}

void inject_gradient_corruption(std::vector<std::vector<double>>& grads,
                                const CorruptionSpec& spec, Rng& rng) {
  spec.validate();
  if (!is_gradient_corruption(spec.kind) || grads.empty()) return;
  const int k = corruptCount(grads.size(), spec.ratio);
  const std::vector<int> idx = drawSubset(static_cast<int>(grads.size()), k, rng);
  for (int i : idx) {
    if (spec.kind == CorruptionKind::gradient_bit_flip) {
      for (double& v : grads[i]) v = -v;
    } else {
      for (double& v : grads[i]) v += spec.noise_sigma * gaussianDraw(rng);
    }
  }
}

// ---------------------------------------------------------------------------
// Training config

void TrainConfig::validate() const {
  if (!(q >= 0.0 && q < 1.0)) throw config_error("q must lie in [0, 1)");
  if (!(eta_b > 0.0)) throw config_error("learning rate must be positive");
  if (f_init < 0) throw config_error("f_init must be nonnegative");
  if (!(f_adapt_frac >= 0.0)) throw config_error("f_adapt_frac must be nonnegative");
  if (!(f_min_frac > 0.0 && f_max_frac < 0.5 && f_min_frac <= f_max_frac)) {
    throw config_error("trim clamp fractions must satisfy 0 < min <= max < 0.5");
  }
  if (t_max < 0) throw config_error("t_max must be nonnegative");
  if (!(budget.eps > 0.0) || !(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw config_error("budget must have positive eps and delta in (0, 1)");
  }
  release_config().validate();
  if (aggregator == Aggregator::mean && mean_sigma < 0.0) {
    throw config_error("mean_sigma must be nonnegative");
  }
}

int TrainConfig::expected_batch(int n_examples) const {
  return std::max(1, static_cast<int>(std::lround(q * n_examples)));
}

PtrConfig TrainConfig::release_config() const {
  return PtrConfig{sigma * clip_r, sigma * tau, tau, b, delta0};
}

PtrConfig TrainConfig::accounting_config() const {
  return release_config().normalized(clip_r);
}

// ---------------------------------------------------------------------------
// Aggregation

AggregateResult aggregate_ptr_tmean(const GradientBatch& gradients, int f,
                                    const TrainConfig& config, Rng& rng) {
  AggregateResult result;
  if (gradients.vectors.empty()) {
    result.release.assign(gradients.dim, 0.0);
    result.branch = StepBranch::degenerate;
    result.delta_hat = 0.0;
    return result;
  }
  const PtrConfig release = config.release_config();
  const SensitivityProfile profile{f, config.tau, config.clip_r};
  const double margin = safety_margin(gradients, profile);
  const double lap = sample_laplace(0.0, release.b, rng);
  result.delta_hat = margin + lap;
  if (result.delta_hat <= release.threshold_b()) {
    result.branch = StepBranch::plus;
    result.release = sample_gaussian_vec(sum_all(gradients), release.sigma1, rng);
  } else {
    result.branch = StepBranch::minus;
    result.release = sample_gaussian_vec(tsum(gradients, f), release.sigma2, rng);
  }
  return result;
}

int adapt_f(int current_f, StepBranch branch, const TrainConfig& config,
            int n_examples) {
  const int batch = config.expected_batch(n_examples);
  const int step = static_cast<int>(std::lround(config.f_adapt_frac * batch));
  const int lo = static_cast<int>(std::lround(config.f_min_frac * batch));
  const int hi = static_cast<int>(std::lround(config.f_max_frac * batch));
  int f = current_f;
  if (branch == StepBranch::plus) f += step;
  if (branch == StepBranch::minus) f -= step;
  return std::clamp(f, lo, hi);
}

// ---------------------------------------------------------------------------
// Accounting

namespace {

// Base curve for black-box amplification: plain-sum Gaussian release.
RdpCurve gaussianBaseCurve(double sigma_tilde, int alpha_max) {
  std::vector<double> alphas, eps;
  for (int j = 2; j <= alpha_max; ++j) {
    alphas.push_back(j);
    eps.push_back(gaussian_rdp_eps(NoiseToSensitivityRatio(sigma_tilde), j));
  }
  return RdpCurve(std::move(alphas), std::move(eps));
}


std::vector<double> integerAlphas(int alpha_max) {
  std::vector<double> alphas;
  for (int j = 2; j <= alpha_max; ++j) alphas.push_back(j);
  return alphas;
}

RdpCurve perStepCurveImpl(const TrainConfig& config) {
  const std::vector<double> grid = default_alpha_grid();
  std::vector<double> alphas, eps;
  alphas.reserve(grid.size());
  eps.reserve(grid.size());
  if (config.aggregator == Aggregator::ptr_tmean) {
    const SubsampleParams params{config.q, config.accounting_config()};
    const RdpCurve base = ptr_rdp_curve(config.accounting_config(), integerAlphas(200));
    for (double a : grid) {
      double value;
      if (check_conditions(params, a).satisfied) {
        value = subsampled_ptr_rdp(params, a);
      } else {
        // Fall back to the generic bound at the next integer order, which
        // upper-bounds the order-a value by monotonicity in the order.
        const int ai = static_cast<int>(std::ceil(a));
        if (ai > 200) continue;
        value = blackbox_subsampled_rdp(base, config.q, std::max(ai, 2));
      }
      alphas.push_back(a);
      eps.push_back(value);
    }
  } else {
    const double sig = config.mean_sigma > 0.0 ? config.mean_sigma : config.sigma;
    const RdpCurve base = gaussianBaseCurve(sig, 200);
    for (double a : grid) {
      double value;
      if (check_gaussian_conditions(config.q, sig, a).satisfied) {
        value = subsampled_gaussian_rdp(config.q, sig, a);
      } else {
        const int ai = static_cast<int>(std::ceil(a));
        if (ai > 200) continue;
        value = blackbox_subsampled_rdp(base, config.q, std::max(ai, 2));
      }
      alphas.push_back(a);
      eps.push_back(value);
    }
  }
  return RdpCurve(std::move(alphas), std::move(eps));
}

}  // namespace

RdpCurve per_step_privacy_curve(const TrainConfig& config) {
  config.validate();
  return perStepCurveImpl(config);
}

double match_mean_sigma(const TrainConfig& config, int t_steps, double delta) {
  config.validate();
  if (t_steps < 1) throw config_error("step count must be positive");
  TrainConfig ptr_cfg = config;
  ptr_cfg.aggregator = Aggregator::ptr_tmean;
  const double target =
      rdp_to_dp(per_step_privacy_curve(ptr_cfg).scaled(t_steps), delta).tight.eps;

  TrainConfig mean_cfg = config;
  mean_cfg.aggregator = Aggregator::mean;
  auto eps_for = [&](double sig) {
    mean_cfg.mean_sigma = sig;
    return rdp_to_dp(per_step_privacy_curve(mean_cfg).scaled(t_steps), delta).tight.eps;
  };
  // eps is decreasing in sigma. 4 is the validity floor of the moment bound.
  double lo = 4.0, hi = std::max(8.0, 4.0 * config.sigma);
  if (eps_for(lo) <= target) return lo;
  while (eps_for(hi) > target) {
    hi *= 2.0;
    if (hi > 1e6) throw numerical_error("no noise level matches the target spend");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eps_for(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-9 * hi) break;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

double datasetLoss(const Model& model, const SimDataset& data,
                   const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    total += model.example_loss(w, data.x[i], data.y[i], data.num_classes);
  }
  return total / static_cast<double>(data.x.size());
}

}  // namespace

TrainReport train(const Model& model, const SimDataset& data,
                  const TrainConfig& config, const CorruptionSpec& corruption) {
  config.validate();
  corruption.validate();
  if (data.x.empty()) throw config_error("dataset must be nonempty");
  const int n = static_cast<int>(data.x.size());
  const int dim = model.param_dim(static_cast<int>(data.x[0].size()), data.num_classes);

  Rng rng(config.seed);
  Rng data_rng = rng.fork(0x0da7a);
  Rng train_rng = rng.fork(0x7ea1);

  // Label/feature corruption hits a fixed subset of the training view once;
  // the clean copy is kept for loss reporting.
  SimDataset train_view = data;
  inject_corruption(train_view, corruption, data_rng);

  TrainReport report;
  report.per_step_curve = per_step_privacy_curve(config);
  report.final_params.assign(dim, 0.0);

  std::vector<double>& w = report.final_params;
  const int batch_hint = config.expected_batch(n);
  int f = std::clamp(config.f_init,
                     static_cast<int>(std::lround(config.f_min_frac * batch_hint)),
                     static_cast<int>(std::lround(config.f_max_frac * batch_hint)));
  double eps_so_far = 0.0;
  int charged = 0;

  std::vector<std::vector<double>> grads;
  std::vector<double> g;
  for (int t = 1; t <= config.t_max; ++t) {
    // A partially exceeding step is never taken.
    const double eps_next =
        rdp_to_dp(report.per_step_curve.scaled(charged + 1), config.budget.delta)
            .tight.eps;
    if (eps_next > config.budget.eps) {
      report.stopped_on_budget = true;
      break;
    }

    std::vector<int> batch_idx;
    for (int i = 0; i < n; ++i) {
      if (train_rng.bernoulli(config.q)) batch_idx.push_back(i);
    }

    IterationRecord rec;
    rec.iter = t;
    rec.f = f;
    rec.batch_size = static_cast<int>(batch_idx.size());

    if (batch_idx.empty()) {
      // Nothing was sampled: no release, no spend.
      rec.branch = StepBranch::degenerate;
      rec.loss = datasetLoss(model, data, w);
      rec.eps_so_far = eps_so_far;
      report.trace.push_back(rec);
      continue;
    }

    grads.clear();
    grads.reserve(batch_idx.size());
    for (int i : batch_idx) {
      model.example_grad(w, train_view.x[i], train_view.y[i], train_view.num_classes, g);
      grads.push_back(g);
    }
    inject_gradient_corruption(grads, corruption, train_rng);

    GradientBatch batch;
    batch.dim = dim;
    batch.clip_bound_r = config.clip_r;
    batch.vectors.reserve(grads.size());
    for (auto& v : grads) batch.vectors.push_back(clip(std::move(v), config.clip_r));

    const int m = static_cast<int>(batch.vectors.size());
    double eta = config.eta_b;
    std::vector<double> release;
    if (config.aggregator == Aggregator::ptr_tmean) {
      AggregateResult agg = aggregate_ptr_tmean(batch, f, config, train_rng);
      rec.branch = agg.branch;
      rec.delta_hat = agg.delta_hat;
      release = std::move(agg.release);
      if (agg.branch == StepBranch::plus) {
        eta = config.eta_b * static_cast<double>(m - f) / static_cast<double>(m);
      }
    } else {
      const double sig = config.mean_sigma > 0.0 ? config.mean_sigma : config.sigma;
      release = sample_gaussian_vec(sum_all(batch), sig * config.clip_r, train_rng);
      rec.branch = StepBranch::plus;
    }

    for (int k = 0; k < dim; ++k) w[k] -= eta * release[k];

    ++charged;
    eps_so_far = eps_next;
    if (config.aggregator == Aggregator::ptr_tmean) {
      f = adapt_f(f, rec.branch, config, n);
    }

    rec.loss = datasetLoss(model, data, w);
    rec.eps_so_far = eps_so_far;
    report.trace.push_back(rec);
  }

  report.steps_charged = charged;
  report.cumulative_curve = report.per_step_curve.scaled(charged);
  report.final_guarantee.eps =
      charged == 0 ? 0.0
                   : rdp_to_dp(report.cumulative_curve, config.budget.delta).tight.eps;
  report.final_guarantee.delta = config.budget.delta;
  return report;
}

// ---------------------------------------------------------------------------
// Convergence constants

void ConvergenceParams::validate() const {
  if (!(alpha_sc > 0.0 && beta_sm >= alpha_sc)) {
    throw config_error("need 0 < alpha_sc <= beta_sm");
  }
  if (!(r_lip > 0.0) || !(sigma_grad >= 0.0)) {
    throw config_error("Lipschitz and variance bounds must be nonnegative");
  }
  if (n <= 0 || f < 0 || 2 * f >= n) throw config_error("need f < n/2");
  if (!(sigma1_noise >= 0.0 && sigma2_noise >= 0.0)) {
    throw config_error("noise scales must be nonnegative");
  }
  if (d <= 0) throw config_error("dimension must be positive");
  if (!(eta_b > 0.0)) throw config_error("eta_b must be positive");
}

ConvergenceBound convergence_bound(const ConvergenceParams& p) {
  p.validate();
  ConvergenceBound out;
  const double n = p.n, f = p.f, beta2 = p.beta_sm * p.beta_sm;
  const double quad_b = n * n + (n - f + 1.0) * (n - f) * beta2;
  out.eta_max = 2.0 * p.alpha_sc * (n - 2.0 * f) / quad_b;

  const double floor = (n - f) * (n + 1.0) / (n * n) *
                       (((n - f) * p.sigma_grad * p.sigma_grad + f * p.r_lip) / p.d +
                        p.sigma1_noise * p.sigma1_noise);
  out.sigma2_floor_ok = p.sigma2_noise * p.sigma2_noise >= floor;

  out.eta_admissible = p.eta_b > 0.0 && p.eta_b <= out.eta_max;
  if (!out.eta_admissible) {
    out.rho_a = out.m_a = out.rho_b = out.m_b = out.limit_radius =
        std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const double eta_b = p.eta_b;
  const double eta_a = (n - f) / n * eta_b;
  out.rho_b = 1.0 - 2.0 * eta_b * p.alpha_sc * (n - 2.0 * f) + eta_b * eta_b * quad_b;
  out.m_b = eta_b * eta_b * (n - f + 1.0) *
                ((n - f) * p.sigma_grad * p.sigma_grad + p.d * p.sigma2_noise * p.sigma2_noise) +
            (f / n) * (f / n) * p.r_lip * p.r_lip;
  const double quad_a = n * n + (n + 1.0) * (n - f) * beta2;
  out.rho_a = 1.0 - 2.0 * eta_a * p.alpha_sc * (n - f) + eta_a * eta_a * quad_a;
  out.m_a = eta_a * eta_a * (n + 1.0) *
                ((n - f) * p.sigma_grad * p.sigma_grad + f * p.r_lip +
                 p.d * p.sigma1_noise * p.sigma1_noise) +
            (f / n) * (f / n) * p.r_lip * p.r_lip;
  out.limit_radius = out.m_b / (1.0 - out.rho_b);
  return out;
}

}  // namespace ptrdp
