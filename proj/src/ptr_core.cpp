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

#include "ptrdp/ptr_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>

#include "ptrdp/noise_mechanisms.hpp"

namespace ptrdp {

PtrOutcome run_ptr(const Dataset& data, const PtrConfig& config,
                   const SensitivityOracle& oracle, Rng& rng) {
  config.validate();
  const double margin = oracle.safety_margin(data, config.tau);
  if (!(margin >= 0.0)) throw config_error("safety margin must be nonnegative");
  const double lap = sample_laplace(0.0, config.b, rng);
  PtrOutcome out;
  out.delta_hat = margin + lap;  // +inf + finite stays +inf
  if (out.delta_hat <= config.threshold_b()) {
    out.branch = Branch::large_noise;
    out.release = sample_gaussian_vec(oracle.eval_f1(data), config.sigma1, rng);
  } else {
    out.branch = Branch::small_noise;
    out.release = sample_gaussian_vec(oracle.eval_f2(data), config.sigma2, rng);
  }
  return out;
}

namespace {

int auditThreadCap() {
  if (const char* env = std::getenv("PTR_ACCOUNTANT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

double lapLogPdf(double x, double center, double scale) {
  return -std::abs(x - center) / scale - std::log(2.0 * scale);
}

double normalLogPdf(double x, double center, double sigma) {
  const double z = (x - center) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
}

struct ScenarioDensities {
  double margin_s;        // may be +inf (then both margins are +inf)
  double margin_s_prime;
  double f1_s, f1_s_prime;
  double f2_s, f2_s_prime;
};

struct ChunkMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Draw (margin_hat, release) from the mechanism on S', accumulate the
// alpha-th power of the joint density ratio. The branch indicator is a
// function of margin_hat alone, so both joint densities share the selector
// and the ratio is Laplace ratio times the branch Gaussian ratio.
ChunkMoments auditChunk(const ScenarioDensities& d, const PtrConfig& config,
                        double alpha, std::int64_t n, Rng rng) {
  const double threshold = config.threshold_b();
  const bool infinite_margin = std::isinf(d.margin_s_prime);
  ChunkMoments acc;
  for (std::int64_t i = 0; i < n; ++i) {
    const double lap = sample_laplace(0.0, config.b, rng);
    const double margin_hat = d.margin_s_prime + lap;
    double log_ratio = 0.0;
    if (!infinite_margin) {
      log_ratio += lapLogPdf(margin_hat, d.margin_s, config.b) -
                   lapLogPdf(margin_hat, d.margin_s_prime, config.b);
    }
    double center_s, center_sp, sigma;
    if (margin_hat <= threshold) {
      center_s = d.f1_s;
      center_sp = d.f1_s_prime;
      sigma = config.sigma1;
    } else {
      center_s = d.f2_s;
      center_sp = d.f2_s_prime;
      sigma = config.sigma2;
    }
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double t =
        center_sp + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    log_ratio += normalLogPdf(t, center_s, sigma) - normalLogPdf(t, center_sp, sigma);
    const double powed = std::exp(alpha * log_ratio);
    acc.sum += powed;
    acc.sum_sq += powed * powed;
  }
  return acc;
}

}  // namespace

MomentEstimate empirical_renyi_moment(const AdjacentPair& pair,
                                      const PtrConfig& config,
                                      const SensitivityOracle& oracle,
                                      double alpha, std::int64_t n_samples,
                                      Rng& rng) {
  config.validate();
  if (!(alpha > 1.0)) throw config_error("Renyi order must exceed 1");
  if (n_samples < 100000) {
    throw config_error("audit needs at least 1e5 samples");
  }
  const std::vector<double> f1_s = oracle.eval_f1(pair.s);
  const std::vector<double> f1_sp = oracle.eval_f1(pair.s_prime);
  const std::vector<double> f2_s = oracle.eval_f2(pair.s);
  const std::vector<double> f2_sp = oracle.eval_f2(pair.s_prime);
  if (f1_s.size() != 1 || f1_sp.size() != 1 || f2_s.size() != 1 || f2_sp.size() != 1) {
    throw config_error("audit supports scalar releases only");
  }
  ScenarioDensities d;
  d.margin_s = oracle.safety_margin(pair.s, config.tau);
  d.margin_s_prime = oracle.safety_margin(pair.s_prime, config.tau);
  if (std::isinf(d.margin_s) != std::isinf(d.margin_s_prime)) {
    throw config_error("adjacent margins cannot mix finite and infinite");
  }
  d.f1_s = f1_s[0];
  d.f1_s_prime = f1_sp[0];
  d.f2_s = f2_s[0];
  d.f2_s_prime = f2_sp[0];

  // Fixed chunk count keeps the estimate independent of the executing
  // thread pool; the env var only throttles concurrency.
  constexpr int kChunks = 16;
  const std::int64_t per = n_samples / kChunks;
  std::vector<std::int64_t> counts(kChunks, per);
  counts.back() += n_samples - per * kChunks;

  const int max_threads = auditThreadCap();
  std::vector<ChunkMoments> results(kChunks);
  int next = 0;
  while (next < kChunks) {
    const int batch = std::min(max_threads, kChunks - next);
    std::vector<std::future<ChunkMoments>> futures;
    futures.reserve(batch);
    for (int i = 0; i < batch; ++i) {
      const int idx = next + i;
      futures.push_back(std::async(std::launch::async, [&, idx] {
        return auditChunk(d, config, alpha, counts[idx],
                          rng.fork(static_cast<std::uint64_t>(idx)));
      }));
    }
    for (int i = 0; i < batch; ++i) results[next + i] = futures[i].get();
    next += batch;
  }

  double sum = 0.0, sum_sq = 0.0;
  for (const ChunkMoments& c : results) {
    sum += c.sum;
    sum_sq += c.sum_sq;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return {mean, std::sqrt(var / n), n_samples};
}

}  // namespace ptrdp
