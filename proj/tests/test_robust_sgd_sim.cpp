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

#include <cmath>

#include "doctest.h"

using namespace ptrdp;

namespace {

// Training configuration used by the branch/ledger tests: white-box
// conditions hold (sigma * tau >= 4, q under the sampling cap for b = 4).
TrainConfig baseConfig() {
  TrainConfig c;
  c.q = 0.05;
  c.eta_b = 1e-3;
  c.f_init = 25;
  c.f_adapt_frac = 0.02;
  c.f_min_frac = 0.2;
  c.f_max_frac = 0.45;
  c.clip_r = 1.0;
  c.tau = 0.25;
  c.sigma = 16.0;
  c.b = 4.0;
  c.delta0 = 0.2;
  c.t_max = 50;
  c.budget = {6.0, 1e-5};
  c.seed = 1;
  return c;
}

}  // namespace

TEST_CASE("corruption: none and exact counts") {
  Rng rng(1);
  SimDataset data = make_blob_classification_data(40, 3, 10, 1.0, rng);
  SimDataset copy = data;
  inject_corruption(copy, {CorruptionKind::none, 0.0, 10.0}, rng);
  CHECK(copy.y == data.y);
  CHECK(copy.x == data.x);

  SimDataset targeted = data;
  for (double& y : targeted.y) y = 3.0;
  inject_corruption(targeted, {CorruptionKind::targeted_label_flip, 0.25, 10.0}, rng);
  int changed = 0;
  for (double y : targeted.y) {
    if (y != 3.0) {
      CHECK(y == 6.0);  // (10 - 1) - 3
      ++changed;
    }
  }
  CHECK(changed == 10);  // floor(0.25 * 40)

  SimDataset flipped = data;
  inject_corruption(flipped, {CorruptionKind::label_flip, 0.2, 10.0}, rng);
  int moved = 0;
  for (std::size_t i = 0; i < flipped.y.size(); ++i) {
    if (flipped.y[i] != data.y[i]) ++moved;
  }
  CHECK(moved <= 8);  // relabeling may hit the original class

  SimDataset noisy = data;
  inject_corruption(noisy, {CorruptionKind::feature_noise, 0.2, 10.0}, rng);
  int touched = 0;
  for (std::size_t i = 0; i < noisy.x.size(); ++i) {
    if (noisy.x[i] != data.x[i]) ++touched;
  }
  CHECK(touched == 8);
}

TEST_CASE("corruption: gradient kinds") {
  Rng rng(2);
  std::vector<std::vector<double>> grads(10, std::vector<double>{1.0, -2.0});
  auto flipped = grads;
  inject_gradient_corruption(flipped, {CorruptionKind::gradient_bit_flip, 0.3, 10.0},
                             rng);
  int negated = 0;
  for (const auto& g : flipped) {
    if (g[0] == -1.0) {
      CHECK(g[1] == 2.0);
      ++negated;
    } else {
      CHECK(g == std::vector<double>{1.0, -2.0});
    }
  }
  CHECK(negated == 3);

  auto noisy = grads;
  inject_gradient_corruption(noisy, {CorruptionKind::gradient_noise, 0.3, 10.0}, rng);
  int moved = 0;
  for (const auto& g : noisy) {
    if (g != std::vector<double>{1.0, -2.0}) ++moved;
  }
  CHECK(moved == 3);

  CHECK_THROWS_AS(CorruptionSpec({CorruptionKind::none, 0.5, 10.0}).validate(),
                  config_error);
}

TEST_CASE("aggregate: vanishing noise returns the trimmed sum") {
  TrainConfig c = baseConfig();
  c.sigma = 1e-12;
  c.tau = 1.0;  // margin infinite: the test passes vacuously
  GradientBatch batch;
  batch.dim = 2;
  batch.clip_bound_r = 1.0;
  batch.vectors = {{0.1, 0.0}, {0.0, 0.2}, {0.3, 0.0}};
  Rng rng(3);
  const AggregateResult agg = aggregate_ptr_tmean(batch, 1, c, rng);
  CHECK(agg.branch == StepBranch::minus);
  const auto expected = tsum(batch, 1);
  CHECK(std::abs(agg.release[0] - expected[0]) < 1e-9);
  CHECK(std::abs(agg.release[1] - expected[1]) < 1e-9);
}

TEST_CASE("aggregate: zero margin fails the test essentially always") {
  TrainConfig c = baseConfig();
  c.b = 1.0;
  c.delta0 = 1e-8;
  GradientBatch batch;
  batch.dim = 1;
  batch.clip_bound_r = 1.0;
  batch.vectors = {{1.0}, {0.9}, {0.8}};  // norms above tau: margin 0
  Rng rng(4);
  int plus = 0;
  for (int i = 0; i < 100000; ++i) {
    if (aggregate_ptr_tmean(batch, 1, c, rng).branch == StepBranch::plus) ++plus;
  }
  CHECK(plus == 100000);
}

TEST_CASE("aggregate: concentrated gradients pass the test") {
  TrainConfig c = baseConfig();
  c.b = 1.0;
  c.delta0 = 1e-5;
  GradientBatch batch;
  batch.dim = 1;
  batch.clip_bound_r = 1.0;
  // All norms at tau/2 with a healthy trim count: margin = f = 40 far above
  // the threshold ln(5e4) ~ 10.8.
  batch.vectors.assign(100, {0.125});
  Rng rng(5);
  int minus = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    if (aggregate_ptr_tmean(batch, 40, c, rng).branch == StepBranch::minus) ++minus;
  }
  CHECK(static_cast<double>(minus) / n >= 0.99);

  // Empty batch: degenerate, zero release.
  GradientBatch empty;
  empty.dim = 3;
  empty.clip_bound_r = 1.0;
  const AggregateResult agg = aggregate_ptr_tmean(empty, 5, c, rng);
  CHECK(agg.branch == StepBranch::degenerate);
  CHECK(agg.release == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("trim count adaptation") {
  TrainConfig c = baseConfig();
  c.q = 0.128;  // expected batch 256 on 2000 examples
  c.f_adapt_frac = 0.02;
  c.f_min_frac = 0.05;
  c.f_max_frac = 0.45;
  const int n = 2000;
  // round(0.02 * 256) = 5
  CHECK(adapt_f(64, StepBranch::minus, c, n) == 59);
  CHECK(adapt_f(64, StepBranch::plus, c, n) == 69);
  // Alternating steps return to the start.
  CHECK(adapt_f(adapt_f(64, StepBranch::plus, c, n), StepBranch::minus, c, n) == 64);
  // Clamps bind.
  const int hi = static_cast<int>(std::lround(0.45 * 256));
  CHECK(adapt_f(hi, StepBranch::plus, c, n) == hi);
  const int lo = static_cast<int>(std::lround(0.05 * 256));
  CHECK(adapt_f(lo, StepBranch::minus, c, n) == lo);
  // Degenerate iterations leave f alone.
  CHECK(adapt_f(64, StepBranch::degenerate, c, n) == 64);
}

TEST_CASE("training is deterministic in the seed") {
  Rng rng(20260310);
  const SimDataset data = make_regression_data(400, 4, 2.0, 0.01, rng);
  TrainConfig c = baseConfig();
  c.t_max = 40;
  const LinearRegressionModel model;
  const CorruptionSpec spec{CorruptionKind::gradient_bit_flip, 0.2, 10.0};
  const TrainReport a = train(model, data, c, spec);
  const TrainReport b = train(model, data, c, spec);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].loss == b.trace[i].loss);
    CHECK(a.trace[i].branch == b.trace[i].branch);
    CHECK(a.trace[i].f == b.trace[i].f);
    CHECK(a.trace[i].delta_hat == b.trace[i].delta_hat);
    CHECK(a.trace[i].eps_so_far == b.trace[i].eps_so_far);
  }
  CHECK(a.final_params == b.final_params);
}

TEST_CASE("privacy ledger is consistent and respects the budget") {
  Rng rng(20260311);
  const SimDataset data = make_regression_data(400, 4, 2.0, 0.01, rng);
  TrainConfig c = baseConfig();
  c.t_max = 60;
  c.budget = {0.9, 1e-5};
  const LinearRegressionModel model;
  const TrainReport report = train(model, data, c, {});

  // Cumulative curve equals the per-step curve composed charged times.
  std::vector<RdpCurve> copies(report.steps_charged, report.per_step_curve);
  if (!copies.empty()) {
    const RdpCurve composed = compose(copies);
    for (std::size_t i = 0; i < composed.size(); ++i) {
      CHECK(report.cumulative_curve.eps()[i] ==
            doctest::Approx(composed.eps()[i]).epsilon(1e-12));
    }
  }
  // Ledger never exceeds the budget, and the trace eps is nondecreasing.
  double prev = 0.0;
  for (const auto& rec : report.trace) {
    CHECK(rec.eps_so_far <= c.budget.eps + 1e-12);
    CHECK(rec.eps_so_far >= prev - 1e-15);
    prev = rec.eps_so_far;
  }
  CHECK(report.final_guarantee.eps <= c.budget.eps + 1e-12);

  // A budget too small for even one step yields an empty run.
  TrainConfig tiny = c;
  tiny.budget = {1e-6, 1e-5};
  const TrainReport none = train(model, data, tiny, {});
  CHECK(none.steps_charged == 0);
  CHECK(none.stopped_on_budget);
  CHECK(none.final_guarantee.eps == 0.0);

  // q = 0 never updates and never spends.
  TrainConfig silent = c;
  silent.q = 0.0;
  silent.t_max = 5;
  const TrainReport quiet = train(model, data, silent, {});
  CHECK(quiet.steps_charged == 0);
  for (const auto& rec : quiet.trace) {
    CHECK(rec.branch == StepBranch::degenerate);
    CHECK(rec.eps_so_far == 0.0);
  }
  for (double w : quiet.final_params) CHECK(w == 0.0);
}

TEST_CASE("branch economics under concentrated gradients") {
  Rng rng(20260312);
  // Small targets keep every per-example gradient well under tau/2.
  const SimDataset data = make_regression_data(2000, 4, 0.05, 0.005, rng);
  TrainConfig c = baseConfig();
  c.q = 0.05;
  c.tau = 0.25;
  c.sigma = 16.0;
  c.b = 1.0;
  c.delta0 = 1e-5;
  c.f_init = 45;
  c.t_max = 200;
  c.eta_b = 1e-4;
  const LinearRegressionModel model;
  const TrainReport report = train(model, data, c, {});
  int minus = 0, active = 0;
  for (const auto& rec : report.trace) {
    if (rec.branch == StepBranch::degenerate) continue;
    ++active;
    if (rec.branch == StepBranch::minus) ++minus;
  }
  REQUIRE(active > 100);
  CHECK(static_cast<double>(minus) / active >= 0.99);

  // The adaptive trim count stays inside its clamps.
  const int batch = c.expected_batch(2000);
  const int lo = static_cast<int>(std::lround(c.f_min_frac * batch));
  const int hi = static_cast<int>(std::lround(c.f_max_frac * batch));
  for (const auto& rec : report.trace) {
    CHECK(rec.f >= lo);
    CHECK(rec.f <= hi);
  }
}

TEST_CASE("noiseless trimmed descent is monotone after burn-in") {
  Rng rng(20260313);
  std::vector<double> wstar;
  const SimDataset data = make_regression_data(600, 2, 0.5, 0.0, rng, &wstar);
  TrainConfig c;
  c.q = 0.033;  // expected batch ~20
  c.eta_b = 0.02;
  c.f_init = 8;
  c.f_adapt_frac = 0.0;  // hold the trim count still
  c.f_min_frac = 0.05;
  c.f_max_frac = 0.45;
  c.clip_r = 1.0;
  c.tau = 0.99;
  c.sigma = 1e-12;
  c.b = 0.25;
  c.delta0 = 1e-5;
  c.t_max = 300;
  c.budget = {1e300, 1e-5};  // the noiseless run is for dynamics only
  c.seed = 9;
  const LinearRegressionModel model;
  const TrainReport report = train(model, data, c, {});
  REQUIRE(report.trace.size() == 300);
  const std::size_t burn_in = 50;
  for (std::size_t i = burn_in + 1; i < report.trace.size(); ++i) {
    CHECK(report.trace[i].loss <=
          report.trace[i - 1].loss * (1.0 + 1e-9) + 1e-20);
  }
  CHECK(report.trace.back().loss < 1e-4 * report.trace.front().loss);
}

TEST_CASE("bit flips cost at most a factor of two on a 2-D quadratic") {
  // Trim capacity at least the corrupted count; five seeds each way. The
  // horizon leaves both runs at their noise floor (the corrupted one
  // contracts about 1.7x slower).
  const LinearRegressionModel model;
  double corrupted = 0.0, clean = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(500 + seed);
    const SimDataset data = make_regression_data(1000, 2, 1.0, 0.01, rng);
    TrainConfig c = baseConfig();
    c.q = 0.05;  // expected batch 50
    c.eta_b = 5e-4;
    c.f_init = 15;
    c.f_min_frac = 0.25;  // floor above the 20% corruption share
    c.tau = 0.5;
    c.sigma = 8.0;
    c.t_max = 3000;
    c.budget = {10.0, 1e-5};
    c.seed = seed;
    const TrainReport dirty =
        train(model, data, c, {CorruptionKind::gradient_bit_flip, 0.2, 10.0});
    const TrainReport pristine = train(model, data, c, {});
    corrupted += dirty.trace.back().loss;
    clean += pristine.trace.back().loss;
  }
  CHECK(corrupted / 5.0 <= 2.0 * (clean / 5.0));
}

TEST_CASE("trimmed aggregation beats the plain mean under bit flips") {
  // Identical noise multipliers on both arms; five seeds.
  const LinearRegressionModel model;
  const CorruptionSpec corruption{CorruptionKind::gradient_bit_flip, 0.2, 10.0};
  double ptr_err = 0.0, mean_err = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(1000 + seed);
    std::vector<double> wstar;
    const SimDataset data = make_regression_data(2000, 10, 3.0, 0.01, rng, &wstar);
    TrainConfig c = baseConfig();
    c.t_max = 1200;
    c.seed = seed;
    c.budget = {8.0, 1e-5};
    TrainConfig m = c;
    m.aggregator = Aggregator::mean;
    m.mean_sigma = c.sigma;
    const TrainReport ptr_report = train(model, data, c, corruption);
    const TrainReport mean_report = train(model, data, m, corruption);
    auto err = [&](const TrainReport& r) {
      double s = 0.0;
      for (std::size_t i = 0; i < wstar.size(); ++i) {
        const double d = r.final_params[i] - wstar[i];
        s += d * d;
      }
      return std::sqrt(s);
    };
    ptr_err += err(ptr_report);
    mean_err += err(mean_report);
  }
  CHECK(ptr_err / 5.0 <= 0.8 * (mean_err / 5.0));
}

TEST_CASE("matched mean noise reproduces the ptr spend") {
  TrainConfig c = baseConfig();
  const double sigma_m = match_mean_sigma(c, 1000, 1e-5);
  CHECK(sigma_m >= 4.0);
  TrainConfig m = c;
  m.aggregator = Aggregator::mean;
  m.mean_sigma = sigma_m;
  const double target = rdp_to_dp(per_step_privacy_curve(c).scaled(1000), 1e-5).tight.eps;
  const double got = rdp_to_dp(per_step_privacy_curve(m).scaled(1000), 1e-5).tight.eps;
  CHECK(got <= target * (1.0 + 1e-6));
  CHECK(got >= target * 0.98);
}

TEST_CASE("convergence constants") {
  ConvergenceParams p;
  p.alpha_sc = 1.0;
  p.beta_sm = 1.0;
  p.r_lip = 1.0;
  p.sigma_grad = 0.5;
  p.n = 100;
  p.f = 10;
  p.sigma1_noise = 2.0;
  p.sigma2_noise = 1.0;
  p.d = 10;
  p.eta_b = 0.0;  // filled per case

  // Admissible midpoint: contraction factor below one.
  ConvergenceParams mid = p;
  {
    ConvergenceParams probe = p;
    probe.eta_b = 1e-9;
    mid.eta_b = convergence_bound(probe).eta_max / 2.0;
  }
  const ConvergenceBound bound = convergence_bound(mid);
  CHECK(bound.eta_admissible);
  CHECK(bound.rho_b < 1.0);
  CHECK(bound.rho_b > 0.0);
  CHECK(bound.rho_a <= bound.rho_b + 1e-12);
  CHECK(bound.limit_radius == doctest::Approx(bound.m_b / (1.0 - bound.rho_b)));

  // Outside the admissible range the bound is withheld.
  ConvergenceParams fast = mid;
  fast.eta_b = bound.eta_max * 2.0;
  const ConvergenceBound rejected = convergence_bound(fast);
  CHECK_FALSE(rejected.eta_admissible);
  CHECK(std::isnan(rejected.rho_b));
  CHECK(rejected.eta_max == doctest::Approx(bound.eta_max));

  // Trim-free small-step limit: the radius collapses with eta.
  ConvergenceParams trimless = mid;
  trimless.f = 0;
  double prev_radius = std::numeric_limits<double>::infinity();
  for (double eta : {1e-5, 1e-6, 1e-7}) {
    trimless.eta_b = eta;
    const ConvergenceBound b = convergence_bound(trimless);
    CHECK(b.rho_b < 1.0);
    CHECK(b.limit_radius < prev_radius);
    prev_radius = b.limit_radius;
  }
  CHECK(prev_radius < 1e-4);

  // Doubling sigma2 adds exactly eta^2 (n-f+1) d 3 sigma2^2 to m_b.
  ConvergenceParams doubled = mid;
  doubled.sigma2_noise = 2.0;
  const ConvergenceBound big = convergence_bound(doubled);
  const double expected_gap = mid.eta_b * mid.eta_b * (mid.n - mid.f + 1.0) *
                              mid.d * 3.0 * mid.sigma2_noise * mid.sigma2_noise;
  CHECK(big.m_b - bound.m_b == doctest::Approx(expected_gap).epsilon(1e-9));

  // The sigma2 floor flag tracks the coupling inequality.
  ConvergenceParams floored = mid;
  floored.sigma2_noise = 100.0;
  CHECK(convergence_bound(floored).sigma2_floor_ok);
  CHECK_FALSE(bound.sigma2_floor_ok);

  CHECK_THROWS_AS(convergence_bound(ConvergenceParams{}), config_error);
  ConvergenceParams lopsided = mid;
  lopsided.f = 50;
  CHECK_THROWS_AS(convergence_bound(lopsided), config_error);
}
