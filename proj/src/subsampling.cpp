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

#include "ptrdp/subsampling.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ptrdp/noise_mechanisms.hpp"

namespace ptrdp {

namespace {

void validateQuery(const MixtureMomentQuery& query) {
  if (!(query.q >= 0.0 && query.q < 1.0)) throw config_error("q must lie in [0, 1)");
  if (!(query.b > 0.0)) throw config_error("Laplace scale b must be positive");
  if (!std::isfinite(query.order)) throw config_error("order must be finite");
}

double lgammaBinom(int n, int j) {
  return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
}

}  // namespace

double MixtureMomentQuery::ratio_min() const {
  return (1.0 - q) + q * std::exp(-1.0 / b);
}

double MixtureMomentQuery::ratio_max() const {
  return (1.0 - q) + q * std::exp(1.0 / b);
}

double mixture_moment_R(const MixtureMomentQuery& query) {
  validateQuery(query);
  if (query.q == 0.0 || query.order == 0.0 || query.order == 1.0) return 1.0;
  const double q = query.q, b = query.b, a = query.order;
  // r(s) is constant off [0, 1]; those pieces integrate in closed form
  // against the Laplace tail masses 1/2 and exp(-1/b)/2.
  const double tails = 0.5 * std::pow(query.ratio_min(), a) +
                       0.5 * std::exp(-1.0 / b) * std::pow(query.ratio_max(), a);
  auto integrand = [q, b, a](double s) {
    const double r = (1.0 - q) + q * std::exp((2.0 * s - 1.0) / b);
    return std::exp(-s / b) / (2.0 * b) * std::pow(r, a);
  };
  double error = 0.0;
  const double mid = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, 1.0, 12, 1e-13, &error);
  const double total = tails + mid;
  if (!std::isfinite(total)) throw numerical_error("mixture moment overflowed");
  if (error > 1e-9 * std::max(1.0, std::abs(total))) {
    throw numerical_error("mixture moment quadrature did not converge");
  }
  return total;
}

double mixture_moment_Rtilde(const MixtureMomentQuery& query) {
  MixtureMomentQuery flipped = query;
  flipped.order = 1.0 - query.order;
  return mixture_moment_R(flipped);
}

namespace {

ConditionReport checkConditionsImpl(double q, double q_prime, double sigma1,
                                    double sigma2, double alpha, double q_cap) {
  ConditionReport report;
  report.q_prime = q_prime;
  report.L = std::log1p(1.0 / (q_prime * (alpha - 1.0)));
  if (q > q_cap) {
    report.binding = Constraint::q_bound;
    return report;
  }
  if (!(sigma1 >= sigma2 && sigma2 >= 4.0)) {
    report.binding = Constraint::sigma_floor;
    return report;
  }
  const double s2sq = sigma2 * sigma2;
  if (!(alpha > 1.0 && alpha <= s2sq * report.L / 2.0 - 2.0 * std::log(sigma2))) {
    report.binding = Constraint::alpha_cap_linear;
    return report;
  }
  const double num = s2sq * report.L * report.L / 2.0 - std::log(5.0) - 2.0 * std::log(sigma2);
  const double den = report.L + std::log(q_prime * alpha) + 1.0 / (2.0 * s2sq);
  if (!(den > 0.0) || !(alpha <= num / den)) {
    report.binding = Constraint::alpha_cap_log;
    return report;
  }
  report.satisfied = true;
  return report;
}

}  // namespace

ConditionReport check_conditions(const SubsampleParams& params, double alpha) {
  params.validate();
  if (!(alpha > 1.0)) throw config_error("Renyi order must exceed 1");
  const double q = params.q, b = params.config.b;
  const double emb = std::exp(-1.0 / b);
  const double q_prime = q == 0.0 ? 0.0 : q / (q + (1.0 - q) * emb);
  if (q == 0.0) {
    // Degenerate but valid: nothing is sampled.
    ConditionReport report;
    report.satisfied = true;
    report.q_prime = 0.0;
    report.L = std::numeric_limits<double>::infinity();
    return report;
  }
  return checkConditionsImpl(q, q_prime, params.config.sigma1, params.config.sigma2,
                             alpha, emb / (4.0 + emb));
}

ConditionReport check_gaussian_conditions(double q, double sigma_tilde, double alpha) {
  if (!(q >= 0.0 && q < 1.0)) throw config_error("q must lie in [0, 1)");
  if (!(sigma_tilde > 0.0)) throw config_error("sigma must be positive");
  if (!(alpha > 1.0)) throw config_error("Renyi order must exceed 1");
  if (q == 0.0) {
    ConditionReport report;
    report.satisfied = true;
    report.L = std::numeric_limits<double>::infinity();
    return report;
  }
  return checkConditionsImpl(q, q, sigma_tilde, sigma_tilde, alpha, 0.2);
}

double subsampled_gaussian_rdp(double q, double sigma_tilde, double alpha) {
  const ConditionReport report = check_gaussian_conditions(q, sigma_tilde, alpha);
  if (!report.satisfied) {
    throw bound_not_applicable("subsampled Gaussian moment bound conditions fail");
  }
  if (q == 0.0) return 0.0;
  const double moment =
      1.0 + 2.0 * q * q * alpha * (alpha - 1.0) / (sigma_tilde * sigma_tilde);
  return f_alpha_inv(moment, alpha);
}

double subsampled_ptr_rdp(const SubsampleParams& params, double alpha) {
  const ConditionReport report = check_conditions(params, alpha);
  if (!report.satisfied) {
    throw bound_not_applicable("white-box subsampled bound conditions fail");
  }
  if (params.q == 0.0) return 0.0;
  params.config.require_scale_relation();
  const double q = params.q, b = params.config.b;
  const double s1 = params.config.sigma1, s2 = params.config.sigma2;
  const double d0 = params.config.delta0;
  const double gauss = 2.0 * alpha * (alpha - 1.0) / (s1 * s1);

  const double b0 = 1.0 + 2.0 * q * q * alpha * (alpha - 1.0) *
                              ((1.0 - d0) / (s1 * s1) + d0 / (s2 * s2));

  auto R = [&](double order) { return mixture_moment_R({q, b, order}); };
  const double r_a = R(alpha);
  const double b1 = r_a + gauss * (r_a - 2.0 * (1.0 - q) * R(alpha - 1.0) +
                                   (1.0 - q) * (1.0 - q) * R(alpha - 2.0));
  const double rt_a = R(1.0 - alpha);
  const double b2 = rt_a + gauss * (rt_a - 2.0 * (1.0 - q) * R(-alpha) +
                                    (1.0 - q) * (1.0 - q) * R(-alpha - 1.0));
  return f_alpha_inv(std::max({b0, b1, b2}), alpha);
}

RdpCurve subsampled_ptr_rdp_curve(const SubsampleParams& params,
                                  const std::vector<double>& alphas) {
  std::vector<double> keep_a, keep_e;
  for (double a : alphas) {
    if (!check_conditions(params, a).satisfied) continue;
    keep_a.push_back(a);
    keep_e.push_back(subsampled_ptr_rdp(params, a));
  }
  if (keep_a.empty()) {
    throw bound_not_applicable("no grid order satisfies the white-box conditions");
  }
  return RdpCurve(std::move(keep_a), std::move(keep_e));
}

double blackbox_subsampled_rdp(const RdpCurve& base, double q, int alpha) {
  if (alpha < 2) throw config_error("black-box bound needs integer alpha >= 2");
  if (!(q >= 0.0 && q < 1.0)) throw config_error("q must lie in [0, 1)");
  if (q == 0.0) return 0.0;
  const double eps2 = base.eps_at(2.0);
  const double eps_inf = base.eps_infinity;
  const bool pure_cap = std::isfinite(eps_inf);
  const double log_q = std::log(q);

  // Everything stays in log space; the per-order eps values may be enormous.
  // j = 2 term: with no pure-DP cap the quadratic-moment route 4(e^eps2 - 1)
  // is used directly.
  double log_j2 = std::log(4.0) + eps2 + std::log1p(-std::exp(-eps2));
  if (pure_cap) {
    const double g = std::expm1(eps_inf);
    log_j2 = std::min(log_j2, eps2 + std::log(std::min(2.0, g * g)));
  }
  double log_sum = 2.0 * log_q + lgammaBinom(alpha, 2) + log_j2;
  for (int j = 3; j <= alpha; ++j) {
    double cap = 2.0;
    if (pure_cap) cap = std::min(2.0, std::pow(std::expm1(eps_inf), j));
    const double term = j * log_q + lgammaBinom(alpha, j) +
                        (j - 1.0) * base.eps_at(static_cast<double>(j)) + std::log(cap);
    log_sum = log_add_exp(log_sum, term);
  }
  // log(1 + sum) via log1p(exp(log_sum))
  const double log_total = log_sum > 30.0 ? log_sum : std::log1p(std::exp(log_sum));
  return log_total / (alpha - 1.0);
}

double subsampled_rdp_lower_bound(const RdpCurve& base, double q, int alpha) {
  if (alpha < 2) throw config_error("lower bound needs integer alpha >= 2");
  if (!(q >= 0.0 && q < 1.0)) throw config_error("q must lie in [0, 1)");
  if (q == 0.0) return 0.0;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  double log_sum = (alpha - 1.0) * log_1mq + std::log1p((alpha - 1.0) * q);
  for (int j = 2; j <= alpha; ++j) {
    const double term = lgammaBinom(alpha, j) + (alpha - j) * log_1mq + j * log_q +
                        (j - 1.0) * base.eps_at(static_cast<double>(j));
    log_sum = log_add_exp(log_sum, term);
  }
  return log_sum / (alpha - 1.0);
}

double amplify_dp_eps(double eps, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw config_error("q must lie in [0, 1]");
  return std::log1p(q * std::expm1(eps));
}

}  // namespace ptrdp
