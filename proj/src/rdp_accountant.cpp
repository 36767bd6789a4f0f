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

#include "ptrdp/rdp_accountant.hpp"

#include <algorithm>
#include <cmath>

#include "ptrdp/noise_mechanisms.hpp"

namespace ptrdp {

RdpCurve::RdpCurve(std::vector<double> alphas, std::vector<double> eps)
    : alphas_(std::move(alphas)), eps_(std::move(eps)) {
  if (alphas_.size() != eps_.size()) {
    throw config_error("alpha and eps vectors must have equal length");
  }
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (!(alphas_[i] > 1.0)) throw config_error("curve orders must exceed 1");
    if (i > 0 && !(alphas_[i] > alphas_[i - 1])) {
      throw config_error("curve orders must be strictly increasing");
    }
    if (!std::isfinite(eps_[i]) || eps_[i] < 0.0) {
      throw config_error("curve eps values must be finite and nonnegative");
    }
  }
}

namespace {
constexpr double kAlphaMatchTol = 1e-12;
}

bool RdpCurve::has_alpha(double alpha) const {
  auto it = std::lower_bound(alphas_.begin(), alphas_.end(), alpha - kAlphaMatchTol);
  return it != alphas_.end() && std::abs(*it - alpha) <= kAlphaMatchTol;
}

double RdpCurve::eps_at(double alpha) const {
  auto it = std::lower_bound(alphas_.begin(), alphas_.end(), alpha - kAlphaMatchTol);
  if (it == alphas_.end() || std::abs(*it - alpha) > kAlphaMatchTol) {
    throw config_error("order not stored in curve; no interpolation is done");
  }
  return eps_[static_cast<std::size_t>(it - alphas_.begin())];
}

RdpCurve RdpCurve::scaled(double k) const {
  if (!(k >= 0.0)) throw config_error("scale factor must be nonnegative");
  std::vector<double> e(eps_);
  for (double& v : e) v *= k;
  RdpCurve out(alphas_, std::move(e));
  out.eps_infinity = eps_infinity * k;
  return out;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  grid.reserve(280);
  for (int k = 1; k <= 90; ++k) grid.push_back(1.0 + k / 10.0);
  for (int k = 11; k <= 200; ++k) grid.push_back(static_cast<double>(k));
  return grid;
}

double f_alpha(double eps, double alpha) { return std::exp((alpha - 1.0) * eps); }

double f_alpha_inv(double moment, double alpha) {
  return std::log(moment) / (alpha - 1.0);
}

double f_alpha_inv_log(double log_moment, double alpha) {
  return log_moment / (alpha - 1.0);
}

double mixture_rdp_log_moment(double eps1, double eps2, double delta0, double alpha) {
  if (!(alpha > 1.0)) throw config_error("Renyi order must exceed 1");
  if (!(delta0 >= 0.0 && delta0 <= 1.0)) {
    throw config_error("mixture weight must lie in [0, 1]");
  }
  if (delta0 == 0.0) return (alpha - 1.0) * eps1;
  if (delta0 == 1.0) return (alpha - 1.0) * eps2;
  return log_add_exp(std::log1p(-delta0) + (alpha - 1.0) * eps1,
                     std::log(delta0) + (alpha - 1.0) * eps2);
}

double mixture_rdp_moment(double eps1, double eps2, double delta0, double alpha) {
  return std::exp(mixture_rdp_log_moment(eps1, eps2, delta0, alpha));
}

PtrRdpArms ptr_rdp_arms(double sigma1, double sigma2, double b, double delta0,
                        double alpha) {
  const double eps_g1 = gaussian_rdp_eps(NoiseToSensitivityRatio(sigma1), alpha);
  const double eps_g2 = gaussian_rdp_eps(NoiseToSensitivityRatio(sigma2), alpha);
  const double eps_lap = laplace_rdp_eps(NoiseToSensitivityRatio(b), alpha);
  const double mixture =
      f_alpha_inv_log(mixture_rdp_log_moment(eps_g1, eps_g2, delta0, alpha), alpha);
  return {mixture, eps_g1 + eps_lap};
}

double ptr_rdp(const PtrConfig& config, double alpha) {
  config.require_scale_relation();
  const PtrRdpArms arms =
      ptr_rdp_arms(config.sigma1, config.sigma2, config.b, config.delta0, alpha);
  return std::max(arms.mixture_arm, arms.composition_arm);
}

RdpCurve ptr_rdp_curve(const PtrConfig& config, const std::vector<double>& alphas) {
  std::vector<double> eps;
  eps.reserve(alphas.size());
  for (double a : alphas) eps.push_back(ptr_rdp(config, a));
  return RdpCurve(alphas, std::move(eps));
}

DpGuarantee ptr_direct_dp(const PtrConfig& config, double delta, double gs_f1,
                          double gs_f2) {
  if (!(gs_f1 > 0.0) || std::abs(gs_f1 - gs_f2) > 1e-12 * std::max(1.0, gs_f1)) {
    throw config_error("direct bound requires equal global sensitivities");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw config_error("delta must lie in (0, 1)");
  const PtrConfig norm = config.normalized(gs_f1);
  norm.require_scale_relation();
  const double eps_lap = laplace_pure_dp_eps(NoiseToSensitivityRatio(norm.b));
  const double eps_gauss =
      gaussian_dp_eps(NoiseToSensitivityRatio(norm.sigma1), delta).eps;
  return {eps_lap + eps_gauss, norm.delta0 + delta};
}

OptimalDelta0 optimal_delta0(double sigma1, double sigma2, double b, double alpha) {
  if (!(sigma1 > sigma2) || !(sigma2 > 0.0)) {
    throw config_error("balancing delta0 needs sigma1 > sigma2 > 0");
  }
  if (!(b > 0.0)) throw config_error("Laplace scale b must be positive");
  const double a1 = (alpha - 1.0) * gaussian_rdp_eps(NoiseToSensitivityRatio(sigma1), alpha);
  const double a2 = (alpha - 1.0) * gaussian_rdp_eps(NoiseToSensitivityRatio(sigma2), alpha);
  const double lp = (alpha - 1.0) * laplace_rdp_eps(NoiseToSensitivityRatio(b), alpha);
  const double hi = std::nextafter(0.5, 0.0);
  const double lo = std::numeric_limits<double>::min();
  if (lp <= 0.0) {
    // The margin test costs nothing (enormous b rounds its moment to one),
    // so no mixture weight is needed.
    return {lo, 0.0};
  }
  // a1 + log(e^lp - 1) - a2 - log(1 - e^(a1 - a2)), all in log space
  const double log_raw =
      a1 + std::log(std::expm1(lp)) - a2 - std::log1p(-std::exp(a1 - a2));
  const double raw = std::exp(log_raw);
  return {std::clamp(raw, lo, hi), raw};
}

DpConversion rdp_to_dp(const RdpCurve& curve, double delta) {
  if (curve.empty()) throw config_error("cannot convert an empty curve");
  if (!(delta > 0.0 && delta <= 1.0)) throw config_error("delta must lie in (0, 1]");
  DpConversion out;
  out.tight.eps = std::numeric_limits<double>::infinity();
  out.classic.eps = std::numeric_limits<double>::infinity();
  out.tight.delta = out.classic.delta = delta;
  const double log_delta = std::log(delta);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double a = curve.alphas()[i];
    const double e = curve.eps()[i];
    const double classic = e - log_delta / (a - 1.0);
    const double tight =
        e + std::log((a - 1.0) / a) - (log_delta + std::log(a)) / (a - 1.0);
    if (classic < out.classic.eps) {
      out.classic.eps = classic;
      out.alpha_classic = a;
    }
    if (tight < out.tight.eps) {
      out.tight.eps = tight;
      out.alpha_tight = a;
    }
  }
  return out;
}

RdpCurve compose(const std::vector<RdpCurve>& curves) {
  if (curves.empty()) throw config_error("nothing to compose");
  const std::vector<double>& grid = curves.front().alphas();
  std::vector<double> eps(grid.size(), 0.0);
  double eps_inf = 0.0;
  for (const RdpCurve& c : curves) {
    if (c.alphas() != grid) {
      throw config_error("curves must share an identical alpha grid");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) eps[i] += c.eps()[i];
    eps_inf += c.eps_infinity;
  }
  RdpCurve out(grid, std::move(eps));
  out.eps_infinity = eps_inf;
  return out;
}

DpGuarantee strong_composition(double eps, double delta, int k, double delta_prime) {
  if (!(eps >= 0.0)) throw config_error("eps must be nonnegative");
  if (k < 1) throw config_error("composition count must be positive");
  if (!(delta >= 0.0 && delta < 1.0) || !(delta_prime > 0.0 && delta_prime < 1.0)) {
    throw config_error("deltas must lie in (0, 1)");
  }
  if (eps == 0.0) return {0.0, k * delta + delta_prime};
  const double kd = static_cast<double>(k);
  const double shrink = kd * eps * (std::expm1(eps) / (std::exp(eps) + 1.0));
  const double c1 = kd * eps;
  const double c2 = shrink + eps * std::sqrt(2.0 * kd * std::log(1.0 / delta_prime));
  const double c3 =
      shrink + eps * std::sqrt(2.0 * kd * std::log(M_E + std::sqrt(kd) * eps / delta_prime));
  return {std::min({c1, c2, c3}), kd * delta + delta_prime};
}

}  // namespace ptrdp
