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

// Independent oracles used by the test suites. Everything here deliberately
// avoids the library's own numerical paths: integration is adaptive Simpson
// (not Gauss-Kronrod), minimization is golden-section, sensitivities are
// exhaustive search.

#ifndef PTRDP_TESTS_TEST_SUPPORT_HPP_
#define PTRDP_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

namespace testsupport {

// --------------------------------------------------------------------------
// Adaptive Simpson quadrature.

inline double simpsonStep(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb, double whole,
                          double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpsonStep(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpsonStep(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptiveSimpson(const std::function<double(double)>& f, double a,
                              double b, double tol = 1e-12, int depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpsonStep(f, a, b, fa, fm, fb, whole, tol, depth);
}

// --------------------------------------------------------------------------
// Golden-section minimization of a unimodal function on [lo, hi].

inline double goldenSectionMin(const std::function<double(double)>& f, double lo,
                               double hi, double tol = 1e-10) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// --------------------------------------------------------------------------
// Kolmogorov-Smirnov statistic of a sample against an analytic CDF.

inline double ksStatistic(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double c = cdf(sample[i]);
    stat = std::max(stat, std::abs(c - static_cast<double>(i) / n));
    stat = std::max(stat, std::abs(static_cast<double>(i + 1) / n - c));
  }
  return stat;
}

inline double laplaceCdf(double x, double center, double scale) {
  const double z = (x - center) / scale;
  return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

inline double normalCdf(double x, double center, double sigma) {
  return 0.5 * std::erfc(-(x - center) / (sigma * std::sqrt(2.0)));
}

// --------------------------------------------------------------------------
// Exhaustive trimmed-sum sensitivity oracle for scalar datasets.
//
// tsum trims the f largest by absolute value; ties broken by position in the
// sorted-by-|.| order, which matches any stable rule for the values used in
// tests (sums are over values, so equal-|.| ties do not change the sum
// unless signs differ; tests use nonnegative values).

inline double scalarTsum(std::vector<double> values, int f) {
  if (static_cast<int>(values.size()) <= f) return 0.0;
  std::stable_sort(values.begin(), values.end(),
                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  double total = 0.0;
  for (std::size_t i = 0; i + f < values.size(); ++i) total += values[i];
  return total;
}

// Local sensitivity of the scalar trimmed sum at one dataset: worst change
// over removing any element or adding one of the given candidates.
inline double scalarTsumLocalSensitivity(const std::vector<double>& values, int f,
                                         const std::vector<double>& add_candidates) {
  const double base = scalarTsum(values, f);
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::vector<double> v = values;
    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
    worst = std::max(worst, std::abs(scalarTsum(v, f) - base));
  }
  for (double c : add_candidates) {
    std::vector<double> v = values;
    v.push_back(c);
    worst = std::max(worst, std::abs(scalarTsum(v, f) - base));
  }
  return worst;
}

// Max local sensitivity over all datasets reachable with exactly r edits
// (removals, or additions drawn from the extreme candidates). States are
// deduplicated by their sorted multiset.
inline double bruteLocalSensitivityR(const std::vector<double>& values, int f,
                                     int r, double gs) {
  const std::vector<double> candidates{0.0, gs};
  std::vector<std::vector<double>> frontier{values};
  auto canon = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  for (int step = 0; step < r; ++step) {
    std::map<std::vector<double>, bool> seen;
    std::vector<std::vector<double>> next;
    for (const auto& state : frontier) {
      for (std::size_t i = 0; i < state.size(); ++i) {
        std::vector<double> v = state;
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        auto key = canon(v);
        if (!seen[key]) {
          seen[key] = true;
          next.push_back(std::move(v));
        }
      }
      for (double c : candidates) {
        std::vector<double> v = state;
        v.push_back(c);
        auto key = canon(v);
        if (!seen[key]) {
          seen[key] = true;
          next.push_back(std::move(v));
        }
      }
    }
    frontier = std::move(next);
  }
  double worst = 0.0;
  for (const auto& state : frontier) {
    worst = std::max(worst, scalarTsumLocalSensitivity(state, f, candidates));
  }
  return worst;
}

inline double bruteSafetyMargin(const std::vector<double>& values, int f,
                                double tau, double gs, int r_cap) {
  for (int r = 0; r <= r_cap; ++r) {
    if (bruteLocalSensitivityR(values, f, r, gs) > tau) return r;
  }
  return std::numeric_limits<double>::infinity();
}

// --------------------------------------------------------------------------
// Least-squares slope of y against x.

inline double fitSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testsupport

#endif  // PTRDP_TESTS_TEST_SUPPORT_HPP_
