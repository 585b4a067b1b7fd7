// Copyright 2026 The Synthmark Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "synthmark/error.hpp"

namespace synthmark::stats {

struct KendallResult {
  double tau = 0;
  // Set when either variable is constant; tau is then reported as 0.
  bool degenerate = false;
};

namespace detail {

// Sorts `v` in place and returns the number of inversions removed.
inline std::int64_t merge_count(std::vector<double>& v,
                                std::vector<double>& scratch) {
  const std::size_t n = v.size();
  std::int64_t swaps = 0;
  scratch.resize(n);
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          scratch[k++] = v[j++];
        } else {
          scratch[k++] = v[i++];
        }
      }
      while (i < mid) scratch[k++] = v[i++];
      while (j < hi) scratch[k++] = v[j++];
    }
    std::swap(v, scratch);
  }
  return swaps;
}

// Sum of t(t-1)/2 over runs of equal values in a sorted sequence.
template <class It, class Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run = first;
    std::int64_t t = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++t;
    }
    total += t * (t - 1) / 2;
    first = run;
  }
  return total;
}

}  // namespace detail

// Kendall tau-b in O(n log n): sort by (x, y), then count the inversions
// of y with a bottom-up merge sort.
inline KendallResult kendall_tau(std::span<const double> x,
                                 std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("kendall_tau: length mismatch");
  }
  if (x.size() < 2) throw ValidationError("kendall_tau: need >= 2 points");
  const auto n = static_cast<std::int64_t>(x.size());
  std::vector<std::pair<double, double>> pts(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pts[i] = {x[i], y[i]};
  std::sort(pts.begin(), pts.end());

  const std::int64_t n0 = n * (n - 1) / 2;
  const std::int64_t x_ties = detail::tied_pairs(
      pts.begin(), pts.end(),
      [](const auto& a, const auto& b) { return a.first == b.first; });
  const std::int64_t joint_ties =
      detail::tied_pairs(pts.begin(), pts.end(),
                         [](const auto& a, const auto& b) { return a == b; });

  std::vector<double> ys(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) ys[i] = pts[i].second;
  std::vector<double> scratch;
  const std::int64_t swaps = detail::merge_count(ys, scratch);
  const std::int64_t y_ties = detail::tied_pairs(
      ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  KendallResult result;
  const std::int64_t denom_x = n0 - x_ties;
  const std::int64_t denom_y = n0 - y_ties;
  if (denom_x == 0 || denom_y == 0) {
    result.degenerate = true;
    return result;
  }
  const std::int64_t score = n0 - x_ties - y_ties + joint_ties - 2 * swaps;
  result.tau = static_cast<double>(score) /
               std::sqrt(static_cast<double>(denom_x) *
                         static_cast<double>(denom_y));
  result.tau = std::clamp(result.tau, -1.0, 1.0);
  return result;
}

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b| over the pooled
// sample, with tied values stepped together.
inline double ks_statistic(std::span<const double> a,
                           std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("ks_statistic: empty sample");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double best = 0;
  while (i < sa.size() || j < sb.size()) {
    double v;
    if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      v = sa[i];
    } else {
      v = sb[j];
    }
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return best;
}

// Least-squares slope of y on x; nullopt when x has no spread.
inline std::optional<double> ols_slope(std::span<const double> x,
                                       std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("ols_slope: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) return std::nullopt;
  return sxy / sxx;
}

inline double median(std::vector<double> values) {
  if (values.empty()) return 0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + mid);
  return (lower + upper) / 2;
}

inline double mean(std::span<const double> values) {
  if (values.empty()) return 0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace synthmark::stats
