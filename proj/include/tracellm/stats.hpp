// Copyright 2026 The tracellm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Two-sided rank tests.
//
// Both tests use midranks for ties. Small samples get an exact p-value by
// enumerating the permutation distribution of the statistic with the
// observed (mid)ranks; larger samples use the normal approximation with tie
// and continuity corrections. The two-sided p-value is
//   P(|S - E[S]| >= |s_obs - E[S]|).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tracellm/error.hpp"

namespace tracellm {

enum class TestMethod { wilcoxon_signed_rank, mann_whitney_u };

inline std::string to_string(TestMethod m) {
  return m == TestMethod::wilcoxon_signed_rank ? "wilcoxon_signed_rank" : "mann_whitney_u";
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestMethod method = TestMethod::wilcoxon_signed_rank;
  bool exact = true;
  bool degenerate = false;
  std::size_t n = 0;  // non-zero differences (Wilcoxon) or |a|+|b| (Mann-Whitney)
};

inline constexpr std::size_t kWilcoxonExactMaxN = 15;
inline constexpr std::size_t kMannWhitneyExactMaxN = 14;

namespace detail {

inline constexpr double kTieTolerance = 1e-9;

/// 1-based midranks of `xs`; `tie_term` receives sum(t^3 - t) over tie groups.
inline std::vector<double> midranks(std::span<const double> xs, double* tie_term = nullptr) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  double ties = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i + 1;
    while (j < idx.size() && xs[idx[j]] == xs[idx[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t m = i; m < j; ++m) ranks[idx[m]] = r;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  if (tie_term) *tie_term = ties;
  return ranks;
}

/// Two-sided normal p-value with continuity correction 0.5.
inline double normal_two_sided(double observed, double mean, double var) {
  const double z = std::max(0.0, std::abs(observed - mean) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace detail

inline TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error("wilcoxon: paired samples need equal sizes (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw Error("wilcoxon: empty samples");
  std::vector<double> d, absd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - b[i];
    if (x != 0.0) {
      d.push_back(x);
      absd.push_back(std::abs(x));
    }
  }
  TestResult r;
  r.method = TestMethod::wilcoxon_signed_rank;
  r.n = d.size();
  if (d.empty()) {
    r.degenerate = true;
    return r;
  }
  double tie_term = 0.0;
  const auto ranks = detail::midranks(absd, &tie_term);
  const double total = std::accumulate(ranks.begin(), ranks.end(), 0.0);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) w_plus += d[i] > 0 ? ranks[i] : 0.0;
  r.statistic = std::min(w_plus, total - w_plus);
  const double mean = total / 2.0;
  const double n = static_cast<double>(d.size());

  if (d.size() <= kWilcoxonExactMaxN) {
    const double obs = std::abs(w_plus - mean) - detail::kTieTolerance;
    const std::uint32_t patterns = std::uint32_t{1} << d.size();
    std::uint64_t extreme = 0;
    for (std::uint32_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) s += (mask >> i & 1U) ? ranks[i] : 0.0;
      if (std::abs(s - mean) >= obs) ++extreme;
    }
    r.p_value = static_cast<double>(extreme) / static_cast<double>(patterns);
    r.exact = true;
  } else {
    const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
    r.p_value = detail::normal_two_sided(w_plus, mean, var);
    r.exact = false;
  }
  return r;
}

inline TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("mann-whitney: both samples must be non-empty");
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const auto ranks = detail::midranks(all, &tie_term);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const std::size_t total_n = all.size();
  double ra = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ra += ranks[i];
  const double u_a = ra - na * (na + 1) / 2.0;
  const double u_b = na * nb - u_a;
  const double mean = na * nb / 2.0;

  TestResult r;
  r.method = TestMethod::mann_whitney_u;
  r.statistic = std::min(u_a, u_b);
  r.n = total_n;

  if (total_n <= kMannWhitneyExactMaxN) {
    // Every way of labeling a.size() of the pooled ranks as group a.
    const double obs = std::abs(u_a - mean) - detail::kTieTolerance;
    std::uint64_t extreme = 0, count = 0;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << total_n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < total_n; ++i) s += (mask >> i & 1U) ? ranks[i] : 0.0;
      const double u = s - na * (na + 1) / 2.0;
      ++count;
      if (std::abs(u - mean) >= obs) ++extreme;
    }
    r.p_value = static_cast<double>(extreme) / static_cast<double>(count);
    r.exact = true;
  } else {
    const double nn = static_cast<double>(total_n);
    const double var = na * nb / 12.0 * ((nn + 1) - tie_term / (nn * (nn - 1)));
    if (var <= 0.0) {
      r.degenerate = true;
      r.p_value = 1.0;
    } else {
      r.p_value = detail::normal_two_sided(u_a, mean, var);
    }
    r.exact = false;
  }
  return r;
}

}  // namespace tracellm
