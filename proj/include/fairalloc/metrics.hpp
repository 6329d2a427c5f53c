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

#ifndef FAIRALLOC_METRICS_HPP
#define FAIRALLOC_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fairalloc/domain.hpp"

namespace fairalloc {

/// Diversity and fairness gaps of one allocation.
struct GapReport {
  std::vector<double> diversity_gaps;  // D_j per region
  std::vector<double> fairness_gaps;   // F_i per group
  double max_diversity = 0.0;          // D(x)
  double max_fairness = 0.0;           // F(x)
  std::vector<double> group_means;     // E(V | E=1, g_i)
  double exposed_mean = 0.0;           // E(V | E=1)
  double per_capita_mean = 0.0;        // sum(x) / total population
};

/// Coefficients of the affine maps inside both absolute values.
///
/// Row j of `diversity` gives x -> x_j / pop_j - sum(x) / total, row i of
/// `fairness` gives x -> E(V|E=1, g_i) - E(V|E=1). Both are dense, M columns.
struct GapCoefficients {
  std::size_t regions = 0;
  std::vector<std::vector<double>> diversity;
  std::vector<std::vector<double>> fairness;
  std::vector<std::vector<double>> group_mean;  // x -> E(V|E=1, g_i)
  std::vector<double> group_weight;             // P(g_i | E=1)
};

namespace detail {

inline void require_dimension(const ProblemInstance& instance, std::span<const double> x) {
  if (x.size() != instance.matrix.region_count()) {
    throw Error(ErrorCode::DimensionMismatch, "allocation has " + std::to_string(x.size()) +
                                                  " entries for " +
                                                  std::to_string(instance.matrix.region_count()) + " regions");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace detail

inline GapCoefficients gap_coefficients(const ProblemInstance& instance, const PopulationSummary& summary) {
  const auto& m = instance.matrix;
  const std::size_t regions = m.region_count();
  const std::size_t groups = m.group_count();

  GapCoefficients c;
  c.regions = regions;
  const double total = static_cast<double>(summary.total_population);
  c.diversity.assign(regions, std::vector<double>(regions, -1.0 / total));
  for (std::size_t j = 0; j < regions; ++j) {
    c.diversity[j][j] += 1.0 / static_cast<double>(summary.region_population[j]);
  }

  // Weight of group i in the exposed population: P(E|g_i) * sum_k s_ik / sum_r,k s_rk P(E|g_r).
  double exposed_total = 0.0;
  for (std::size_t i = 0; i < groups; ++i) {
    exposed_total += summary.rates[i] * static_cast<double>(summary.group_population[i]);
  }
  c.group_weight.resize(groups);
  for (std::size_t i = 0; i < groups; ++i) {
    c.group_weight[i] = summary.rates[i] * static_cast<double>(summary.group_population[i]) / exposed_total;
  }

  c.group_mean.assign(groups, std::vector<double>(regions, 0.0));
  for (std::size_t i = 0; i < groups; ++i) {
    if (summary.group_population[i] == 0) continue;
    const double gp = static_cast<double>(summary.group_population[i]);
    for (std::size_t j = 0; j < regions; ++j) {
      c.group_mean[i][j] = static_cast<double>(m.count(i, j)) / (summary.exposed_population[j] * gp);
    }
  }

  std::vector<double> global(regions, 0.0);
  for (std::size_t i = 0; i < groups; ++i) {
    for (std::size_t j = 0; j < regions; ++j) global[j] += c.group_weight[i] * c.group_mean[i][j];
  }

  c.fairness.assign(groups, std::vector<double>(regions, 0.0));
  for (std::size_t i = 0; i < groups; ++i) {
    // An empty group has no conditional mean; its gap row is identically zero.
    if (summary.group_population[i] == 0) continue;
    for (std::size_t j = 0; j < regions; ++j) c.fairness[i][j] = c.group_mean[i][j] - global[j];
  }
  return c;
}

/// D_j(x) = | x_j / pop_j - sum(x) / total |, plus the maximum D(x).
inline GapReport diversity_gaps(const ProblemInstance& instance, std::span<const double> x) {
  detail::require_dimension(instance, x);
  const auto summary = summarize(instance);
  double sum = 0.0;
  for (double v : x) sum += v;

  GapReport r;
  r.per_capita_mean = sum / static_cast<double>(summary.total_population);
  r.diversity_gaps.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    r.diversity_gaps[j] = std::abs(x[j] / static_cast<double>(summary.region_population[j]) - r.per_capita_mean);
  }
  r.max_diversity = *std::max_element(r.diversity_gaps.begin(), r.diversity_gaps.end());
  return r;
}

/// F_i(x) = | E(V|E=1, g_i) - E(V|E=1) |, plus the maximum F(x) and the means.
inline GapReport fairness_gaps(const ProblemInstance& instance, std::span<const double> x) {
  detail::require_dimension(instance, x);
  const auto summary = summarize(instance);
  const auto& m = instance.matrix;

  // Resource per exposed capita in each region.
  std::vector<double> per_exposed(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) per_exposed[j] = x[j] / summary.exposed_population[j];

  double exposed_total = 0.0;
  for (std::size_t i = 0; i < m.group_count(); ++i) {
    exposed_total += summary.rates[i] * static_cast<double>(summary.group_population[i]);
  }

  GapReport r;
  r.group_means.assign(m.group_count(), 0.0);
  for (std::size_t i = 0; i < m.group_count(); ++i) {
    if (summary.group_population[i] == 0) continue;
    double mean = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) mean += per_exposed[j] * static_cast<double>(m.count(i, j));
    r.group_means[i] = mean / static_cast<double>(summary.group_population[i]);
  }
  for (std::size_t i = 0; i < m.group_count(); ++i) {
    const double w = summary.rates[i] * static_cast<double>(summary.group_population[i]) / exposed_total;
    r.exposed_mean += w * r.group_means[i];
  }
  r.fairness_gaps.resize(m.group_count());
  for (std::size_t i = 0; i < m.group_count(); ++i) {
    r.fairness_gaps[i] = summary.group_population[i] == 0 ? 0.0 : std::abs(r.group_means[i] - r.exposed_mean);
  }
  r.max_fairness = *std::max_element(r.fairness_gaps.begin(), r.fairness_gaps.end());
  return r;
}

/// Both gap families in one report.
inline GapReport evaluate_gaps(const ProblemInstance& instance, std::span<const double> x) {
  auto r = fairness_gaps(instance, x);
  auto d = diversity_gaps(instance, x);
  r.diversity_gaps = std::move(d.diversity_gaps);
  r.max_diversity = d.max_diversity;
  r.per_capita_mean = d.per_capita_mean;
  return r;
}

inline GapReport evaluate_gaps(const ProblemInstance& instance, const Allocation& x) {
  return evaluate_gaps(instance, std::span<const double>(x.amounts));
}

/// Ratio of the fairness gap without fairness weighting (Diverse-only) to the
/// gap of the fair-and-diverse allocation. A zero denominator yields +infinity.
inline double price_of_fairness(double unconstrained_gap, double fair_diverse_gap) {
  if (!(unconstrained_gap >= 0.0) || !(fair_diverse_gap >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fairness gaps must be non-negative");
  }
  if (fair_diverse_gap == 0.0) return std::numeric_limits<double>::infinity();
  return unconstrained_gap / fair_diverse_gap;
}

inline bool is_infinite_pof(double pof) { return std::isinf(pof); }

}  // namespace fairalloc

#endif  // FAIRALLOC_METRICS_HPP
