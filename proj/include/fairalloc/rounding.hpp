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

#ifndef FAIRALLOC_ROUNDING_HPP
#define FAIRALLOC_ROUNDING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fairalloc/domain.hpp"

namespace fairalloc {

/// Which population ordering drives the budget repair.
///   Balanced    - surplus removed from the most populated regions, deficit
///                 added to the most exposed regions.
///   DiverseOnly - population ordering for both directions.
///   FairOnly    - exposed-population ordering for both directions.
enum class RoundingMode { Balanced, DiverseOnly, FairOnly };

namespace detail {

template <typename Key>
std::vector<std::size_t> descending_order(std::span<const Key> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] > keys[b]; });
  return order;
}

}  // namespace detail

/// Rounds to nearest (halves away from zero) and repairs the total to
/// exactly `budget` by +/-1 steps along the sorted region order, cycling as
/// often as needed. Regions already at zero are skipped when decreasing.
inline std::vector<std::int64_t> round_to_budget(std::span<const double> x, std::int64_t budget,
                                                 std::span<const std::int64_t> population,
                                                 std::span<const double> exposed, RoundingMode mode) {
  if (budget < 0) throw Error(ErrorCode::NegativeBudget, "budget " + std::to_string(budget));
  if (population.size() != x.size() || exposed.size() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch, "rounding keys do not match the allocation");
  }
  std::vector<std::int64_t> out(x.size());
  std::int64_t sum = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= 0.0) || !std::isfinite(x[j])) {
      throw Error(ErrorCode::InvalidArgument, "allocation entry " + std::to_string(j) + " is negative or not finite");
    }
    out[j] = static_cast<std::int64_t>(std::llround(x[j]));
    sum += out[j];
  }

  std::int64_t residual = budget - sum;
  if (residual == 0 || x.empty()) {
    if (residual != 0) throw Error(ErrorCode::BudgetUnreachable, "no regions to allocate to");
    return out;
  }

  const bool by_population = residual < 0 ? mode != RoundingMode::FairOnly : mode == RoundingMode::DiverseOnly;
  const auto order = by_population ? detail::descending_order<std::int64_t>(population)
                                   : detail::descending_order<double>(exposed);

  if (residual > 0) {
    const auto n = static_cast<std::int64_t>(order.size());
    const std::int64_t rounds = residual / n;
    for (auto j : order) out[j] += rounds;
    residual -= rounds * n;
    for (std::size_t k = 0; residual > 0; ++k, --residual) out[order[k]] += 1;
    return out;
  }

  while (residual < 0) {
    bool progressed = false;
    for (auto j : order) {
      if (residual == 0) break;
      if (out[j] == 0) continue;
      out[j] -= 1;
      ++residual;
      progressed = true;
    }
    if (!progressed) throw Error(ErrorCode::BudgetUnreachable, "every region is already at zero");
  }
  return out;
}

/// Integral allocation from a fractional one, summing exactly to the budget.
inline Allocation round_allocation(const ProblemInstance& instance, const Allocation& x,
                                   RoundingMode mode = RoundingMode::Balanced) {
  if (x.size() != instance.matrix.region_count()) {
    throw Error(ErrorCode::DimensionMismatch, "allocation does not match the instance regions");
  }
  const auto summary = summarize(instance);
  const auto ints = round_to_budget(x.amounts, instance.budget, summary.region_population,
                                    summary.exposed_population, mode);
  Allocation out;
  out.kind = AllocationKind::Integral;
  out.amounts.assign(ints.begin(), ints.end());
  return out;
}

}  // namespace fairalloc

#endif  // FAIRALLOC_ROUNDING_HPP
