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

#ifndef FAIRALLOC_DOMAIN_HPP
#define FAIRALLOC_DOMAIN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairalloc/error.hpp"

namespace fairalloc {

/// Opaque region identifier, e.g. a zip code.
struct RegionId {
  std::string value;
  friend bool operator==(const RegionId&, const RegionId&) = default;
};

/// Opaque social group identifier, e.g. "black_non_latinx" or "age_30_39".
struct GroupId {
  std::string value;
  friend bool operator==(const GroupId&, const GroupId&) = default;
};

/// Population counts s(i, j) for group i living in region j.
///
/// Counts are stored group-major: the row of group i is contiguous, which is
/// the access pattern of the fairness terms.
class PopulationMatrix {
 public:
  PopulationMatrix() = default;

  PopulationMatrix(std::vector<GroupId> groups, std::vector<RegionId> regions,
                   std::vector<std::int64_t> counts)
      : groups_(std::move(groups)), regions_(std::move(regions)), counts_(std::move(counts)) {
    if (counts_.size() != groups_.size() * regions_.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "population matrix expects " + std::to_string(groups_.size() * regions_.size()) +
                      " counts, got " + std::to_string(counts_.size()));
    }
  }

  /// Builds from nested rows: rows[i][j] is the count of group i in region j.
  static PopulationMatrix from_rows(std::vector<GroupId> groups, std::vector<RegionId> regions,
                                    const std::vector<std::vector<std::int64_t>>& rows) {
    std::vector<std::int64_t> flat;
    flat.reserve(groups.size() * regions.size());
    if (rows.size() != groups.size()) {
      throw Error(ErrorCode::DimensionMismatch, "one row per group required");
    }
    for (const auto& row : rows) {
      if (row.size() != regions.size()) {
        throw Error(ErrorCode::DimensionMismatch, "one column per region required");
      }
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return PopulationMatrix(std::move(groups), std::move(regions), std::move(flat));
  }

  std::size_t group_count() const noexcept { return groups_.size(); }
  std::size_t region_count() const noexcept { return regions_.size(); }
  const std::vector<GroupId>& groups() const noexcept { return groups_; }
  const std::vector<RegionId>& regions() const noexcept { return regions_; }

  std::int64_t count(std::size_t group, std::size_t region) const {
    return counts_[group * regions_.size() + region];
  }
  std::span<const std::int64_t> group_row(std::size_t group) const {
    return {counts_.data() + group * regions_.size(), regions_.size()};
  }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }

  std::optional<std::size_t> region_index(const RegionId& id) const {
    for (std::size_t j = 0; j < regions_.size(); ++j) {
      if (regions_[j] == id) return j;
    }
    return std::nullopt;
  }
  std::optional<std::size_t> group_index(const GroupId& id) const {
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      if (groups_[i] == id) return i;
    }
    return std::nullopt;
  }

 private:
  std::vector<GroupId> groups_;
  std::vector<RegionId> regions_;
  std::vector<std::int64_t> counts_;
};

/// Per-group exposure probability P(E=1 | g), keyed by group in file order.
struct ExposureRates {
  std::vector<GroupId> groups;
  std::vector<double> rates;

  void set(GroupId group, double rate) {
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i] == group) {
        rates[i] = rate;
        return;
      }
    }
    groups.push_back(std::move(group));
    rates.push_back(rate);
  }

  std::optional<double> find(const GroupId& group) const {
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i] == group) return rates[i];
    }
    return std::nullopt;
  }

  std::size_t size() const noexcept { return groups.size(); }
};

struct ProblemInstance {
  PopulationMatrix matrix;
  ExposureRates rates;
  std::int64_t budget = 0;
};

enum class AllocationKind { Fractional, Integral };

/// Resource amount x_j per region, in the instance's region order.
struct Allocation {
  std::vector<double> amounts;
  AllocationKind kind = AllocationKind::Fractional;

  std::size_t size() const noexcept { return amounts.size(); }
  double total() const {
    double sum = 0.0;
    for (double v : amounts) sum += v;
    return sum;
  }
};

/// Rates reordered to the matrix's group order. Throws MissingRate.
inline std::vector<double> aligned_rates(const ProblemInstance& instance) {
  std::vector<double> out;
  out.reserve(instance.matrix.group_count());
  for (const auto& group : instance.matrix.groups()) {
    auto rate = instance.rates.find(group);
    if (!rate) throw Error(ErrorCode::MissingRate, "no exposure rate for group '" + group.value + "'");
    out.push_back(*rate);
  }
  return out;
}

/// Checks every instance invariant and returns the instance unchanged.
inline const ProblemInstance& validate_instance(const ProblemInstance& instance) {
  const auto& m = instance.matrix;
  if (instance.budget < 0) {
    throw Error(ErrorCode::NegativeBudget, "budget must be non-negative, got " + std::to_string(instance.budget));
  }

  std::unordered_set<std::string> seen;
  for (const auto& r : m.regions()) {
    if (r.value.empty()) throw Error(ErrorCode::InvalidArgument, "empty region id");
    if (!seen.insert(r.value).second) throw Error(ErrorCode::DuplicateRegion, "region '" + r.value + "'");
  }
  seen.clear();
  for (const auto& g : m.groups()) {
    if (g.value.empty()) throw Error(ErrorCode::InvalidArgument, "empty group id");
    if (!seen.insert(g.value).second) throw Error(ErrorCode::DuplicateGroup, "group '" + g.value + "'");
  }
  if (m.region_count() == 0 || m.group_count() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "instance needs at least one region and one group");
  }

  for (std::size_t i = 0; i < m.group_count(); ++i) {
    for (std::size_t j = 0; j < m.region_count(); ++j) {
      if (m.count(i, j) < 0) {
        throw Error(ErrorCode::NegativeCount,
                    "count for group '" + m.groups()[i].value + "' in region '" + m.regions()[j].value + "'");
      }
    }
  }

  // Rates must cover exactly the matrix's groups.
  seen.clear();
  for (const auto& g : instance.rates.groups) {
    if (!seen.insert(g.value).second) throw Error(ErrorCode::DuplicateGroup, "rate for group '" + g.value + "'");
    if (!m.group_index(g)) throw Error(ErrorCode::UnknownGroup, "rate for group '" + g.value + "' not in matrix");
  }
  if (instance.rates.rates.size() != instance.rates.groups.size()) {
    throw Error(ErrorCode::DimensionMismatch, "exposure rate table is ragged");
  }
  const auto rates = aligned_rates(instance);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] >= 0.0 && rates[i] <= 1.0)) {
      throw Error(ErrorCode::RateOutOfRange, "rate for group '" + m.groups()[i].value + "' outside [0, 1]");
    }
  }

  for (std::size_t j = 0; j < m.region_count(); ++j) {
    std::int64_t pop = 0;
    double exposed = 0.0;
    for (std::size_t i = 0; i < m.group_count(); ++i) {
      pop += m.count(i, j);
      exposed += static_cast<double>(m.count(i, j)) * rates[i];
    }
    if (pop == 0) throw Error(ErrorCode::ZeroPopulationRegion, "region '" + m.regions()[j].value + "'");
    if (!(exposed > 0.0)) throw Error(ErrorCode::ZeroExposedRegion, "region '" + m.regions()[j].value + "'");
  }
  return instance;
}

/// Population aggregates used by the gap formulas, computed once per instance.
struct PopulationSummary {
  std::vector<double> rates;                 // aligned to matrix groups
  std::vector<std::int64_t> region_population;
  std::vector<std::int64_t> group_population;
  std::vector<double> exposed_population;    // per region
  std::int64_t total_population = 0;
  double total_exposed = 0.0;
};

inline PopulationSummary summarize(const ProblemInstance& instance) {
  const auto& m = instance.matrix;
  PopulationSummary s;
  s.rates = aligned_rates(instance);
  s.region_population.assign(m.region_count(), 0);
  s.group_population.assign(m.group_count(), 0);
  s.exposed_population.assign(m.region_count(), 0.0);
  for (std::size_t i = 0; i < m.group_count(); ++i) {
    for (std::size_t j = 0; j < m.region_count(); ++j) {
      const auto c = m.count(i, j);
      s.region_population[j] += c;
      s.group_population[i] += c;
      s.exposed_population[j] += static_cast<double>(c) * s.rates[i];
    }
  }
  for (auto p : s.region_population) s.total_population += p;
  for (double e : s.exposed_population) s.total_exposed += e;
  return s;
}

inline std::size_t require_region(const ProblemInstance& instance, const RegionId& region) {
  auto j = instance.matrix.region_index(region);
  if (!j) throw Error(ErrorCode::UnknownRegion, "region '" + region.value + "'");
  return *j;
}

inline std::int64_t region_population(const ProblemInstance& instance, const RegionId& region) {
  const auto j = require_region(instance, region);
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < instance.matrix.group_count(); ++i) sum += instance.matrix.count(i, j);
  return sum;
}

inline std::int64_t group_population(const ProblemInstance& instance, const GroupId& group) {
  auto i = instance.matrix.group_index(group);
  if (!i) throw Error(ErrorCode::UnknownGroup, "group '" + group.value + "'");
  std::int64_t sum = 0;
  for (auto c : instance.matrix.group_row(*i)) sum += c;
  return sum;
}

inline std::int64_t total_population(const ProblemInstance& instance) {
  std::int64_t sum = 0;
  for (auto c : instance.matrix.counts()) sum += c;
  return sum;
}

/// Sum over groups of s(l, j) * P(E=1 | g_l) for one region.
inline double exposed_population(const ProblemInstance& instance, const RegionId& region) {
  const auto j = require_region(instance, region);
  const auto rates = aligned_rates(instance);
  double sum = 0.0;
  for (std::size_t i = 0; i < instance.matrix.group_count(); ++i) {
    sum += static_cast<double>(instance.matrix.count(i, j)) * rates[i];
  }
  return sum;
}

}  // namespace fairalloc

#endif  // FAIRALLOC_DOMAIN_HPP
