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

#ifndef FAIRALLOC_EXPOSURE_HPP
#define FAIRALLOC_EXPOSURE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fairalloc/domain.hpp"

namespace fairalloc {

/// Infected count c_i out of citywide population n_i.
struct GroupCaseCount {
  GroupId group;
  std::int64_t infected = 0;
  std::int64_t population = 0;
};

/// P(g_i | E=1) and P(g_i) for one group; P(E=1) is shared.
struct GroupCaseShare {
  GroupId group;
  double share_of_exposed = 0.0;   // P(g | E=1)
  double share_of_population = 0.0;  // P(g)
};

struct CaseShares {
  double exposed_probability = 0.0;  // P(E=1)
  std::vector<GroupCaseShare> groups;
};

using CaseCounts = std::variant<std::vector<GroupCaseCount>, CaseShares>;

namespace detail {

inline constexpr double kProbabilitySlack = 1e-9;

inline double checked_rate(double raw, const GroupId& group) {
  if (raw > 1.0 + kProbabilitySlack) {
    throw Error(ErrorCode::RateExceedsOne,
                "estimated rate " + std::to_string(raw) + " for group '" + group.value + "'");
  }
  return raw < 0.0 ? 0.0 : (raw > 1.0 ? 1.0 : raw);
}

inline ExposureRates rates_from_counts(const std::vector<GroupCaseCount>& counts) {
  ExposureRates out;
  for (const auto& c : counts) {
    if (c.population <= 0) throw Error(ErrorCode::ZeroGroupProbability, "group '" + c.group.value + "'");
    if (c.infected < 0) throw Error(ErrorCode::NegativeCount, "infected count for '" + c.group.value + "'");
    if (c.infected > c.population) {
      throw Error(ErrorCode::RateExceedsOne, "infected exceeds population for '" + c.group.value + "'");
    }
    out.set(c.group, checked_rate(static_cast<double>(c.infected) / static_cast<double>(c.population), c.group));
  }
  return out;
}

inline ExposureRates rates_from_shares(const CaseShares& shares) {
  if (!(shares.exposed_probability >= 0.0 && shares.exposed_probability <= 1.0)) {
    throw Error(ErrorCode::RateOutOfRange, "P(E=1) outside [0, 1]");
  }
  double exposed_sum = 0.0;
  double population_sum = 0.0;
  for (const auto& g : shares.groups) {
    if (!(g.share_of_exposed >= 0.0 && g.share_of_exposed <= 1.0) ||
        !(g.share_of_population >= 0.0 && g.share_of_population <= 1.0)) {
      throw Error(ErrorCode::RateOutOfRange, "probability for group '" + g.group.value + "' outside [0, 1]");
    }
    exposed_sum += g.share_of_exposed;
    population_sum += g.share_of_population;
  }
  if (exposed_sum > 1.0 + kProbabilitySlack || population_sum > 1.0 + kProbabilitySlack) {
    throw Error(ErrorCode::InvalidArgument, "group shares sum above one");
  }

  ExposureRates out;
  for (const auto& g : shares.groups) {
    if (!(g.share_of_population > 0.0)) throw Error(ErrorCode::ZeroGroupProbability, "group '" + g.group.value + "'");
    // Bayes: P(E=1 | g) = P(g | E=1) P(E=1) / P(g)
    const double raw = g.share_of_exposed * shares.exposed_probability / g.share_of_population;
    out.set(g.group, checked_rate(raw, g.group));
  }
  return out;
}

}  // namespace detail

/// Per-group exposure rates from case data. The count form is the Bayes
/// quotient with P(g|E=1) = c_i / sum(c), P(E=1) = sum(c) / sum(n) and
/// P(g) = n_i / sum(n), which collapses to c_i / n_i.
inline ExposureRates estimate_exposure_rates(const CaseCounts& cases) {
  if (const auto* counts = std::get_if<std::vector<GroupCaseCount>>(&cases)) {
    return detail::rates_from_counts(*counts);
  }
  return detail::rates_from_shares(std::get<CaseShares>(cases));
}

/// Converts counts to the equivalent probability form.
inline CaseShares shares_from_counts(const std::vector<GroupCaseCount>& counts) {
  std::int64_t infected = 0;
  std::int64_t population = 0;
  for (const auto& c : counts) {
    infected += c.infected;
    population += c.population;
  }
  CaseShares shares;
  if (population <= 0) throw Error(ErrorCode::ZeroGroupProbability, "total population is zero");
  shares.exposed_probability = static_cast<double>(infected) / static_cast<double>(population);
  for (const auto& c : counts) {
    GroupCaseShare g;
    g.group = c.group;
    g.share_of_exposed = infected > 0 ? static_cast<double>(c.infected) / static_cast<double>(infected) : 0.0;
    g.share_of_population = static_cast<double>(c.population) / static_cast<double>(population);
    shares.groups.push_back(std::move(g));
  }
  return shares;
}

/// Restricts a rate table to the given groups in matrix order. Every group
/// must be present; extra entries are dropped.
inline ExposureRates select_rates(const ExposureRates& rates, const std::vector<GroupId>& groups) {
  ExposureRates out;
  for (const auto& g : groups) {
    auto r = rates.find(g);
    if (!r) throw Error(ErrorCode::MissingRate, "no exposure rate for group '" + g.value + "'");
    out.set(g, *r);
  }
  return out;
}

}  // namespace fairalloc

#endif  // FAIRALLOC_EXPOSURE_HPP
