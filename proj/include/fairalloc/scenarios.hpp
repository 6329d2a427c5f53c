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

#ifndef FAIRALLOC_SCENARIOS_HPP
#define FAIRALLOC_SCENARIOS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairalloc/format.hpp"
#include "fairalloc/lp_builder.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/rounding.hpp"
#include "fairalloc/tuner.hpp"

namespace fairalloc {

enum class ScenarioKind { DiverseOnly, FairOnly, FixedAlpha, FairDiverseTuned };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::DiverseOnly;
  double alpha = 0.5;       // FixedAlpha only
  double epsilon_d = 0.0;   // FairDiverseTuned only
  double epsilon_f = 0.0;
  double tau = 1e-3;
  double grid_step = 0.01;

  static ScenarioSpec diverse_only() { return {ScenarioKind::DiverseOnly}; }
  static ScenarioSpec fair_only() { return {ScenarioKind::FairOnly}; }
  static ScenarioSpec fixed_alpha(double a) {
    ScenarioSpec s{ScenarioKind::FixedAlpha};
    s.alpha = a;
    return s;
  }
  static ScenarioSpec fair_diverse(double eps_d, double eps_f, double tau = 1e-3) {
    ScenarioSpec s{ScenarioKind::FairDiverseTuned};
    s.epsilon_d = eps_d;
    s.epsilon_f = eps_f;
    s.tau = tau;
    return s;
  }

  std::string name() const {
    switch (kind) {
      case ScenarioKind::DiverseOnly: return "DiverseOnly";
      case ScenarioKind::FairOnly: return "FairOnly";
      case ScenarioKind::FixedAlpha: return "Alpha" + shortest(alpha);
      case ScenarioKind::FairDiverseTuned: return "FairDiverse";
    }
    return "Unknown";
  }
};

struct ScenarioResult {
  ScenarioSpec spec;
  double alpha = 0.0;                                   // weight of the final solve
  std::optional<std::pair<double, double>> alpha_range;  // tuned model only
  Allocation fractional;
  GapReport fractional_gaps;
  Allocation allocation;  // integral, sums to the budget
  GapReport gaps;         // on the integral allocation
  bool thresholds_met = true;       // tuned model, before rounding
  bool rounding_violation = false;  // tuned model, a gap crossed its threshold after rounding
};

namespace detail {

inline RoundingMode rounding_mode_for(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::DiverseOnly: return RoundingMode::DiverseOnly;
    case ScenarioKind::FairOnly: return RoundingMode::FairOnly;
    default: return RoundingMode::Balanced;
  }
}

inline bool meets(const GapReport& g, const ScenarioSpec& s) {
  return within(g.max_diversity, s.epsilon_d) && within(g.max_fairness, s.epsilon_f);
}

}  // namespace detail

/// LP solve, rounding and gap evaluation for one comparison model.
///
/// The tuned model runs the alpha search, then solves at the midpoint of the
/// feasible grid range (step 0.01 by default).
inline ScenarioResult run_scenario(const ProblemInstance& instance, const ScenarioSpec& spec,
                                   const SimplexOptions& options = {}) {
  ScenarioResult out;
  out.spec = spec;
  std::optional<P2Result> solved;

  switch (spec.kind) {
    case ScenarioKind::DiverseOnly:
      solved = solve_p2(instance, 0.0, options);
      break;
    case ScenarioKind::FairOnly:
      solved = solve_p2(instance, 1.0, options);
      break;
    case ScenarioKind::FixedAlpha:
      solved = solve_p2(instance, spec.alpha, options);
      break;
    case ScenarioKind::FairDiverseTuned: {
      const TradeoffConfig cfg{0.5, spec.epsilon_d, spec.epsilon_f, spec.tau};
      const auto tuned = tune_alpha(instance, cfg, options);
      if (const auto* bad = std::get_if<TunerInfeasible>(&tuned)) {
        throw Error(ErrorCode::TunerInfeasible,
                    "both thresholds violated at alpha " + shortest(bad->alpha));
      }
      const auto range = feasible_alpha_range(instance, spec.epsilon_d, spec.epsilon_f, spec.grid_step, options);
      if (range.range) {
        out.alpha_range = range.range;
        const double mid = 0.5 * (range.range->first + range.range->second);
        solved = solve_p2(instance, mid, options);
        if (!detail::meets(solved->gaps, spec)) {
          // Fall back to the feasible grid point nearest the midpoint.
          const AlphaSample* best = nullptr;
          for (const auto& s : range.samples) {
            if (s.feasible && (!best || std::abs(s.alpha - mid) < std::abs(best->alpha - mid))) best = &s;
          }
          solved = solve_p2(instance, best->alpha, options);
        }
      } else if (const auto* ok = std::get_if<TunerFeasible>(&tuned)) {
        // The grid is coarser than the feasible window the search found.
        solved = solve_p2(instance, ok->alpha, options);
      } else {
        throw Error(ErrorCode::TunerInfeasible, "no alpha meets both thresholds");
      }
      out.thresholds_met = detail::meets(solved->gaps, spec);
      break;
    }
  }

  out.alpha = solved->alpha;
  out.fractional = solved->solution.allocation;
  out.fractional_gaps = solved->gaps;
  out.allocation = round_allocation(instance, out.fractional, detail::rounding_mode_for(spec.kind));
  out.gaps = evaluate_gaps(instance, out.allocation);
  if (spec.kind == ScenarioKind::FairDiverseTuned) out.rounding_violation = !detail::meets(out.gaps, spec);
  return out;
}

struct ReportRow {
  RegionId region;
  std::int64_t population = 0;
  double exposed = 0.0;
  std::vector<double> allocations;  // one per scenario, report order
};

struct ComparisonReport {
  std::int64_t budget = 0;
  std::vector<ScenarioResult> scenarios;
  std::vector<ReportRow> rows;  // top-K regions by population, descending
  std::optional<double> price_of_fairness;

  std::vector<std::string> scenario_names() const {
    std::vector<std::string> names;
    for (const auto& s : scenarios) names.push_back(s.spec.name());
    return names;
  }
};

inline constexpr std::size_t kDefaultTopRegions = 15;

/// Report rows for all regions, most populated first (ties by region order).
inline std::vector<ReportRow> report_rows(const ProblemInstance& instance, const std::vector<ScenarioResult>& scenarios,
                                          std::size_t top_k) {
  const auto summary = summarize(instance);
  std::vector<std::size_t> order(instance.matrix.region_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return summary.region_population[a] > summary.region_population[b];
  });
  if (order.size() > top_k) order.resize(top_k);

  std::vector<ReportRow> rows;
  for (auto j : order) {
    ReportRow row;
    row.region = instance.matrix.regions()[j];
    row.population = summary.region_population[j];
    row.exposed = summary.exposed_population[j];
    for (const auto& s : scenarios) row.allocations.push_back(s.allocation.amounts[j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Runs every scenario and assembles the comparison table. The price of
/// fairness is F(Diverse-only) / F(Fair-Diverse) on the integral allocations
/// and is present only when both models were requested.
inline ComparisonReport compare(const ProblemInstance& instance, const std::vector<ScenarioSpec>& specs,
                                std::size_t top_k = kDefaultTopRegions, const SimplexOptions& options = {}) {
  if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "at least one scenario is required");
  ComparisonReport report;
  report.budget = instance.budget;
  for (const auto& spec : specs) report.scenarios.push_back(run_scenario(instance, spec, options));
  report.rows = report_rows(instance, report.scenarios, top_k);

  const ScenarioResult* diverse = nullptr;
  const ScenarioResult* tuned = nullptr;
  for (const auto& s : report.scenarios) {
    if (s.spec.kind == ScenarioKind::DiverseOnly && !diverse) diverse = &s;
    if (s.spec.kind == ScenarioKind::FairDiverseTuned && !tuned) tuned = &s;
  }
  if (diverse && tuned) report.price_of_fairness = price_of_fairness(diverse->gaps.max_fairness, tuned->gaps.max_fairness);
  return report;
}

/// The four models of the comparison tables.
inline std::vector<ScenarioSpec> default_scenarios(double epsilon_d, double epsilon_f, double tau = 1e-3) {
  return {ScenarioSpec::fixed_alpha(0.5), ScenarioSpec::fair_diverse(epsilon_d, epsilon_f, tau),
          ScenarioSpec::diverse_only(), ScenarioSpec::fair_only()};
}

}  // namespace fairalloc

#endif  // FAIRALLOC_SCENARIOS_HPP
