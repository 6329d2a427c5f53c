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

#ifndef FAIRALLOC_TUNER_HPP
#define FAIRALLOC_TUNER_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "fairalloc/lp_builder.hpp"
#include "fairalloc/metrics.hpp"

namespace fairalloc {

/// Gaps are compared against thresholds with this much absolute slack.
inline constexpr double kThresholdSlack = 1e-9;

inline bool within(double gap, double threshold) { return gap <= threshold + kThresholdSlack; }

struct TunerFeasible {
  Allocation allocation;  // fractional optimum at the accepting alpha
  GapReport gaps;
  double alpha = 0.0;
  std::size_t iterations = 0;
};

/// Both thresholds were violated at `alpha`; no alpha can satisfy them.
struct TunerInfeasible {
  double alpha = 0.0;
  double diversity_gap = 0.0;
  double fairness_gap = 0.0;
  std::size_t iterations = 0;
};

/// The interval shrank below tau without a verdict.
struct TunerExhausted {
  Allocation best_allocation;  // optimum at the last midpoint
  GapReport gaps;
  double alpha_low = 0.0;
  double alpha_high = 1.0;
  double last_alpha = 0.5;
  std::size_t iterations = 0;
};

using TunerResult = std::variant<TunerFeasible, TunerInfeasible, TunerExhausted>;

inline std::string_view outcome_name(const TunerResult& r) {
  switch (r.index()) {
    case 0: return "Feasible";
    case 1: return "Infeasible";
    default: return "ToleranceExhausted";
  }
}

inline std::size_t tuner_iterations(const TunerResult& r) {
  return std::visit([](const auto& v) { return v.iterations; }, r);
}

/// Upper bound on tune_alpha's iteration count for a given tau.
inline std::size_t max_tuner_iterations(double tau) {
  return static_cast<std::size_t>(std::ceil(std::log(tau) / std::log(0.75)));
}

/// Searches alpha for a P2 optimum with D(x) <= epsilon_d and F(x) <= epsilon_f.
///
/// Uses the monotonicity of the optimal gaps in alpha: F never increases and
/// D never decreases as alpha grows. Note the bound update moves each end
/// only half-way to the midpoint (alpha_l <- (alpha_l + alpha_m) / 2) instead
/// of all the way, so the interval shrinks by 3/4 per step, not 1/2.
inline TunerResult tune_alpha(const ProblemInstance& instance, const TradeoffConfig& cfg,
                              const SimplexOptions& options = {}) {
  TradeoffConfig checked = cfg;
  checked.alpha = 0.5;
  checked.validate();

  double lo = 0.0;
  double hi = 1.0;
  std::size_t iterations = 0;
  std::optional<P2Result> last;
  double last_alpha = 0.5;
  while (std::abs(hi - lo) >= cfg.tau) {
    const double mid = 0.5 * (lo + hi);
    ++iterations;
    last = solve_p2(instance, mid, options);
    last_alpha = mid;
    const bool diverse = within(last->gaps.max_diversity, cfg.epsilon_d);
    const bool fair = within(last->gaps.max_fairness, cfg.epsilon_f);
    if (diverse && fair) {
      return TunerFeasible{last->solution.allocation, last->gaps, mid, iterations};
    }
    if (!diverse && !fair) {
      return TunerInfeasible{mid, last->gaps.max_diversity, last->gaps.max_fairness, iterations};
    }
    if (diverse) {
      lo = 0.5 * (lo + mid);  // more weight on fairness
    } else {
      hi = 0.5 * (hi + mid);  // more weight on diversity
    }
  }
  TunerExhausted out;
  out.alpha_low = lo;
  out.alpha_high = hi;
  out.last_alpha = last_alpha;
  out.iterations = iterations;
  if (last) {
    out.best_allocation = last->solution.allocation;
    out.gaps = last->gaps;
  }
  return out;
}

/// One grid point of an alpha scan.
struct AlphaSample {
  double alpha = 0.0;
  double diversity = 0.0;
  double fairness = 0.0;
  bool feasible = false;
};

struct AlphaRange {
  std::optional<std::pair<double, double>> range;  // empty when no grid alpha works
  bool contiguous = true;
  std::vector<AlphaSample> samples;
};

/// The grid {0, step, 2 step, ..., 1}; 1 is always included.
inline std::vector<double> alpha_grid(double step) {
  if (!(step > 0.0 && step <= 0.1 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "grid step must lie in (0, 0.1]");
  }
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) grid.push_back(std::min(1.0, static_cast<double>(k) * step));
  if (grid.back() < 1.0 - 1e-12) grid.push_back(1.0);
  grid.back() = 1.0;
  return grid;
}

/// Optimal gaps along the alpha grid.
inline std::vector<AlphaSample> alpha_sweep(const ProblemInstance& instance, double step,
                                            const SimplexOptions& options = {}) {
  std::vector<AlphaSample> out;
  for (double a : alpha_grid(step)) {
    const auto r = solve_p2(instance, a, options);
    out.push_back({a, r.gaps.max_diversity, r.gaps.max_fairness, false});
  }
  return out;
}

/// Smallest and largest grid alpha whose optimum meets both thresholds.
inline AlphaRange feasible_alpha_range(const ProblemInstance& instance, double epsilon_d, double epsilon_f,
                                       double grid_step, const SimplexOptions& options = {}) {
  AlphaRange out;
  out.samples = alpha_sweep(instance, grid_step, options);
  std::optional<std::size_t> first, last;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    auto& s = out.samples[k];
    s.feasible = within(s.diversity, epsilon_d) && within(s.fairness, epsilon_f);
    if (s.feasible) {
      if (!first) first = k;
      last = k;
    }
  }
  if (first) {
    out.range = std::make_pair(out.samples[*first].alpha, out.samples[*last].alpha);
    for (std::size_t k = *first; k <= *last; ++k) {
      if (!out.samples[k].feasible) out.contiguous = false;
    }
  }
  return out;
}

/// Comparison models evaluated in an epsilon sweep, in reporting order.
enum class SweepModel { DiverseOnly, FairOnly, HalfAlpha, FairDiverse };

inline constexpr std::array<SweepModel, 4> kSweepModels = {SweepModel::DiverseOnly, SweepModel::FairOnly,
                                                           SweepModel::HalfAlpha, SweepModel::FairDiverse};

inline std::string_view to_string(SweepModel m) {
  switch (m) {
    case SweepModel::DiverseOnly: return "DiverseOnly";
    case SweepModel::FairOnly: return "FairOnly";
    case SweepModel::HalfAlpha: return "Alpha0.5";
    case SweepModel::FairDiverse: return "FairDiverse";
  }
  return "Unknown";
}

struct SweepCell {
  double epsilon_d = 0.0;
  double epsilon_f = 0.0;
  std::array<bool, 4> feasible{};      // indexed like kSweepModels
  std::optional<SweepModel> first;     // first model in reporting order that satisfies the cell
};

/// Which models satisfy each (epsilon_d, epsilon_f) pair.
///
/// The three fixed-weight optima do not depend on the thresholds and are
/// solved once; the tuned model runs tune_alpha per cell.
inline std::vector<SweepCell> epsilon_sweep(const ProblemInstance& instance, const std::vector<double>& eps_d_grid,
                                            const std::vector<double>& eps_f_grid, double tau = 1e-3,
                                            const SimplexOptions& options = {}) {
  if (eps_d_grid.empty() || eps_f_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty epsilon grid");
  for (const auto* grid : {&eps_d_grid, &eps_f_grid}) {
    for (double e : *grid) {
      if (!(e >= 0.0 && e <= 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon outside [0, 1]");
    }
  }
  const std::array<P2Result, 3> fixed = {solve_p2(instance, 0.0, options), solve_p2(instance, 1.0, options),
                                         solve_p2(instance, 0.5, options)};
  std::vector<SweepCell> cells;
  for (double ed : eps_d_grid) {
    for (double ef : eps_f_grid) {
      SweepCell cell;
      cell.epsilon_d = ed;
      cell.epsilon_f = ef;
      for (std::size_t k = 0; k < fixed.size(); ++k) {
        cell.feasible[k] = within(fixed[k].gaps.max_diversity, ed) && within(fixed[k].gaps.max_fairness, ef);
      }
      TradeoffConfig cfg{0.5, ed, ef, tau};
      cell.feasible[3] = std::holds_alternative<TunerFeasible>(tune_alpha(instance, cfg, options));
      for (std::size_t k = 0; k < kSweepModels.size(); ++k) {
        if (cell.feasible[k]) {
          cell.first = kSweepModels[k];
          break;
        }
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace fairalloc

#endif  // FAIRALLOC_TUNER_HPP
