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

#ifndef FAIRALLOC_LP_BUILDER_HPP
#define FAIRALLOC_LP_BUILDER_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fairalloc/domain.hpp"
#include "fairalloc/lp.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/simplex.hpp"

namespace fairalloc {

/// Trade-off weight and thresholds for the fair-and-diverse search.
struct TradeoffConfig {
  double alpha = 0.5;
  double epsilon_d = 0.0;
  double epsilon_f = 0.0;
  double tau = 1e-3;

  void validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(alpha)) throw Error(ErrorCode::AlphaOutOfRange, "alpha " + std::to_string(alpha));
    if (!in_unit(epsilon_d) || !in_unit(epsilon_f)) {
      throw Error(ErrorCode::InvalidArgument, "thresholds must lie in [0, 1]");
    }
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  }
};

/// The weighted-sum program together with its column layout.
///
/// Columns are x_1..x_M followed by the two auxiliary bounds A_D and A_F.
/// Rows come in +/- pairs: one pair per region bounding |D_j(x)| by A_D,
/// then one pair per group bounding |F_i(x)| by A_F. The single equality
/// row spends the whole budget.
struct P2Problem {
  LpProblem lp;
  std::size_t regions = 0;
  std::size_t groups = 0;
  double alpha = 0.0;

  std::size_t diversity_bound_column() const noexcept { return regions; }
  std::size_t fairness_bound_column() const noexcept { return regions + 1; }
};

inline P2Problem build_p2(const ProblemInstance& instance, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  const auto summary = summarize(instance);
  const auto coeffs = gap_coefficients(instance, summary);
  const std::size_t M = instance.matrix.region_count();
  const std::size_t I = instance.matrix.group_count();

  P2Problem p;
  p.regions = M;
  p.groups = I;
  p.alpha = alpha;
  auto& lp = p.lp;
  lp.objective.assign(M + 2, 0.0);
  lp.objective[M] = 1.0 - alpha;
  lp.objective[M + 1] = alpha;
  for (const auto& r : instance.matrix.regions()) lp.variable_names.push_back("x_" + r.value);
  lp.variable_names.emplace_back("A_D");
  lp.variable_names.emplace_back("A_F");

  auto add_abs_pair = [&](const std::vector<double>& affine, std::size_t bound_col) {
    std::vector<double> plus(M + 2, 0.0), minus(M + 2, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
      plus[j] = affine[j];
      minus[j] = -affine[j];
    }
    plus[bound_col] = -1.0;
    minus[bound_col] = -1.0;
    lp.add_ub(std::move(plus), 0.0);
    lp.add_ub(std::move(minus), 0.0);
  };
  for (std::size_t j = 0; j < M; ++j) add_abs_pair(coeffs.diversity[j], M);
  for (std::size_t i = 0; i < I; ++i) add_abs_pair(coeffs.fairness[i], M + 1);

  std::vector<double> capacity(M + 2, 0.0);
  for (std::size_t j = 0; j < M; ++j) capacity[j] = 1.0;
  lp.add_eq(std::move(capacity), static_cast<double>(instance.budget));
  return p;
}

/// Fractional allocation read off an optimal P2 vertex.
struct P2Allocation {
  Allocation allocation;
  double diversity_bound = 0.0;  // A_D
  double fairness_bound = 0.0;   // A_F
};

/// Tolerance for the auxiliary bounds dominating the measured gaps.
inline constexpr double kBoundSlack = 1e-7;

inline P2Allocation extract_allocation(const ProblemInstance& instance, const P2Problem& problem,
                                       const LpSolution& solution) {
  if (solution.status != LpStatus::Optimal) {
    throw Error(ErrorCode::StatusNotOptimal, "P2 solve ended " + std::string(to_string(solution.status)));
  }
  if (solution.primal.size() != problem.regions + 2) {
    throw Error(ErrorCode::DimensionMismatch, "solution does not belong to this problem");
  }
  P2Allocation out;
  out.allocation.kind = AllocationKind::Fractional;
  out.allocation.amounts.assign(solution.primal.begin(), solution.primal.begin() + static_cast<std::ptrdiff_t>(problem.regions));
  for (double& v : out.allocation.amounts) v = std::max(0.0, v);
  out.diversity_bound = solution.primal[problem.diversity_bound_column()];
  out.fairness_bound = solution.primal[problem.fairness_bound_column()];

  const auto gaps = evaluate_gaps(instance, out.allocation);
  if (out.diversity_bound < gaps.max_diversity - kBoundSlack || out.fairness_bound < gaps.max_fairness - kBoundSlack) {
    throw Error(ErrorCode::Internal, "auxiliary bounds fall below the measured gaps");
  }
  return out;
}

/// Everything a caller usually wants from one weighted solve.
struct P2Result {
  P2Allocation solution;
  GapReport gaps;  // measured on the fractional optimum
  LpSolution lp;
  double alpha = 0.0;
};

inline P2Result solve_p2(const ProblemInstance& instance, double alpha, const SimplexOptions& options = {}) {
  const auto problem = build_p2(instance, alpha);
  P2Result r;
  r.alpha = alpha;
  r.lp = solve(problem.lp, options);
  if (r.lp.status != LpStatus::Optimal) {
    throw Error(ErrorCode::StatusNotOptimal, "P2 solve ended " + std::string(to_string(r.lp.status)));
  }
  r.solution = extract_allocation(instance, problem, r.lp);
  r.gaps = evaluate_gaps(instance, r.solution.allocation);
  return r;
}

}  // namespace fairalloc

#endif  // FAIRALLOC_LP_BUILDER_HPP
