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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fairalloc/tuner.hpp"
#include "random_instances.hpp"

namespace {

using namespace fairalloc;

TEST(Tuner, VacuousThresholdsAcceptFirstMidpoint) {
  const auto r = tune_alpha(oracle::fixture_a(), {0.5, 1.0, 1.0, 1e-3});
  const auto* ok = std::get_if<TunerFeasible>(&r);
  ASSERT_NE(ok, nullptr);
  EXPECT_DOUBLE_EQ(ok->alpha, 0.5);
  EXPECT_EQ(ok->iterations, 1u);
  EXPECT_LE(ok->gaps.max_diversity, 0.21);
  EXPECT_LE(ok->gaps.max_fairness, 0.21);
}

TEST(Tuner, ZeroThresholdsAreNeverFeasibleOnFixtureA) {
  const auto r = tune_alpha(oracle::fixture_a(), {0.5, 0.0, 0.0, 1e-3});
  EXPECT_FALSE(std::holds_alternative<TunerFeasible>(r));
  EXPECT_LE(tuner_iterations(r), max_tuner_iterations(1e-3));
  if (const auto* ex = std::get_if<TunerExhausted>(&r)) {
    EXPECT_LT(ex->alpha_high - ex->alpha_low, 1e-3);
    EXPECT_EQ(outcome_name(r), "ToleranceExhausted");
  }
}

TEST(Tuner, BothViolatedIsInfeasible) {
  // First seeded instance whose half-weight optimum leaves both gaps positive.
  std::mt19937_64 rng(108);
  ProblemInstance in;
  for (int t = 0; t < 100; ++t) {
    in = oracle::random_instance(rng);
    const auto half = solve_p2(in, 0.5);
    if (half.gaps.max_diversity > 1e-6 && half.gaps.max_fairness > 1e-6) break;
  }
  const auto half = solve_p2(in, 0.5);
  ASSERT_GT(half.gaps.max_diversity, 1e-6);
  ASSERT_GT(half.gaps.max_fairness, 1e-6);
  const auto r = tune_alpha(in, {0.5, 0.0, 0.0, 1e-3});
  const auto* bad = std::get_if<TunerInfeasible>(&r);
  ASSERT_NE(bad, nullptr);
  EXPECT_DOUBLE_EQ(bad->alpha, 0.5);
  EXPECT_EQ(bad->iterations, 1u);
  EXPECT_EQ(outcome_name(r), "Infeasible");
}

TEST(Tuner, IterationBound) {
  for (double tau : {0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const auto r = tune_alpha(oracle::fixture_a(), {0.5, 0.0, 0.0, tau});
    EXPECT_LE(tuner_iterations(r), max_tuner_iterations(tau)) << "tau " << tau;
  }
  EXPECT_EQ(max_tuner_iterations(1e-3), 25u);
}

TEST(Tuner, InvalidConfig) {
  EXPECT_THROW(tune_alpha(oracle::fixture_a(), {0.5, -0.1, 0.1, 1e-3}), Error);
  EXPECT_THROW(tune_alpha(oracle::fixture_a(), {0.5, 0.1, 0.1, 0.0}), Error);
}

TEST(Tuner, FeasibleResultsPassReevaluation) {
  std::mt19937_64 rng(64);
  for (int t = 0; t < 20; ++t) {
    const auto in = oracle::random_instance(rng);
    const auto lo = solve_p2(in, 0.0).gaps;
    const auto hi = solve_p2(in, 1.0).gaps;
    // Thresholds between the endpoint gaps exercise every branch.
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double ed = lo.max_diversity + u * (hi.max_diversity - lo.max_diversity);
    const double ef = hi.max_fairness + u * (lo.max_fairness - hi.max_fairness);
    const auto r = tune_alpha(in, {0.5, std::min(1.0, ed), std::min(1.0, ef), 1e-3});
    EXPECT_LE(tuner_iterations(r), max_tuner_iterations(1e-3));
    if (const auto* ok = std::get_if<TunerFeasible>(&r)) {
      const auto g = evaluate_gaps(in, ok->allocation);
      EXPECT_TRUE(within(g.max_diversity, ed));
      EXPECT_TRUE(within(g.max_fairness, ef));
    }
  }
}

TEST(AlphaGrid, StepsAndEndpoints) {
  const auto g = alpha_grid(0.1);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_EQ(alpha_grid(0.01).size(), 101u);
  EXPECT_EQ(alpha_grid(0.03).back(), 1.0);
  EXPECT_THROW(alpha_grid(0.2), Error);
  EXPECT_THROW(alpha_grid(0.0), Error);
}

TEST(FeasibleRange, FixtureAExamples) {
  const auto in = oracle::fixture_a();
  const auto all = feasible_alpha_range(in, 1.0, 1.0, 0.1);
  ASSERT_TRUE(all.range.has_value());
  EXPECT_DOUBLE_EQ(all.range->first, 0.0);
  EXPECT_DOUBLE_EQ(all.range->second, 1.0);

  EXPECT_FALSE(feasible_alpha_range(in, 0.0, 0.0, 0.1).range.has_value());

  const auto mid = feasible_alpha_range(in, 0.05, 0.05, 0.01);
  ASSERT_TRUE(mid.range.has_value());
  EXPECT_TRUE(mid.contiguous);
}

TEST(Monotonicity, OptimalGapsAlongAlpha) {
  std::mt19937_64 rng(303);
  std::vector<ProblemInstance> instances{oracle::fixture_a()};
  for (int t = 0; t < 20; ++t) instances.push_back(oracle::random_instance(rng, {1, 20, 1, 5, 1000}));
  for (const auto& in : instances) {
    const auto sweep = alpha_sweep(in, 0.1);
    for (std::size_t k = 1; k < sweep.size(); ++k) {
      EXPECT_LE(sweep[k].fairness, sweep[k - 1].fairness + 1e-7);
      EXPECT_GE(sweep[k].diversity, sweep[k - 1].diversity - 1e-7);
    }
  }
}

TEST(EarlyExit, NeverContradictsGridScan) {
  std::mt19937_64 rng(808);
  for (int t = 0; t < 10; ++t) {
    const auto in = oracle::random_instance(rng);
    const auto samples = alpha_sweep(in, 0.01);
    for (int p = 0; p < 5; ++p) {
      const double ed = std::uniform_real_distribution<double>(0.0, samples.back().diversity)(rng);
      const double ef = std::uniform_real_distribution<double>(0.0, samples.front().fairness)(rng);
      const auto r = tune_alpha(in, {0.5, ed, ef, 1e-3});
      if (!std::holds_alternative<TunerInfeasible>(r)) continue;
      for (const auto& s : samples) {
        EXPECT_FALSE(within(s.diversity, ed) && within(s.fairness, ef)) << "alpha " << s.alpha;
      }
    }
  }
}

TEST(EpsilonSweep, CornerCells) {
  const auto cells = epsilon_sweep(oracle::fixture_a(), {0.0, 1.0}, {0.0, 1.0});
  ASSERT_EQ(cells.size(), 4u);
  const auto& zero = cells[0];
  const auto& one = cells[3];
  EXPECT_EQ(zero.epsilon_d, 0.0);
  for (bool f : zero.feasible) EXPECT_FALSE(f);
  EXPECT_FALSE(zero.first.has_value());
  for (bool f : one.feasible) EXPECT_TRUE(f);
  EXPECT_EQ(one.first, SweepModel::DiverseOnly);
  EXPECT_THROW(epsilon_sweep(oracle::fixture_a(), {}, {0.1}), Error);
  EXPECT_THROW(epsilon_sweep(oracle::fixture_a(), {1.5}, {0.1}), Error);
}

}  // namespace
