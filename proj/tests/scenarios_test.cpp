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


#include <random>

#include <gtest/gtest.h>

#include "brute_force_gaps.hpp"
#include "fairalloc/scenarios.hpp"
#include "random_instances.hpp"

namespace {

using namespace fairalloc;

double sum(const Allocation& a) { return a.total(); }

TEST(Scenario, DiverseOnlyOnFixtureA) {
  const auto r = run_scenario(oracle::fixture_a(), ScenarioSpec::diverse_only());
  EXPECT_EQ(r.allocation.amounts, (std::vector<double>{10, 10}));
  EXPECT_EQ(r.allocation.kind, AllocationKind::Integral);
  EXPECT_NEAR(r.gaps.max_diversity, 0.0, 1e-12);
  EXPECT_NEAR(r.gaps.max_fairness, 0.2041467, 5e-8);
  EXPECT_EQ(r.spec.name(), "DiverseOnly");
}

TEST(Scenario, FairOnlyOnFixtureA) {
  const auto r = run_scenario(oracle::fixture_a(), ScenarioSpec::fair_only());
  EXPECT_NEAR(r.fractional.amounts[0], 38.0 / 3.0, 1e-6);
  EXPECT_EQ(r.allocation.amounts, (std::vector<double>{13, 7}));
  const auto ref = oracle::brute_force_gaps(oracle::to_raw(oracle::fixture_a()), {13, 7});
  EXPECT_NEAR(r.gaps.max_fairness, ref.max_fairness, 1e-12);
  EXPECT_GT(r.gaps.max_fairness, 0.0);
}

TEST(Scenario, HalfAlphaOnFixtureA) {
  const auto r = run_scenario(oracle::fixture_a(), ScenarioSpec::fixed_alpha(0.5));
  EXPECT_EQ(r.spec.name(), "Alpha0.5");
  EXPECT_GT(r.gaps.max_diversity, 0.0);
  EXPECT_GT(r.gaps.max_fairness, 0.0);
  EXPECT_LT(r.gaps.max_fairness, 0.2041467);
  EXPECT_DOUBLE_EQ(sum(r.allocation), 20.0);
}

TEST(Scenario, FixedAlphaOutOfRange) {
  EXPECT_THROW(run_scenario(oracle::fixture_a(), ScenarioSpec::fixed_alpha(1.2)), Error);
}

TEST(Scenario, TunedUsesGridMidpoint) {
  const auto r = run_scenario(oracle::fixture_a(), ScenarioSpec::fair_diverse(0.05, 0.05));
  ASSERT_TRUE(r.alpha_range.has_value());
  EXPECT_NEAR(r.alpha, 0.5 * (r.alpha_range->first + r.alpha_range->second), 1e-12);
  EXPECT_TRUE(r.thresholds_met);
  EXPECT_TRUE(within(r.fractional_gaps.max_diversity, 0.05));
  EXPECT_TRUE(within(r.fractional_gaps.max_fairness, 0.05));
  EXPECT_EQ(r.spec.name(), "FairDiverse");
}

TEST(Scenario, TunedUnreachableThrows) {
  try {
    run_scenario(oracle::fixture_a(), ScenarioSpec::fair_diverse(0.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TunerInfeasible);
  }
}

TEST(Compare, FourModelsOnFixtureA) {
  const auto in = oracle::fixture_a();
  const auto report = compare(in, default_scenarios(0.05, 0.05));
  ASSERT_EQ(report.rows.size(), 2u);
  ASSERT_EQ(report.scenarios.size(), 4u);
  EXPECT_EQ(report.scenario_names(), (std::vector<std::string>{"Alpha0.5", "FairDiverse", "DiverseOnly", "FairOnly"}));
  for (std::size_t k = 0; k < 4; ++k) {
    double col = 0.0;
    for (const auto& row : report.rows) col += row.allocations[k];
    EXPECT_DOUBLE_EQ(col, 20.0);
  }
  ASSERT_TRUE(report.price_of_fairness.has_value());
  EXPECT_DOUBLE_EQ(*report.price_of_fairness,
                   price_of_fairness(report.scenarios[2].gaps.max_fairness, report.scenarios[1].gaps.max_fairness));
}

TEST(Compare, SingleScenarioHasNoPof) {
  const auto report = compare(oracle::fixture_a(), {ScenarioSpec::diverse_only()});
  EXPECT_FALSE(report.price_of_fairness.has_value());
  EXPECT_THROW(compare(oracle::fixture_a(), {}), Error);
}

TEST(Compare, RowsSortedAndTruncated) {
  std::mt19937_64 rng(12);
  const auto in = oracle::random_instance(rng, {25, 30, 2, 4, 1000});
  const auto report = compare(in, {ScenarioSpec::diverse_only(), ScenarioSpec::fair_only()});
  ASSERT_EQ(report.rows.size(), kDefaultTopRegions);
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    EXPECT_GE(report.rows[k - 1].population, report.rows[k].population);
  }
  for (const auto& s : report.scenarios) EXPECT_DOUBLE_EQ(sum(s.allocation), static_cast<double>(in.budget));
}

TEST(Compare, FractionalOrderingAcrossModels) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const auto in = oracle::random_instance(rng);
    const auto d = run_scenario(in, ScenarioSpec::diverse_only());
    const auto h = run_scenario(in, ScenarioSpec::fixed_alpha(0.5));
    const auto f = run_scenario(in, ScenarioSpec::fair_only());
    EXPECT_LE(f.fractional_gaps.max_fairness, h.fractional_gaps.max_fairness + 1e-7);
    EXPECT_LE(h.fractional_gaps.max_fairness, d.fractional_gaps.max_fairness + 1e-7);
    EXPECT_LE(d.fractional_gaps.max_diversity, h.fractional_gaps.max_diversity + 1e-7);
    EXPECT_LE(h.fractional_gaps.max_diversity, f.fractional_gaps.max_diversity + 1e-7);
  }
}

}  // namespace
