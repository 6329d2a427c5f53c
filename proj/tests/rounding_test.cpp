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

#include "fairalloc/lp_builder.hpp"
#include "fairalloc/rounding.hpp"
#include "random_instances.hpp"

namespace {

using namespace fairalloc;

std::vector<std::int64_t> round_fixture(std::vector<double> x, std::int64_t budget,
                                        RoundingMode mode = RoundingMode::Balanced) {
  const auto out = round_allocation(oracle::fixture_a(budget), Allocation{std::move(x), AllocationKind::Fractional}, mode);
  return {out.amounts.begin(), out.amounts.end()};
}

using V = std::vector<std::int64_t>;

TEST(Rounding, AlreadyBalanced) { EXPECT_EQ(round_fixture({3.4, 6.6}, 10), (V{3, 7})); }

TEST(Rounding, FairOnlyOptimum) { EXPECT_EQ(round_fixture({38.0 / 3.0, 22.0 / 3.0}, 20), (V{13, 7})); }

TEST(Rounding, SurplusTieBrokenByRegionOrder) { EXPECT_EQ(round_fixture({10.6, 10.6}, 20), (V{10, 10})); }

TEST(Rounding, HalvesRoundAwayFromZero) {
  const std::vector<std::int64_t> pop{1, 1, 1};
  const std::vector<double> exp{1, 1, 1};
  EXPECT_EQ(round_to_budget(std::vector<double>{0.5, 1.5, 2.5}, 6, pop, exp, RoundingMode::Balanced), (V{1, 2, 3}));
}

TEST(Rounding, DeficitGoesToMostExposedFirst) {
  // r1 has 19 exposed, r2 has 11; both round down so one unit is missing.
  EXPECT_EQ(round_fixture({9.4, 9.4}, 19), (V{10, 9}));
  EXPECT_EQ(round_fixture({9.4, 9.4}, 19, RoundingMode::FairOnly), (V{10, 9}));
}

TEST(Rounding, ModesPickDifferentOrderings) {
  const std::vector<std::int64_t> pop{10, 50, 30};
  const std::vector<double> exposed{9, 1, 5};
  const std::vector<double> x{1.2, 1.2, 1.2};  // rounds to 3, budget 5 needs +2
  EXPECT_EQ(round_to_budget(x, 5, pop, exposed, RoundingMode::Balanced), (V{2, 1, 2}));
  EXPECT_EQ(round_to_budget(x, 5, pop, exposed, RoundingMode::DiverseOnly), (V{1, 2, 2}));
  EXPECT_EQ(round_to_budget(x, 5, pop, exposed, RoundingMode::FairOnly), (V{2, 1, 2}));
  // Surplus: rounds to 6, budget 4 needs -2.
  const std::vector<double> y{1.6, 1.6, 1.6};
  EXPECT_EQ(round_to_budget(y, 4, pop, exposed, RoundingMode::Balanced), (V{2, 1, 1}));
  EXPECT_EQ(round_to_budget(y, 4, pop, exposed, RoundingMode::FairOnly), (V{1, 2, 1}));
}

TEST(Rounding, SkipsZerosAndCycles) {
  const std::vector<std::int64_t> pop{100, 50, 10};
  const std::vector<double> exposed{1, 1, 1};
  // Rounded (0, 3, 4) = 7, budget 1: the most populated region is already at
  // zero, so the others lose units cycle by cycle.
  EXPECT_EQ(round_to_budget(std::vector<double>{0.2, 3.0, 4.0}, 1, pop, exposed, RoundingMode::Balanced),
            (V{0, 0, 1}));
  // Deficit larger than the region count.
  EXPECT_EQ(round_to_budget(std::vector<double>{0.0, 0.0, 0.0}, 7, pop, exposed, RoundingMode::DiverseOnly),
            (V{3, 2, 2}));
}

TEST(Rounding, Errors) {
  const std::vector<std::int64_t> pop{1};
  const std::vector<double> exposed{1};
  EXPECT_THROW(round_to_budget(std::vector<double>{-0.5}, 1, pop, exposed, RoundingMode::Balanced), Error);
  EXPECT_THROW(round_to_budget(std::vector<double>{NAN}, 1, pop, exposed, RoundingMode::Balanced), Error);
  EXPECT_THROW(round_to_budget(std::vector<double>{1.0}, -1, pop, exposed, RoundingMode::Balanced), Error);
  EXPECT_THROW(round_to_budget(std::vector<double>{1.0, 2.0}, 3, pop, exposed, RoundingMode::Balanced), Error);
}

TEST(Rounding, RandomInputsSumToBudget) {
  std::mt19937_64 rng(1000);
  for (int t = 0; t < 1000; ++t) {
    const auto m = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    std::vector<std::int64_t> pop(m);
    std::vector<double> exposed(m), x(m);
    for (std::size_t j = 0; j < m; ++j) {
      pop[j] = std::uniform_int_distribution<std::int64_t>(1, 10000)(rng);
      exposed[j] = std::uniform_real_distribution<double>(0.1, 1.0)(rng) * static_cast<double>(pop[j]);
      x[j] = std::uniform_real_distribution<double>(0.0, 50.0)(rng);
    }
    const auto budget = std::uniform_int_distribution<std::int64_t>(0, 60 * static_cast<std::int64_t>(m))(rng);
    for (auto mode : {RoundingMode::Balanced, RoundingMode::DiverseOnly, RoundingMode::FairOnly}) {
      const auto out = round_to_budget(x, budget, pop, exposed, mode);
      std::int64_t s = 0;
      for (auto v : out) {
        EXPECT_GE(v, 0);
        s += v;
      }
      EXPECT_EQ(s, budget);
      // Feeding the result back in is a no-op.
      const std::vector<double> again(out.begin(), out.end());
      EXPECT_EQ(round_to_budget(again, budget, pop, exposed, mode), out);
    }
  }
}

TEST(Rounding, DeviationBoundOnLpOptima) {
  std::mt19937_64 rng(55);
  for (int t = 0; t < 30; ++t) {
    const auto in = oracle::random_instance(rng);
    const auto r = solve_p2(in, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const auto& x = r.solution.allocation.amounts;
    std::int64_t nearest = 0;
    for (double v : x) nearest += std::llround(v);
    const auto m = static_cast<std::int64_t>(x.size());
    const auto residual = std::abs(in.budget - nearest);
    const auto out = round_allocation(in, r.solution.allocation);
    for (std::size_t j = 0; j < x.size(); ++j) {
      EXPECT_LE(std::abs(out.amounts[j] - x[j]), 1.0 + static_cast<double>((residual + m - 1) / m));
    }
  }
}

}  // namespace
