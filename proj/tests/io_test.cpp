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


#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fairalloc/io.hpp"
#include "random_instances.hpp"

namespace {

using namespace fairalloc;
namespace fs = std::filesystem;

const fs::path kFixtures = FAIRALLOC_FIXTURE_DIR;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Internal;
}

TEST(PopulationCsv, FixtureA) {
  const auto m = io::read_population_csv(kFixtures / "fixture_a" / "population.csv");
  const auto ref = oracle::fixture_a().matrix;
  EXPECT_EQ(m.groups(), ref.groups());
  EXPECT_EQ(m.regions(), ref.regions());
  EXPECT_TRUE(std::equal(m.counts().begin(), m.counts().end(), ref.counts().begin(), ref.counts().end()));
}

TEST(PopulationCsv, Errors) {
  std::istringstream dup("region,a\nr1,1\nr1,2\n");
  EXPECT_EQ(code_of([&] { io::parse_population_csv(dup); }), ErrorCode::DuplicateRegion);

  std::istringstream frac("region,a,b\nr1,9.5,1\n");
  try {
    io::parse_population_csv(frac, "pop.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("9.5"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("pop.csv"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("a"), std::string::npos);
  }

  std::istringstream neg("region,a\nr1,-3\n");
  EXPECT_EQ(code_of([&] { io::parse_population_csv(neg); }), ErrorCode::NegativeCell);

  std::istringstream ragged("region,a,b\nr1,3\n");
  EXPECT_EQ(code_of([&] { io::parse_population_csv(ragged); }), ErrorCode::ParseError);

  std::istringstream dup_group("region,a,a\nr1,3,4\n");
  EXPECT_EQ(code_of([&] { io::parse_population_csv(dup_group); }), ErrorCode::DuplicateGroup);
}

TEST(PopulationCsv, QuotedFieldsAndCrlf) {
  std::istringstream in("region,\"Two or more, race\",b\r\n\"60629\",5,6\r\n");
  const auto m = io::parse_population_csv(in);
  EXPECT_EQ(m.groups()[0].value, "Two or more, race");
  EXPECT_EQ(m.regions()[0].value, "60629");
  EXPECT_EQ(m.count(1, 0), 6);
}

TEST(ExposureCsv, ShippedCityTables) {
  const auto chicago = io::read_exposure_csv(kFixtures / "rates" / "chicago.csv");
  EXPECT_EQ(chicago.find({"Female"}).value(), 0.058617);
  const auto nyc = io::read_exposure_csv(kFixtures / "rates" / "new_york.csv");
  EXPECT_EQ(nyc.find({"Age_75+"}).value(), 0.173563);
  const auto baltimore = io::read_exposure_csv(kFixtures / "rates" / "baltimore.csv");
  EXPECT_GT(baltimore.size(), 0u);
  for (double r : baltimore.rates) {
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(ExposureCsv, Errors) {
  std::istringstream high("group,rate\ng,1.5\n");
  EXPECT_EQ(code_of([&] { io::parse_exposure_csv(high); }), ErrorCode::RateOutOfRange);
  std::istringstream bad("group,rate\ng,abc\n");
  EXPECT_EQ(code_of([&] { io::parse_exposure_csv(bad); }), ErrorCode::ParseError);
  std::istringstream header("grp,rate\ng,0.1\n");
  EXPECT_EQ(code_of([&] { io::parse_exposure_csv(header); }), ErrorCode::ParseError);
}

TEST(CaseCsv, BothForms) {
  const auto counts = io::read_case_counts_csv(kFixtures / "fixture_a" / "cases.csv");
  const auto rates = estimate_exposure_rates(counts);
  EXPECT_DOUBLE_EQ(rates.find({"gA"}).value(), 0.2);

  std::istringstream shares("group,p_group_given_exposed,p_group\ng,0.8,0.2\n");
  const auto r = estimate_exposure_rates(io::parse_case_counts_csv(shares, "<s>", 0.05));
  EXPECT_NEAR(r.find({"g"}).value(), 0.2, 1e-15);

  std::istringstream missing_p("group,p_group_given_exposed,p_group\ng,0.8,0.2\n");
  EXPECT_THROW(io::parse_case_counts_csv(missing_p), Error);
}

TEST(LoadInstance, RatesMayCoverExtraGroups) {
  const auto tmp = fs::temp_directory_path() / "fairalloc_io_extra_rates.csv";
  {
    std::ofstream out(tmp);
    out << "group,rate\nzz,0.5\ngB,0.1\ngA,0.2\n";
  }
  io::InstanceBundle b;
  b.population = kFixtures / "fixture_a" / "population.csv";
  b.rates = tmp;
  b.budget = 20;
  const auto in = io::load_instance(b);
  EXPECT_EQ(in.rates.groups.size(), 2u);
  EXPECT_DOUBLE_EQ(exposed_population(in, {"r1"}), 19.0);
  fs::remove(tmp);

  b.rates.reset();
  b.cases = kFixtures / "fixture_a" / "cases.csv";
  EXPECT_DOUBLE_EQ(exposed_population(io::load_instance(b), {"r2"}), 11.0);
}

TEST(AllocationCsv, DefaultsToLastColumn) {
  const auto in = oracle::fixture_a();
  std::istringstream csv("region,population,exposed,DiverseOnly,FairOnly\nr2,100,11,10,7\nr1,100,19,10,13\n");
  const auto x = io::parse_allocation_csv(csv, in, std::nullopt, "<a>");
  EXPECT_EQ(x.amounts, (std::vector<double>{13, 7}));
  std::istringstream again("region,population,exposed,DiverseOnly,FairOnly\nr2,100,11,10,7\nr1,100,19,10,13\n");
  EXPECT_EQ(io::parse_allocation_csv(again, in, "DiverseOnly", "<a>").amounts, (std::vector<double>{10, 10}));
  std::istringstream unknown("region,x\nr9,1\n");
  EXPECT_EQ(code_of([&] { io::parse_allocation_csv(unknown, in, std::nullopt, "<a>"); }), ErrorCode::UnknownRegion);
}

ComparisonReport fixture_report() {
  return compare(oracle::fixture_a(), default_scenarios(0.05, 0.05));
}

TEST(Writers, AllocationCsvColumnsSumToBudget) {
  std::ostringstream out;
  io::write_allocation_csv(fixture_report(), out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "region,population,exposed,Alpha0.5,FairDiverse,DiverseOnly,FairOnly");
  std::vector<double> cols(4, 0.0);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cells = io::detail::split_csv(line);
    ASSERT_EQ(cells.size(), 7u);
    for (int k = 0; k < 4; ++k) cols[k] += std::stod(cells[3 + k]);
    ++rows;
  }
  EXPECT_EQ(rows, 2);
  for (double c : cols) EXPECT_DOUBLE_EQ(c, 20.0);
}

TEST(Writers, ByteIdenticalOutput) {
  const auto a = fixture_report();
  const auto b = fixture_report();
  std::ostringstream ca, cb, ja, jb;
  io::write_allocation_csv(a, ca);
  io::write_allocation_csv(b, cb);
  io::write_report_json(a, ja);
  io::write_report_json(b, jb);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ja.str(), jb.str());
}

double round12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::stod(buf);
}

TEST(Writers, ReportRoundTrip) {
  const auto report = fixture_report();
  std::stringstream buf;
  io::write_report_json(report, buf);
  const auto back = io::parse_report_json(buf);
  EXPECT_EQ(back.budget, report.budget);
  ASSERT_EQ(back.scenarios.size(), report.scenarios.size());
  for (std::size_t k = 0; k < report.scenarios.size(); ++k) {
    const auto& x = report.scenarios[k];
    const auto& y = back.scenarios[k];
    EXPECT_EQ(y.spec.name(), x.spec.name());
    EXPECT_EQ(round12(y.alpha), round12(x.alpha));
    EXPECT_EQ(round12(y.gaps.max_diversity), round12(x.gaps.max_diversity));
    EXPECT_EQ(round12(y.gaps.max_fairness), round12(x.gaps.max_fairness));
    for (std::size_t j = 0; j < x.allocation.size(); ++j) {
      EXPECT_EQ(round12(y.allocation.amounts[j]), round12(x.allocation.amounts[j]));
      EXPECT_EQ(round12(y.fractional.amounts[j]), round12(x.fractional.amounts[j]));
    }
  }
  ASSERT_EQ(back.rows.size(), report.rows.size());
  EXPECT_EQ(back.rows[0].region, report.rows[0].region);
  ASSERT_EQ(back.price_of_fairness.has_value(), report.price_of_fairness.has_value());
  if (report.price_of_fairness) {
    if (std::isinf(*report.price_of_fairness)) {
      EXPECT_TRUE(std::isinf(*back.price_of_fairness));
    } else {
      EXPECT_EQ(round12(*back.price_of_fairness), round12(*report.price_of_fairness));
    }
  }
}

TEST(Writers, ReportParseErrors) {
  std::istringstream junk("{not json");
  EXPECT_EQ(code_of([&] { io::parse_report_json(junk); }), ErrorCode::ParseError);
  std::istringstream partial("{\"budget\": 3}");
  EXPECT_EQ(code_of([&] { io::parse_report_json(partial); }), ErrorCode::ParseError);
}

TEST(Writers, SweepTsv) {
  const auto cells = epsilon_sweep(oracle::fixture_a(), {1.0}, {1.0});
  std::ostringstream out;
  io::emit_sweep_tsv(cells, out);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "epsilon_d\tepsilon_f\tmodel\tfeasible");
  EXPECT_EQ(first, "1\t1\tDiverseOnly\ttrue");
}

TEST(Writers, RatesCsvRoundTrip) {
  const auto rates = io::read_exposure_csv(kFixtures / "rates" / "chicago.csv");
  std::stringstream buf;
  io::write_rates_csv(rates, buf);
  const auto back = io::parse_exposure_csv(buf);
  EXPECT_EQ(back.groups, rates.groups);
  EXPECT_EQ(back.rates, rates.rates);
}

TEST(Writers, UnwritablePath) {
  EXPECT_EQ(code_of([] { io::write_report_json(fixture_report(), fs::path("/nonexistent/dir/r.json")); }),
            ErrorCode::IoError);
}

}  // namespace
