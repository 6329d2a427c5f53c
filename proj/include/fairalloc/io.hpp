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

#ifndef FAIRALLOC_IO_HPP
#define FAIRALLOC_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "fairalloc/domain.hpp"
#include "fairalloc/exposure.hpp"
#include "fairalloc/format.hpp"
#include "fairalloc/metrics.hpp"
#include "fairalloc/scenarios.hpp"
#include "fairalloc/tuner.hpp"

namespace fairalloc::io {

// ---------------------------------------------------------------------------
// CSV primitives

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits one CSV line. Double-quoted fields may contain commas; "" escapes a quote.
inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        field.push_back('"');
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  out.push_back(was_quoted ? field : std::string(trim(field)));
  return out;
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

inline CsvTable read_table(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  // Strip a UTF-8 byte order mark on the first line.
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(t.header.size()) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) throw Error(ErrorCode::ParseError, source + ": missing header row");
  return t;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  return out;
}

inline std::string cell_ref(const std::string& source, std::size_t line, const std::string& column) {
  return source + ":" + std::to_string(line) + " column '" + column + "'";
}

inline std::int64_t parse_integer(const std::string& text, const std::string& where) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorCode::ParseError, where + ": '" + text + "' is not an integer");
  }
  return v;
}

inline double parse_real(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, where + ": '" + text + "' is not a number");
  }
  return v;
}

inline void expect_header(const CsvTable& t, const std::vector<std::string>& names, const std::string& source) {
  if (t.header != names) {
    std::string want;
    for (const auto& n : names) want += (want.empty() ? "" : ",") + n;
    throw Error(ErrorCode::ParseError, source + ": header must be '" + want + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Readers

/// Header `region,<group1>,<group2>,...`; one row per region, integer cells.
inline PopulationMatrix parse_population_csv(std::istream& in, const std::string& source = "<population>") {
  const auto t = detail::read_table(in, source);
  if (t.header.size() < 2 || t.header[0] != "region") {
    throw Error(ErrorCode::ParseError, source + ": header must be 'region,<group>,...'");
  }
  std::vector<GroupId> groups;
  std::unordered_set<std::string> seen;
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    if (t.header[c].empty()) throw Error(ErrorCode::ParseError, source + ": empty group name in header");
    if (!seen.insert(t.header[c]).second) throw Error(ErrorCode::DuplicateGroup, source + ": group '" + t.header[c] + "'");
    groups.push_back({t.header[c]});
  }
  std::vector<RegionId> regions;
  seen.clear();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& id = t.rows[r][0];
    if (id.empty()) throw Error(ErrorCode::ParseError, source + ":" + std::to_string(t.line_numbers[r]) + ": empty region id");
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::DuplicateRegion, source + ":" + std::to_string(t.line_numbers[r]) + ": region '" + id + "'");
    }
    regions.push_back({id});
  }
  std::vector<std::int64_t> counts(groups.size() * regions.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto where = detail::cell_ref(source, t.line_numbers[r], t.header[g + 1]);
      const auto v = detail::parse_integer(t.rows[r][g + 1], where);
      if (v < 0) throw Error(ErrorCode::NegativeCell, where + ": " + t.rows[r][g + 1]);
      counts[g * regions.size() + r] = v;
    }
  }
  return PopulationMatrix(std::move(groups), std::move(regions), std::move(counts));
}

inline PopulationMatrix read_population_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_population_csv(in, path.string());
}

/// Header `group,rate`; rates in [0, 1].
inline ExposureRates parse_exposure_csv(std::istream& in, const std::string& source = "<rates>") {
  const auto t = detail::read_table(in, source);
  detail::expect_header(t, {"group", "rate"}, source);
  ExposureRates rates;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& group = t.rows[r][0];
    if (group.empty()) throw Error(ErrorCode::ParseError, source + ":" + std::to_string(t.line_numbers[r]) + ": empty group");
    if (!seen.insert(group).second) throw Error(ErrorCode::DuplicateGroup, source + ": group '" + group + "'");
    const auto where = detail::cell_ref(source, t.line_numbers[r], "rate");
    const double v = detail::parse_real(t.rows[r][1], where);
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::RateOutOfRange, where + ": " + t.rows[r][1]);
    rates.set({group}, v);
  }
  return rates;
}

inline ExposureRates read_exposure_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_exposure_csv(in, path.string());
}

/// Header `group,infected,population` (count form), or
/// `group,p_group_given_exposed,p_group` (probability form; P(E=1) supplied separately).
inline CaseCounts parse_case_counts_csv(std::istream& in, const std::string& source = "<cases>",
                                        std::optional<double> exposed_probability = std::nullopt) {
  const auto t = detail::read_table(in, source);
  if (t.header == std::vector<std::string>{"group", "infected", "population"}) {
    std::vector<GroupCaseCount> counts;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      GroupCaseCount c;
      c.group = {t.rows[r][0]};
      c.infected = detail::parse_integer(t.rows[r][1], detail::cell_ref(source, t.line_numbers[r], "infected"));
      c.population = detail::parse_integer(t.rows[r][2], detail::cell_ref(source, t.line_numbers[r], "population"));
      if (c.infected < 0 || c.population < 0) {
        throw Error(ErrorCode::NegativeCell, source + ":" + std::to_string(t.line_numbers[r]));
      }
      counts.push_back(std::move(c));
    }
    return counts;
  }
  if (t.header == std::vector<std::string>{"group", "p_group_given_exposed", "p_group"}) {
    if (!exposed_probability) {
      throw Error(ErrorCode::InvalidArgument, source + ": probability form needs P(E=1)");
    }
    CaseShares shares;
    shares.exposed_probability = *exposed_probability;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      GroupCaseShare g;
      g.group = {t.rows[r][0]};
      g.share_of_exposed = detail::parse_real(t.rows[r][1], detail::cell_ref(source, t.line_numbers[r], "p_group_given_exposed"));
      g.share_of_population = detail::parse_real(t.rows[r][2], detail::cell_ref(source, t.line_numbers[r], "p_group"));
      shares.groups.push_back(std::move(g));
    }
    return shares;
  }
  throw Error(ErrorCode::ParseError,
              source + ": header must be 'group,infected,population' or 'group,p_group_given_exposed,p_group'");
}

inline CaseCounts read_case_counts_csv(const std::filesystem::path& path,
                                       std::optional<double> exposed_probability = std::nullopt) {
  auto in = detail::open_input(path);
  return parse_case_counts_csv(in, path.string(), exposed_probability);
}

/// Allocation for the instance's regions from a CSV whose first column is
/// `region`. `column` selects the value column; by default the last one.
inline Allocation parse_allocation_csv(std::istream& in, const ProblemInstance& instance,
                                       const std::optional<std::string>& column = std::nullopt,
                                       const std::string& source = "<allocation>") {
  const auto t = detail::read_table(in, source);
  if (t.header.size() < 2 || t.header[0] != "region") {
    throw Error(ErrorCode::ParseError, source + ": first column must be 'region'");
  }
  std::size_t col = t.header.size() - 1;
  if (column) {
    auto it = std::find(t.header.begin(), t.header.end(), *column);
    if (it == t.header.end() || it == t.header.begin()) {
      throw Error(ErrorCode::ParseError, source + ": no column '" + *column + "'");
    }
    col = static_cast<std::size_t>(it - t.header.begin());
  }
  Allocation x;
  x.amounts.assign(instance.matrix.region_count(), 0.0);
  std::vector<bool> filled(x.amounts.size(), false);
  bool integral = true;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto j = instance.matrix.region_index({t.rows[r][0]});
    if (!j) throw Error(ErrorCode::UnknownRegion, source + ": region '" + t.rows[r][0] + "'");
    if (filled[*j]) throw Error(ErrorCode::DuplicateRegion, source + ": region '" + t.rows[r][0] + "'");
    const auto where = detail::cell_ref(source, t.line_numbers[r], t.header[col]);
    const double v = detail::parse_real(t.rows[r][col], where);
    if (v < 0.0) throw Error(ErrorCode::NegativeCell, where);
    x.amounts[*j] = v;
    filled[*j] = true;
    integral = integral && v == std::floor(v);
  }
  for (std::size_t j = 0; j < filled.size(); ++j) {
    if (!filled[j]) {
      throw Error(ErrorCode::DimensionMismatch, source + ": missing region '" + instance.matrix.regions()[j].value + "'");
    }
  }
  x.kind = integral ? AllocationKind::Integral : AllocationKind::Fractional;
  return x;
}

/// Files an instance is assembled from.
struct InstanceBundle {
  std::filesystem::path population;
  std::optional<std::filesystem::path> rates;
  std::optional<std::filesystem::path> cases;
  std::int64_t budget = 0;
  std::optional<double> exposed_probability;  // probability-form cases only
};

/// Reads and validates. Rate tables may list more groups than the matrix
/// (the shipped city tables cover race, age and gender together); only the
/// matrix's groups are kept.
inline ProblemInstance load_instance(const InstanceBundle& bundle) {
  ProblemInstance instance;
  instance.matrix = read_population_csv(bundle.population);
  ExposureRates rates;
  if (bundle.rates) {
    rates = read_exposure_csv(*bundle.rates);
  } else if (bundle.cases) {
    rates = estimate_exposure_rates(read_case_counts_csv(*bundle.cases, bundle.exposed_probability));
  } else {
    throw Error(ErrorCode::InvalidArgument, "either a rates or a cases file is required");
  }
  instance.rates = select_rates(rates, instance.matrix.groups());
  instance.budget = bundle.budget;
  validate_instance(instance);
  return instance;
}

// ---------------------------------------------------------------------------
// Writers. Numbers use the shortest round-trip decimal, so output is a pure
// function of the input.

inline void write_rates_csv(const ExposureRates& rates, std::ostream& out) {
  out << "group,rate\n";
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out << detail::quote_if_needed(rates.groups[i].value) << ',' << shortest(rates.rates[i]) << '\n';
  }
}

/// `region,population,exposed,<scenario columns...>`, one row per report row.
inline void write_allocation_csv(const ComparisonReport& report, std::ostream& out) {
  out << "region,population,exposed";
  for (const auto& name : report.scenario_names()) out << ',' << detail::quote_if_needed(name);
  out << '\n';
  for (const auto& row : report.rows) {
    out << detail::quote_if_needed(row.region.value) << ',' << row.population << ',' << shortest(row.exposed);
    for (double v : row.allocations) out << ',' << shortest(v);
    out << '\n';
  }
}

inline void write_allocation_csv(const ComparisonReport& report, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_allocation_csv(report, out);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

namespace detail {

inline nlohmann::ordered_json number_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

inline double read_number_or_inf(const nlohmann::ordered_json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::ParseError, "unexpected string '" + j.get<std::string>() + "'");
  }
  return j.get<double>();
}

inline nlohmann::ordered_json gaps_json(const ProblemInstance* instance, const GapReport& g) {
  nlohmann::ordered_json j;
  j["max_diversity_gap"] = g.max_diversity;
  j["max_fairness_gap"] = g.max_fairness;
  j["exposed_mean"] = g.exposed_mean;
  j["per_capita_mean"] = g.per_capita_mean;
  auto& dj = j["diversity_gaps"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < g.diversity_gaps.size(); ++k) {
    nlohmann::ordered_json e;
    if (instance) e["region"] = instance->matrix.regions()[k].value;
    e["gap"] = g.diversity_gaps[k];
    dj.push_back(std::move(e));
  }
  auto& fj = j["fairness_gaps"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < g.fairness_gaps.size(); ++k) {
    nlohmann::ordered_json e;
    if (instance) e["group"] = instance->matrix.groups()[k].value;
    e["gap"] = g.fairness_gaps[k];
    e["mean"] = k < g.group_means.size() ? g.group_means[k] : 0.0;
    fj.push_back(std::move(e));
  }
  return j;
}

inline GapReport gaps_from_json(const nlohmann::ordered_json& j) {
  GapReport g;
  g.max_diversity = j.at("max_diversity_gap").get<double>();
  g.max_fairness = j.at("max_fairness_gap").get<double>();
  g.exposed_mean = j.at("exposed_mean").get<double>();
  g.per_capita_mean = j.at("per_capita_mean").get<double>();
  for (const auto& e : j.at("diversity_gaps")) g.diversity_gaps.push_back(e.at("gap").get<double>());
  for (const auto& e : j.at("fairness_gaps")) {
    g.fairness_gaps.push_back(e.at("gap").get<double>());
    g.group_means.push_back(e.at("mean").get<double>());
  }
  return g;
}

inline std::string kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::DiverseOnly: return "DiverseOnly";
    case ScenarioKind::FairOnly: return "FairOnly";
    case ScenarioKind::FixedAlpha: return "FixedAlpha";
    case ScenarioKind::FairDiverseTuned: return "FairDiverseTuned";
  }
  return "Unknown";
}

inline ScenarioKind kind_from_name(const std::string& s) {
  if (s == "DiverseOnly") return ScenarioKind::DiverseOnly;
  if (s == "FairOnly") return ScenarioKind::FairOnly;
  if (s == "FixedAlpha") return ScenarioKind::FixedAlpha;
  if (s == "FairDiverseTuned") return ScenarioKind::FairDiverseTuned;
  throw Error(ErrorCode::ParseError, "unknown scenario kind '" + s + "'");
}

}  // namespace detail

/// GapReport as JSON, labelled with the instance's region and group ids.
inline nlohmann::ordered_json gaps_to_json(const ProblemInstance& instance, const GapReport& g) {
  return detail::gaps_json(&instance, g);
}

inline nlohmann::ordered_json report_to_json(const ComparisonReport& report) {
  nlohmann::ordered_json j;
  j["budget"] = report.budget;
  auto& scenarios = j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : report.scenarios) {
    nlohmann::ordered_json e;
    e["name"] = s.spec.name();
    e["kind"] = detail::kind_name(s.spec.kind);
    e["alpha"] = s.alpha;
    if (s.spec.kind == ScenarioKind::FairDiverseTuned) {
      e["epsilon_d"] = s.spec.epsilon_d;
      e["epsilon_f"] = s.spec.epsilon_f;
      e["tau"] = s.spec.tau;
      if (s.alpha_range) e["alpha_range"] = {s.alpha_range->first, s.alpha_range->second};
      e["thresholds_met"] = s.thresholds_met;
      e["rounding_violation"] = s.rounding_violation;
    }
    e["allocation"] = s.allocation.amounts;
    e["fractional_allocation"] = s.fractional.amounts;
    e["gaps"] = detail::gaps_json(nullptr, s.gaps);
    e["fractional_gaps"] = detail::gaps_json(nullptr, s.fractional_gaps);
    scenarios.push_back(std::move(e));
  }
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json e;
    e["region"] = r.region.value;
    e["population"] = r.population;
    e["exposed"] = r.exposed;
    e["allocations"] = r.allocations;
    rows.push_back(std::move(e));
  }
  j["price_of_fairness"] = report.price_of_fairness ? detail::number_or_inf(*report.price_of_fairness) : nullptr;
  return j;
}

inline void write_report_json(const ComparisonReport& report, std::ostream& out) {
  out << report_to_json(report).dump(2) << '\n';
}

inline void write_report_json(const ComparisonReport& report, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  write_report_json(report, out);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

/// Inverse of write_report_json.
inline ComparisonReport parse_report_json(std::istream& in) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    ComparisonReport r;
    r.budget = j.at("budget").get<std::int64_t>();
    for (const auto& e : j.at("scenarios")) {
      ScenarioResult s;
      s.spec.kind = detail::kind_from_name(e.at("kind").get<std::string>());
      s.alpha = e.at("alpha").get<double>();
      if (s.spec.kind == ScenarioKind::FixedAlpha) s.spec.alpha = s.alpha;
      if (s.spec.kind == ScenarioKind::FairDiverseTuned) {
        s.spec.epsilon_d = e.at("epsilon_d").get<double>();
        s.spec.epsilon_f = e.at("epsilon_f").get<double>();
        s.spec.tau = e.at("tau").get<double>();
        if (e.contains("alpha_range")) {
          const auto& range = e.at("alpha_range");
          s.alpha_range = std::make_pair(range.at(0).get<double>(), range.at(1).get<double>());
        }
        s.thresholds_met = e.at("thresholds_met").get<bool>();
        s.rounding_violation = e.at("rounding_violation").get<bool>();
      }
      s.allocation = {e.at("allocation").get<std::vector<double>>(), AllocationKind::Integral};
      s.fractional = {e.at("fractional_allocation").get<std::vector<double>>(), AllocationKind::Fractional};
      s.gaps = detail::gaps_from_json(e.at("gaps"));
      s.fractional_gaps = detail::gaps_from_json(e.at("fractional_gaps"));
      r.scenarios.push_back(std::move(s));
    }
    for (const auto& e : j.at("rows")) {
      ReportRow row;
      row.region = {e.at("region").get<std::string>()};
      row.population = e.at("population").get<std::int64_t>();
      row.exposed = e.at("exposed").get<double>();
      row.allocations = e.at("allocations").get<std::vector<double>>();
      r.rows.push_back(std::move(row));
    }
    if (!j.at("price_of_fairness").is_null()) r.price_of_fairness = detail::read_number_or_inf(j.at("price_of_fairness"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

/// `epsilon_d<TAB>epsilon_f<TAB>model<TAB>feasible`, one line per cell and model.
inline void emit_sweep_tsv(const std::vector<SweepCell>& cells, std::ostream& out) {
  out << "epsilon_d\tepsilon_f\tmodel\tfeasible\n";
  for (const auto& c : cells) {
    for (std::size_t k = 0; k < kSweepModels.size(); ++k) {
      out << shortest(c.epsilon_d) << '\t' << shortest(c.epsilon_f) << '\t' << to_string(kSweepModels[k]) << '\t'
          << (c.feasible[k] ? "true" : "false") << '\n';
    }
  }
}

inline void emit_sweep_tsv(const std::vector<SweepCell>& cells, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  emit_sweep_tsv(cells, out);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

}  // namespace fairalloc::io

#endif  // FAIRALLOC_IO_HPP
