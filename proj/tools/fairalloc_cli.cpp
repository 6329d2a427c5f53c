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

// fairalloc: fair and diverse allocation of a scarce resource across regions.
//
// Exit codes: 0 ok, 1 usage, 2 data/validation, 3 tuner found no feasible
// alpha, 4 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairalloc/fairalloc.hpp"

namespace {

using namespace fairalloc;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::TunerInfeasible: return kExitInfeasible;
    case ErrorCode::IterationLimitExceeded:
    case ErrorCode::StatusNotOptimal:
    case ErrorCode::Internal: return kExitSolver;
    default: return kExitData;
  }
}

struct InstanceOptions {
  std::string population;
  std::string rates;
  std::string cases;
  std::optional<double> p_exposed;
  std::int64_t budget = 0;

  void attach(CLI::App* app, bool budget_required = true) {
    app->add_option("--population", population, "Population CSV (region,<group>,...)")->required();
    auto* r = app->add_option("--rates", rates, "Exposure rate CSV (group,rate)");
    auto* c = app->add_option("--cases", cases, "Case count CSV, estimated into rates");
    r->excludes(c);
    app->add_option("--p-exposed", p_exposed, "P(E=1) for probability-form case files");
    auto* b = app->add_option("--budget", budget, "Units of resource to allocate");
    if (budget_required) b->required();
  }

  ProblemInstance load() const {
    if (rates.empty() && cases.empty()) throw CLI::RequiredError("--rates or --cases");
    io::InstanceBundle bundle;
    bundle.population = population;
    if (!rates.empty()) bundle.rates = rates;
    if (!cases.empty()) bundle.cases = cases;
    bundle.budget = budget;
    bundle.exposed_probability = p_exposed;
    return io::load_instance(bundle);
  }
};

/// Writes to --out when given, stdout otherwise.
template <typename Fn>
void emit(const std::string& out_path, Fn&& write) {
  if (out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + out_path + "'");
  write(out);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("grid", "'" + item + "' is not a number");
    }
  }
  return out;
}

nlohmann::ordered_json allocation_json(const ProblemInstance& instance, const Allocation& x) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < x.size(); ++j) {
    arr.push_back({{"region", instance.matrix.regions()[j].value}, {"amount", x.amounts[j]}});
  }
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair and diverse allocation of a scarce resource across regions and social groups"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve the weighted program for one alpha, or compare all four models");
  InstanceOptions solve_in;
  solve_in.attach(solve_cmd);
  std::optional<double> solve_alpha;
  bool solve_round = false;
  std::string solve_out, solve_report, solve_dump;
  std::optional<double> solve_eps_d, solve_eps_f;
  double solve_tau = 1e-3;
  std::size_t solve_top = 0;
  solve_cmd->add_option("--alpha", solve_alpha, "Trade-off weight in [0,1]; omit to run all four models")
      ->check(CLI::Range(0.0, 1.0));
  solve_cmd->add_flag("--round", solve_round, "Round to an integral allocation summing to the budget");
  solve_cmd->add_option("--eps-d", solve_eps_d, "Diversity threshold for the tuned model")->check(CLI::Range(0.0, 1.0));
  solve_cmd->add_option("--eps-f", solve_eps_f, "Fairness threshold for the tuned model")->check(CLI::Range(0.0, 1.0));
  solve_cmd->add_option("--tau", solve_tau, "Alpha search tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--top", solve_top, "Only the K most populated regions (0 = all)");
  solve_cmd->add_option("--out", solve_out, "Allocation CSV path (default stdout)");
  solve_cmd->add_option("--report", solve_report, "Also write the comparison report as JSON");
  solve_cmd->add_option("--dump-lp", solve_dump, "Write the program as a plain-text listing (requires --alpha)");

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Search alpha so that both gap thresholds hold");
  InstanceOptions tune_in;
  tune_in.attach(tune_cmd);
  double tune_eps_d = 0.0, tune_eps_f = 0.0, tune_tau = 1e-3;
  bool tune_round = false;
  std::string tune_out;
  tune_cmd->add_option("--eps-d", tune_eps_d, "Diversity threshold")->required()->check(CLI::Range(0.0, 1.0));
  tune_cmd->add_option("--eps-f", tune_eps_f, "Fairness threshold")->required()->check(CLI::Range(0.0, 1.0));
  tune_cmd->add_option("--tau", tune_tau, "Interval tolerance")->check(CLI::PositiveNumber);
  tune_cmd->add_flag("--round", tune_round, "Also report the rounded allocation");
  tune_cmd->add_option("--out", tune_out, "Result JSON path (default stdout)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Feasible alpha range and epsilon-grid feasibility table");
  InstanceOptions sweep_in;
  sweep_in.attach(sweep_cmd);
  double sweep_step = 0.01, sweep_tau = 1e-3;
  double sweep_eps_d = 0.0, sweep_eps_f = 0.0;
  std::string sweep_d_grid = "0,0.01,0.05,0.1,0.5,1", sweep_f_grid = "0,0.01,0.05,0.1,0.5,1";
  std::string sweep_out;
  sweep_cmd->add_option("--grid-step", sweep_step, "Alpha grid step in (0, 0.1]")->required();
  sweep_cmd->add_option("--eps-d", sweep_eps_d, "Diversity threshold for the alpha range")->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--eps-f", sweep_eps_f, "Fairness threshold for the alpha range")->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--eps-d-grid", sweep_d_grid, "Comma-separated diversity thresholds");
  sweep_cmd->add_option("--eps-f-grid", sweep_f_grid, "Comma-separated fairness thresholds");
  sweep_cmd->add_option("--tau", sweep_tau, "Alpha search tolerance per cell")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_out, "TSV path (default stdout)");

  // gaps
  auto* gaps_cmd = app.add_subcommand("gaps", "Diversity and fairness gaps of a given allocation");
  InstanceOptions gaps_in;
  gaps_in.attach(gaps_cmd, /*budget_required=*/false);
  std::string gaps_alloc, gaps_column;
  gaps_cmd->add_option("--allocation", gaps_alloc, "CSV with a region column and an amount column")->required();
  gaps_cmd->add_option("--column", gaps_column, "Amount column name (default: last column)");

  // pof
  auto* pof_cmd = app.add_subcommand("pof", "Price of fairness from two fairness gaps");
  double pof_diverse = 0.0, pof_fair = 0.0;
  pof_cmd->add_option("--diverse-gap", pof_diverse, "Fairness gap of the Diverse-only allocation")->required();
  pof_cmd->add_option("--fair-gap", pof_fair, "Fairness gap of the Fair-Diverse allocation")->required();

  // estimate-exposure
  auto* est_cmd = app.add_subcommand("estimate-exposure", "Per-group exposure rates from case data");
  std::string est_cases, est_out;
  std::optional<double> est_p_exposed;
  est_cmd->add_option("--cases", est_cases, "group,infected,population  or  group,p_group_given_exposed,p_group")
      ->required();
  est_cmd->add_option("--p-exposed", est_p_exposed, "P(E=1) for the probability form")->check(CLI::Range(0.0, 1.0));
  est_cmd->add_option("--out", est_out, "Rates CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve_cmd) {
      const auto instance = solve_in.load();
      std::vector<ScenarioSpec> specs;
      if (solve_alpha) {
        if (*solve_alpha == 0.0) {
          specs.push_back(ScenarioSpec::diverse_only());
        } else if (*solve_alpha == 1.0) {
          specs.push_back(ScenarioSpec::fair_only());
        } else {
          specs.push_back(ScenarioSpec::fixed_alpha(*solve_alpha));
        }
        if (!solve_dump.empty()) {
          emit(solve_dump, [&](std::ostream& os) { dump_lp(build_p2(instance, *solve_alpha).lp, os); });
        }
      } else {
        if (!solve_eps_d || !solve_eps_f) {
          std::cerr << "solve: --eps-d and --eps-f are required when --alpha is omitted\n";
          return kExitUsage;
        }
        specs = default_scenarios(*solve_eps_d, *solve_eps_f, solve_tau);
      }
      auto report = compare(instance, specs, solve_top == 0 ? instance.matrix.region_count() : solve_top);
      if (!solve_report.empty()) io::write_report_json(report, std::filesystem::path(solve_report));
      if (!solve_round) {
        for (auto& s : report.scenarios) s.allocation = s.fractional;
        report.rows = report_rows(instance, report.scenarios, solve_top == 0 ? instance.matrix.region_count() : solve_top);
      }
      for (const auto& s : report.scenarios) {
        if (s.rounding_violation) std::cerr << "note: rounding pushed " << s.spec.name() << " past a threshold\n";
      }
      emit(solve_out, [&](std::ostream& os) { io::write_allocation_csv(report, os); });
      return 0;
    }

    if (*tune_cmd) {
      const auto instance = tune_in.load();
      const TradeoffConfig cfg{0.5, tune_eps_d, tune_eps_f, tune_tau};
      const auto result = tune_alpha(instance, cfg);
      nlohmann::ordered_json j;
      j["outcome"] = std::string(outcome_name(result));
      j["iterations"] = tuner_iterations(result);
      int code = kExitInfeasible;
      if (const auto* ok = std::get_if<TunerFeasible>(&result)) {
        j["alpha"] = ok->alpha;
        j["gaps"] = io::gaps_to_json(instance, ok->gaps);
        j["allocation"] = allocation_json(instance, ok->allocation);
        if (tune_round) j["rounded_allocation"] = allocation_json(instance, round_allocation(instance, ok->allocation));
        code = 0;
      } else if (const auto* bad = std::get_if<TunerInfeasible>(&result)) {
        j["alpha"] = bad->alpha;
        j["max_diversity_gap"] = bad->diversity_gap;
        j["max_fairness_gap"] = bad->fairness_gap;
      } else {
        const auto& ex = std::get<TunerExhausted>(result);
        j["alpha"] = ex.last_alpha;
        j["interval"] = {ex.alpha_low, ex.alpha_high};
        j["gaps"] = io::gaps_to_json(instance, ex.gaps);
        j["allocation"] = allocation_json(instance, ex.best_allocation);
      }
      emit(tune_out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      return code;
    }

    if (*sweep_cmd) {
      const auto instance = sweep_in.load();
      const auto range = feasible_alpha_range(instance, sweep_eps_d, sweep_eps_f, sweep_step);
      const auto cells = epsilon_sweep(instance, parse_list(sweep_d_grid), parse_list(sweep_f_grid), sweep_tau);
      std::ostream& info = sweep_out.empty() ? std::cerr : std::cout;
      if (range.range) {
        info << "feasible alpha range: [" << shortest(range.range->first) << ", " << shortest(range.range->second)
             << "]\n";
      } else {
        info << "feasible alpha range: empty\n";
      }
      emit(sweep_out, [&](std::ostream& os) { io::emit_sweep_tsv(cells, os); });
      return 0;
    }

    if (*gaps_cmd) {
      // The budget does not enter the gap formulas; default it to the allocation total.
      ProblemInstance instance;
      {
        InstanceOptions opts = gaps_in;
        opts.budget = 0;
        instance = opts.load();
      }
      std::ifstream in(gaps_alloc);
      if (!in) throw Error(ErrorCode::IoError, "cannot open '" + gaps_alloc + "'");
      const auto x = io::parse_allocation_csv(
          in, instance, gaps_column.empty() ? std::nullopt : std::optional<std::string>(gaps_column), gaps_alloc);
      auto j = io::gaps_to_json(instance, evaluate_gaps(instance, x));
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*pof_cmd) {
      const double pof = price_of_fairness(pof_diverse, pof_fair);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", pof);
      std::cout << (std::isinf(pof) ? std::string("inf") : std::string(buf)) << '\n';
      return 0;
    }

    if (*est_cmd) {
      const auto rates = estimate_exposure_rates(io::read_case_counts_csv(est_cases, est_p_exposed));
      emit(est_out, [&](std::ostream& os) { io::write_rates_csv(rates, os); });
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
