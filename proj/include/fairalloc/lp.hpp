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

#ifndef FAIRALLOC_LP_HPP
#define FAIRALLOC_LP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/error.hpp"

namespace fairalloc {

/// minimize c.v  s.t.  A_ub v <= b_ub,  A_eq v = b_eq,  v >= 0.
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> ub_rows;
  std::vector<double> ub_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::string> variable_names;

  std::size_t variable_count() const noexcept { return objective.size(); }
  std::size_t ub_count() const noexcept { return ub_rows.size(); }
  std::size_t eq_count() const noexcept { return eq_rows.size(); }
  std::size_t row_count() const noexcept { return ub_rows.size() + eq_rows.size(); }

  void add_ub(std::vector<double> row, double rhs) {
    ub_rows.push_back(std::move(row));
    ub_rhs.push_back(rhs);
  }
  void add_eq(std::vector<double> row, double rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

constexpr std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;
  double objective = 0.0;
  std::vector<double> ub_duals;  // <= 0 at optimality (minimisation)
  std::vector<double> eq_duals;  // free
  std::size_t iterations = 0;
};

/// Throws DimensionMismatch or InvalidArgument on ragged or non-finite input.
inline void check_well_formed(const LpProblem& lp) {
  const auto n = lp.variable_count();
  auto check_row = [n](const std::vector<double>& row) {
    if (row.size() != n) throw Error(ErrorCode::DimensionMismatch, "constraint row width differs from objective");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite constraint coefficient");
    }
  };
  for (double v : lp.objective) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite objective coefficient");
  }
  if (lp.ub_rhs.size() != lp.ub_rows.size() || lp.eq_rhs.size() != lp.eq_rows.size()) {
    throw Error(ErrorCode::DimensionMismatch, "right-hand side length differs from row count");
  }
  for (const auto& r : lp.ub_rows) check_row(r);
  for (const auto& r : lp.eq_rows) check_row(r);
  for (double v : lp.ub_rhs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite right-hand side");
  }
  for (double v : lp.eq_rhs) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite right-hand side");
  }
}

namespace detail {
// Fixed-point text (no exponent) carrying 12 significant digits.
inline std::string fixed12(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v == 0.0 ? "0" : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
  const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(v))));
  const int decimals = std::clamp(11 - magnitude, 0, 340);
  std::vector<char> buf(static_cast<std::size_t>(decimals) + 400);
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
  std::string out(buf.data());
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return out;
}
}  // namespace detail

/// Plain-text listing of the program, one line per row, 12 significant digits.
inline void dump_lp(const LpProblem& lp, std::ostream& os) {
  const auto n = lp.variable_count();
  auto name = [&](std::size_t j) {
    return j < lp.variable_names.size() ? lp.variable_names[j] : "v" + std::to_string(j + 1);
  };
  os << "variables " << n << '\n';
  os << "minimize";
  for (std::size_t j = 0; j < n; ++j) os << ' ' << detail::fixed12(lp.objective[j]) << '*' << name(j);
  os << '\n';
  auto row = [&](const char* tag, std::size_t k, const std::vector<double>& r, const char* rel, double rhs) {
    os << tag << k;
    for (std::size_t j = 0; j < n; ++j) {
      if (r[j] != 0.0) os << ' ' << detail::fixed12(r[j]) << '*' << name(j);
    }
    os << ' ' << rel << ' ' << detail::fixed12(rhs) << '\n';
  };
  for (std::size_t i = 0; i < lp.ub_count(); ++i) row("ub", i, lp.ub_rows[i], "<=", lp.ub_rhs[i]);
  for (std::size_t i = 0; i < lp.eq_count(); ++i) row("eq", i, lp.eq_rows[i], "=", lp.eq_rhs[i]);
  os << "bounds all >= 0\n";
}

}  // namespace fairalloc

#endif  // FAIRALLOC_LP_HPP
