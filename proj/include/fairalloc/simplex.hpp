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

#ifndef FAIRALLOC_SIMPLEX_HPP
#define FAIRALLOC_SIMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fairalloc/lp.hpp"

namespace fairalloc {

struct SimplexOptions {
  double pivot_tolerance = 1e-9;
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-9;
  /// Pivots allowed per (rows + cols); 0 disables the limit.
  std::size_t iteration_factor = 50;
  /// Dantzig pricing switches to Bland's rule after this many pivots per (rows + cols).
  std::size_t bland_factor = 10;
  /// Row/column equilibration by powers of two before pivoting.
  bool scale = true;
};

namespace detail {

/// Dense two-phase tableau.
///
/// Every row i owns a unit column (its slack, or an artificial when the row
/// is an equality or had to be negated to make the right-hand side
/// non-negative). Those columns form the starting basis and, because their
/// cost in phase 2 is zero, their reduced costs at the end are the negated
/// row duals.
class Tableau {
 public:
  Tableau(const LpProblem& lp, const SimplexOptions& opt) : opt_(opt) {
    n_ = lp.variable_count();
    m_ = lp.row_count();
    build_scaling(lp);

    // Column layout: [structural n][slack per ub row][artificials].
    slack_begin_ = n_;
    art_begin_ = n_ + lp.ub_count();
    std::vector<int> needs_art(m_, 0);
    flip_.assign(m_, 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double rhs = row_rhs(lp, i) * row_scale_[i];
      if (rhs < 0.0) flip_[i] = -1.0;
      needs_art[i] = (i >= lp.ub_count() || flip_[i] < 0.0) ? 1 : 0;
    }
    art_count_ = 0;
    unit_col_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      unit_col_[i] = needs_art[i] ? art_begin_ + art_count_++ : slack_begin_ + i;
    }
    cols_ = art_begin_ + art_count_;
    width_ = cols_ + 1;
    t_.assign((m_ + 1) * width_, 0.0);

    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = row_coeffs(lp, i);
      const double s = flip_[i] * row_scale_[i];
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = s * row[j] * col_scale_[j];
      if (i < lp.ub_count()) at(i, slack_begin_ + i) = flip_[i];
      if (needs_art[i]) at(i, unit_col_[i]) = 1.0;
      at(i, cols_) = s * row_rhs(lp, i);
    }
    basis_ = unit_col_;

    cost_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp.objective[j] * col_scale_[j];
    limit_ = opt.iteration_factor == 0 ? std::numeric_limits<std::size_t>::max()
                                       : opt.iteration_factor * (m_ + n_);
    bland_after_ = opt.bland_factor * (m_ + n_);
  }

  LpSolution solve(const LpProblem& lp) {
    LpSolution sol;
    // Phase 1: minimise the sum of artificials.
    if (art_count_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t j = art_begin_; j < cols_; ++j) phase1[j] = 1.0;
      load_objective(phase1);
      run(/*allow_artificial=*/true);
      const double infeasibility = -at(m_, cols_);
      if (infeasibility > opt_.feasibility_tolerance) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = pivots_;
        return sol;
      }
      drive_out_artificials();
    }

    load_objective(cost_);
    if (!run(/*allow_artificial=*/false)) {
      sol.status = LpStatus::Unbounded;
      sol.iterations = pivots_;
      return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.iterations = pivots_;
    std::vector<double> scaled(cols_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) scaled[basis_[i]] = at(i, cols_);
    sol.primal.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) sol.primal[j] = std::max(0.0, scaled[j]) * col_scale_[j];
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) sol.objective += lp.objective[j] * sol.primal[j];

    sol.ub_duals.resize(lp.ub_count());
    sol.eq_duals.resize(lp.eq_count());
    for (std::size_t i = 0; i < m_; ++i) {
      const double y = -at(m_, unit_col_[i]) * flip_[i] * row_scale_[i];
      if (i < lp.ub_count()) {
        sol.ub_duals[i] = y;
      } else {
        sol.eq_duals[i - lp.ub_count()] = y;
      }
    }
    return sol;
  }

 private:
  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }

  static const std::vector<double>& row_coeffs(const LpProblem& lp, std::size_t i) {
    return i < lp.ub_count() ? lp.ub_rows[i] : lp.eq_rows[i - lp.ub_count()];
  }
  static double row_rhs(const LpProblem& lp, std::size_t i) {
    return i < lp.ub_count() ? lp.ub_rhs[i] : lp.eq_rhs[i - lp.ub_count()];
  }

  static double pow2_near(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
    return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(v))));
  }

  // Geometric-mean equilibration, a few alternating passes. Factors are
  // powers of two so scaling itself introduces no rounding.
  void build_scaling(const LpProblem& lp) {
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    if (!opt_.scale) return;
    for (int pass = 0; pass < 4; ++pass) {
      for (std::size_t i = 0; i < m_; ++i) {
        const auto& row = row_coeffs(lp, i);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
          const double a = std::abs(row[j] * col_scale_[j]);
          if (a == 0.0) continue;
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        if (hi > 0.0) row_scale_[i] = pow2_near(1.0 / std::sqrt(lo * hi));
      }
      for (std::size_t j = 0; j < n_; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = std::abs(row_coeffs(lp, i)[j] * row_scale_[i]);
          if (a == 0.0) continue;
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        if (hi > 0.0) col_scale_[j] = pow2_near(1.0 / std::sqrt(lo * hi));
      }
    }
  }

  // Objective row holds reduced costs d_j = c_j - c_B B^-1 A_j and -z.
  void load_objective(const std::vector<double>& c) {
    double* obj = &at(m_, 0);
    std::fill(obj, obj + width_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) obj[j] = c[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &at(i, 0);
      for (std::size_t j = 0; j < width_; ++j) obj[j] -= cb * row[j];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    if (++pivots_ > limit_) {
      throw Error(ErrorCode::IterationLimitExceeded, "simplex exceeded " + std::to_string(limit_) + " pivots");
    }
    double* prow = &at(r, 0);
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < width_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = &at(i, 0);
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  bool is_artificial(std::size_t col) const { return col >= art_begin_; }

  // Returns false when the objective is unbounded below.
  bool run(bool allow_artificial) {
    const std::size_t last = allow_artificial ? cols_ : art_begin_;
    for (;;) {
      const bool bland = pivots_ >= bland_after_;
      const double* obj = &at(m_, 0);
      std::size_t enter = cols_;
      double best = -opt_.optimality_tolerance;
      for (std::size_t j = 0; j < last; ++j) {
        if (obj[j] < best) {
          enter = j;
          if (bland) break;
          best = obj[j];
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, at(i, cols_)) / a;
        if (leave == m_) {
          leave = i;
          best_ratio = ratio;
          continue;
        }
        const double slack = 1e-12 * (1.0 + best_ratio);
        if (ratio < best_ratio - slack) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + slack) {
          // Tie: smallest row index under Dantzig (already held), smallest
          // basic variable index under Bland.
          if (bland && basis_[i] < basis_[leave]) leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      std::size_t col = cols_;
      double best = opt_.pivot_tolerance;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          col = j;
        }
      }
      // A row with no usable entry is redundant; its artificial stays basic at zero.
      if (col != cols_) pivot(i, col);
    }
  }

  SimplexOptions opt_;
  std::size_t n_ = 0, m_ = 0, cols_ = 0, width_ = 0;
  std::size_t slack_begin_ = 0, art_begin_ = 0, art_count_ = 0;
  std::size_t pivots_ = 0, limit_ = 0, bland_after_ = 0;
  std::vector<double> t_;
  std::vector<double> cost_;
  std::vector<double> flip_;
  std::vector<double> row_scale_, col_scale_;
  std::vector<std::size_t> unit_col_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Solves the program with a dense two-phase primal simplex.
///
/// Dantzig pricing, switching to Bland's rule after `bland_factor * (rows +
/// cols)` pivots. Throws IterationLimitExceeded past the pivot limit.
inline LpSolution solve(const LpProblem& lp, const SimplexOptions& options = {}) {
  check_well_formed(lp);
  detail::Tableau tableau(lp, options);
  return tableau.solve(lp);
}

/// Outcome of an optimality audit; `ok` is false with one line per failed check.
struct CertificateCheck {
  bool ok = true;
  std::vector<std::string> diagnostics;
  explicit operator bool() const noexcept { return ok; }
};

/// Audits primal feasibility, dual feasibility and the duality gap.
///
/// Residuals are measured relative to the magnitude of the terms in each row
/// (1 + |rhs| + sum |a_ij v_j|) so that rows with tiny coefficients and large
/// variables are judged on the same footing.
inline CertificateCheck verify_certificate(const LpProblem& lp, const LpSolution& sol,
                                           double feasibility_tolerance = 1e-7,
                                           double gap_tolerance = 1e-6) {
  CertificateCheck out;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.diagnostics.push_back(std::move(msg));
  };
  if (sol.status != LpStatus::Optimal) {
    fail("status is " + std::string(to_string(sol.status)));
    return out;
  }
  const auto n = lp.variable_count();
  if (sol.primal.size() != n || sol.ub_duals.size() != lp.ub_count() || sol.eq_duals.size() != lp.eq_count()) {
    fail("solution dimensions do not match the problem");
    return out;
  }
  const double tol = feasibility_tolerance;

  for (std::size_t j = 0; j < n; ++j) {
    if (sol.primal[j] < -tol) fail("variable " + std::to_string(j) + " is negative");
  }
  auto activity = [&](const std::vector<double>& row, double& magnitude) {
    double s = 0.0;
    magnitude = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += row[j] * sol.primal[j];
      magnitude += std::abs(row[j] * sol.primal[j]);
    }
    return s;
  };
  for (std::size_t i = 0; i < lp.ub_count(); ++i) {
    double mag = 0.0;
    const double r = activity(lp.ub_rows[i], mag) - lp.ub_rhs[i];
    if (r > tol * (1.0 + mag + std::abs(lp.ub_rhs[i]))) {
      fail("inequality row " + std::to_string(i) + " violated by " + std::to_string(r));
    }
  }
  for (std::size_t i = 0; i < lp.eq_count(); ++i) {
    double mag = 0.0;
    const double r = activity(lp.eq_rows[i], mag) - lp.eq_rhs[i];
    if (std::abs(r) > tol * (1.0 + mag + std::abs(lp.eq_rhs[i]))) {
      fail("equality row " + std::to_string(i) + " violated by " + std::to_string(r));
    }
  }

  for (std::size_t i = 0; i < lp.ub_count(); ++i) {
    if (sol.ub_duals[i] > tol) fail("dual of inequality row " + std::to_string(i) + " has the wrong sign");
  }
  for (std::size_t j = 0; j < n; ++j) {
    double rc = lp.objective[j];
    double mag = std::abs(lp.objective[j]);
    for (std::size_t i = 0; i < lp.ub_count(); ++i) {
      rc -= sol.ub_duals[i] * lp.ub_rows[i][j];
      mag += std::abs(sol.ub_duals[i] * lp.ub_rows[i][j]);
    }
    for (std::size_t i = 0; i < lp.eq_count(); ++i) {
      rc -= sol.eq_duals[i] * lp.eq_rows[i][j];
      mag += std::abs(sol.eq_duals[i] * lp.eq_rows[i][j]);
    }
    if (rc < -tol * (1.0 + mag)) {
      fail("reduced cost of variable " + std::to_string(j) + " is negative: " + std::to_string(rc));
    }
  }

  double primal_obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) primal_obj += lp.objective[j] * sol.primal[j];
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < lp.ub_count(); ++i) dual_obj += lp.ub_rhs[i] * sol.ub_duals[i];
  for (std::size_t i = 0; i < lp.eq_count(); ++i) dual_obj += lp.eq_rhs[i] * sol.eq_duals[i];
  if (std::abs(primal_obj - dual_obj) > gap_tolerance * (1.0 + std::abs(primal_obj))) {
    fail("duality gap " + std::to_string(std::abs(primal_obj - dual_obj)));
  }
  return out;
}

}  // namespace fairalloc

#endif  // FAIRALLOC_SIMPLEX_HPP
