// Copyright 2026 The plexus-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plexus/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plexus::lp {

namespace {

constexpr double kEps = 1e-11;

// Tableau with one artificial per row; Bland's rule keeps it cycle-free.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows + 1, std::vector<double>(cols + 1, 0.0)), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  double& rhs(std::size_t r) { return a_[r][cols_]; }
  std::vector<double>& cost() { return a_[rows_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = a_[pr][pc];
    for (double& v : a_[pr]) v /= p;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = a_[r][pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) a_[r][c] -= f * a_[pr][c];
    }
    basis_[pr] = pc;
  }

  // Minimises the cost row over columns [0, active); returns false if unbounded.
  bool run(std::size_t active) {
    for (;;) {
      std::size_t pc = active;
      for (std::size_t c = 0; c < active; ++c) {
        if (a_[rows_][c] < -kEps) {
          pc = c;
          break;
        }
      }
      if (pc == active) return true;
      std::size_t pr = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        if (a_[r][pc] <= kEps) continue;
        const double ratio = a_[r][cols_] / a_[r][pc];
        if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && basis_[r] < basis_[pr])) {
          best = ratio;
          pr = r;
        }
      }
      if (pr == rows_) return false;
      pivot(pr, pc);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<double>> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t n = problem.num_vars();
  const std::size_t m_eq = problem.eq_rows.size();
  const std::size_t m_ub = problem.ub_rows.size();
  if (problem.eq_rhs.size() != m_eq || problem.ub_rhs.size() != m_ub) {
    throw std::invalid_argument("lp::solve: row/rhs size mismatch");
  }
  const std::size_t m = m_eq + m_ub;
  // Columns: structural [0,n), slacks [n, n+m_ub), artificials [n+m_ub, n+m_ub+m).
  const std::size_t art0 = n + m_ub;
  Tableau t(m, art0 + m);

  for (std::size_t r = 0; r < m; ++r) {
    const bool is_eq = r < m_eq;
    const auto& row = is_eq ? problem.eq_rows[r] : problem.ub_rows[r - m_eq];
    double b = is_eq ? problem.eq_rhs[r] : problem.ub_rhs[r - m_eq];
    if (row.size() != n) throw std::invalid_argument("lp::solve: row width mismatch");
    const double sign = b < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign * row[c];
    if (!is_eq) t.at(r, n + (r - m_eq)) = sign;
    t.at(r, art0 + r) = 1.0;
    t.rhs(r) = sign * b;
    t.basis(r) = art0 + r;
  }

  // Phase 1: minimise the sum of artificials.
  auto& cost = t.cost();
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < art0; ++c) cost[c] -= t.at(r, c);
    cost[art0 + m] -= t.rhs(r);
  }
  t.run(art0 + m);
  if (-cost[art0 + m] > 1e-8) return {Status::kInfeasible, 0.0, {}};

  // Drive remaining artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis(r) < art0) continue;
    for (std::size_t c = 0; c < art0; ++c) {
      if (std::abs(t.at(r, c)) > 1e-9) {
        t.pivot(r, c);
        break;
      }
    }
  }

  // Phase 2: minimise -objective over non-artificial columns.
  for (double& v : cost) v = 0.0;
  for (std::size_t c = 0; c < n; ++c) cost[c] = -problem.objective[c];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = t.basis(r);
    const double f = cost[b];
    if (f == 0.0) continue;
    for (std::size_t c = 0; c <= art0 + m; ++c) cost[c] -= f * t.at(r, c);
  }
  if (!t.run(art0)) return {Status::kUnbounded, 0.0, {}};

  Solution sol;
  sol.status = Status::kOptimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis(r) < n) sol.x[t.basis(r)] = t.rhs(r);
  }
  for (std::size_t c = 0; c < n; ++c) sol.value += problem.objective[c] * sol.x[c];
  return sol;
}

}  // namespace plexus::lp
