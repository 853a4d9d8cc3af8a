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

// Dense two-phase simplex for the small feasibility problems that come out of
// the grasp stability check (a dozen variables, a dozen rows).

#pragma once

#include <vector>

namespace plexus::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

// maximize c^T x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
struct Problem {
  std::vector<double> objective;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ub_rows;
  std::vector<double> ub_rhs;

  std::size_t num_vars() const { return objective.size(); }
};

struct Solution {
  Status status = Status::kInfeasible;
  double value = 0.0;
  std::vector<double> x;
};

Solution solve(const Problem& problem);

}  // namespace plexus::lp
