// Copyright 2026 The PWM Authors.
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

#ifndef PWM_EWM_SOLVER_H_
#define PWM_EWM_SOLVER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "pwm/allocation.h"
#include "pwm/sample.h"

namespace pwm {

struct EwmSolution {
  Allocation allocation;
  double welfare = 0.0;  // W_n of `allocation`, recomputed in index order
  std::int64_t nodes_explored = 0;
  int class_index = 0;
};

struct SolverOptions {
  // A welfare value known to be attainable in the class (for instance the
  // optimum of a nested smaller class). Only used to prune; the solver falls
  // back to an unpruned search if it turns out to be unattainable.
  std::optional<double> welfare_floor;
  // Box |theta_j| <= bound for monotone classes; DefaultThetaBound if unset.
  std::optional<double> theta_bound;
};

// Best threshold allocation with exactly k - 1 active covariates (k = 1: the
// better of the empty set and everyone). Exact: depth-first branch and bound
// over observed cutoffs, with an O(m log m) sweep for the last two active
// covariates. Ties resolve to the first optimum in the order
//   empty set < (subset, direction vector, cutoffs)
// with subsets and +1-before--1 direction vectors compared lexicographically
// and each cutoff ranked from most to least inclusive. Finite cutoffs sit on
// the covariate value of a unit with a positive score.
EwmSolution SolveThresholdClass(std::span<const double> scores,
                                const Sample& sample, int k,
                                const SolverOptions& options = {});

// Best monotone boundary with T knots whose knot levels lie on the grid of
// observed x2 values plus one sentinel below and one above. Exact over that
// grid via dynamic programming over knots. Ties resolve to the
// lexicographically smallest sequence of knot levels.
EwmSolution SolveMonotoneClass(std::span<const double> scores,
                               const Sample& sample, int knots,
                               MonotoneDirection direction, Domain domain,
                               const SolverOptions& options = {});

// Dispatches on the sieve family; records class_index = k.
EwmSolution SolveClass(std::span<const double> scores, const Sample& sample,
                       const SieveSequence& sieve, int k,
                       const SolverOptions& options = {});

// 10 * max(1, max_i |x2_i|).
double DefaultThetaBound(const Sample& sample);

// Candidate knot levels for the monotone solver, ascending: a sentinel below
// the smallest x2, the distinct observed x2 values, a sentinel above the
// largest. Levels outside the theta box are dropped.
std::vector<double> MonotoneLevelGrid(const Sample& sample, double theta_bound);

// Writes the mixed-integer program(s) of class k in CPLEX LP format and
// returns the written paths. Threshold classes produce one program per
// covariate subset (a single subset writes exactly `path`, several write
// `<stem>_<subset><ext>`); monotone classes produce one program.
std::vector<std::filesystem::path> ExportMilp(std::span<const double> scores,
                                              const Sample& sample,
                                              const SieveSequence& sieve, int k,
                                              const std::filesystem::path& path,
                                              const SolverOptions& options = {});

nlohmann::json ToJson(const EwmSolution& solution);

}  // namespace pwm

#endif  // PWM_EWM_SOLVER_H_
