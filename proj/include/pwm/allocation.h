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

#ifndef PWM_ALLOCATION_H_
#define PWM_ALLOCATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pwm/sample.h"

namespace pwm {

// Treat when every active comparison holds: x[a] >= cutoff for direction +1,
// x[a] <= cutoff for direction -1. Cutoffs may be +-infinity. An empty active
// list is the whole covariate space; `is_empty` marks the empty allocation.
struct ThresholdAllocation {
  bool is_empty = false;
  std::vector<int> active;  // sorted, distinct
  std::vector<double> cutoffs;
  std::vector<int> directions;

  static ThresholdAllocation Empty() { return {.is_empty = true}; }
  static ThresholdAllocation Everyone() { return {}; }

  friend bool operator==(const ThresholdAllocation&,
                         const ThresholdAllocation&) = default;
};

enum class MonotoneDirection { kNonDecreasing, kNonIncreasing };
const char* DirectionName(MonotoneDirection direction);
MonotoneDirection ParseDirection(const std::string& name);

// Interval of the first covariate mapped affinely onto [0, 1].
struct Domain {
  double lo = 0.0;
  double hi = 1.0;
  friend bool operator==(const Domain&, const Domain&) = default;
};

// Treat x = (x1, x2) iff sum_j theta_j psi_{T,j}(x1) + x2 >= 0, with theta
// monotone in the stated direction. x1 outside the domain is clamped to it.
struct MonotoneBoundaryAllocation {
  int knots = 1;  // T
  std::vector<double> theta;  // T + 1 entries
  MonotoneDirection direction = MonotoneDirection::kNonDecreasing;
  Domain domain;

  // -sum_j theta_j psi_{T,j}(x1): units with x2 at or above it are treated.
  double Boundary(double x1) const;

  friend bool operator==(const MonotoneBoundaryAllocation&,
                         const MonotoneBoundaryAllocation&) = default;
};

using Allocation = std::variant<ThresholdAllocation, MonotoneBoundaryAllocation>;

// Throws ValidationError if the allocation is malformed for dimension `dim`
// (indices, lengths, directions, theta monotonicity).
void Validate(const ThresholdAllocation& alloc, std::size_t dim);
void Validate(const MonotoneBoundaryAllocation& alloc);

bool Contains(const Allocation& alloc, std::span<const double> x);
bool Contains(const ThresholdAllocation& alloc, std::span<const double> x);
bool Contains(const MonotoneBoundaryAllocation& alloc,
              std::span<const double> x);

// Membership of every unit of the sample.
std::vector<bool> Classify(const Allocation& alloc, const Sample& sample);

// W_n(G) = (1/n) sum_i tau_i 1{X_i in G}.
double EmpiricalWelfare(const ScoreVector& scores, const Allocation& alloc,
                        const Sample& sample);
double EmpiricalWelfare(std::span<const double> scores, const Allocation& alloc,
                        const Sample& sample);

// Position of x1 on the knot axis: T * (x1 - lo) / (hi - lo), x1 clamped to
// the domain first. Shared by membership tests and the monotone solver so
// that both classify points identically.
double KnotCoordinate(double x1, int knots, const Domain& domain);
// Hat function max(0, 1 - |t - j|).
inline double Hat(double t, int j) {
  const double v = 1.0 - (t >= j ? t - j : j - t);
  return v > 0.0 ? v : 0.0;
}

// psi_{T,j}(x) for x mapped from [lo, hi] onto [0, 1]; zero outside.
// Index on one knot interval, sum_j theta_j psi_j, written so that flat
// segments and knot points are exact: left + (right - left) * w where w is the
// hat weight of the right knot.
inline double SegmentIndex(double left, double right, double w) {
  return left + (right - left) * w;
}

double Psi(int knots, int j, double x, const Domain& domain = {});

// T x (T + 1) first-difference matrix, rows -1, +1 on the diagonal pair.
std::vector<std::vector<double>> DiffMatrix(int knots);

// Whether D_T theta >= 0 (non-decreasing) or <= 0 (non-increasing).
bool SatisfiesMonotonicity(std::span<const double> theta,
                           MonotoneDirection direction);

enum class Family { kThreshold, kMonotone };
const char* FamilyName(Family family);

struct SieveClass {
  int k = 1;
  int subset_size = 0;  // threshold family: k - 1 active covariates
  int knots = 1;        // monotone family: T = 2^(k-1)
  double t = 1.0;       // t_k
  std::optional<int> vc_hint;
};

struct SieveSequence {
  Family family = Family::kThreshold;
  std::size_t dim = 1;
  MonotoneDirection direction = MonotoneDirection::kNonDecreasing;
  Domain domain;
  std::optional<double> theta_bound;  // |theta_j| <= bound; data-driven if unset
  bool include_tk_term = true;
  std::vector<SieveClass> classes;

  std::size_t size() const { return classes.size(); }
  // k is 1-based. Throws if out of range.
  const SieveClass& at(int k) const;
  // Replaces t_k; must be strictly increasing when the term is enabled.
  void SetTk(const std::vector<double>& t);
};

// Classes k = 1..min(d_x + 1, max_k); class k uses subsets of k - 1 covariates.
SieveSequence ThresholdSieve(std::size_t dim, std::optional<int> max_k = {});
// Classes k = 1..K with T_k = 2^(k-1) knots.
SieveSequence MonotoneSieve(int max_k, MonotoneDirection direction,
                            Domain domain = {});

// Class-(k+1) representative of a class-k threshold allocation: the
// smallest inactive covariate is added with a cutoff at -infinity.
ThresholdAllocation PadThreshold(const ThresholdAllocation& alloc,
                                 std::size_t dim);
// Same boundary over 2T knots: even knots copy theta, odd knots take the
// midpoint of their neighbours.
MonotoneBoundaryAllocation RefineMonotone(const MonotoneBoundaryAllocation& alloc);

// JSON documents: {"family": ..., parameters...}. Infinite cutoffs are
// written as the strings "inf" / "-inf".
nlohmann::json ToJson(const Allocation& alloc);
Allocation AllocationFromJson(const nlohmann::json& doc);

}  // namespace pwm

#endif  // PWM_ALLOCATION_H_
