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

#include "pwm/allocation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pwm/error.h"

namespace pwm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two-term evaluation of sum_j theta_j psi_j at knot coordinate t. Every
// other hat is exactly zero at t.
double IndexValue(std::span<const double> theta, int knots, double t) {
  const int j = std::min(static_cast<int>(std::floor(t)), knots - 1);
  return SegmentIndex(theta[j], theta[j + 1], Hat(t, j + 1));
}

nlohmann::json EncodeReal(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double DecodeReal(const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw DataError("unrecognised real value '" + s + "'");
  }
  if (!v.is_number()) throw DataError("expected a number");
  return v.get<double>();
}

}  // namespace

const char* DirectionName(MonotoneDirection direction) {
  return direction == MonotoneDirection::kNonDecreasing ? "non-decreasing"
                                                        : "non-increasing";
}

MonotoneDirection ParseDirection(const std::string& name) {
  if (name == "non-decreasing") return MonotoneDirection::kNonDecreasing;
  if (name == "non-increasing") return MonotoneDirection::kNonIncreasing;
  throw ValidationError("unknown monotone direction '" + name + "'");
}

const char* FamilyName(Family family) {
  return family == Family::kThreshold ? "threshold" : "monotone";
}

double MonotoneBoundaryAllocation::Boundary(double x1) const {
  return -IndexValue(theta, knots, KnotCoordinate(x1, knots, domain));
}

void Validate(const ThresholdAllocation& alloc, std::size_t dim) {
  if (alloc.is_empty) return;
  if (alloc.cutoffs.size() != alloc.active.size() ||
      alloc.directions.size() != alloc.active.size()) {
    throw ValidationError("threshold allocation has mismatched field lengths");
  }
  for (std::size_t j = 0; j < alloc.active.size(); ++j) {
    const int a = alloc.active[j];
    if (a < 0 || static_cast<std::size_t>(a) >= dim) {
      throw ValidationError("active covariate index out of range");
    }
    if (j > 0 && alloc.active[j - 1] >= a) {
      throw ValidationError("active covariate indices must be sorted and distinct");
    }
    if (alloc.directions[j] != 1 && alloc.directions[j] != -1) {
      throw ValidationError("threshold direction must be +1 or -1");
    }
    if (std::isnan(alloc.cutoffs[j])) throw ValidationError("cutoff is NaN");
  }
}

void Validate(const MonotoneBoundaryAllocation& alloc) {
  if (alloc.knots < 1) throw ValidationError("knot count T must be >= 1");
  if (alloc.theta.size() != static_cast<std::size_t>(alloc.knots) + 1) {
    throw ValidationError("theta must have T + 1 entries");
  }
  if (!(alloc.domain.lo < alloc.domain.hi)) {
    throw ValidationError("domain must satisfy lo < hi");
  }
  for (double v : alloc.theta) {
    if (!std::isfinite(v)) throw ValidationError("theta entries must be finite");
  }
  if (!SatisfiesMonotonicity(alloc.theta, alloc.direction)) {
    throw ValidationError(std::string("theta is not ") +
                          DirectionName(alloc.direction));
  }
}

bool Contains(const ThresholdAllocation& alloc, std::span<const double> x) {
  if (alloc.is_empty) return false;
  for (std::size_t j = 0; j < alloc.active.size(); ++j) {
    const auto a = static_cast<std::size_t>(alloc.active[j]);
    if (a >= x.size()) throw ValidationError("covariate dimension mismatch");
    const bool ok = alloc.directions[j] > 0 ? x[a] >= alloc.cutoffs[j]
                                            : x[a] <= alloc.cutoffs[j];
    if (!ok) return false;
  }
  return true;
}

bool Contains(const MonotoneBoundaryAllocation& alloc,
              std::span<const double> x) {
  if (x.size() != 2) {
    throw ValidationError("monotone allocations need two covariates");
  }
  const double t = KnotCoordinate(x[0], alloc.knots, alloc.domain);
  return IndexValue(alloc.theta, alloc.knots, t) + x[1] >= 0.0;
}

bool Contains(const Allocation& alloc, std::span<const double> x) {
  return std::visit([&](const auto& a) { return Contains(a, x); }, alloc);
}

std::vector<bool> Classify(const Allocation& alloc, const Sample& sample) {
  std::vector<bool> member(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    member[i] = Contains(alloc, sample.x(i));
  }
  return member;
}

double EmpiricalWelfare(std::span<const double> scores, const Allocation& alloc,
                        const Sample& sample) {
  if (scores.size() != sample.size()) {
    throw ValidationError("score vector length does not match the sample");
  }
  return MeanOverMembers(scores, Classify(alloc, sample));
}

double EmpiricalWelfare(const ScoreVector& scores, const Allocation& alloc,
                        const Sample& sample) {
  return EmpiricalWelfare(std::span<const double>(scores.scores), alloc, sample);
}

double KnotCoordinate(double x1, int knots, const Domain& domain) {
  const double u =
      std::clamp((x1 - domain.lo) / (domain.hi - domain.lo), 0.0, 1.0);
  return static_cast<double>(knots) * u;
}

double Psi(int knots, int j, double x, const Domain& domain) {
  if (knots < 1) throw ValidationError("T must be >= 1");
  if (j < 0 || j > knots) throw ValidationError("psi index j out of range");
  if (!(domain.lo < domain.hi)) throw ValidationError("domain must satisfy lo < hi");
  const double u = (x - domain.lo) / (domain.hi - domain.lo);
  if (u < 0.0 || u > 1.0) return 0.0;
  return Hat(static_cast<double>(knots) * u, j);
}

std::vector<std::vector<double>> DiffMatrix(int knots) {
  if (knots < 1) throw ValidationError("T must be >= 1");
  std::vector<std::vector<double>> d(knots, std::vector<double>(knots + 1, 0.0));
  for (int i = 0; i < knots; ++i) {
    d[i][i] = -1.0;
    d[i][i + 1] = 1.0;
  }
  return d;
}

bool SatisfiesMonotonicity(std::span<const double> theta,
                           MonotoneDirection direction) {
  for (std::size_t j = 1; j < theta.size(); ++j) {
    const double diff = theta[j] - theta[j - 1];
    if (direction == MonotoneDirection::kNonDecreasing ? diff < 0.0 : diff > 0.0) {
      return false;
    }
  }
  return true;
}

const SieveClass& SieveSequence::at(int k) const {
  if (k < 1 || static_cast<std::size_t>(k) > classes.size()) {
    throw ValidationError("class index k = " + std::to_string(k) +
                          " is outside 1.." + std::to_string(classes.size()));
  }
  return classes[k - 1];
}

void SieveSequence::SetTk(const std::vector<double>& t) {
  if (t.size() != classes.size()) {
    throw ValidationError("t_k sequence length must equal the class count");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || t[i] < 0.0) {
      throw ValidationError("t_k must be finite and non-negative");
    }
    if (include_tk_term && i > 0 && !(t[i] > t[i - 1])) {
      throw ValidationError("t_k must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) classes[i].t = t[i];
}

SieveSequence ThresholdSieve(std::size_t dim, std::optional<int> max_k) {
  if (dim < 1) throw ValidationError("threshold sieve needs d_x >= 1");
  int count = static_cast<int>(dim) + 1;
  if (max_k) {
    if (*max_k < 1) throw ValidationError("max_k must be >= 1");
    count = std::min(count, *max_k);
  }
  SieveSequence sieve;
  sieve.family = Family::kThreshold;
  sieve.dim = dim;
  for (int k = 1; k <= count; ++k) {
    sieve.classes.push_back({.k = k, .subset_size = k - 1, .knots = 0,
                             .t = static_cast<double>(k)});
  }
  return sieve;
}

SieveSequence MonotoneSieve(int max_k, MonotoneDirection direction,
                            Domain domain) {
  if (max_k < 1) throw ValidationError("monotone sieve needs K >= 1");
  if (max_k > 20) throw ValidationError("monotone sieve supports K <= 20");
  if (!(domain.lo < domain.hi)) throw ValidationError("domain must satisfy lo < hi");
  SieveSequence sieve;
  sieve.family = Family::kMonotone;
  sieve.dim = 2;
  sieve.direction = direction;
  sieve.domain = domain;
  for (int k = 1; k <= max_k; ++k) {
    sieve.classes.push_back({.k = k, .subset_size = 0, .knots = 1 << (k - 1),
                             .t = static_cast<double>(k)});
  }
  return sieve;
}

ThresholdAllocation PadThreshold(const ThresholdAllocation& alloc,
                                 std::size_t dim) {
  if (alloc.is_empty) return alloc;
  if (alloc.active.size() >= dim) {
    throw ValidationError("allocation already uses every covariate");
  }
  int extra = 0;
  while (std::find(alloc.active.begin(), alloc.active.end(), extra) !=
         alloc.active.end()) {
    ++extra;
  }
  ThresholdAllocation out;
  const auto pos = static_cast<std::size_t>(
      std::lower_bound(alloc.active.begin(), alloc.active.end(), extra) -
      alloc.active.begin());
  out.active = alloc.active;
  out.cutoffs = alloc.cutoffs;
  out.directions = alloc.directions;
  out.active.insert(out.active.begin() + pos, extra);
  out.cutoffs.insert(out.cutoffs.begin() + pos, -kInf);
  out.directions.insert(out.directions.begin() + pos, 1);
  return out;
}

MonotoneBoundaryAllocation RefineMonotone(const MonotoneBoundaryAllocation& alloc) {
  MonotoneBoundaryAllocation out = alloc;
  out.knots = 2 * alloc.knots;
  out.theta.assign(out.knots + 1, 0.0);
  for (int j = 0; j <= alloc.knots; ++j) out.theta[2 * j] = alloc.theta[j];
  for (int j = 0; j < alloc.knots; ++j) {
    out.theta[2 * j + 1] = 0.5 * (alloc.theta[j] + alloc.theta[j + 1]);
  }
  return out;
}

nlohmann::json ToJson(const Allocation& alloc) {
  if (const auto* t = std::get_if<ThresholdAllocation>(&alloc)) {
    nlohmann::json cutoffs = nlohmann::json::array();
    for (double c : t->cutoffs) cutoffs.push_back(EncodeReal(c));
    return {{"family", "threshold"},
            {"empty", t->is_empty},
            {"active", t->active},
            {"cutoffs", cutoffs},
            {"directions", t->directions}};
  }
  const auto& m = std::get<MonotoneBoundaryAllocation>(alloc);
  return {{"family", "monotone"},
          {"T", m.knots},
          {"theta", m.theta},
          {"direction", DirectionName(m.direction)},
          {"domain", {m.domain.lo, m.domain.hi}}};
}

Allocation AllocationFromJson(const nlohmann::json& doc) {
  try {
    const auto family = doc.at("family").get<std::string>();
    if (family == "threshold") {
      ThresholdAllocation t;
      t.is_empty = doc.at("empty").get<bool>();
      t.active = doc.at("active").get<std::vector<int>>();
      for (const auto& c : doc.at("cutoffs")) t.cutoffs.push_back(DecodeReal(c));
      t.directions = doc.at("directions").get<std::vector<int>>();
      const int max_index =
          t.active.empty() ? 0 : *std::max_element(t.active.begin(), t.active.end());
      Validate(t, static_cast<std::size_t>(max_index) + 1);
      return t;
    }
    if (family == "monotone") {
      MonotoneBoundaryAllocation m;
      m.knots = doc.at("T").get<int>();
      m.theta = doc.at("theta").get<std::vector<double>>();
      m.direction = ParseDirection(doc.at("direction").get<std::string>());
      const auto& dom = doc.at("domain");
      m.domain = {dom.at(0).get<double>(), dom.at(1).get<double>()};
      Validate(m);
      return m;
    }
    throw DataError("unknown allocation family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed allocation document: ") + e.what());
  } catch (const ValidationError& e) {
    throw DataError(std::string("invalid allocation document: ") + e.what());
  }
}

}  // namespace pwm
