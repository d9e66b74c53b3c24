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

#include "pwm/sample.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pwm/error.h"
#include "pwm/random.h"

namespace pwm {
namespace {

const std::vector<double>* PerUnitValues(const PropensitySpec& prop) {
  if (const auto* p = std::get_if<KnownPerUnit>(&prop)) return &p->e;
  if (const auto* p = std::get_if<EstimatedPerUnit>(&prop)) return &p->e;
  return nullptr;
}

void CheckLength(const std::vector<double>& e, std::size_t n) {
  if (e.size() != n) {
    throw ValidationError("propensity vector has " + std::to_string(e.size()) +
                          " entries but the sample has " + std::to_string(n) +
                          " units");
  }
}

double MaxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double s : v) m = std::max(m, std::abs(s));
  return m;
}

double IpwScore(double y, int d, double e) {
  return d == 1 ? y / e : -y / (1.0 - e);
}

}  // namespace

Sample::Sample(std::vector<double> y, std::vector<int> d, std::vector<double> x,
               std::size_t dim, std::vector<std::string> covariate_names)
    : y_(std::move(y)),
      d_(std::move(d)),
      x_(std::move(x)),
      dim_(dim),
      names_(std::move(covariate_names)) {
  if (dim_ == 0) throw ValidationError("covariate dimension must be >= 1");
  if (d_.size() != y_.size() || x_.size() != y_.size() * dim_) {
    throw ValidationError("sample columns have inconsistent lengths");
  }
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (d_[i] != 0 && d_[i] != 1) {
      throw ValidationError("treatment of unit " + std::to_string(i) +
                            " is not 0 or 1");
    }
    if (!std::isfinite(y_[i])) {
      throw ValidationError("outcome of unit " + std::to_string(i) +
                            " is not finite");
    }
  }
  for (double v : x_) {
    if (!std::isfinite(v)) throw ValidationError("non-finite covariate value");
  }
  if (names_.empty()) {
    for (std::size_t a = 0; a < dim_; ++a) names_.push_back("x" + std::to_string(a + 1));
  } else if (names_.size() != dim_) {
    throw ValidationError("covariate name count does not match dimension");
  }
}

Sample Sample::Subset(std::span<const std::size_t> indices) const {
  std::vector<double> y;
  std::vector<int> d;
  std::vector<double> x;
  y.reserve(indices.size());
  d.reserve(indices.size());
  x.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= size()) throw ValidationError("subset index out of range");
    y.push_back(y_[i]);
    d.push_back(d_[i]);
    auto row = this->x(i);
    x.insert(x.end(), row.begin(), row.end());
  }
  Sample out(std::move(y), std::move(d), std::move(x), dim_, names_);
  out.demeaned_ = demeaned_;
  return out;
}

bool IsKnown(const PropensitySpec& prop) {
  return !std::holds_alternative<EstimatedPerUnit>(prop);
}

PropensitySpec SubsetPropensity(const PropensitySpec& prop,
                                std::span<const std::size_t> indices) {
  auto pick = [&](const std::vector<double>& e) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
      if (i >= e.size()) throw ValidationError("propensity index out of range");
      out.push_back(e[i]);
    }
    return out;
  };
  if (const auto* p = std::get_if<KnownPerUnit>(&prop)) return KnownPerUnit{pick(p->e)};
  if (const auto* p = std::get_if<EstimatedPerUnit>(&prop)) {
    return EstimatedPerUnit{pick(p->e), p->alpha};
  }
  return prop;
}

double KappaHat(const PropensitySpec& prop, std::size_t n) {
  double kappa;
  if (const auto* c = std::get_if<KnownConstant>(&prop)) {
    kappa = std::min(c->e, 1.0 - c->e);
  } else {
    const auto& e = *PerUnitValues(prop);
    CheckLength(e, n);
    kappa = 1.0;
    for (double v : e) kappa = std::min(kappa, std::min(v, 1.0 - v));
  }
  if (IsKnown(prop) && !(kappa > 0.0)) {
    throw ValidationError("known propensities must lie strictly inside (0, 1)");
  }
  return kappa;
}

const char* ScoreKindName(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kExact: return "exact";
    case ScoreKind::kHybrid: return "hybrid";
    case ScoreKind::kDemeanedExact: return "demeaned-exact";
    case ScoreKind::kDemeanedHybrid: return "demeaned-hybrid";
  }
  return "unknown";
}

void Validate(const BoundConfig& config) {
  if (!(config.M > 0.0)) throw ValidationError("M must be positive");
  if (!(config.kappa > 0.0 && config.kappa < 0.5)) {
    throw ValidationError("kappa must lie in (0, 0.5)");
  }
  if (config.ell && !(*config.ell > 0.0 && *config.ell < 1.0)) {
    throw ValidationError("ell must lie in (0, 1)");
  }
}

ScoreVector ComputeScores(const Sample& sample, const PropensitySpec& prop) {
  if (!IsKnown(prop)) {
    throw ValidationError(
        "exact scores need a known propensity; use hybrid scores for "
        "estimated propensities");
  }
  const std::size_t n = sample.size();
  KappaHat(prop, n);  // validates range and length
  ScoreVector out;
  out.kind = sample.demeaned() ? ScoreKind::kDemeanedExact : ScoreKind::kExact;
  out.scores.resize(n);
  const auto* per_unit = PerUnitValues(prop);
  const double constant =
      per_unit ? 0.0 : std::get<KnownConstant>(prop).e;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = per_unit ? (*per_unit)[i] : constant;
    out.scores[i] = IpwScore(sample.y(i), sample.d(i), e);
  }
  out.bound = MaxAbs(out.scores);
  return out;
}

double TrimmingEpsilon(std::size_t n, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("trimming exponent must be positive");
  if (n == 0) throw ValidationError("trimming needs n >= 1");
  return std::pow(static_cast<double>(n), -alpha);
}

ScoreVector ComputeHybridScores(const Sample& sample,
                                const EstimatedPerUnit& prop, std::size_t n) {
  CheckLength(prop.e, sample.size());
  const double eps = TrimmingEpsilon(n, prop.alpha);
  if (eps >= 0.5) {
    throw ValidationError("trimming level n^-alpha = " + std::to_string(eps) +
                          " >= 0.5 would discard every unit");
  }
  ScoreVector out;
  out.kind =
      sample.demeaned() ? ScoreKind::kDemeanedHybrid : ScoreKind::kHybrid;
  out.scores.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double e = prop.e[i];
    if (!(e >= 0.0 && e <= 1.0)) {
      throw ValidationError("estimated propensity of unit " +
                            std::to_string(i) + " is outside [0, 1]");
    }
    out.scores[i] = (e >= eps && e <= 1.0 - eps)
                        ? IpwScore(sample.y(i), sample.d(i), e)
                        : 0.0;
  }
  out.bound = MaxAbs(out.scores);
  return out;
}

ScoreVector MakeScores(const Sample& sample, const PropensitySpec& prop,
                       std::size_t trimming_n) {
  if (const auto* est = std::get_if<EstimatedPerUnit>(&prop)) {
    return ComputeHybridScores(sample, *est, trimming_n);
  }
  return ComputeScores(sample, prop);
}

Sample DemeanOutcomes(const Sample& sample) {
  if (sample.empty()) throw ValidationError("cannot demean an empty sample");
  const double mean =
      std::accumulate(sample.y_.begin(), sample.y_.end(), 0.0) /
      static_cast<double>(sample.size());
  Sample out = sample;
  for (double& y : out.y_) y -= mean;
  out.demeaned_ = true;
  return out;
}

std::size_t EstimatingSize(std::size_t n, double ell) {
  if (!(ell > 0.0 && ell < 1.0)) throw ValidationError("ell must lie in (0, 1)");
  // The small slack keeps e.g. 10 * (1 - 0.3) from flooring to 6.
  const double m = std::floor(static_cast<double>(n) * (1.0 - ell) + 1e-9);
  return static_cast<std::size_t>(std::max(0.0, m));
}

SplitSample SplitSampleByFraction(const Sample& sample, double ell,
                                  std::uint64_t seed, bool shuffle) {
  const std::size_t n = sample.size();
  const std::size_t m = EstimatingSize(n, ell);
  if (m < 1 || n - m < 1) {
    throw ValidationError("split of " + std::to_string(n) + " units with ell = " +
                          std::to_string(ell) + " leaves an empty subsample");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle) {
    Rng rng(DeriveSeed(seed, "split"));
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng.Index(i + 1)]);
    }
  }
  SplitSample out;
  out.estimating_indices.assign(order.begin(), order.begin() + m);
  out.testing_indices.assign(order.begin() + m, order.end());
  out.estimating = sample.Subset(out.estimating_indices);
  out.testing = sample.Subset(out.testing_indices);
  out.ell = ell;
  out.seed = seed;
  out.shuffled = shuffle;
  return out;
}

double MeanOverMembers(std::span<const double> scores,
                       const std::vector<bool>& member) {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (member[i]) sum += scores[i];
  }
  return sum / static_cast<double>(scores.size());
}

}  // namespace pwm
