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

#ifndef PWM_SAMPLE_H_
#define PWM_SAMPLE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pwm {

// Experimental data: outcome y, binary treatment d and a covariate vector of
// fixed dimension per unit. Covariates are stored row-major.
class Sample {
 public:
  Sample() = default;
  // Throws ValidationError on ragged covariates, d outside {0,1}, dim == 0 or
  // non-finite values.
  Sample(std::vector<double> y, std::vector<int> d, std::vector<double> x,
         std::size_t dim, std::vector<std::string> covariate_names = {});

  std::size_t size() const { return y_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return y_.empty(); }

  double y(std::size_t i) const { return y_[i]; }
  int d(std::size_t i) const { return d_[i]; }
  double x(std::size_t i, std::size_t a) const { return x_[i * dim_ + a]; }
  std::span<const double> x(std::size_t i) const {
    return {x_.data() + i * dim_, dim_};
  }

  const std::vector<double>& outcomes() const { return y_; }
  const std::vector<int>& treatments() const { return d_; }
  const std::vector<double>& covariates() const { return x_; }
  const std::vector<std::string>& covariate_names() const { return names_; }

  // True once DemeanOutcomes produced this sample.
  bool demeaned() const { return demeaned_; }

  // Units at the given indices, in the given order.
  Sample Subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  friend Sample DemeanOutcomes(const Sample& sample);

  std::vector<double> y_;
  std::vector<int> d_;
  std::vector<double> x_;
  std::size_t dim_ = 0;
  std::vector<std::string> names_;
  bool demeaned_ = false;
};

// Propensity information accompanying a sample.
struct KnownConstant {
  double e;
};
struct KnownPerUnit {
  std::vector<double> e;
};
// Estimated propensities e-hat. For the holdout penalty the entries of
// estimating-sample units may come from a fit on the estimating sample and
// those of testing-sample units from a fit on the testing sample.
struct EstimatedPerUnit {
  std::vector<double> e;
  double alpha = 0.25;  // trimming exponent, eps_n = n^-alpha
};
using PropensitySpec = std::variant<KnownConstant, KnownPerUnit, EstimatedPerUnit>;

bool IsKnown(const PropensitySpec& prop);

// Restricts per-unit propensities to the given unit indices; constants pass
// through unchanged.
PropensitySpec SubsetPropensity(const PropensitySpec& prop,
                                std::span<const std::size_t> indices);

// kappa-hat = min_i min(e_i, 1 - e_i) over the supplied propensities
// (n copies of a constant count as one). Throws if kappa-hat <= 0 for a known
// variant.
double KappaHat(const PropensitySpec& prop, std::size_t n);

enum class ScoreKind { kExact, kHybrid, kDemeanedExact, kDemeanedHybrid };
const char* ScoreKindName(ScoreKind kind);

struct ScoreVector {
  std::vector<double> scores;
  ScoreKind kind = ScoreKind::kExact;
  double bound = 0.0;  // max_i |scores[i]|

  std::size_t size() const { return scores.size(); }
};

struct BoundConfig {
  double M = 1.0;      // outcome support width
  double kappa = 0.25;  // overlap, in (0, 0.5)
  std::optional<double> ell;
};
void Validate(const BoundConfig& config);

struct SplitSample {
  Sample estimating;
  Sample testing;
  std::vector<std::size_t> estimating_indices;
  std::vector<std::size_t> testing_indices;
  double ell = 0.25;
  std::uint64_t seed = 0;
  bool shuffled = false;
};

// IPW scores tau_i = y d / e - y (1 - d) / (1 - e). Requires a known variant.
ScoreVector ComputeScores(const Sample& sample, const PropensitySpec& prop);

// Trimmed scores with estimated propensities: units with e-hat outside
// [eps_n, 1 - eps_n], eps_n = n^-alpha, score zero. `n` is the size of the
// full sample even when scoring a subsample.
ScoreVector ComputeHybridScores(const Sample& sample,
                                const EstimatedPerUnit& prop, std::size_t n);

// Exact scores for known variants, hybrid scores for the estimated one.
ScoreVector MakeScores(const Sample& sample, const PropensitySpec& prop,
                       std::size_t trimming_n);

double TrimmingEpsilon(std::size_t n, double alpha);

// y_i - mean(y); covariates and treatments are unchanged.
Sample DemeanOutcomes(const Sample& sample);

// m = floor(n (1 - ell)) estimating units, r = n - m testing units. Without
// shuffling the first m units in stored order form the estimating sample.
SplitSample SplitSampleByFraction(const Sample& sample, double ell,
                                  std::uint64_t seed, bool shuffle);
std::size_t EstimatingSize(std::size_t n, double ell);

// (1/n) sum_i scores[i] * member[i], summed in index order.
double MeanOverMembers(std::span<const double> scores,
                       const std::vector<bool>& member);

}  // namespace pwm

#endif  // PWM_SAMPLE_H_
