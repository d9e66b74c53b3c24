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

#ifndef PWM_PENALTIES_H_
#define PWM_PENALTIES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pwm/allocation.h"
#include "pwm/ewm_solver.h"
#include "pwm/sample.h"

namespace pwm {

struct RademacherConfig {
  int draws = 100;  // B
  std::uint64_t seed = 0;
  // Reuse one draw matrix for every class. Makes C_n(k) non-decreasing in k.
  bool shared_draws = true;
  int threads = 1;
};

struct HoldoutConfig {
  double ell = 0.25;  // testing fraction
  std::uint64_t seed = 0;
  bool shuffle = false;
};

enum class PenaltyKind { kRademacher, kHoldout };
const char* PenaltyKindName(PenaltyKind kind);

struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::kHoldout;
  RademacherConfig rademacher;
  HoldoutConfig holdout;
};
void Validate(const PenaltyConfig& config);

struct PenaltyEntry {
  int k = 1;
  double penalty = 0.0;  // C(k)
  // Holdout only: W_m and W_r of the rule fitted on the estimating sample.
  std::optional<double> welfare_estimating;
  std::optional<double> welfare_testing;
  // Rademacher only: per-draw suprema of (2/n) sum_i sigma_i tau_i 1{X_i in G}.
  std::vector<double> draw_suprema;
  // Holdout only: the rule fitted on the estimating sample.
  std::optional<EwmSolution> fit;
};

struct PenaltyReport {
  PenaltyKind kind = PenaltyKind::kHoldout;
  ScoreKind score_kind = ScoreKind::kExact;
  std::vector<PenaltyEntry> entries;
  // Holdout only: split sizes.
  std::size_t estimating_size = 0;
  std::size_t testing_size = 0;
};

// Sign matrix with `draws` rows of n entries. Row b comes from the stream
// DeriveSeed(seed, "rademacher", {class_tag, b}); shared draws use tag 0.
std::vector<std::vector<int>> RademacherDraws(std::size_t n, int draws,
                                              std::uint64_t seed,
                                              std::uint64_t class_tag = 0);

// Monte Carlo estimate of E_sigma[sup_G (2/n) sum_i sigma_i tau_i 1{X_i in G}]
// over class k, each supremum solved exactly. The supremum is signed.
PenaltyEntry RademacherPenalty(std::span<const double> scores,
                               const Sample& sample, const SieveSequence& sieve,
                               int k, const RademacherConfig& config);

// All classes of the sieve. With shared draws the per-draw suprema of nested
// classes are non-decreasing in k.
PenaltyReport RademacherPenalties(const ScoreVector& scores,
                                  const Sample& sample,
                                  const SieveSequence& sieve,
                                  const RademacherConfig& config);

// Fits class k on the estimating sample and returns
// C = W_m(G_mk) - W_r(G_mk), each welfare taken with the scores of its own
// subsample.
PenaltyEntry HoldoutPenalty(const ScoreVector& estimating_scores,
                            const ScoreVector& testing_scores,
                            const SplitSample& split,
                            const SieveSequence& sieve, int k,
                            const SolverOptions& options = {});

// Splits the sample, scores each part (hybrid scores when the propensity is
// estimated, trimmed at the full-sample n) and evaluates every class.
PenaltyReport HoldoutPenalties(const Sample& sample, const PropensitySpec& prop,
                               const SieveSequence& sieve,
                               const HoldoutConfig& config);

// Scores of the estimating and testing parts of a split.
std::pair<ScoreVector, ScoreVector> SplitScores(const SplitSample& split,
                                                const PropensitySpec& prop,
                                                std::size_t full_n);

nlohmann::json ToJson(const PenaltyEntry& entry);
nlohmann::json ToJson(const PenaltyReport& report);

}  // namespace pwm

#endif  // PWM_PENALTIES_H_
