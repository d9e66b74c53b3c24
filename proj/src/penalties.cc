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

#include "pwm/penalties.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pwm/error.h"
#include "pwm/parallel.h"
#include "pwm/random.h"

namespace pwm {
namespace {

double Mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

std::vector<double> Flip(std::span<const double> scores,
                         const std::vector<int>& signs) {
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = signs[i] * scores[i];
  return out;
}

void CheckDraws(const RademacherConfig& config) {
  if (config.draws < 1) throw ValidationError("Rademacher draws B must be >= 1");
}

}  // namespace

const char* PenaltyKindName(PenaltyKind kind) {
  return kind == PenaltyKind::kRademacher ? "rademacher" : "holdout";
}

void Validate(const PenaltyConfig& config) {
  if (config.kind == PenaltyKind::kRademacher) {
    CheckDraws(config.rademacher);
  } else if (!(config.holdout.ell > 0.0 && config.holdout.ell < 1.0)) {
    throw ValidationError("holdout fraction ell must lie in (0, 1)");
  }
}

std::vector<std::vector<int>> RademacherDraws(std::size_t n, int draws,
                                              std::uint64_t seed,
                                              std::uint64_t class_tag) {
  std::vector<std::vector<int>> out(draws, std::vector<int>(n));
  for (int b = 0; b < draws; ++b) {
    Rng rng(DeriveSeed(seed, "rademacher",
                       {class_tag, static_cast<std::uint64_t>(b)}));
    for (auto& s : out[b]) s = rng.Rademacher();
  }
  return out;
}

PenaltyEntry RademacherPenalty(std::span<const double> scores,
                               const Sample& sample, const SieveSequence& sieve,
                               int k, const RademacherConfig& config) {
  CheckDraws(config);
  sieve.at(k);
  const auto draws = RademacherDraws(
      sample.size(), config.draws, config.seed,
      config.shared_draws ? 0 : static_cast<std::uint64_t>(k));
  PenaltyEntry entry;
  entry.k = k;
  entry.draw_suprema.resize(config.draws);
  ParallelFor(draws.size(), config.threads, [&](std::size_t b) {
    const auto flipped = Flip(scores, draws[b]);
    entry.draw_suprema[b] = 2.0 * SolveClass(flipped, sample, sieve, k).welfare;
  });
  entry.penalty = Mean(entry.draw_suprema);
  return entry;
}

PenaltyReport RademacherPenalties(const ScoreVector& scores,
                                  const Sample& sample,
                                  const SieveSequence& sieve,
                                  const RademacherConfig& config) {
  CheckDraws(config);
  PenaltyReport report;
  report.kind = PenaltyKind::kRademacher;
  report.score_kind = scores.kind;
  const int classes = static_cast<int>(sieve.size());
  if (!config.shared_draws) {
    for (int k = 1; k <= classes; ++k) {
      report.entries.push_back(
          RademacherPenalty(scores.scores, sample, sieve, k, config));
    }
    return report;
  }
  const auto draws =
      RademacherDraws(sample.size(), config.draws, config.seed, 0);
  std::vector<std::vector<double>> sups(classes,
                                        std::vector<double>(config.draws));
  ParallelFor(draws.size(), config.threads, [&](std::size_t b) {
    const auto flipped = Flip(scores.scores, draws[b]);
    double previous = -HUGE_VAL;
    for (int k = 1; k <= classes; ++k) {
      SolverOptions options;
      if (k > 1) options.welfare_floor = previous;
      const double w = SolveClass(flipped, sample, sieve, k, options).welfare;
      // Classes are nested, so the previous optimum is also a member here;
      // keep whichever evaluates higher.
      previous = k > 1 ? std::max(w, previous) : w;
      sups[k - 1][b] = 2.0 * previous;
    }
  });
  for (int k = 1; k <= classes; ++k) {
    PenaltyEntry entry;
    entry.k = k;
    entry.draw_suprema = std::move(sups[k - 1]);
    entry.penalty = Mean(entry.draw_suprema);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::pair<ScoreVector, ScoreVector> SplitScores(const SplitSample& split,
                                                const PropensitySpec& prop,
                                                std::size_t full_n) {
  return {MakeScores(split.estimating,
                     SubsetPropensity(prop, split.estimating_indices), full_n),
          MakeScores(split.testing, SubsetPropensity(prop, split.testing_indices),
                     full_n)};
}

PenaltyEntry HoldoutPenalty(const ScoreVector& estimating_scores,
                            const ScoreVector& testing_scores,
                            const SplitSample& split,
                            const SieveSequence& sieve, int k,
                            const SolverOptions& options) {
  if (split.estimating.empty() || split.testing.empty()) {
    throw ValidationError("holdout split leaves an empty subsample");
  }
  EwmSolution fit = SolveClass(estimating_scores.scores, split.estimating,
                               sieve, k, options);
  PenaltyEntry entry;
  entry.k = k;
  entry.welfare_estimating = fit.welfare;
  entry.welfare_testing =
      EmpiricalWelfare(testing_scores.scores, fit.allocation, split.testing);
  entry.penalty = *entry.welfare_estimating - *entry.welfare_testing;
  entry.fit = std::move(fit);
  return entry;
}

PenaltyReport HoldoutPenalties(const Sample& sample, const PropensitySpec& prop,
                               const SieveSequence& sieve,
                               const HoldoutConfig& config) {
  Validate(PenaltyConfig{.kind = PenaltyKind::kHoldout, .holdout = config});
  const SplitSample split =
      SplitSampleByFraction(sample, config.ell, config.seed, config.shuffle);
  const auto [est, test] = SplitScores(split, prop, sample.size());
  PenaltyReport report;
  report.kind = PenaltyKind::kHoldout;
  report.score_kind = est.kind;
  report.estimating_size = split.estimating.size();
  report.testing_size = split.testing.size();
  std::optional<double> previous;
  for (int k = 1; k <= static_cast<int>(sieve.size()); ++k) {
    SolverOptions options;
    options.welfare_floor = previous;
    report.entries.push_back(HoldoutPenalty(est, test, split, sieve, k, options));
    previous = report.entries.back().welfare_estimating;
  }
  return report;
}

nlohmann::json ToJson(const PenaltyEntry& entry) {
  nlohmann::json out = {{"k", entry.k}, {"penalty", entry.penalty}};
  if (entry.welfare_estimating) out["welfare_estimating"] = *entry.welfare_estimating;
  if (entry.welfare_testing) out["welfare_testing"] = *entry.welfare_testing;
  if (!entry.draw_suprema.empty()) out["draw_suprema"] = entry.draw_suprema;
  if (entry.fit) out["allocation"] = ToJson(entry.fit->allocation);
  return out;
}

nlohmann::json ToJson(const PenaltyReport& report) {
  nlohmann::json out = {{"kind", PenaltyKindName(report.kind)},
                        {"score_kind", ScoreKindName(report.score_kind)}};
  if (report.kind == PenaltyKind::kHoldout) {
    out["estimating_size"] = report.estimating_size;
    out["testing_size"] = report.testing_size;
  }
  out["classes"] = nlohmann::json::array();
  for (const auto& e : report.entries) out["classes"].push_back(ToJson(e));
  return out;
}

}  // namespace pwm
