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

#include "pwm/pwm.h"

#include <cmath>
#include <numbers>

#include "pwm/error.h"

namespace pwm {
namespace {

double TkTerm(const SieveSequence& sieve, int k, std::size_t n) {
  if (!sieve.include_tk_term) return 0.0;
  return std::sqrt(sieve.at(k).t / static_cast<double>(n));
}

int ArgMax(const std::vector<PwmClassRow>& rows) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < rows.size(); ++j) {
    if (rows[j].objective > rows[best].objective) best = j;
  }
  return rows[best].k;
}

}  // namespace

EwmSolution FitEwm(const Sample& sample, const PropensitySpec& prop,
                   const SieveSequence& sieve, int k, bool demean) {
  const Sample data = demean ? DemeanOutcomes(sample) : sample;
  const ScoreVector scores = MakeScores(data, prop, data.size());
  return SolveClass(scores.scores, data, sieve, k);
}

PwmResult FitPwm(const Sample& sample, const PropensitySpec& prop,
                 const SieveSequence& sieve, const PenaltyConfig& penalty,
                 const PwmOptions& options) {
  if (sieve.size() == 0) throw ValidationError("sieve has no classes");
  if (sample.empty()) throw ValidationError("sample is empty");
  Validate(penalty);
  const Sample data = options.demean ? DemeanOutcomes(sample) : sample;
  PwmResult result;
  const int classes = static_cast<int>(sieve.size());

  if (penalty.kind == PenaltyKind::kRademacher) {
    const ScoreVector scores = MakeScores(data, prop, data.size());
    result.report = RademacherPenalties(scores, data, sieve, penalty.rademacher);
    result.fit_size = data.size();
    result.score_kind = scores.kind;
    std::optional<double> previous;
    for (int k = 1; k <= classes; ++k) {
      SolverOptions solver;
      solver.welfare_floor = previous;
      EwmSolution fit = SolveClass(scores.scores, data, sieve, k, solver);
      previous = fit.welfare;
      PwmClassRow row;
      row.k = k;
      row.welfare = fit.welfare;
      row.penalty = result.report.entries[k - 1].penalty;
      row.tk_term = TkTerm(sieve, k, data.size());
      row.objective = row.welfare - row.penalty - row.tk_term;
      row.allocation = std::move(fit.allocation);
      result.per_class.push_back(std::move(row));
    }
  } else {
    result.report = HoldoutPenalties(data, prop, sieve, penalty.holdout);
    const std::size_t m = result.report.estimating_size;
    result.fit_size = m;
    result.score_kind = result.report.score_kind;
    for (const PenaltyEntry& entry : result.report.entries) {
      PwmClassRow row;
      row.k = entry.k;
      row.welfare = *entry.welfare_estimating;
      row.welfare_testing = entry.welfare_testing;
      row.penalty = entry.penalty;
      row.tk_term = TkTerm(sieve, entry.k, m);
      // W_m - (W_m - W_r) reduces to W_r; use it directly so the selection
      // is the argmax of W_r - sqrt(t_k / m) without rounding detours.
      row.objective = *entry.welfare_testing - row.tk_term;
      row.allocation = entry.fit->allocation;
      result.per_class.push_back(std::move(row));
    }
  }

  result.chosen_k = ArgMax(result.per_class);
  result.allocation = result.per_class[result.chosen_k - 1].allocation;
  if (penalty.kind == PenaltyKind::kHoldout && options.refit) {
    result.holdout_allocation = result.allocation;
    const ScoreVector scores = MakeScores(data, prop, data.size());
    result.allocation =
        SolveClass(scores.scores, data, sieve, result.chosen_k).allocation;
  }
  return result;
}

BoundConstants ComputeBoundConstants(const BoundConfig& config) {
  Validate(config);
  const double ratio = config.M / config.kappa;
  const double e = std::numbers::e;
  BoundConstants out;
  const double rad_arg = 3.0 * std::sqrt(e) / std::sqrt(2.0) * ratio;
  if (!(rad_arg > 1.0)) {
    throw ValidationError("log argument of g(M, kappa) must exceed 1");
  }
  out.g_rademacher = 6.0 * std::sqrt(std::log(rad_arg));
  if (config.ell) {
    const double hold_arg = std::sqrt(e / (2.0 * *config.ell)) * ratio;
    if (!(hold_arg > 1.0)) {
      throw ValidationError("log argument of g(M, kappa, ell) must exceed 1");
    }
    out.g_holdout = 2.0 * std::sqrt(std::log(hold_arg));
  }
  return out;
}

nlohmann::json ToJson(const PwmResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.per_class) {
    nlohmann::json row = {{"k", r.k},
                          {"welfare", r.welfare},
                          {"penalty", r.penalty},
                          {"tk_term", r.tk_term},
                          {"objective", r.objective}};
    if (r.welfare_testing) row["welfare_testing"] = *r.welfare_testing;
    row["allocation"] = ToJson(r.allocation);
    rows.push_back(std::move(row));
  }
  nlohmann::json out = {{"chosen_k", result.chosen_k},
                        {"allocation", ToJson(result.allocation)},
                        {"fit_size", result.fit_size},
                        {"score_kind", ScoreKindName(result.score_kind)},
                        {"per_class", std::move(rows)},
                        {"penalty_report", ToJson(result.report)}};
  if (result.holdout_allocation) {
    out["holdout_allocation"] = ToJson(*result.holdout_allocation);
  }
  return out;
}

nlohmann::json ToJson(const BoundConstants& constants) {
  nlohmann::json out = {{"C", constants.C},
                        {"g_rademacher", constants.g_rademacher}};
  if (constants.g_holdout) out["g_holdout"] = *constants.g_holdout;
  return out;
}

}  // namespace pwm
