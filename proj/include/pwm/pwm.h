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

#ifndef PWM_PWM_H_
#define PWM_PWM_H_

#include <optional>
#include <vector>

#include "json.hpp"
#include "pwm/allocation.h"
#include "pwm/ewm_solver.h"
#include "pwm/penalties.h"
#include "pwm/sample.h"

namespace pwm {

struct PwmOptions {
  // Replace y by y - mean(y) before anything else.
  bool demean = false;
  // Holdout only: refit the selected class on the full sample. Off by
  // default; the refitted rule is outside the analysed procedure.
  bool refit = false;
};

struct PwmClassRow {
  int k = 1;
  double welfare = 0.0;  // W(G_k) on the sample the class was fitted on
  double penalty = 0.0;  // C(k)
  double tk_term = 0.0;  // sqrt(t_k / n_fit), 0 when disabled
  double objective = 0.0;  // R_k
  std::optional<double> welfare_testing;  // holdout only
  Allocation allocation;
};

struct PwmResult {
  int chosen_k = 1;
  Allocation allocation;
  // Holdout with refit: the estimating-sample rule that was selected.
  std::optional<Allocation> holdout_allocation;
  std::size_t fit_size = 0;  // n for Rademacher, m for holdout
  ScoreKind score_kind = ScoreKind::kExact;
  std::vector<PwmClassRow> per_class;
  PenaltyReport report;
};

// Penalized welfare maximization. Rademacher: R_k = W_n - C_n(k) -
// sqrt(t_k / n) with every class fitted on the full sample. Holdout: classes
// are fitted on the estimating sample and R_k = W_r - sqrt(t_k / m), which is
// W_m - C_m(k) - sqrt(t_k / m). Ties go to the smallest k.
PwmResult FitPwm(const Sample& sample, const PropensitySpec& prop,
                 const SieveSequence& sieve, const PenaltyConfig& penalty,
                 const PwmOptions& options = {});

// EWM over class k on the full sample.
EwmSolution FitEwm(const Sample& sample, const PropensitySpec& prop,
                   const SieveSequence& sieve, int k, bool demean = false);

struct BoundConstants {
  double C = 36.17;
  double g_rademacher = 0.0;
  std::optional<double> g_holdout;  // needs ell
};

// C, g(M, kappa) = 6 sqrt(log(3 sqrt(e) / sqrt(2) * M / kappa)) and
// g(M, kappa, ell) = 2 sqrt(log(sqrt(e / (2 ell)) * M / kappa)). Throws when a
// log argument is <= 1.
BoundConstants ComputeBoundConstants(const BoundConfig& config);

nlohmann::json ToJson(const PwmResult& result);
nlohmann::json ToJson(const BoundConstants& constants);

}  // namespace pwm

#endif  // PWM_PWM_H_
