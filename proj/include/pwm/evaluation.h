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

#ifndef PWM_EVALUATION_H_
#define PWM_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pwm/allocation.h"
#include "pwm/penalties.h"
#include "pwm/sample.h"

namespace pwm {

// Built-in data generating processes.
//   sim5:  X ~ U[0,1]^5,
//          Y(1) = 50 (2 X2 - (1 - X1)^4 - 0.5 + 0.5 (X3 - X4)) + U1,
//          Y(0) = 50 (0.5 (X3 - X4)) + U2,  U1, U2 ~ U[-20, 20].
//   mono2: X1 ~ U[5, 20], X2 ~ U[0, 1],
//          Y(1) = 20 (X2 - b(X1)) + U1, Y(0) = U2,  U1, U2 ~ U[-5, 5],
//          b(x) = 0.2 + 0.6 ((x - 5) / 15)^2. The treated region
//          {x2 >= b(x1)} lies in the non-increasing monotone family.
// D ~ Bernoulli(e) independently of everything else.
struct DgpSpec {
  std::string name = "sim5";
  double propensity = 0.5;
};
DgpSpec MakeDgp(const std::string& name, double propensity = 0.5);
std::size_t DgpDim(const DgpSpec& spec);
// E[Y(1) - Y(0) | X = x].
double Cate(const DgpSpec& spec, std::span<const double> x);

// Deterministic per seed (stream "dgp").
Sample Simulate(const DgpSpec& spec, std::size_t n, std::uint64_t seed);

// Closed-form W(G) for a threshold allocation under sim5.
double TrueWelfareThreshold(const ThresholdAllocation& alloc);

struct MonteCarloWelfare {
  double value = 0.0;
  double se = 0.0;
  std::size_t draws = 0;
};
// Average of Cate(X) 1{X in G} over `draws` covariate draws.
MonteCarloWelfare TrueWelfareMonteCarlo(const DgpSpec& spec,
                                        const Allocation& alloc,
                                        std::size_t draws, std::uint64_t seed);
// Closed form when available (sim5 threshold allocations), Monte Carlo with
// 10^6 draws otherwise.
double TrueWelfare(const DgpSpec& spec, const Allocation& alloc,
                   std::uint64_t seed = 0);

struct SecondBest {
  double welfare = 0.0;
  ThresholdAllocation allocation;
};
// Best sim5 threshold allocation on two covariates with cutoffs on the grid
// {0, h, 2h, ..., 1}, over every covariate pair and direction pair.
SecondBest SecondBestThreshold(double resolution = 1e-3);

struct RegretRow {
  std::string rule;
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean_regret = 0.0;
  std::optional<double> se;  // absent for a single replicate
  std::uint64_t seed = 0;    // cell block seed
};

struct RegretTable {
  double benchmark = 0.0;  // W*_G
  std::vector<RegretRow> rows;
  // regrets[r][j][rep] for rule r and the j-th sample size.
  std::vector<std::vector<std::vector<double>>> regrets;
};

struct RegretConfig {
  // "ewm:<k>", "pwm-holdout", "pwm-rademacher" or "oracle".
  std::vector<std::string> rules;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  DgpSpec dgp;
  HoldoutConfig holdout;
  RademacherConfig rademacher;  // seed is replaced per replicate
  int threads = 1;
  std::optional<double> benchmark;  // default: SecondBestThreshold()
};

// For every n and replicate: simulate, fit each rule on the same sample and
// record W*_G - W(G-hat) by closed form. The sample of replicate r at size n
// comes from DeriveSeed(block, "rep", {r}) with block = DeriveSeed(seed,
// "dgp", {n}); rule randomness uses DeriveSeed(block, rule, {r}).
RegretTable RegretCurve(const RegretConfig& config);

std::string RegretCsv(const RegretTable& table);
nlohmann::json ToJson(const RegretTable& table);

struct LoadOptions {
  bool drop_education_99 = false;
  std::string education_column = "education";
};

struct Dataset {
  Sample sample;
  std::optional<std::vector<double>> propensity;  // from an `e` column
  std::size_t dropped_rows = 0;
};

// CSV with a header row: y, d, covariates, and an optional column `e`.
// Throws DataError naming the offending row for malformed input.
Dataset LoadDataset(const std::filesystem::path& path,
                    const LoadOptions& options = {});
Dataset ParseDataset(const std::string& text, const LoadOptions& options = {});
// Inverse of ParseDataset; numbers use %.17g so a round trip is exact.
std::string FormatDataset(const Sample& sample,
                          const std::optional<std::vector<double>>& propensity = {});
void WriteDataset(const std::filesystem::path& path, const Sample& sample,
                  const std::optional<std::vector<double>>& propensity = {});

// Shared number formatting for CSV outputs.
std::string FormatNumber(double v);

}  // namespace pwm

#endif  // PWM_EVALUATION_H_
