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

#include "pwm/evaluation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pwm/error.h"
#include "pwm/ewm_solver.h"
#include "pwm/parallel.h"
#include "pwm/pwm.h"
#include "pwm/random.h"

namespace pwm {
namespace {

constexpr std::size_t kSimDim = 5;
constexpr std::size_t kMonteCarloDraws = 1000000;

double MonoBoundary(double x1) {
  const double s = (x1 - 5.0) / 15.0;
  return 0.2 + 0.6 * s * s;
}

// Closed-form sim5 welfare of the box prod_j [lo_j, hi_j] inside [0,1]^5.
double BoxWelfare(const double* lo, const double* hi) {
  double rest = 1.0;
  for (std::size_t j = 2; j < kSimDim; ++j) rest *= hi[j] - lo[j];
  const double l1 = hi[0] - lo[0];
  const double l2 = hi[1] - lo[1];
  // 50 [ int 2 x2 - int (1 - x1)^4 - int 0.5 ], constants folded so the
  // full cube evaluates to exactly 50 - 10 - 25.
  const double x2_part = 50.0 * l1 * (hi[1] * hi[1] - lo[1] * lo[1]);
  const double x1_part =
      10.0 * l2 * (std::pow(1.0 - lo[0], 5) - std::pow(1.0 - hi[0], 5));
  return rest * (x2_part - x1_part - 25.0 * l1 * l2);
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(*out);
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

DgpSpec MakeDgp(const std::string& name, double propensity) {
  if (name != "sim5" && name != "mono2") {
    throw ValidationError("unknown DGP '" + name + "' (expected sim5 or mono2)");
  }
  if (!(propensity >= 0.0 && propensity <= 1.0)) {
    throw ValidationError("DGP propensity must lie in [0, 1]");
  }
  return {name, propensity};
}

std::size_t DgpDim(const DgpSpec& spec) {
  return spec.name == "mono2" ? 2 : kSimDim;
}

double Cate(const DgpSpec& spec, std::span<const double> x) {
  if (spec.name == "mono2") return 20.0 * (x[1] - MonoBoundary(x[0]));
  return 50.0 * (2.0 * x[1] - std::pow(1.0 - x[0], 4) - 0.5);
}

namespace {

void DrawCovariates(const DgpSpec& spec, Rng& rng, double* x) {
  if (spec.name == "mono2") {
    x[0] = rng.Uniform(5.0, 20.0);
    x[1] = rng.Uniform();
    return;
  }
  for (std::size_t j = 0; j < kSimDim; ++j) x[j] = rng.Uniform();
}

}  // namespace

Sample Simulate(const DgpSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("simulate needs n >= 1");
  const std::size_t dim = DgpDim(spec);
  Rng rng(DeriveSeed(seed, "dgp"));
  std::vector<double> y(n), x(n * dim);
  std::vector<int> d(n);
  const bool mono = spec.name == "mono2";
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = &x[i * dim];
    DrawCovariates(spec, rng, xi);
    double y1, y0;
    if (mono) {
      y1 = 20.0 * (xi[1] - MonoBoundary(xi[0])) + rng.Uniform(-5.0, 5.0);
      y0 = rng.Uniform(-5.0, 5.0);
    } else {
      const double common = 0.5 * (xi[2] - xi[3]);
      y1 = 50.0 * (2.0 * xi[1] - std::pow(1.0 - xi[0], 4) - 0.5 + common) +
           rng.Uniform(-20.0, 20.0);
      y0 = 50.0 * common + rng.Uniform(-20.0, 20.0);
    }
    d[i] = rng.Bernoulli(spec.propensity) ? 1 : 0;
    y[i] = d[i] ? y1 : y0;
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < dim; ++j) names.push_back("x" + std::to_string(j + 1));
  return Sample(std::move(y), std::move(d), std::move(x), dim, std::move(names));
}

double TrueWelfareThreshold(const ThresholdAllocation& alloc) {
  if (alloc.is_empty) return 0.0;
  Validate(alloc, kSimDim);
  double lo[kSimDim] = {0, 0, 0, 0, 0};
  double hi[kSimDim] = {1, 1, 1, 1, 1};
  for (std::size_t j = 0; j < alloc.active.size(); ++j) {
    const int a = alloc.active[j];
    if (alloc.directions[j] > 0) {
      lo[a] = std::max(lo[a], alloc.cutoffs[j]);
    } else {
      hi[a] = std::min(hi[a], alloc.cutoffs[j]);
    }
    if (!(lo[a] < hi[a])) return 0.0;
  }
  return BoxWelfare(lo, hi);
}

MonteCarloWelfare TrueWelfareMonteCarlo(const DgpSpec& spec,
                                        const Allocation& alloc,
                                        std::size_t draws, std::uint64_t seed) {
  if (draws < 2) throw ValidationError("Monte Carlo welfare needs >= 2 draws");
  Rng rng(DeriveSeed(seed, "welfare"));
  std::vector<double> x(DgpDim(spec));
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t b = 0; b < draws; ++b) {
    DrawCovariates(spec, rng, x.data());
    const double v = Contains(alloc, x) ? Cate(spec, x) : 0.0;
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), draws};
}

double TrueWelfare(const DgpSpec& spec, const Allocation& alloc,
                   std::uint64_t seed) {
  if (spec.name == "sim5") {
    if (const auto* t = std::get_if<ThresholdAllocation>(&alloc)) {
      return TrueWelfareThreshold(*t);
    }
  }
  return TrueWelfareMonteCarlo(spec, alloc, kMonteCarloDraws, seed).value;
}

namespace {

SecondBest GridSearchSecondBest(double resolution) {
  const int steps = static_cast<int>(std::lround(1.0 / resolution));
  std::vector<double> grid(steps + 1);
  for (int s = 0; s <= steps; ++s) grid[s] = static_cast<double>(s) / steps;

  SecondBest best;
  best.allocation = ThresholdAllocation::Empty();
  for (std::size_t a = 0; a < kSimDim; ++a) {
    for (std::size_t b = a + 1; b < kSimDim; ++b) {
      for (int mask = 0; mask < 4; ++mask) {
        const int da = mask & 2 ? -1 : 1;
        const int db = mask & 1 ? -1 : 1;
        for (double ca : grid) {
          for (double cb : grid) {
            double lo[kSimDim] = {0, 0, 0, 0, 0};
            double hi[kSimDim] = {1, 1, 1, 1, 1};
            (da > 0 ? lo[a] : hi[a]) = ca;
            (db > 0 ? lo[b] : hi[b]) = cb;
            if (!(lo[a] < hi[a] && lo[b] < hi[b])) continue;
            const double w = BoxWelfare(lo, hi);
            if (w > best.welfare) {
              best.welfare = w;
              best.allocation.is_empty = false;
              best.allocation.active = {static_cast<int>(a), static_cast<int>(b)};
              best.allocation.cutoffs = {ca, cb};
              best.allocation.directions = {da, db};
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

SecondBest SecondBestThreshold(double resolution) {
  if (!(resolution > 0.0 && resolution <= 0.5)) {
    throw ValidationError("grid resolution must lie in (0, 0.5]");
  }
  if (resolution == 1e-3) {
    static const SecondBest kDefault = GridSearchSecondBest(1e-3);
    return kDefault;
  }
  return GridSearchSecondBest(resolution);
}

namespace {

enum class RuleKind { kEwm, kPwmHoldout, kPwmRademacher, kOracle };

struct Rule {
  std::string name;
  RuleKind kind;
  int k = 0;
};

Rule ParseRule(const std::string& name, std::size_t dim) {
  if (name == "pwm-holdout") return {name, RuleKind::kPwmHoldout};
  if (name == "pwm-rademacher") return {name, RuleKind::kPwmRademacher};
  if (name == "oracle") return {name, RuleKind::kOracle};
  if (name.rfind("ewm:", 0) == 0) {
    int k = 0;
    const std::string tail = name.substr(4);
    const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
    if (ec == std::errc() && ptr == tail.data() + tail.size() && k >= 1 &&
        k <= static_cast<int>(dim) + 1) {
      return {name, RuleKind::kEwm, k};
    }
  }
  throw ValidationError("unknown rule '" + name +
                        "' (expected ewm:<k>, pwm-holdout, pwm-rademacher or oracle)");
}

}  // namespace

RegretTable RegretCurve(const RegretConfig& config) {
  if (config.reps < 1) throw ValidationError("replications must be >= 1");
  if (config.n_grid.empty()) throw ValidationError("sample-size grid is empty");
  if (config.rules.empty()) throw ValidationError("no rules given");
  if (config.dgp.name != "sim5") {
    throw ValidationError("regret curves need the sim5 DGP (closed-form welfare)");
  }
  const std::size_t dim = DgpDim(config.dgp);
  std::vector<Rule> rules;
  for (const auto& r : config.rules) rules.push_back(ParseRule(r, dim));
  for (std::size_t n : config.n_grid) {
    if (n < 2) throw ValidationError("sample sizes must be >= 2");
  }
  PenaltyConfig holdout{.kind = PenaltyKind::kHoldout, .holdout = config.holdout};
  PenaltyConfig rademacher{.kind = PenaltyKind::kRademacher,
                           .rademacher = config.rademacher};
  Validate(holdout);
  Validate(rademacher);
  const PropensitySpec prop = KnownConstant{config.dgp.propensity};
  KappaHat(prop, 1);

  const SecondBest second_best = SecondBestThreshold();
  RegretTable table;
  table.benchmark = config.benchmark.value_or(second_best.welfare);
  const SieveSequence sieve = ThresholdSieve(dim);
  const std::size_t cells = config.n_grid.size();
  table.regrets.assign(rules.size(), std::vector<std::vector<double>>(
                                         cells, std::vector<double>(config.reps)));

  ParallelFor(cells * config.reps, config.threads, [&](std::size_t task) {
    const std::size_t j = task / config.reps;
    const std::size_t rep = task % config.reps;
    const std::uint64_t block = DeriveSeed(config.seed, "dgp", {config.n_grid[j]});
    const Sample sample = Simulate(config.dgp, config.n_grid[j],
                                   DeriveSeed(block, "rep", {rep}));
    const ScoreVector scores = MakeScores(sample, prop, sample.size());
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const Rule& rule = rules[r];
      const std::uint64_t rule_seed = DeriveSeed(block, rule.name, {rep});
      ThresholdAllocation fitted;
      switch (rule.kind) {
        case RuleKind::kEwm:
          fitted = std::get<ThresholdAllocation>(
              SolveClass(scores.scores, sample, sieve, rule.k).allocation);
          break;
        case RuleKind::kPwmHoldout: {
          PenaltyConfig p = holdout;
          p.holdout.seed = rule_seed;
          fitted = std::get<ThresholdAllocation>(
              FitPwm(sample, prop, sieve, p).allocation);
          break;
        }
        case RuleKind::kPwmRademacher: {
          PenaltyConfig p = rademacher;
          p.rademacher.seed = rule_seed;
          p.rademacher.threads = 1;
          fitted = std::get<ThresholdAllocation>(
              FitPwm(sample, prop, sieve, p).allocation);
          break;
        }
        case RuleKind::kOracle:
          fitted = second_best.allocation;
          break;
      }
      table.regrets[r][j][rep] = table.benchmark - TrueWelfareThreshold(fitted);
    }
  });

  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (std::size_t j = 0; j < cells; ++j) {
      const auto& v = table.regrets[r][j];
      double sum = 0.0;
      for (double x : v) sum += x;
      RegretRow row;
      row.rule = rules[r].name;
      row.n = config.n_grid[j];
      row.reps = v.size();
      row.mean_regret = sum / static_cast<double>(v.size());
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - row.mean_regret) * (x - row.mean_regret);
        row.se = std::sqrt(ss / static_cast<double>(v.size() - 1) /
                           static_cast<double>(v.size()));
      }
      row.seed = DeriveSeed(config.seed, "dgp", {config.n_grid[j]});
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string RegretCsv(const RegretTable& table) {
  std::string out = "rule,n,reps,mean_regret,se,seed\n";
  for (const auto& r : table.rows) {
    out += r.rule + "," + std::to_string(r.n) + "," + std::to_string(r.reps) + "," +
           FormatNumber(r.mean_regret) + "," + (r.se ? FormatNumber(*r.se) : "") +
           "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

nlohmann::json ToJson(const RegretTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"rule", r.rule},
                    {"n", r.n},
                    {"reps", r.reps},
                    {"mean_regret", r.mean_regret},
                    {"se", r.se ? nlohmann::json(*r.se) : nlohmann::json(nullptr)},
                    {"seed", r.seed}});
  }
  return {{"benchmark", table.benchmark}, {"rows", std::move(rows)}};
}

Dataset ParseDataset(const std::string& text, const LoadOptions& options) {
  std::vector<std::string> lines;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  while (!lines.empty() && Trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError("dataset is empty: a header row is required");
  const std::vector<std::string> header = SplitFields(lines[0]);
  int y_col = -1, d_col = -1, e_col = -1, edu_col = -1;
  std::vector<int> x_cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h.empty()) throw DataError("header column " + std::to_string(c + 1) + " is empty");
    if (std::count(header.begin(), header.end(), h) > 1) {
      throw DataError("duplicate header column '" + h + "'");
    }
    if (h == "y") {
      y_col = static_cast<int>(c);
    } else if (h == "d") {
      d_col = static_cast<int>(c);
    } else if (h == "e") {
      e_col = static_cast<int>(c);
    } else {
      if (h == options.education_column) edu_col = static_cast<int>(c);
      x_cols.push_back(static_cast<int>(c));
      names.push_back(h);
    }
  }
  if (y_col < 0 || d_col < 0) throw DataError("header must contain columns 'y' and 'd'");
  if (x_cols.empty()) throw DataError("dataset has no covariate columns");
  if (options.drop_education_99 && edu_col < 0) {
    throw ValidationError("education filter needs a column named '" +
                          options.education_column + "'");
  }

  std::vector<double> y, x, e;
  std::vector<int> d;
  Dataset out;
  std::vector<double> values(header.size());
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const std::string row_tag = "row " + std::to_string(l + 1);
    const std::vector<std::string> fields = SplitFields(lines[l]);
    if (fields.size() != header.size()) {
      throw DataError(row_tag + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!ParseDouble(fields[c], &values[c])) {
        throw DataError(row_tag + ": non-numeric value '" + fields[c] +
                        "' in column '" + header[c] + "'");
      }
    }
    if (options.drop_education_99 && values[edu_col] == 99.0) {
      ++out.dropped_rows;
      continue;
    }
    const double dv = values[d_col];
    if (dv != 0.0 && dv != 1.0) {
      throw DataError(row_tag + ": treatment d must be 0 or 1");
    }
    y.push_back(values[y_col]);
    d.push_back(static_cast<int>(dv));
    for (int c : x_cols) x.push_back(values[c]);
    if (e_col >= 0) e.push_back(values[e_col]);
  }
  if (y.empty()) throw DataError("dataset has no data rows");
  const std::size_t dim = x_cols.size();
  out.sample = Sample(std::move(y), std::move(d), std::move(x), dim, std::move(names));
  if (e_col >= 0) out.propensity = std::move(e);
  return out;
}

Dataset LoadDataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseDataset(buffer.str(), options);
}

std::string FormatDataset(const Sample& sample,
                          const std::optional<std::vector<double>>& propensity) {
  if (propensity && propensity->size() != sample.size()) {
    throw ValidationError("propensity column length does not match the sample");
  }
  std::string out = "y,d";
  const auto& names = sample.covariate_names();
  for (std::size_t a = 0; a < sample.dim(); ++a) {
    out += "," + (a < names.size() ? names[a] : "x" + std::to_string(a + 1));
  }
  if (propensity) out += ",e";
  out += "\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out += FormatNumber(sample.y(i)) + "," + std::to_string(sample.d(i));
    for (std::size_t a = 0; a < sample.dim(); ++a) {
      out += "," + FormatNumber(sample.x(i, a));
    }
    if (propensity) out += "," + FormatNumber((*propensity)[i]);
    out += "\n";
  }
  return out;
}

void WriteDataset(const std::filesystem::path& path, const Sample& sample,
                  const std::optional<std::vector<double>>& propensity) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
  f << FormatDataset(sample, propensity);
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace pwm
