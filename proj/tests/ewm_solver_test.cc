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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.h"
#include "pwm/allocation.h"
#include "pwm/error.h"
#include "pwm/ewm_solver.h"
#include "pwm/random.h"

namespace pwm {
namespace {

using testing::kInf;

std::vector<double> RandomScores(Rng& rng, std::size_t n, double bias = 0.0) {
  std::vector<double> s(n);
  for (double& v : s) v = rng.Uniform(-1, 1) + bias;
  return s;
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample whose second covariate takes at most `distinct` values.
Sample CoarseSample(Rng& rng, std::size_t n, int distinct) {
  std::vector<double> values(distinct);
  for (double& v : values) v = rng.Uniform();
  std::vector<double> x(2 * n), y(n);
  std::vector<int> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[2 * i] = rng.Uniform();
    x[2 * i + 1] = values[rng.Index(values.size())];
    y[i] = rng.Uniform(-1, 1);
    d[i] = rng.Bernoulli(0.5);
  }
  return Sample(y, d, x, 2);
}

void ExpectSelfConsistent(const EwmSolution& sol, std::span<const double> scores,
                          const Sample& s) {
  EXPECT_NEAR(sol.welfare, EmpiricalWelfare(scores, sol.allocation, s), 1e-9);
}

TEST(ThresholdSolverTest, AllNegativeTreatsNobody) {
  Rng rng(1);
  const Sample s = testing::RandomSample(rng, 15, 2);
  const std::vector<double> scores(15, -1.0);
  for (int k = 1; k <= 3; ++k) {
    const EwmSolution sol = SolveThresholdClass(scores, s, k);
    EXPECT_EQ(sol.welfare, 0.0);
    EXPECT_TRUE(std::ranges::none_of(Classify(sol.allocation, s), [](bool b) { return b; }));
  }
}

TEST(ThresholdSolverTest, AllPositiveTreatsEveryone) {
  Rng rng(2);
  const Sample s = testing::RandomSample(rng, 15, 2);
  const std::vector<double> scores = RandomScores(rng, 15, 2.0);
  for (int k = 1; k <= 3; ++k) {
    const EwmSolution sol = SolveThresholdClass(scores, s, k);
    EXPECT_NEAR(sol.welfare, Mean(scores), 1e-12);
    EXPECT_TRUE(std::ranges::all_of(Classify(sol.allocation, s), [](bool b) { return b; }));
  }
  EXPECT_EQ(std::get<ThresholdAllocation>(SolveThresholdClass(scores, s, 1).allocation),
            ThresholdAllocation::Everyone());
}

TEST(ThresholdSolverTest, RejectsBadClass) {
  Rng rng(3);
  const Sample s = testing::RandomSample(rng, 5, 2);
  const std::vector<double> scores(5, 1.0);
  EXPECT_THROW(SolveThresholdClass(scores, s, 0), ValidationError);
  EXPECT_THROW(SolveThresholdClass(scores, s, 4), ValidationError);
}

TEST(ThresholdSolverTest, MatchesBruteForce) {
  Rng rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 5 + rng.Index(16);
    const Sample s = testing::RandomSample(rng, n, 3);
    const std::vector<double> scores = RandomScores(rng, n, rng.Uniform(-0.5, 0.5));
    for (int k = 1; k <= 4; ++k) {
      if (k == 4 && n > 12) continue;
      const EwmSolution sol = SolveThresholdClass(scores, s, k);
      EXPECT_NEAR(sol.welfare, testing::BruteForceThreshold(scores, s, k), 1e-12)
          << "rep " << rep << " k " << k;
      ExpectSelfConsistent(sol, scores, s);
      const auto& alloc = std::get<ThresholdAllocation>(sol.allocation);
      if (!alloc.is_empty) EXPECT_EQ(static_cast<int>(alloc.active.size()), k - 1);
    }
  }
}

TEST(ThresholdSolverTest, TiedCovariateValues) {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 14;
    std::vector<double> x(2 * n), y(n, 0.0);
    for (double& v : x) v = static_cast<double>(rng.Index(4));
    const Sample s(y, std::vector<int>(n, 1), x, 2);
    const std::vector<double> scores = RandomScores(rng, n);
    for (int k = 1; k <= 3; ++k) {
      EXPECT_NEAR(SolveThresholdClass(scores, s, k).welfare,
                  testing::BruteForceThreshold(scores, s, k), 1e-12);
    }
  }
}

TEST(ThresholdSolverTest, FloorIsOnlyAHint) {
  Rng rng(6);
  const Sample s = testing::RandomSample(rng, 20, 3);
  const std::vector<double> scores = RandomScores(rng, 20);
  const double exact = SolveThresholdClass(scores, s, 3).welfare;
  for (double floor : {exact, exact - 0.1, exact + 5.0, -1.0}) {
    SolverOptions opts;
    opts.welfare_floor = floor;
    const EwmSolution sol = SolveThresholdClass(scores, s, 3, opts);
    EXPECT_NEAR(sol.welfare, exact, 1e-12) << "floor " << floor;
  }
}

TEST(ThresholdSolverTest, NullScoreInvariance) {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Sample s = testing::RandomSample(rng, 25, 3);
    std::vector<double> scores = RandomScores(rng, 25);
    std::vector<double> x(s.covariates());
    std::vector<double> y(s.outcomes());
    std::vector<int> d(s.treatments());
    for (int a = 0; a < 3; ++a) x.push_back(rng.Uniform());
    y.push_back(0.0);
    d.push_back(1);
    const Sample t(y, d, x, 3);
    std::vector<double> more = scores;
    more.push_back(0.0);
    for (int k = 1; k <= 3; ++k) {
      // W_n divides by n, so compare the sums.
      EXPECT_NEAR(26.0 * SolveThresholdClass(more, t, k).welfare,
                  25.0 * SolveThresholdClass(scores, s, k).welfare, 1e-10);
    }
  }
}

TEST(ThresholdSolverTest, ScaleEquivariance) {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Sample s = testing::RandomSample(rng, 30, 3);
    const std::vector<double> scores = RandomScores(rng, 30);
    std::vector<double> scaled = scores;
    for (double& v : scaled) v *= 4.0;  // exact in binary
    for (int k = 1; k <= 4; ++k) {
      const EwmSolution a = SolveThresholdClass(scores, s, k);
      const EwmSolution b = SolveThresholdClass(scaled, s, k);
      EXPECT_EQ(b.welfare, 4.0 * a.welfare);
      EXPECT_EQ(a.allocation, b.allocation);
    }
  }
}

TEST(MonotoneSolverTest, AllPositiveTreatsEveryone) {
  Rng rng(9);
  const Sample s = testing::RandomSample(rng, 20, 2);
  const std::vector<double> scores = RandomScores(rng, 20, 2.0);
  for (auto dir : {MonotoneDirection::kNonDecreasing, MonotoneDirection::kNonIncreasing}) {
    for (int T : {1, 4}) {
      const EwmSolution sol = SolveMonotoneClass(scores, s, T, dir, {});
      EXPECT_NEAR(sol.welfare, Mean(scores), 1e-12);
      const auto& m = std::get<MonotoneBoundaryAllocation>(sol.allocation);
      const double below = MonotoneLevelGrid(s, DefaultThetaBound(s)).front();
      for (double th : m.theta) EXPECT_EQ(th, -below);
    }
  }
}

TEST(MonotoneSolverTest, LevelGridIsObservedValuesPlusSentinels) {
  const Sample s({0, 0, 0}, {1, 0, 1}, {0.1, 2.0, 0.5, 1.0, 0.9, 2.0}, 2);
  EXPECT_EQ(MonotoneLevelGrid(s, 100.0), (std::vector<double>{0.0, 1.0, 2.0, 3.0}));
  EXPECT_EQ(MonotoneLevelGrid(s, 2.5), (std::vector<double>{0.0, 1.0, 2.0}));
  EXPECT_EQ(DefaultThetaBound(s), 20.0);
}

TEST(MonotoneSolverTest, RejectsBadInput) {
  Rng rng(10);
  const Sample s3 = testing::RandomSample(rng, 5, 3);
  const std::vector<double> scores(5, 1.0);
  EXPECT_THROW(SolveMonotoneClass(scores, s3, 1, MonotoneDirection::kNonDecreasing, {}),
               ValidationError);
  const Sample s2 = testing::RandomSample(rng, 5, 2);
  EXPECT_THROW(SolveMonotoneClass(scores, s2, 0, MonotoneDirection::kNonDecreasing, {}),
               ValidationError);
}

TEST(MonotoneSolverTest, ThreeUnitsOneKnot) {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Sample s = CoarseSample(rng, 3, 1);
    const std::vector<double> scores = RandomScores(rng, 3);
    for (auto dir : {MonotoneDirection::kNonDecreasing, MonotoneDirection::kNonIncreasing}) {
      const auto levels = MonotoneLevelGrid(s, DefaultThetaBound(s));
      ASSERT_EQ(levels.size(), 3u);
      EXPECT_NEAR(SolveMonotoneClass(scores, s, 1, dir, {}).welfare,
                  testing::BruteForceMonotone(scores, s, 1, dir, {}, levels), 1e-12);
    }
  }
}

TEST(MonotoneSolverTest, MatchesBruteForce) {
  Rng rng(12);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng.Index(9);
    const Sample s = CoarseSample(rng, n, 3);
    const std::vector<double> scores = RandomScores(rng, n);
    const auto levels = MonotoneLevelGrid(s, DefaultThetaBound(s));
    ASSERT_LE(levels.size(), 5u);
    for (auto dir : {MonotoneDirection::kNonDecreasing, MonotoneDirection::kNonIncreasing}) {
      for (int T : {1, 2, 4}) {
        const EwmSolution sol = SolveMonotoneClass(scores, s, T, dir, {});
        EXPECT_NEAR(sol.welfare, testing::BruteForceMonotone(scores, s, T, dir, {}, levels),
                    1e-12);
        ExpectSelfConsistent(sol, scores, s);
        EXPECT_TRUE(SatisfiesMonotonicity(
            std::get<MonotoneBoundaryAllocation>(sol.allocation).theta, dir));
      }
    }
  }
}

TEST(MonotoneSolverTest, ContinuousCovariatesAndCustomDomain) {
  Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 7;
    std::vector<double> x(2 * n), y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[2 * i] = rng.Uniform(5, 20);
      x[2 * i + 1] = rng.Uniform();
    }
    const Sample s(y, std::vector<int>(n, 0), x, 2);
    const std::vector<double> scores = RandomScores(rng, n);
    const auto levels = MonotoneLevelGrid(s, DefaultThetaBound(s));
    EXPECT_NEAR(SolveMonotoneClass(scores, s, 2, MonotoneDirection::kNonIncreasing,
                                   {5, 20}).welfare,
                testing::BruteForceMonotone(scores, s, 2, MonotoneDirection::kNonIncreasing,
                                            {5, 20}, levels),
                1e-12);
  }
}

TEST(SolveClassTest, Dispatch) {
  Rng rng(14);
  const Sample s = testing::RandomSample(rng, 20, 2);
  const std::vector<double> scores = RandomScores(rng, 20);
  const EwmSolution t1 = SolveClass(scores, s, ThresholdSieve(2), 1);
  EXPECT_EQ(t1.class_index, 1);
  EXPECT_EQ(t1.welfare, std::max(0.0, Mean(scores)));
  const SieveSequence mono = MonotoneSieve(3, MonotoneDirection::kNonIncreasing);
  const EwmSolution m1 = SolveClass(scores, s, mono, 1);
  EXPECT_EQ(std::get<MonotoneBoundaryAllocation>(m1.allocation).knots, 1);
  EXPECT_EQ(m1.welfare,
            SolveMonotoneClass(scores, s, 1, MonotoneDirection::kNonIncreasing, {}).welfare);
  EXPECT_THROW(SolveClass(scores, s, ThresholdSieve(2), 4), ValidationError);
  EXPECT_THROW(SolveClass(scores, s, ThresholdSieve(3), 1), ValidationError);
  const nlohmann::json j = ToJson(m1);
  EXPECT_EQ(j["class_index"], 1);
  EXPECT_EQ(j["allocation"]["family"], "monotone");
}

TEST(SolveClassTest, OptimumIsNonDecreasingInK) {
  Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    const Sample s = testing::RandomSample(rng, 40, 2);
    const std::vector<double> scores = RandomScores(rng, 40);
    for (const SieveSequence& sieve :
         {ThresholdSieve(2), MonotoneSieve(4, MonotoneDirection::kNonDecreasing),
          MonotoneSieve(4, MonotoneDirection::kNonIncreasing)}) {
      double prev = -kInf;
      for (int k = 1; k <= static_cast<int>(sieve.size()); ++k) {
        const double w = SolveClass(scores, s, sieve, k).welfare;
        EXPECT_GE(w, prev - 1e-12) << FamilyName(sieve.family) << " " << DirectionName(sieve.direction) << " k " << k;
        prev = w;
      }
    }
  }
}

// Minimal reader for the LP files written by ExportMilp: rows as
// name -> (coefficients, sense, rhs), bounds as name -> [lo, hi].
struct LinearProgram {
  struct Row {
    std::map<std::string, double> coef;
    std::string sense;
    double rhs = 0.0;
  };
  std::map<std::string, double> objective;
  std::map<std::string, Row> rows;
  std::map<std::string, std::pair<double, double>> bounds;
  std::vector<std::string> binaries;
};

std::map<std::string, double> ParseTerms(const std::string& text) {
  std::map<std::string, double> out;
  std::istringstream in(text);
  std::string tok;
  double sign = 1.0, coef = 1.0;
  while (in >> tok) {
    if (tok == "+" || tok == "-") {
      sign = tok == "-" ? -1.0 : 1.0;
      coef = 1.0;
    } else if (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.') {
      coef = std::stod(tok);
    } else {
      out[tok] += sign * coef;
      sign = 1.0;
      coef = 1.0;
    }
  }
  return out;
}

LinearProgram ReadLp(const std::filesystem::path& path) {
  std::ifstream f(path);
  std::string line, section, pending;
  LinearProgram lp;
  auto flush = [&] {
    if (pending.empty()) return;
    const auto colon = pending.find(':');
    const std::string name = pending.substr(1, colon - 1);
    std::string body = pending.substr(colon + 1);
    if (section == "Maximize") {
      lp.objective = ParseTerms(body);
    } else {
      static const std::regex sense_re(R"(^(.*)\s(<=|>=|=)\s(\S+)\s*$)");
      std::smatch m;
      if (!std::regex_match(body, m, sense_re)) throw std::runtime_error(body);
      lp.rows[name] = {ParseTerms(m[1]), m[2], std::stod(m[3])};
    }
    pending.clear();
  };
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '\\') continue;
    if (line[0] != ' ') {
      flush();
      section = line;
      continue;
    }
    if (section == "Maximize" || section == "Subject To") {
      if (line.find(':') != std::string::npos) flush();
      pending += line;
    } else if (section == "Bounds") {
      std::istringstream in(line);
      std::string lo, op1, name, op2, hi;
      in >> lo >> op1 >> name >> op2 >> hi;
      lp.bounds[name] = {std::stod(lo), std::stod(hi)};
    } else if (section == "Binaries") {
      lp.binaries.push_back(line.substr(1));
    }
  }
  flush();
  return lp;
}

// Checks every row and bound of `lp` at `point`; returns the objective.
double Evaluate(const LinearProgram& lp, const std::map<std::string, double>& point) {
  auto value = [&](const std::string& v) {
    const auto it = point.find(v);
    if (it == point.end()) ADD_FAILURE() << "unassigned variable " << v;
    return it == point.end() ? 0.0 : it->second;
  };
  for (const auto& [name, row] : lp.rows) {
    double lhs = 0.0;
    for (const auto& [v, c] : row.coef) lhs += c * value(v);
    const double tol = 1e-9 * (1.0 + std::abs(row.rhs));
    if (row.sense == "=") EXPECT_NEAR(lhs, row.rhs, tol) << name;
    if (row.sense == "<=") EXPECT_LE(lhs, row.rhs + tol) << name;
    if (row.sense == ">=") EXPECT_GE(lhs, row.rhs - tol) << name;
  }
  for (const auto& [v, b] : lp.bounds) {
    EXPECT_GE(value(v), b.first - 1e-9) << v;
    EXPECT_LE(value(v), b.second + 1e-9) << v;
  }
  for (const auto& v : lp.binaries) {
    EXPECT_TRUE(value(v) == 0.0 || value(v) == 1.0) << v;
  }
  double obj = 0.0;
  for (const auto& [v, c] : lp.objective) obj += c * value(v);
  return obj;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class ExportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("pwm_export_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(ExportTest, ThresholdStructure) {
  const Sample s({1, 2, 3}, {1, 0, 1}, {0.1, 0.5, 0.4, 0.2, 0.9, 0.7}, 2);
  const std::vector<double> scores{1.5, -2.0, 0.5};
  const auto files = ExportMilp(scores, s, ThresholdSieve(2), 2, dir_ / "t.lp");
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "t_0.lp");
  EXPECT_EQ(files[1].filename(), "t_1.lp");
  for (const auto& f : files) {
    const LinearProgram lp = ReadLp(f);
    int z = 0;
    for (const auto& b : lp.binaries) z += b.rfind("z_", 0) == 0;
    EXPECT_EQ(z, 3);
    for (const auto& [name, row] : lp.rows) {
      if (name.rfind("link_", 0) != 0) continue;
      bool has_c = false;
      for (const auto& [v, c] : row.coef) has_c = has_c || (v.rfind("z_", 0) == 0 && c == 4.0);
      EXPECT_TRUE(has_c) << name;
    }
    EXPECT_NE(Slurp(f).find("c = d + 2 = 4"), std::string::npos);
  }
}

TEST_F(ExportTest, MonotoneStructure) {
  const Sample s({1, 2}, {1, 0}, {0.1, 0.5, 0.4, 0.2}, 2);
  const std::vector<double> scores{1.5, -2.0};
  const auto files = ExportMilp(scores, s, MonotoneSieve(1, MonotoneDirection::kNonIncreasing),
                                1, dir_ / "m.lp");
  ASSERT_EQ(files.size(), 1u);
  const LinearProgram lp = ReadLp(files[0]);
  int links = 0, mono = 0;
  for (const auto& [name, row] : lp.rows) {
    links += name.rfind("link_", 0) == 0;
    mono += name.rfind("mono_", 0) == 0;
  }
  EXPECT_EQ(links, 2);
  EXPECT_EQ(mono, 1);
  EXPECT_EQ(lp.rows.at("mono_1").sense, "<=");
}

TEST_F(ExportTest, ReExportIsByteIdentical) {
  Rng rng(16);
  const Sample s = testing::RandomSample(rng, 30, 3);
  const std::vector<double> scores = RandomScores(rng, 30);
  const auto a = ExportMilp(scores, s, ThresholdSieve(3), 3, dir_ / "a.lp");
  const auto b = ExportMilp(scores, s, ThresholdSieve(3), 3, dir_ / "b.lp");
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(Slurp(a[i]), Slurp(b[i]));
}

// The solver optimum, written in the program's variables, must be feasible
// with objective n * W_n.
TEST_F(ExportTest, ThresholdOptimumIsFeasible) {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 12;
    const Sample s = testing::RandomSample(rng, n, 2);
    const std::vector<double> scores = RandomScores(rng, n);
    const SieveSequence sieve = ThresholdSieve(2);
    for (int k = 2; k <= 3; ++k) {
      const EwmSolution sol = SolveClass(scores, s, sieve, k);
      const auto& alloc = std::get<ThresholdAllocation>(sol.allocation);
      const auto files = ExportMilp(scores, s, sieve, k, dir_ / "opt.lp");
      std::vector<int> subset = alloc.active;
      if (alloc.is_empty) {
        subset.clear();
        for (int a = 0; a < k - 1; ++a) subset.push_back(a);
      }
      std::string tag;
      for (std::size_t j = 0; j < subset.size(); ++j) tag += (j ? "-" : "") + std::to_string(subset[j]);
      const std::filesystem::path file =
          files.size() == 1 ? files[0] : dir_ / ("opt_" + tag + ".lp");
      const LinearProgram lp = ReadLp(file);

      const std::vector<bool> member = Classify(sol.allocation, s);
      std::map<std::string, double> point;
      const double c = 4.0;
      for (std::size_t j = 0; j < subset.size(); ++j) {
        const int a = subset[j];
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
          lo = std::min(lo, s.x(i, a));
          hi = std::max(hi, s.x(i, a));
        }
        double b, sgn;
        if (alloc.is_empty) {
          b = -1.0, sgn = 0.0;
        } else if (alloc.directions[j] > 0) {
          sgn = 1.0;
          b = alloc.cutoffs[j] == -kInf ? 0.0 : -(alloc.cutoffs[j] - lo) / (hi - lo);
        } else {
          sgn = 0.0;
          b = alloc.cutoffs[j] == kInf ? 1.0 : (alloc.cutoffs[j] - lo) / (hi - lo);
        }
        const std::string t = std::to_string(a);
        point["b_" + t] = b;
        point["s_" + t] = sgn;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = (s.x(i, a) - lo) / (hi - lo);
          const double index = b + x * (2.0 * sgn - 1.0);
          const double z = index >= 0.0 ? 1.0 : 0.0;
          const std::string id = t + "_" + std::to_string(i + 1);
          point["z_" + id] = z;
          point["r_" + id] = c * z - index;
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        point["zs_" + std::to_string(i + 1)] = member[i] ? 1.0 : 0.0;
      }
      EXPECT_NEAR(Evaluate(lp, point), static_cast<double>(n) * sol.welfare, 1e-9);
    }
  }
}

TEST_F(ExportTest, MonotoneOptimumIsFeasible) {
  Rng rng(18);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 15;
    const Sample s = testing::RandomSample(rng, n, 2);
    const std::vector<double> scores = RandomScores(rng, n);
    for (auto dir : {MonotoneDirection::kNonDecreasing, MonotoneDirection::kNonIncreasing}) {
      const SieveSequence sieve = MonotoneSieve(3, dir);
      const EwmSolution sol = SolveClass(scores, s, sieve, 3);
      const auto& m = std::get<MonotoneBoundaryAllocation>(sol.allocation);
      const auto files = ExportMilp(scores, s, sieve, 3, dir_ / "mono.lp");
      const LinearProgram lp = ReadLp(files[0]);
      double c = 0.0;
      for (const auto& [v, coef] : lp.rows.at("link_1").coef) {
        if (v == "z_1") c = coef;
      }
      std::map<std::string, double> point;
      for (int j = 0; j <= m.knots; ++j) point["th_" + std::to_string(j)] = m.theta[j];
      for (std::size_t i = 0; i < n; ++i) {
        const double t = KnotCoordinate(s.x(i, 0), m.knots, m.domain);
        double index = s.x(i, 1);
        for (int j = 0; j <= m.knots; ++j) index += m.theta[j] * Hat(t, j);
        const double z = Contains(m, std::vector<double>{s.x(i, 0), s.x(i, 1)}) ? 1.0 : 0.0;
        point["z_" + std::to_string(i + 1)] = z;
        point["r_" + std::to_string(i + 1)] = c * z - index;
      }
      EXPECT_NEAR(Evaluate(lp, point), static_cast<double>(n) * sol.welfare, 1e-9);
    }
  }
}

}  // namespace
}  // namespace pwm
