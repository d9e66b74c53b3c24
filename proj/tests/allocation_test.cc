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

#include "gtest/gtest.h"
#include "oracles.h"
#include "pwm/allocation.h"
#include "pwm/error.h"
#include "pwm/random.h"

namespace pwm {
namespace {

using testing::kInf;

TEST(ContainsTest, Examples) {
  const std::vector<double> x{0.5, 0.9};
  EXPECT_TRUE(Contains(Allocation(ThresholdAllocation::Everyone()), x));
  EXPECT_FALSE(Contains(Allocation(ThresholdAllocation::Empty()), x));
  EXPECT_TRUE(Contains(Allocation(ThresholdAllocation{false, {0}, {0.5}, {1}}), x));
  EXPECT_FALSE(Contains(Allocation(ThresholdAllocation{false, {0}, {0.5}, {1}}),
                        std::vector<double>{0.49, 0.9}));
  EXPECT_TRUE(Contains(Allocation(ThresholdAllocation{false, {1}, {0.9}, {-1}}), x));
  MonotoneBoundaryAllocation m{1, {-0.5, -0.5}, MonotoneDirection::kNonDecreasing, {}};
  EXPECT_FALSE(Contains(Allocation(m), std::vector<double>{0.3, 0.4}));
  EXPECT_TRUE(Contains(Allocation(m), std::vector<double>{0.3, 0.5}));
}

TEST(ContainsTest, DimensionMismatch) {
  EXPECT_THROW(Contains(Allocation(ThresholdAllocation{false, {2}, {0.5}, {1}}),
                        std::vector<double>{0.1, 0.2}),
               ValidationError);
  MonotoneBoundaryAllocation m{1, {0.0, 0.0}, MonotoneDirection::kNonDecreasing, {}};
  EXPECT_THROW(Contains(Allocation(m), std::vector<double>{0.1, 0.2, 0.3}),
               ValidationError);
}

TEST(ContainsTest, ThresholdIsAConjunction) {
  Rng rng(21);
  for (int rep = 0; rep < 200; ++rep) {
    ThresholdAllocation a{false, {0, 2}, {rng.Uniform(), rng.Uniform()},
                          {rng.Bernoulli(0.5) ? 1 : -1, rng.Bernoulli(0.5) ? 1 : -1}};
    const std::vector<double> x{rng.Uniform(), rng.Uniform(), rng.Uniform()};
    const ThresholdAllocation first{false, {0}, {a.cutoffs[0]}, {a.directions[0]}};
    const ThresholdAllocation second{false, {2}, {a.cutoffs[1]}, {a.directions[1]}};
    const bool both = Contains(a, x);
    EXPECT_EQ(both, Contains(first, x) && Contains(second, x));
    if (both) EXPECT_TRUE(Contains(first, x));
  }
}

TEST(PsiTest, KernelValues) {
  EXPECT_EQ(Psi(4, 1, 0.25), 1.0);
  EXPECT_EQ(Psi(4, 1, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(Psi(4, 1, 0.125), 0.5);
  for (int T : {1, 2, 4, 8, 16}) {
    for (int j = 0; j <= T; ++j) {
      EXPECT_EQ(Psi(T, j, static_cast<double>(j) / T), 1.0);
    }
  }
  EXPECT_EQ(Psi(1, 0, 5.0, {5.0, 20.0}), 1.0);
  EXPECT_DOUBLE_EQ(Psi(1, 1, 12.5, {5.0, 20.0}), 0.5);
  EXPECT_THROW(Psi(4, 5, 0.1), ValidationError);
  EXPECT_THROW(Psi(4, -1, 0.1), ValidationError);
  EXPECT_THROW(Psi(0, 0, 0.1), ValidationError);
}

TEST(PsiTest, PartitionOfUnity) {
  Rng rng(1);
  for (int T : {1, 2, 4, 8}) {
    for (int rep = 0; rep < 100; ++rep) {
      const double x = rng.Uniform();
      double sum = 0.0;
      for (int j = 0; j <= T; ++j) {
        const double v = Psi(T, j, x);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(DiffMatrixTest, Shapes) {
  EXPECT_EQ(DiffMatrix(1), (std::vector<std::vector<double>>{{-1, 1}}));
  EXPECT_EQ(DiffMatrix(2),
            (std::vector<std::vector<double>>{{-1, 1, 0}, {0, -1, 1}}));
  EXPECT_THROW(DiffMatrix(0), ValidationError);
}

TEST(DiffMatrixTest, NonNegativeDifferencesIffNonDecreasing) {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const int T = 1 + static_cast<int>(rng.Index(6));
    std::vector<double> theta(T + 1);
    for (double& v : theta) v = std::round(rng.Uniform(-3, 3));
    const auto D = DiffMatrix(T);
    bool all_nonneg = true;
    for (const auto& row : D) {
      double s = 0.0;
      for (int j = 0; j <= T; ++j) s += row[j] * theta[j];
      all_nonneg = all_nonneg && s >= 0.0;
    }
    bool scan = true;
    for (int j = 1; j <= T; ++j) scan = scan && theta[j] >= theta[j - 1];
    EXPECT_EQ(all_nonneg, scan);
    EXPECT_EQ(SatisfiesMonotonicity(theta, MonotoneDirection::kNonDecreasing), scan);
  }
}

TEST(MonotoneTest, DirectionFlipsTheConstraint) {
  const std::vector<double> down{1.0, 0.0}, up{0.0, 1.0};
  EXPECT_TRUE(SatisfiesMonotonicity(down, MonotoneDirection::kNonIncreasing));
  EXPECT_FALSE(SatisfiesMonotonicity(up, MonotoneDirection::kNonIncreasing));
  EXPECT_TRUE(SatisfiesMonotonicity(up, MonotoneDirection::kNonDecreasing));
  EXPECT_THROW(Validate(MonotoneBoundaryAllocation{
                   1, {0.0, 1.0}, MonotoneDirection::kNonIncreasing, {}}),
               ValidationError);
  EXPECT_EQ(ParseDirection("non-increasing"), MonotoneDirection::kNonIncreasing);
  EXPECT_THROW(ParseDirection("sideways"), ValidationError);
}

TEST(MonotoneTest, MembershipIsAnUpperSetInX2) {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    MonotoneBoundaryAllocation m{4, {}, MonotoneDirection::kNonDecreasing, {}};
    for (int j = 0; j <= 4; ++j) m.theta.push_back(rng.Uniform(-1, 1));
    const double x1 = rng.Uniform();
    bool seen = false;
    for (int s = 0; s <= 100; ++s) {
      const bool in = Contains(m, std::vector<double>{x1, -2.0 + 0.04 * s});
      EXPECT_TRUE(!seen || in);
      seen = seen || in;
    }
  }
}

// The boundary is -sum theta psi, so a non-decreasing theta yields a
// non-increasing boundary and vice versa.
TEST(MonotoneTest, BoundaryShapeFollowsTheta) {
  Rng rng(4);
  for (auto direction :
       {MonotoneDirection::kNonDecreasing, MonotoneDirection::kNonIncreasing}) {
    MonotoneBoundaryAllocation m{8, {}, direction, {5.0, 20.0}};
    double v = 0.0;
    for (int j = 0; j <= 8; ++j) {
      m.theta.push_back(v);
      v += direction == MonotoneDirection::kNonDecreasing ? rng.Uniform()
                                                          : -rng.Uniform();
    }
    double prev = m.Boundary(5.0);
    for (int s = 1; s <= 100; ++s) {
      const double b = m.Boundary(5.0 + 0.15 * s);
      if (direction == MonotoneDirection::kNonDecreasing) {
        EXPECT_LE(b, prev + 1e-12);
      } else {
        EXPECT_GE(b, prev - 1e-12);
      }
      prev = b;
    }
  }
}

TEST(SieveTest, ThresholdCounts) {
  const SieveSequence two = ThresholdSieve(2);
  ASSERT_EQ(two.size(), 3u);
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(two.at(k).subset_size, k - 1);
  EXPECT_EQ(ThresholdSieve(5).size(), 6u);
  EXPECT_EQ(ThresholdSieve(5, 3).size(), 3u);
  EXPECT_EQ(two.at(3).t, 3.0);
  EXPECT_THROW(two.at(4), ValidationError);
  EXPECT_THROW(ThresholdSieve(0), ValidationError);
}

TEST(SieveTest, MonotoneKnots) {
  const SieveSequence s = MonotoneSieve(5, MonotoneDirection::kNonIncreasing);
  std::vector<int> knots;
  for (const auto& c : s.classes) knots.push_back(c.knots);
  EXPECT_EQ(knots, (std::vector<int>{1, 2, 4, 8, 16}));
  EXPECT_THROW(MonotoneSieve(0, MonotoneDirection::kNonIncreasing), ValidationError);
  EXPECT_THROW(MonotoneSieve(2, MonotoneDirection::kNonIncreasing, {1.0, 1.0}),
               ValidationError);
}

TEST(SieveTest, TkMustIncreaseWhenUsed) {
  SieveSequence s = ThresholdSieve(2);
  EXPECT_THROW(s.SetTk({1, 1, 2}), ValidationError);
  s.SetTk({0.5, 1, 2});
  EXPECT_EQ(s.at(1).t, 0.5);
  s.include_tk_term = false;
  EXPECT_NO_THROW(s.SetTk({1, 1, 1}));
  EXPECT_THROW(s.SetTk({1, 1}), ValidationError);
}

TEST(NestednessTest, PaddedThresholdsAgreeOnSamplePoints) {
  Rng rng(5);
  const std::size_t d = 3;
  const Sample s = testing::RandomSample(rng, 80, d);
  for (int q = 0; q < static_cast<int>(d); ++q) {
    for (int rep = 0; rep < 50; ++rep) {
      ThresholdAllocation a;
      std::vector<int> pool{0, 1, 2};
      for (int j = 0; j < q; ++j) {
        const std::size_t pick = rng.Index(pool.size());
        a.active.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      std::sort(a.active.begin(), a.active.end());
      for (int j = 0; j < q; ++j) {
        a.cutoffs.push_back(rng.Uniform());
        a.directions.push_back(rng.Bernoulli(0.5) ? 1 : -1);
      }
      const ThresholdAllocation padded = PadThreshold(a, d);
      EXPECT_EQ(padded.active.size(), a.active.size() + 1);
      EXPECT_NO_THROW(Validate(padded, d));
      EXPECT_EQ(Classify(Allocation(a), s), Classify(Allocation(padded), s));
    }
  }
  EXPECT_TRUE(PadThreshold(ThresholdAllocation::Empty(), d).is_empty);
}

TEST(NestednessTest, RefinedBoundaryMatchesEverywhere) {
  Rng rng(6);
  for (int T : {1, 2, 4, 8}) {
    for (int rep = 0; rep < 50; ++rep) {
      MonotoneBoundaryAllocation m{T, {}, MonotoneDirection::kNonDecreasing, {5, 20}};
      double v = rng.Uniform(-1, 0);
      for (int j = 0; j <= T; ++j) {
        m.theta.push_back(v);
        v += rng.Uniform();
      }
      const MonotoneBoundaryAllocation r = RefineMonotone(m);
      EXPECT_EQ(r.knots, 2 * T);
      EXPECT_TRUE(SatisfiesMonotonicity(r.theta, r.direction));
      for (int s = 0; s < 100; ++s) {
        const double x1 = rng.Uniform(5, 20);
        EXPECT_NEAR(r.Boundary(x1), m.Boundary(x1), 1e-12);
      }
    }
  }
}

TEST(JsonTest, RoundTrip) {
  const std::vector<Allocation> cases{
      Allocation(ThresholdAllocation::Empty()),
      Allocation(ThresholdAllocation::Everyone()),
      Allocation(ThresholdAllocation{false, {0, 2}, {-kInf, 0.25}, {1, -1}}),
      Allocation(MonotoneBoundaryAllocation{
          2, {-0.1, -0.4, -0.9}, MonotoneDirection::kNonIncreasing, {5, 20}})};
  for (const auto& a : cases) {
    EXPECT_EQ(AllocationFromJson(ToJson(a)), a);
    EXPECT_EQ(AllocationFromJson(nlohmann::json::parse(ToJson(a).dump())), a);
  }
}

}  // namespace
}  // namespace pwm
