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

#include "pwm/ewm_solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "pwm/error.h"

namespace pwm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double DefaultThetaBound(const Sample& sample) {
  double extent = 1.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    extent = std::max(extent, std::abs(sample.x(i, 1)));
  }
  return 10.0 * extent;
}

std::vector<double> MonotoneLevelGrid(const Sample& sample, double theta_bound) {
  std::vector<double> levels;
  levels.reserve(sample.size() + 2);
  for (std::size_t i = 0; i < sample.size(); ++i) levels.push_back(sample.x(i, 1));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.empty()) return {0.0};
  const double gap = std::max(levels.back() - levels.front(), 1.0);
  levels.insert(levels.begin(), levels.front() - gap);
  levels.push_back(levels.back() + gap);
  std::erase_if(levels, [&](double l) { return std::abs(l) > theta_bound; });
  return levels;
}

EwmSolution SolveMonotoneClass(std::span<const double> scores,
                               const Sample& sample, int knots,
                               MonotoneDirection direction, Domain domain,
                               const SolverOptions& options) {
  if (sample.dim() != 2) {
    throw ValidationError("monotone allocations need exactly two covariates");
  }
  if (knots < 1) throw ValidationError("knot count T must be >= 1");
  if (!(domain.lo < domain.hi)) throw ValidationError("domain must satisfy lo < hi");
  if (scores.size() != sample.size()) {
    throw ValidationError("score vector length does not match the sample");
  }
  const double bound = options.theta_bound.value_or(DefaultThetaBound(sample));
  if (!(bound > 0.0)) throw ValidationError("theta bound must be positive");
  const std::vector<double> levels = MonotoneLevelGrid(sample, bound);
  if (levels.empty()) throw ValidationError("theta bound excludes every knot level");
  const int num_levels = static_cast<int>(levels.size());
  std::vector<double> theta_of(num_levels);
  for (int l = 0; l < num_levels; ++l) theta_of[l] = -levels[l];

  // Units per knot interval, with their hat weights at both ends.
  struct Point {
    double h1, x2, score;
  };
  std::vector<std::vector<Point>> bins(knots);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double t = KnotCoordinate(sample.x(i, 0), knots, domain);
    const int j = std::min(static_cast<int>(std::floor(t)), knots - 1);
    bins[j].push_back({Hat(t, j + 1), sample.x(i, 1), scores[i]});
  }

  // Level l' may follow level l at the next knot when theta keeps its
  // direction: theta = -level, so non-decreasing theta means l' <= l.
  const bool non_decreasing = direction == MonotoneDirection::kNonDecreasing;
  auto allowed_begin = [&](int l) { return non_decreasing ? 0 : l; };
  auto allowed_end = [&](int l) { return non_decreasing ? l + 1 : num_levels; };

  std::vector<double> value_to_go(num_levels, 0.0);
  std::vector<std::vector<int>> next(knots, std::vector<int>(num_levels, 0));
  std::vector<double> bucket(num_levels + 1);
  std::vector<double> weight(num_levels);
  std::int64_t work = 0;
  for (int j = knots - 1; j >= 0; --j) {
    std::vector<double> updated(num_levels, -kInf);
    for (int l = 0; l < num_levels; ++l) {
      // Treated iff the segment index plus x2 is >= 0, which is monotone
      // in l' (theta decreases in l'); find the last l' that treats.
      std::fill(bucket.begin(), bucket.end(), 0.0);
      for (const Point& p : bins[j]) {
        auto treats = [&](int lp) {
          return SegmentIndex(theta_of[l], theta_of[lp], p.h1) + p.x2 >= 0.0;
        };
        int lo = 0, hi = num_levels;  // first non-treating level in [lo, hi]
        while (lo < hi) {
          const int mid = (lo + hi) / 2;
          if (treats(mid)) lo = mid + 1; else hi = mid;
        }
        bucket[lo] += p.score;  // treated for every l' < lo
      }
      double running = 0.0;
      for (int lp = num_levels - 1; lp >= 0; --lp) {
        running += bucket[lp + 1];
        weight[lp] = running;
      }
      work += static_cast<std::int64_t>(bins[j].size());
      for (int lp = allowed_begin(l); lp < allowed_end(l); ++lp) {
        const double v = weight[lp] + value_to_go[lp];
        if (v > updated[l]) {
          updated[l] = v;
          next[j][l] = lp;
        }
      }
    }
    value_to_go = std::move(updated);
  }

  int l = 0;
  for (int c = 1; c < num_levels; ++c) {
    if (value_to_go[c] > value_to_go[l]) l = c;
  }
  MonotoneBoundaryAllocation alloc;
  alloc.knots = knots;
  alloc.direction = direction;
  alloc.domain = domain;
  alloc.theta.push_back(theta_of[l]);
  for (int j = 0; j < knots; ++j) {
    l = next[j][l];
    alloc.theta.push_back(theta_of[l]);
  }
  EwmSolution out;
  out.allocation = alloc;
  out.welfare = EmpiricalWelfare(scores, out.allocation, sample);
  out.nodes_explored = work + static_cast<std::int64_t>(knots) * num_levels;
  out.class_index = 0;

  // Refining the half-resolution optimum puts midpoint knots between grid
  // levels; keeping it as a candidate makes the dyadic classes nested.
  if (knots % 2 == 0) {
    const EwmSolution coarse =
        SolveMonotoneClass(scores, sample, knots / 2, direction, domain, options);
    const Allocation refined(
        RefineMonotone(std::get<MonotoneBoundaryAllocation>(coarse.allocation)));
    const double w = EmpiricalWelfare(scores, refined, sample);
    out.nodes_explored += coarse.nodes_explored;
    if (w > out.welfare) {
      out.allocation = refined;
      out.welfare = w;
    }
  }
  return out;
}

EwmSolution SolveClass(std::span<const double> scores, const Sample& sample,
                       const SieveSequence& sieve, int k,
                       const SolverOptions& options) {
  const SieveClass& cls = sieve.at(k);
  EwmSolution out;
  switch (sieve.family) {
    case Family::kThreshold:
      if (sample.dim() != sieve.dim) {
        throw ValidationError("sample dimension does not match the sieve");
      }
      out = SolveThresholdClass(scores, sample, cls.subset_size + 1, options);
      break;
    case Family::kMonotone: {
      SolverOptions opts = options;
      if (!opts.theta_bound) opts.theta_bound = sieve.theta_bound;
      out = SolveMonotoneClass(scores, sample, cls.knots, sieve.direction,
                               sieve.domain, opts);
      break;
    }
    default:
      throw ValidationError("unknown sieve family");
  }
  out.class_index = k;
  return out;
}

nlohmann::json ToJson(const EwmSolution& solution) {
  return {{"allocation", ToJson(solution.allocation)},
          {"welfare", solution.welfare},
          {"nodes_explored", solution.nodes_explored},
          {"class_index", solution.class_index}};
}

// ---------------------------------------------------------------------------
// LP export

namespace {

// Strict inequalities x'b / c < z are written with this margin.
constexpr double kStrictMargin = 1e-6;

std::string Num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Accumulates "+ c name" terms, wrapping long rows.
class Row {
 public:
  void Add(double coef, const std::string& name) {
    if (coef == 0.0) return;
    if (terms_ > 0 && terms_ % 6 == 0) out_ << "\n   ";
    out_ << (coef < 0 ? " - " : (terms_ == 0 ? " " : " + "));
    const double mag = std::abs(coef);
    if (mag != 1.0) out_ << Num(mag) << ' ';
    out_ << name;
    ++terms_;
  }
  std::string str() const { return terms_ == 0 ? " 0 dummy_zero" : out_.str(); }

 private:
  std::ostringstream out_;
  int terms_ = 0;
};

std::string UnitName(const char* prefix, std::size_t i) {
  return std::string(prefix) + std::to_string(i + 1);
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

std::string ThresholdProgram(std::span<const double> scores, const Sample& sample,
                             const std::vector<int>& subset, int k) {
  const std::size_t n = sample.size();
  const int d = static_cast<int>(sample.dim());
  const double c = d + 2;
  std::ostringstream lp;
  lp << "\\ Threshold class k = " << k << ", active covariates {";
  for (std::size_t j = 0; j < subset.size(); ++j) lp << (j ? "," : "") << subset[j];
  lp << "}\n";
  lp << "\\ Covariates rescaled to [0,1] by (x - min) / (max - min); big-M c = d + 2 = "
     << Num(c) << "\n";
  lp << "\\ z_a_i = 1 iff b_a + x_ia (2 s_a - 1) >= 0; with several active covariates\n"
     << "\\ zs_i = 1 iff every z_a_i = 1\n";

  std::vector<double> lo(d), span(d);
  for (int a = 0; a < d; ++a) {
    double mn = kInf, mx = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
      mn = std::min(mn, sample.x(i, a));
      mx = std::max(mx, sample.x(i, a));
    }
    lo[a] = mn;
    span[a] = mx > mn ? mx - mn : 1.0;
  }

  const int q = static_cast<int>(subset.size());
  // One active covariate needs no conjunction: its z_a_i is the decision.
  const std::string decision =
      q == 1 ? "z_" + std::to_string(subset[0]) + "_" : std::string("zs_");
  lp << "Maximize\n obj:";
  Row obj;
  for (std::size_t i = 0; i < n; ++i) obj.Add(scores[i], UnitName(decision.c_str(), i));
  lp << obj.str() << "\nSubject To\n";
  if (q == 0) {
    for (std::size_t i = 1; i < n; ++i) {
      lp << " same_" << i + 1 << ": " << UnitName("zs_", i) << " - zs_1 = 0\n";
    }
  }
  for (int a : subset) {
    const std::string tag = std::to_string(a);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (sample.x(i, a) - lo[a]) / span[a];
      Row row;
      row.Add(c, "z_" + tag + "_" + std::to_string(i + 1));
      row.Add(-1.0, "b_" + tag);
      row.Add(-2.0 * x, "s_" + tag);
      row.Add(-1.0, "r_" + tag + "_" + std::to_string(i + 1));
      lp << " link_" << tag << "_" << i + 1 << ":" << row.str() << " = " << Num(-x)
         << "\n";
    }
  }
  if (q > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      Row low, high;
      low.Add(1.0, UnitName("zs_", i));
      high.Add(q, UnitName("zs_", i));
      for (int a : subset) {
        const std::string z = "z_" + std::to_string(a) + "_" + std::to_string(i + 1);
        low.Add(-1.0, z);
        high.Add(-1.0, z);
      }
      lp << " and_lo_" << i + 1 << ":" << low.str() << " >= " << Num(1.0 - q) << "\n";
      lp << " and_hi_" << i + 1 << ":" << high.str() << " <= 0\n";
    }
  }
  lp << "Bounds\n";
  for (int a : subset) {
    const std::string tag = std::to_string(a);
    lp << " -1 <= b_" << tag << " <= 1\n";
    for (std::size_t i = 0; i < n; ++i) {
      lp << " " << Num(kStrictMargin) << " <= r_" << tag << "_" << i + 1
         << " <= " << Num(c) << "\n";
    }
  }
  lp << "Binaries\n";
  for (int a : subset) lp << " s_" << a << "\n";
  for (int a : subset) {
    for (std::size_t i = 0; i < n; ++i) lp << " z_" << a << "_" << i + 1 << "\n";
  }
  if (q != 1) {
    for (std::size_t i = 0; i < n; ++i) lp << " " << UnitName("zs_", i) << "\n";
  }
  lp << "End\n";
  return lp.str();
}

std::string MonotoneProgram(std::span<const double> scores, const Sample& sample,
                            const SieveSequence& sieve, int k, double bound) {
  const int knots = sieve.at(k).knots;
  const std::size_t n = sample.size();
  double extent = 0.0;
  for (std::size_t i = 0; i < n; ++i) extent = std::max(extent, std::abs(sample.x(i, 1)));
  const double c = bound + extent + 1.0;
  std::ostringstream lp;
  lp << "\\ Monotone class k = " << k << ", T = " << knots << ", direction "
     << DirectionName(sieve.direction) << ", domain [" << Num(sieve.domain.lo) << ", "
     << Num(sieve.domain.hi) << "]\n";
  lp << "\\ z_i = 1 iff sum_j th_j psi_j(x1_i) + x2_i >= 0; |th_j| <= " << Num(bound)
     << "; big-M c_T = " << Num(c) << "\n";
  lp << "Maximize\n obj:";
  Row obj;
  for (std::size_t i = 0; i < n; ++i) obj.Add(scores[i], UnitName("z_", i));
  lp << obj.str() << "\nSubject To\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double t = KnotCoordinate(sample.x(i, 0), knots, sieve.domain);
    Row row;
    row.Add(c, UnitName("z_", i));
    for (int j = 0; j <= knots; ++j) {
      row.Add(-Hat(t, j), "th_" + std::to_string(j));
    }
    row.Add(-1.0, UnitName("r_", i));
    lp << " link_" << i + 1 << ":" << row.str() << " = " << Num(sample.x(i, 1)) << "\n";
  }
  const char* sense =
      sieve.direction == MonotoneDirection::kNonDecreasing ? " >= 0\n" : " <= 0\n";
  for (int j = 0; j < knots; ++j) {
    lp << " mono_" << j + 1 << ": th_" << j + 1 << " - th_" << j << sense;
  }
  lp << "Bounds\n";
  for (int j = 0; j <= knots; ++j) {
    lp << " " << Num(-bound) << " <= th_" << j << " <= " << Num(bound) << "\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    lp << " " << Num(kStrictMargin) << " <= " << UnitName("r_", i) << " <= " << Num(c)
       << "\n";
  }
  lp << "Binaries\n";
  for (std::size_t i = 0; i < n; ++i) lp << " " << UnitName("z_", i) << "\n";
  lp << "End\n";
  return lp.str();
}

}  // namespace

std::vector<std::filesystem::path> ExportMilp(std::span<const double> scores,
                                              const Sample& sample,
                                              const SieveSequence& sieve, int k,
                                              const std::filesystem::path& path,
                                              const SolverOptions& options) {
  const SieveClass& cls = sieve.at(k);
  if (scores.size() != sample.size()) {
    throw ValidationError("score vector length does not match the sample");
  }
  if (sample.dim() != sieve.dim) {
    throw ValidationError("sample dimension does not match the sieve");
  }
  std::vector<std::filesystem::path> written;
  if (sieve.family == Family::kMonotone) {
    const double bound = options.theta_bound.value_or(
        sieve.theta_bound.value_or(DefaultThetaBound(sample)));
    WriteFile(path, MonotoneProgram(scores, sample, sieve, k, bound));
    written.push_back(path);
    return written;
  }
  const int d = static_cast<int>(sample.dim());
  const int q = cls.subset_size;
  std::vector<std::vector<int>> subsets;
  std::vector<int> subset(q);
  for (int j = 0; j < q; ++j) subset[j] = j;
  while (true) {
    subsets.push_back(subset);
    int j = q - 1;
    while (j >= 0 && subset[j] == d - q + j) --j;
    if (j < 0) break;
    ++subset[j];
    for (int t = j + 1; t < q; ++t) subset[t] = subset[t - 1] + 1;
  }
  for (const auto& s : subsets) {
    std::filesystem::path target = path;
    if (subsets.size() > 1) {
      std::string tag;
      for (std::size_t j = 0; j < s.size(); ++j) tag += (j ? "-" : "") + std::to_string(s[j]);
      target = path.parent_path() /
               (path.stem().string() + "_" + tag + path.extension().string());
    }
    WriteFile(target, ThresholdProgram(scores, sample, s, k));
    written.push_back(target);
  }
  return written;
}

}  // namespace pwm
