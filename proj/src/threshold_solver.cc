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

// Exact maximisation of empirical welfare over threshold allocations.
//
// For a fixed subset of active covariates and a direction per covariate, the
// coordinates are sign-flipped so that every comparison reads v >= c'.
// Candidate cutoffs are -infinity and the values carried by positive-score
// units: lifting a cutoff past units that all score <= 0 never lowers
// welfare. Cutoffs of all but the last two coordinates are searched by
// branch and bound over intervals of candidates. A node with intervals
// [lo_j, hi_j] is bounded by solving the last two coordinates exactly with
// weight w_i for units inside every hi_j cutoff and max(w_i, 0) for units
// inside only the lo_j cutoffs. The two-coordinate problem is a sweep over
// one coordinate with a segment tree holding the best suffix sum of the
// other.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pwm/error.h"
#include "pwm/ewm_solver.h"

namespace pwm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Max suffix sum over slots, smallest slot index on ties.
class SuffixMaxTree {
 public:
  void Reset(int slots) {
    size_ = 1;
    while (size_ < slots) size_ <<= 1;
    nodes_.assign(2 * size_, Node{});
    for (int s = 0; s < size_; ++s) nodes_[size_ + s] = {0.0, 0.0, s};
    for (int v = size_ - 1; v >= 1; --v) Pull(v);
  }
  void Add(int slot, double w) {
    int v = size_ + slot;
    nodes_[v].sum += w;
    nodes_[v].best = nodes_[v].sum;
    for (v >>= 1; v >= 1; v >>= 1) Pull(v);
  }
  double best() const { return nodes_[1].best; }
  int best_slot() const { return nodes_[1].slot; }

 private:
  struct Node {
    double sum = 0.0;
    double best = 0.0;
    int slot = 0;
  };
  void Pull(int v) {
    const Node& l = nodes_[2 * v];
    const Node& r = nodes_[2 * v + 1];
    Node& out = nodes_[v];
    out.sum = l.sum + r.sum;
    const double left = l.best + r.sum;
    if (left >= r.best) {
      out.best = left;
      out.slot = l.slot;
    } else {
      out.best = r.best;
      out.slot = r.slot;
    }
  }
  int size_ = 1;
  std::vector<Node> nodes_;
};

class ThresholdSearch {
 public:
  ThresholdSearch(std::span<const double> scores, const Sample& sample, int q,
                  double floor_sum)
      : scores_(scores), sample_(sample), q_(q), floor_sum_(floor_sum) {}

  void Run() {
    const int dim = static_cast<int>(sample_.dim());
    if (q_ == 0) {
      double total = 0.0;
      for (double s : scores_) total += s;
      if (total > best_sum_) Record(total, {}, {}, {});
      nodes_ = 2;
      return;
    }
    std::vector<int> subset(q_);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      for (unsigned mask = 0; mask < (1u << q_); ++mask) {
        std::vector<int> dirs(q_);
        for (int j = 0; j < q_; ++j) {
          dirs[j] = (mask >> (q_ - 1 - j)) & 1u ? -1 : 1;
        }
        RunTask(subset, dirs);
      }
      // Next combination in lexicographic order.
      int j = q_ - 1;
      while (j >= 0 && subset[j] == dim - q_ + j) --j;
      if (j < 0) break;
      ++subset[j];
      for (int t = j + 1; t < q_; ++t) subset[t] = subset[t - 1] + 1;
    }
  }

  double best_sum() const { return best_sum_; }
  std::int64_t nodes() const { return nodes_; }

  ThresholdAllocation BestAllocation() const {
    if (best_is_empty_) return ThresholdAllocation::Empty();
    ThresholdAllocation out;
    out.active = best_subset_;
    out.directions = best_dirs_;
    out.cutoffs.resize(best_cut_.size());
    for (std::size_t j = 0; j < best_cut_.size(); ++j) {
      out.cutoffs[j] = best_dirs_[j] > 0 ? best_cut_[j] : -best_cut_[j];
    }
    return out;
  }

 private:
  // Best box over the last one or two coordinates for the current node.
  struct Leaf {
    double value = -kInf;
    int outer = 0;
    int inner = 0;
  };

  void RunTask(const std::vector<int>& subset, const std::vector<int>& dirs) {
    const std::size_t n = sample_.size();
    subset_ = &subset;
    dirs_ = &dirs;
    levels_.assign(q_, {});
    slot_.assign(q_, std::vector<int>(n));
    for (int j = 0; j < q_; ++j) {
      auto& lv = levels_[j];
      for (std::size_t i = 0; i < n; ++i) {
        if (scores_[i] > 0.0) lv.push_back(dirs[j] * sample_.x(i, subset[j]));
      }
      std::sort(lv.begin(), lv.end());
      lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
      // Cutoff slot t admits unit i iff t <= slot_[j][i]; slot 0 is -inf,
      // slot t in 1..P is levels[t - 1] and slot P + 1 is +inf.
      for (std::size_t i = 0; i < n; ++i) {
        const double v = dirs[j] * sample_.x(i, subset[j]);
        slot_[j][i] = static_cast<int>(
            std::upper_bound(lv.begin(), lv.end(), v) - lv.begin());
      }
    }
    if (levels_[0].empty()) return;  // no positive unit: nothing beats empty
    const int outer = q_ >= 2 ? q_ - 2 : 0;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return slot_[outer][a] > slot_[outer][b];
    });
    weight_.assign(n, 0.0);
    lo_.assign(std::max(q_ - 2, 0), 0);
    hi_.resize(lo_.size());
    for (std::size_t j = 0; j < lo_.size(); ++j) {
      hi_[j] = static_cast<int>(levels_[j].size());
    }
    task_key_ = ++task_counter_;
    Branch();
  }

  // Lexicographic comparison of slot tuples within the current task.
  bool KeyBefore(const std::vector<int>& a, const std::vector<int>& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  void Branch() {
    const int b = static_cast<int>(lo_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) {
      const double w = scores_[i];
      bool outside = false;
      bool inside = true;
      for (int j = 0; j < b; ++j) {
        const int s = slot_[j][i];
        if (s < lo_[j]) {
          outside = true;
          break;
        }
        if (s < hi_[j]) inside = false;
      }
      weight_[i] = outside ? 0.0 : inside ? w : std::max(w, 0.0);
    }
    const Leaf leaf = Sweep();
    ++nodes_;
    const double upper = leaf.value;
    if (upper < floor_sum_ || upper < best_sum_) return;
    if (upper == best_sum_) {
      // Ties only matter if this node may hold an earlier allocation.
      if (best_task_ != task_key_) return;
      std::vector<int> node_min(lo_);
      node_min.push_back(0);
      if (q_ >= 2) node_min.push_back(0);
      if (!KeyBefore(node_min, best_slots_)) return;
    }
    int split = -1;
    int widest = 0;
    for (int j = 0; j < b; ++j) {
      if (hi_[j] - lo_[j] > widest) {
        widest = hi_[j] - lo_[j];
        split = j;
      }
    }
    if (split < 0) {
      std::vector<int> slots(lo_);
      if (q_ >= 2) slots.push_back(leaf.outer);
      slots.push_back(leaf.inner);
      if (upper > best_sum_ || best_task_ != task_key_ ||
          KeyBefore(slots, best_slots_)) {
        RecordSlots(upper, slots);
      }
      return;
    }
    const int lo = lo_[split];
    const int hi = hi_[split];
    const int mid = lo + (hi - lo) / 2;
    hi_[split] = mid;
    Branch();
    hi_[split] = hi;
    lo_[split] = mid + 1;
    Branch();
    lo_[split] = lo;
  }

  // Maximises the weighted suffix sum over cutoff slots of the last one or
  // two coordinates. Ties go to the smallest (outer, inner) slot pair.
  Leaf Sweep() {
    const int inner = q_ - 1;
    const int inner_levels = static_cast<int>(levels_[inner].size());
    tree_.Reset(inner_levels + 2);
    Leaf best;
    if (q_ == 1) {
      for (std::size_t i = 0; i < weight_.size(); ++i) {
        if (weight_[i] != 0.0) tree_.Add(slot_[inner][i], weight_[i]);
      }
      best.value = tree_.best();
      best.inner = tree_.best_slot();
      return best;
    }
    const int outer = q_ - 2;
    std::size_t p = 0;
    for (int t = static_cast<int>(levels_[outer].size()); t >= 0; --t) {
      while (p < order_.size() && slot_[outer][order_[p]] >= t) {
        const int u = order_[p++];
        if (weight_[u] != 0.0) tree_.Add(slot_[inner][u], weight_[u]);
      }
      if (tree_.best() >= best.value) {
        best.value = tree_.best();
        best.outer = t;
        best.inner = tree_.best_slot();
      }
    }
    return best;
  }

  double SlotValue(int j, int t) const {
    if (t == 0) return -kInf;
    if (t > static_cast<int>(levels_[j].size())) return kInf;
    return levels_[j][t - 1];
  }

  void RecordSlots(double sum, const std::vector<int>& slots) {
    std::vector<double> cut(q_);
    for (int j = 0; j < q_; ++j) cut[j] = SlotValue(j, slots[j]);
    Record(sum, *subset_, *dirs_, cut);
    best_task_ = task_key_;
    best_slots_ = slots;
  }

  void Record(double sum, const std::vector<int>& subset,
              const std::vector<int>& dirs, const std::vector<double>& cut) {
    best_sum_ = sum;
    best_is_empty_ = false;
    best_subset_ = subset;
    best_dirs_ = dirs;
    best_cut_ = cut;
  }

  std::span<const double> scores_;
  const Sample& sample_;
  int q_;
  double floor_sum_;

  const std::vector<int>* subset_ = nullptr;
  const std::vector<int>* dirs_ = nullptr;
  std::vector<std::vector<double>> levels_;
  std::vector<std::vector<int>> slot_;
  std::vector<int> order_;
  std::vector<double> weight_;
  std::vector<int> lo_;
  std::vector<int> hi_;
  SuffixMaxTree tree_;
  int task_key_ = 0;
  int task_counter_ = 0;

  // The empty allocation comes first in the tie-break order.
  double best_sum_ = 0.0;
  bool best_is_empty_ = true;
  int best_task_ = 0;
  std::vector<int> best_slots_;
  std::vector<int> best_subset_;
  std::vector<int> best_dirs_;
  std::vector<double> best_cut_;
  std::int64_t nodes_ = 0;
};

}  // namespace

EwmSolution SolveThresholdClass(std::span<const double> scores,
                                const Sample& sample, int k,
                                const SolverOptions& options) {
  const int dim = static_cast<int>(sample.dim());
  if (k < 1 || k > dim + 1) {
    throw ValidationError("threshold class k = " + std::to_string(k) +
                          " is outside 1.." + std::to_string(dim + 1));
  }
  if (scores.size() != sample.size()) {
    throw ValidationError("score vector length does not match the sample");
  }
  double floor_sum = -kInf;
  if (options.welfare_floor) {
    const double f = *options.welfare_floor * static_cast<double>(sample.size());
    floor_sum = f - 1e-9 * (std::abs(f) + 1.0);
  }
  ThresholdSearch search(scores, sample, k - 1, floor_sum);
  search.Run();
  std::int64_t nodes = search.nodes();
  ThresholdAllocation best = search.BestAllocation();
  if (search.best_sum() < floor_sum) {
    // The floor was not attainable after all; search again without it.
    ThresholdSearch full(scores, sample, k - 1, -kInf);
    full.Run();
    nodes += full.nodes();
    best = full.BestAllocation();
  }
  EwmSolution out;
  out.allocation = std::move(best);
  out.welfare = EmpiricalWelfare(scores, out.allocation, sample);
  out.nodes_explored = nodes;
  out.class_index = k;
  return out;
}

}  // namespace pwm
