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

#ifndef PWM_RANDOM_H_
#define PWM_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace pwm {

// Derives an independent stream seed from a master seed, a stream label
// ("dgp", "split", "rademacher", ...) and optional integer coordinates.
// Stable across platforms and releases.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label,
                         std::initializer_list<std::uint64_t> coords = {});

// Thin wrapper over mt19937_64. The distributions are implemented here
// rather than taken from <random> so that draws are bit-identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  bool Bernoulli(double p) { return Uniform() < p; }
  int Rademacher() { return (engine_() >> 63) != 0 ? 1 : -1; }
  // Uniform integer in [0, n), unbiased.
  std::size_t Index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pwm

#endif  // PWM_RANDOM_H_
