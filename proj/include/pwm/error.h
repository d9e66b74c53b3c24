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

#ifndef PWM_ERROR_H_
#define PWM_ERROR_H_

#include <stdexcept>
#include <string>

namespace pwm {

// Invalid arguments or configuration: the caller asked for something the
// library cannot do (bad propensity, degenerate split, class out of range).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Malformed input data (CSV rows, JSON documents) or I/O failures.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pwm

#endif  // PWM_ERROR_H_
