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

#ifndef PWM_CLI_H_
#define PWM_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace pwm {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

// Runs the `pwm` tool. `args` excludes the program name. Results go to
// `out` (or to the files named by the flags); errors are written to `err`
// as one JSON object.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace pwm

#endif  // PWM_CLI_H_
