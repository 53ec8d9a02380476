// Copyright 2026 The berrytrack Authors.
//
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

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace berry::cli {

inline constexpr int kSchemaVersion = 1;

std::string version();

/// Trial seed for cell `cell` and trial `trial` of a benchmark sweep.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial);

/// Runs the command line in `args` (without the program name). Single-line
/// JSON summaries go to `out`, logs and usage errors to `err`.
/// Exit codes: 0 success, 1 usage or IO error, 2 tracker FAIL or oracle
/// degeneracy.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace berry::cli
