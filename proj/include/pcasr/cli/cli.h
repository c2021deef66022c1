// pcasr/cli/cli.h

// Copyright 2026  The pcasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PCASR_CLI_CLI_H_
#define PCASR_CLI_CLI_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pcasr::cli {

inline constexpr std::string_view kToolName = "pcasr";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // usage errors, unreadable or malformed inputs
  kExitIdMismatch = 2,   // also rtf-bench rows without audio_seconds
  kExitConfig = 3,       // bad configuration, unsupported decoding mode
  kExitDivergence = 4,
};

// Runs the tool on `args` (without the program name). Machine-readable
// results go to `out`, logs and diagnostics to `err`; "-" as an input path
// reads `in`.
int Run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

}  // namespace pcasr::cli

#endif  // PCASR_CLI_CLI_H_
