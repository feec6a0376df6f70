/* Copyright 2026 The PAL Refine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PAL_COMMANDS_H_
#define PAL_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pal/eval.h"
#include "pal/par.h"

namespace pal {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitItemFailure = 1;
inline constexpr int kExitConfigError = 2;

struct CommandOptions {
  // detect | par | rank | select | refine | eval | stats | split | health
  std::string command;
  std::string manifest_path;
  std::optional<std::string> config_path;
  std::string out_dir = "out";
  std::string split = "all";  // train | val | test | all
  uint64_t seed = 0;
  std::optional<int> parallelism;  // overrides the config value
  bool strict = false;
  std::vector<double> percentiles = {0, 25, 50, 75, 100};
  double alpha = 0.05;
  int64_t permutations = 1000000;
  std::optional<std::string> votes_path;  // eval: CSV task,vote
  bool naive = false;                     // refine: whole-image baseline
  std::ostream* log = nullptr;            // defaults to std::cerr
};

// Runs one subcommand end to end. Per-item failures are logged and reported
// in <out>/run_summary.json; returns kExitItemFailure if any item failed and
// kExitConfigError for unusable configuration or manifests.
int RunCommand(const CommandOptions& options);

// Parses "0,25,50" style lists.
std::vector<double> ParsePercentileList(const std::string& text);

// Reads task,vote CSV (header optional) into per-task vote lists.
std::map<std::string, PreferenceVotes> ReadVotesCsv(const std::string& path);

// File-name-safe form of an image id or domain.
std::string SafeFileStem(const std::string& id);

}  // namespace pal

#endif  // PAL_COMMANDS_H_
