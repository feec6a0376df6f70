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

// pal: batch frontend for artifact detection, PAR scoring and ranking,
// zoom-in refinement, evaluation and corpus statistics.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pal/commands.h"
#include "pal/errors.h"

int main(int argc, char** argv) {
  CLI::App app{"Perceptual artifact localization and refinement tools"};
  app.require_subcommand(1);

  pal::CommandOptions opts;
  std::string config_path;
  std::string votes_path;
  std::string percentiles = "0,25,50,75,100";
  int parallelism = 0;

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"detect", "Run the artifact detector and write masks"},
      {"par", "Compute the Perceptual Artifacts Ratio per image"},
      {"rank", "Rank images by PAR and sample percentiles"},
      {"select", "Pick the lowest-PAR candidate in each group"},
      {"refine", "Zoom-in inpainting of detected artifacts"},
      {"eval", "mIoU against ground truth and user-study significance"},
      {"stats", "PAR per task, heatmaps, per-class PAR and split counts"},
      {"split", "Assign 80/10/10 train/val/test splits"},
      {"health", "Check remote backends"},
  };
  for (const Spec& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", config_path, "Pipeline config (JSON)");
    sub->add_option("--parallelism", parallelism, "Worker count")
        ->check(CLI::PositiveNumber);
    if (std::string(spec.name) == "health") continue;
    sub->add_option("--manifest", opts.manifest_path, "Dataset manifest (JSON)")
        ->required();
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--split", opts.split, "train, val, test or all")
        ->check(CLI::IsMember({"train", "val", "test", "all"}));
    sub->add_option("--seed", opts.seed, "Random seed");
    sub->add_flag("--strict", opts.strict, "Abort on the first item failure");
    if (std::string(spec.name) == "rank") {
      sub->add_option("--percentiles", percentiles, "Comma-separated percentiles");
    }
    if (std::string(spec.name) == "eval") {
      sub->add_option("--votes", votes_path, "User-study votes CSV (task,vote)");
      sub->add_option("--alpha", opts.alpha, "Familywise error rate");
      sub->add_option("--permutations", opts.permutations,
                      "Monte Carlo permutations for long vote lists");
    }
    if (std::string(spec.name) == "refine") {
      sub->add_flag("--naive", opts.naive, "Single whole-image inpainting pass");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pal::kExitConfigError;
  }

  opts.command = app.get_subcommands().front()->get_name();
  if (!config_path.empty()) opts.config_path = config_path;
  if (!votes_path.empty()) opts.votes_path = votes_path;
  if (parallelism > 0) opts.parallelism = parallelism;
  try {
    opts.percentiles = pal::ParsePercentileList(percentiles);
  } catch (const pal::Error& e) {
    std::cerr << "--percentiles: " << e.what() << "\n";
    return pal::kExitConfigError;
  }
  return pal::RunCommand(opts);
}
