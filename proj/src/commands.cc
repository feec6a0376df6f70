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

#include "pal/commands.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "pal/backends.h"
#include "pal/config.h"
#include "pal/errors.h"
#include "pal/image.h"
#include "pal/manifest.h"
#include "pal/zoom_refine.h"

namespace pal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Serializes calls into a backend that declared max_concurrency == 1.
class SerializedDetector : public DetectorBackend {
 public:
  explicit SerializedDetector(DetectorBackend& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name(); }
  int max_concurrency() const override { return 1; }

 protected:
  BinaryMask DoDetect(const std::string& id, const RgbImage& image) override {
    std::lock_guard lock(mu_);
    return inner_.Detect(id, image);
  }

 private:
  DetectorBackend& inner_;
  std::mutex mu_;
};

class SerializedInpainter : public InpainterBackend {
 public:
  explicit SerializedInpainter(InpainterBackend& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name(); }
  int max_concurrency() const override { return 1; }

 protected:
  RgbImage DoInpaint(const RgbImage& image, const BinaryMask& mask,
                     const std::string& prompt) override {
    std::lock_guard lock(mu_);
    return inner_.Inpaint(image, mask, prompt);
  }

 private:
  InpainterBackend& inner_;
  std::mutex mu_;
};

struct ItemOutcome {
  bool started = false;
  bool ok = false;
  std::string error;
  double elapsed_ms = 0.0;
};

struct Context {
  Context(const CommandOptions& o, std::ostream& l, PipelineConfig c, Manifest m)
      : opts(o), log(l), config(std::move(c)), full_manifest(std::move(m)) {}

  const CommandOptions& opts;
  std::ostream& log;
  PipelineConfig config;
  Manifest full_manifest;
  std::vector<ManifestEntry> entries;  // after the split filter
  int parallelism = 1;
  fs::path out;
  std::unique_ptr<DetectorBackend> detector_impl;
  std::unique_ptr<DetectorBackend> detector_guard;
  DetectorBackend* detector = nullptr;
  std::unique_ptr<InpainterBackend> inpainter_impl;
  std::unique_ptr<InpainterBackend> inpainter_guard;
  InpainterBackend* inpainter = nullptr;
  std::vector<std::string> outputs;  // relative to `out`
  bool aborted = false;

  void Write(const std::string& rel, std::span<const uint8_t> bytes) {
    WriteFileAtomic((out / rel).string(), bytes);
  }
  void WriteText(const std::string& rel, std::string_view text) {
    WriteFileAtomic((out / rel).string(), text);
  }
  void Output(const std::string& rel) { outputs.push_back(rel); }
};

void EnsureDetector(Context& ctx) {
  if (ctx.detector) return;
  ctx.detector_impl = MakeDetector(ctx.config.detector, ctx.config.mask_threshold);
  ctx.detector = ctx.detector_impl.get();
  if (ctx.detector->max_concurrency() == 1) {
    ctx.detector_guard = std::make_unique<SerializedDetector>(*ctx.detector);
    ctx.detector = ctx.detector_guard.get();
  }
}

void EnsureInpainter(Context& ctx) {
  if (ctx.inpainter) return;
  ctx.inpainter_impl = MakeInpainter(ctx.config.inpainter);
  ctx.inpainter = ctx.inpainter_impl.get();
  if (ctx.inpainter->max_concurrency() == 1) {
    ctx.inpainter_guard = std::make_unique<SerializedInpainter>(*ctx.inpainter);
    ctx.inpainter = ctx.inpainter_guard.get();
  }
}

// Precomputed mask when the entry has one, detector output otherwise.
BinaryMask MaskFor(Context& ctx, const ManifestEntry& e,
                   const RgbImage* image = nullptr) {
  if (e.mask_path) return ReadMaskFile(*e.mask_path, ctx.config.mask_threshold);
  if (image) return ctx.detector->Detect(e.image_id, *image);
  const RgbImage loaded = ReadRgbFile(e.image_path);
  return ctx.detector->Detect(e.image_id, loaded);
}

void RequireSameShape(const RgbImage& image, const BinaryMask& mask,
                      const std::string& id) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw InvalidInputError("image '" + id + "' is " +
                            std::to_string(image.width()) + "x" +
                            std::to_string(image.height()) + " but its mask is " +
                            std::to_string(mask.width()) + "x" +
                            std::to_string(mask.height()));
  }
}

// Runs `fn(i)` for every selected entry on a pool of workers. Failures are
// recorded per item; with --strict the first failure stops new work.
template <typename Fn>
std::vector<ItemOutcome> RunItems(Context& ctx, Fn fn) {
  const size_t n = ctx.entries.size();
  std::vector<ItemOutcome> outcomes(n);
  std::atomic<size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex log_mu;
  auto worker = [&] {
    for (;;) {
      if (abort.load()) return;
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      ItemOutcome& out = outcomes[i];
      out.started = true;
      const auto t0 = Clock::now();
      try {
        fn(i);
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
        std::lock_guard lock(log_mu);
        ctx.log << "[pal " << ctx.opts.command << "] " << ctx.entries[i].image_id
                << ": " << e.what() << "\n";
        if (ctx.opts.strict) abort = true;
      }
      out.elapsed_ms = MillisSince(t0);
    }
  };
  const int threads = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(ctx.parallelism), std::max<size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  ctx.aborted = abort.load();
  return outcomes;
}

json RecordJson(const ParRecord& r) {
  json j = {{"image_id", r.image_id}, {"par", r.par}};
  if (r.task) j["task"] = *r.task;
  if (r.domain) j["domain"] = *r.domain;
  return j;
}

ParRecord RecordFor(const ManifestEntry& e, double par) {
  return ParRecord{e.image_id, par, e.task, e.domain};
}

std::string JsonLines(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

// Computes PAR for every entry; failed items stay empty.
std::vector<std::optional<ParRecord>> ComputeRecords(
    Context& ctx, std::vector<ItemOutcome>& outcomes) {
  EnsureDetector(ctx);
  std::vector<std::optional<ParRecord>> records(ctx.entries.size());
  outcomes = RunItems(ctx, [&](size_t i) {
    const auto& e = ctx.entries[i];
    records[i] = RecordFor(e, Par(MaskFor(ctx, e)));
  });
  return records;
}

std::vector<ParRecord> Succeeded(
    const std::vector<std::optional<ParRecord>>& records) {
  std::vector<ParRecord> out;
  for (const auto& r : records) {
    if (r) out.push_back(*r);
  }
  return out;
}

std::vector<ItemOutcome> CmdDetect(Context& ctx) {
  EnsureDetector(ctx);
  std::vector<std::string> mask_files(ctx.entries.size());
  auto outcomes = RunItems(ctx, [&](size_t i) {
    const auto& e = ctx.entries[i];
    const RgbImage image = ReadRgbFile(e.image_path);
    const BinaryMask mask = ctx.detector->Detect(e.image_id, image);
    const std::string rel = "masks/" + SafeFileStem(e.image_id) + ".png";
    ctx.Write(rel, EncodeMask(mask));
    mask_files[i] = rel;
  });
  if (ctx.aborted) return outcomes;
  Manifest detected;
  for (size_t i = 0; i < ctx.entries.size(); ++i) {
    if (!outcomes[i].ok) continue;
    ManifestEntry e = ctx.entries[i];
    e.mask_path = mask_files[i];  // relative to the written manifest
    detected.entries.push_back(std::move(e));
    ctx.Output(mask_files[i]);
  }
  ctx.WriteText("detected_manifest.json", ManifestToJson(detected));
  ctx.Output("detected_manifest.json");
  return outcomes;
}

std::vector<ItemOutcome> CmdPar(Context& ctx) {
  std::vector<ItemOutcome> outcomes;
  const auto records = ComputeRecords(ctx, outcomes);
  if (ctx.aborted) return outcomes;
  std::vector<json> rows;
  for (const auto& r : Succeeded(records)) rows.push_back(RecordJson(r));
  ctx.WriteText("par.jsonl", JsonLines(rows));
  ctx.Output("par.jsonl");
  return outcomes;
}

std::vector<ItemOutcome> CmdRank(Context& ctx) {
  std::vector<ItemOutcome> outcomes;
  const auto records = ComputeRecords(ctx, outcomes);
  if (ctx.aborted) return outcomes;
  const auto ranked = RankByPar(Succeeded(records));
  std::vector<json> rows;
  for (const auto& r : ranked) rows.push_back(RecordJson(r));
  ctx.WriteText("ranked.jsonl", JsonLines(rows));
  ctx.Output("ranked.jsonl");
  if (!ranked.empty()) {
    const auto samples = PercentileSamples(ranked, ctx.opts.percentiles);
    std::vector<json> picks;
    for (size_t k = 0; k < samples.size(); ++k) {
      json j = RecordJson(samples[k]);
      j["percentile"] = ctx.opts.percentiles[k];
      picks.push_back(std::move(j));
    }
    ctx.WriteText("percentiles.jsonl", JsonLines(picks));
    ctx.Output("percentiles.jsonl");
  }
  return outcomes;
}

std::vector<ItemOutcome> CmdSelect(Context& ctx) {
  std::vector<ItemOutcome> outcomes;
  const auto records = ComputeRecords(ctx, outcomes);
  if (ctx.aborted) return outcomes;
  std::map<std::string, std::vector<ParRecord>> groups;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!records[i]) continue;
    groups[ctx.entries[i].group.value_or("all")].push_back(*records[i]);
  }
  std::vector<json> rows;
  for (const auto& [group, candidates] : groups) {
    json j = RecordJson(SelectBest(candidates));
    j["group"] = group;
    j["candidates"] = candidates.size();
    rows.push_back(std::move(j));
  }
  ctx.WriteText("selected.jsonl", JsonLines(rows));
  ctx.Output("selected.jsonl");
  return outcomes;
}

std::vector<ItemOutcome> CmdRefine(Context& ctx) {
  EnsureDetector(ctx);
  EnsureInpainter(ctx);
  std::vector<std::string> refined(ctx.entries.size());
  std::vector<std::string> masks(ctx.entries.size());
  auto outcomes = RunItems(ctx, [&](size_t i) {
    const auto& e = ctx.entries[i];
    const RgbImage image = ReadRgbFile(e.image_path);
    const BinaryMask mask = MaskFor(ctx, e, &image);
    RequireSameShape(image, mask, e.image_id);
    const int radius = ctx.config.dilation.RadiusFor(image.width(), image.height());
    const std::string prompt = DefaultPrompt(ctx.config.prompt_rules, e.domain);
    RgbImage out = [&] {
      if (ctx.opts.naive) {
        return NaiveRefine(image, mask, *ctx.inpainter, radius, prompt);
      }
      RefineOptions options;
      options.scale = ctx.config.crop_scale;
      options.dilation_radius = radius;
      options.feather = ctx.config.feather;
      options.connectivity = ctx.config.connectivity;
      options.prompt = prompt;
      return Refine(image, mask, *ctx.inpainter, options);
    }();
    const std::string stem = SafeFileStem(e.image_id);
    refined[i] = "refined/" + stem + ".png";
    masks[i] = "refine_masks/" + stem + ".png";
    ctx.Write(refined[i], EncodeRgb(out));
    ctx.Write(masks[i], EncodeMask(Dilate(mask, radius)));
  });
  if (ctx.aborted) return outcomes;
  Manifest next;
  for (size_t i = 0; i < ctx.entries.size(); ++i) {
    if (!outcomes[i].ok) continue;
    ManifestEntry e = ctx.entries[i];
    e.image_path = refined[i];  // relative to the written manifest
    e.mask_path.reset();
    next.entries.push_back(std::move(e));
    ctx.Output(refined[i]);
    ctx.Output(masks[i]);
  }
  ctx.WriteText("refined_manifest.json", ManifestToJson(next));
  ctx.Output("refined_manifest.json");
  return outcomes;
}

json ConfusionJson(const Confusion& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

json SignificanceJson(const CommandOptions& opts) {
  const auto by_task = ReadVotesCsv(*opts.votes_path);
  std::map<std::string, double> p_values;
  PreferenceVotes combined{"all", {}};
  json tasks = json::array();
  auto mean = [](const std::vector<int>& v) {
    int64_t s = 0;
    for (int x : v) s += x;
    return static_cast<double>(s) / static_cast<double>(v.size());
  };
  for (const auto& [task, votes] : by_task) {
    p_values[task] = PermutationTest(votes, opts.permutations, opts.seed);
    combined.votes.insert(combined.votes.end(), votes.votes.begin(),
                          votes.votes.end());
  }
  const auto reject = HolmBonferroni(p_values, opts.alpha);
  for (const auto& [task, votes] : by_task) {
    tasks.push_back({{"task", task},
                     {"n", votes.votes.size()},
                     {"mean", mean(votes.votes)},
                     {"p_value", p_values[task]},
                     {"reject", reject.at(task)}});
  }
  json out = {{"alpha", opts.alpha},
              {"permutations", opts.permutations},
              {"seed", opts.seed},
              {"tasks", tasks}};
  if (!combined.votes.empty()) {
    out["combined"] = {
        {"n", combined.votes.size()},
        {"mean", mean(combined.votes)},
        {"p_value", PermutationTest(combined, opts.permutations, opts.seed)}};
  }
  return out;
}

std::vector<ItemOutcome> CmdEval(Context& ctx) {
  std::vector<std::string> missing;
  for (const auto& e : ctx.entries) {
    if (!e.gt_mask_path) missing.push_back("entry '" + e.image_id + "' has no gt_mask_path");
  }
  if (!missing.empty()) throw ConfigError(std::move(missing));
  // Votes are parsed up front so a malformed file is a configuration error.
  json significance;
  if (ctx.opts.votes_path) significance = SignificanceJson(ctx.opts);

  EnsureDetector(ctx);
  std::vector<Confusion> confusions(ctx.entries.size());
  auto outcomes = RunItems(ctx, [&](size_t i) {
    const auto& e = ctx.entries[i];
    const BinaryMask pred = MaskFor(ctx, e);
    const BinaryMask gt = ReadMaskFile(*e.gt_mask_path, ctx.config.mask_threshold);
    try {
      confusions[i] = ConfusionCounts(pred, gt);
    } catch (const InvalidInputError& err) {
      throw InvalidInputError("image '" + e.image_id + "': " + err.what());
    }
  });
  if (ctx.aborted) return outcomes;
  std::vector<ImageConfusion> per_image;
  for (size_t i = 0; i < ctx.entries.size(); ++i) {
    if (outcomes[i].ok) per_image.push_back({ctx.entries[i].image_id, confusions[i]});
  }
  const EvalReport report = SummarizeConfusions(std::move(per_image));
  json images = json::array();
  for (const auto& item : report.per_image) {
    json j = ConfusionJson(item.confusion);
    j["image_id"] = item.image_id;
    j["iou_artifact"] = ArtifactIou(item.confusion);
    j["iou_background"] = BackgroundIou(item.confusion);
    images.push_back(std::move(j));
  }
  const json doc = {{"images", report.per_image.size()},
                    {"per_image", images},
                    {"aggregate", ConfusionJson(report.aggregate)},
                    {"iou_artifact", report.iou_artifact},
                    {"iou_background", report.iou_background},
                    {"miou", report.miou},
                    {"mean_image_iou_artifact", report.mean_image_iou_artifact},
                    {"mean_image_miou", report.mean_image_miou}};
  ctx.WriteText("eval_report.json", doc.dump(2) + "\n");
  ctx.Output("eval_report.json");
  if (!significance.is_null()) {
    ctx.WriteText("significance.json", significance.dump(2) + "\n");
    ctx.Output("significance.json");
  }
  return outcomes;
}

std::string SplitsCsv(const Manifest& manifest) {
  std::string csv = "split,count,fraction\n";
  for (const auto& [split, c] : SummarizeSplits(manifest)) {
    csv += std::string(SplitName(split)) + "," + std::to_string(c.count) + "," +
           FormatDouble(c.fraction) + "\n";
  }
  return csv;
}

std::vector<ItemOutcome> CmdStats(Context& ctx) {
  EnsureDetector(ctx);
  std::vector<std::optional<ParRecord>> records(ctx.entries.size());
  std::map<std::string, HeatmapAccumulator> heatmaps;
  for (const auto& e : ctx.entries) {
    heatmaps.try_emplace(e.domain, ctx.config.heatmap_width,
                         ctx.config.heatmap_height);
  }
  ClassParAccumulator classes;
  std::mutex mu;
  auto outcomes = RunItems(ctx, [&](size_t i) {
    const auto& e = ctx.entries[i];
    const BinaryMask mask = MaskFor(ctx, e);
    std::optional<LabelMap> labels;
    if (e.label_map_path) labels = ReadLabelMapFile(*e.label_map_path);
    std::lock_guard lock(mu);
    if (labels) classes.Add(mask, *labels);
    heatmaps.at(e.domain).Add(mask);
    records[i] = RecordFor(e, Par(mask));
  });
  if (ctx.aborted) return outcomes;

  std::string hist = "task,mean_par,count\n";
  for (const auto& [task, s] : ParHistogram(Succeeded(records))) {
    hist += task + "," + FormatDouble(s.mean_par) + "," + std::to_string(s.count) + "\n";
  }
  ctx.WriteText("par_by_task.csv", hist);
  ctx.Output("par_by_task.csv");

  json summary = json::object();
  for (const auto& [domain, acc] : heatmaps) {
    if (acc.count() == 0) continue;
    const ParHeatmap map = acc.Result();
    std::vector<uint8_t> gray(map.values.size());
    double total = 0.0;
    for (size_t k = 0; k < gray.size(); ++k) {
      gray[k] = static_cast<uint8_t>(std::lround(map.values[k] * 255.0));
      total += map.values[k];
    }
    const std::string rel = "heatmap_" + SafeFileStem(domain) + ".png";
    ctx.Write(rel, EncodeGray(map.grid_width, map.grid_height, gray));
    ctx.Output(rel);
    summary[domain] = {{"file", rel},
                       {"masks", map.count},
                       {"grid", {map.grid_width, map.grid_height}},
                       {"mean_par", total / static_cast<double>(map.values.size())}};
  }
  ctx.WriteText("heatmaps.json", summary.dump(2) + "\n");
  ctx.Output("heatmaps.json");

  if (!classes.empty()) {
    std::string csv = "class_id,class_name,artifact_pixels,class_pixels,par\n";
    for (const auto& row : classes.Result(ctx.config.class_names).rows) {
      csv += std::to_string(row.class_id) + "," + row.class_name + "," +
             std::to_string(row.artifact_pixels) + "," +
             std::to_string(row.class_pixels) + "," + FormatDouble(row.par) + "\n";
    }
    ctx.WriteText("class_par.csv", csv);
    ctx.Output("class_par.csv");
  }
  ctx.WriteText("splits.csv", SplitsCsv(ctx.full_manifest));
  ctx.Output("splits.csv");
  return outcomes;
}

void WriteSummary(Context& ctx, const std::vector<ItemOutcome>& outcomes,
                  double elapsed_ms) {
  json items = json::array();
  int64_t failed = 0;
  int64_t succeeded = 0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    json j = {{"image_id", ctx.entries[i].image_id},
              {"elapsed_ms", o.elapsed_ms}};
    if (!o.started) {
      j["status"] = "skipped";
    } else if (o.ok) {
      j["status"] = "ok";
      ++succeeded;
    } else {
      j["status"] = "failed";
      j["error"] = o.error;
      ++failed;
    }
    items.push_back(std::move(j));
  }
  const json doc = {
      {"command", ctx.opts.command},
      {"config_hash", ConfigHash(ctx.config)},
      {"manifest", ctx.opts.manifest_path},
      {"split", ctx.opts.split},
      {"seed", ctx.opts.seed},
      {"parallelism", ctx.parallelism},
      {"strict", ctx.opts.strict},
      {"status", ctx.aborted ? "aborted" : failed > 0 ? "failed" : "ok"},
      {"succeeded", succeeded},
      {"failed", failed},
      {"items", items},
      {"outputs", ctx.outputs},
      {"elapsed_ms", elapsed_ms}};
  ctx.WriteText("run_summary.json", doc.dump(2) + "\n");
}

int CmdHealth(const PipelineConfig& config, std::ostream& log) {
  bool ok = true;
  if (config.detector.kind == DetectorSpec::Kind::kRemote) {
    const bool up = RemoteDetector(config.detector.remote).Healthy();
    log << "detector " << config.detector.remote.endpoint << ": "
        << (up ? "ok" : "unreachable") << "\n";
    ok = ok && up;
  }
  if (config.inpainter.kind == InpainterSpec::Kind::kRemote) {
    const bool up =
        RemoteInpainter(config.inpainter.remote, config.inpainter.max_side).Healthy();
    log << "inpainter " << config.inpainter.remote.endpoint << ": "
        << (up ? "ok" : "unreachable") << "\n";
    ok = ok && up;
  }
  return ok ? kExitOk : kExitItemFailure;
}

}  // namespace

std::string SafeFileStem(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!safe) c = '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::vector<double> ParsePercentileList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw InvalidInputError("'" + item + "' is not a number");
    }
    if (!(v >= 0.0 && v <= 100.0)) {
      throw InvalidInputError("percentile " + item + " outside [0, 100]");
    }
    out.push_back(v);
  }
  return out;
}

std::map<std::string, PreferenceVotes> ReadVotesCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open votes file '" + path + "'"});
  std::map<std::string, PreferenceVotes> out;
  std::vector<std::string> problems;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    std::string task = comma == std::string::npos ? line : line.substr(0, comma);
    std::string vote = comma == std::string::npos ? "" : line.substr(comma + 1);
    auto trim = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b, s.find_last_not_of(" \t") - b + 1);
    };
    trim(task);
    trim(vote);
    if (first) {
      first = false;
      if (task == "task" && vote == "vote") continue;
    }
    if (vote != "-1" && vote != "0" && vote != "1" && vote != "+1") {
      problems.push_back(path + ":" + std::to_string(line_no) + ": vote '" + vote +
                         "' is not -1, 0 or +1");
      continue;
    }
    if (task.empty()) {
      problems.push_back(path + ":" + std::to_string(line_no) + ": empty task");
      continue;
    }
    auto& v = out[task];
    v.task = task;
    v.votes.push_back(std::stoi(vote));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return out;
}

int RunCommand(const CommandOptions& opts) {
  std::ostream& log = opts.log ? *opts.log : std::cerr;
  static const std::set<std::string> kCommands = {
      "detect", "par", "rank", "select", "refine", "eval", "stats", "split", "health"};
  try {
    if (!kCommands.count(opts.command)) {
      throw ConfigError({"unknown command '" + opts.command + "'"});
    }
    PipelineConfig config =
        opts.config_path ? LoadConfig(*opts.config_path) : PipelineConfig{};
    ApplyEnvironment(config);
    if (opts.command == "health") return CmdHealth(config, log);

    Context ctx(opts, log, std::move(config), LoadManifest(opts.manifest_path));
    ctx.out = opts.out_dir;
    ctx.parallelism = opts.parallelism.value_or(ctx.config.parallelism);
    if (ctx.parallelism < 1) throw ConfigError({"parallelism must be >= 1"});
    for (double p : opts.percentiles) {
      if (!(p >= 0.0 && p <= 100.0)) {
        throw ConfigError({"percentile " + std::to_string(p) + " outside [0, 100]"});
      }
    }
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
      throw ConfigError({"alpha must be in (0, 1)"});
    }
    if (opts.permutations < 1) throw ConfigError({"permutations must be >= 1"});
    std::optional<Split> split_filter;
    if (opts.split != "all") {
      split_filter = ParseSplit(opts.split);
      if (!split_filter) {
        throw ConfigError({"split '" + opts.split + "' is not train, val, test or all"});
      }
    }
    for (const auto& e : ctx.full_manifest.entries) {
      if (!split_filter || e.split == *split_filter) ctx.entries.push_back(e);
    }
    fs::create_directories(ctx.out);

    if (opts.command == "split") {
      Manifest assigned = ctx.full_manifest;
      AssignSplits(assigned, opts.seed);
      ctx.WriteText("manifest_split.json", ManifestToJson(assigned));
      ctx.WriteText("splits.csv", SplitsCsv(assigned));
      return kExitOk;
    }

    const auto t0 = Clock::now();
    std::vector<ItemOutcome> outcomes;
    if (opts.command == "detect") outcomes = CmdDetect(ctx);
    else if (opts.command == "par") outcomes = CmdPar(ctx);
    else if (opts.command == "rank") outcomes = CmdRank(ctx);
    else if (opts.command == "select") outcomes = CmdSelect(ctx);
    else if (opts.command == "refine") outcomes = CmdRefine(ctx);
    else if (opts.command == "eval") outcomes = CmdEval(ctx);
    else outcomes = CmdStats(ctx);
    WriteSummary(ctx, outcomes, MillisSince(t0));

    const bool any_failed = std::any_of(outcomes.begin(), outcomes.end(),
                                        [](const ItemOutcome& o) { return !o.ok; });
    return any_failed || ctx.aborted ? kExitItemFailure : kExitOk;
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) log << "[pal] config error: " << p << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    log << "[pal] error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace pal
