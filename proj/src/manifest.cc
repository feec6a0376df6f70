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

#include "pal/manifest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pal/errors.h"

namespace pal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

namespace {

int LineOf(std::string_view text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::string Resolve(const std::string& base_dir, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
  return path.lexically_normal().string();
}

}  // namespace

Manifest ParseManifest(std::string_view json_text, const std::string& base_dir,
                       const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({source_name + ":" +
                       std::to_string(LineOf(json_text, e.byte)) +
                       ": parse error: " + e.what()});
  }
  std::vector<std::string> problems;
  if (!doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array()) {
    throw ConfigError({source_name + ": expected an object with an \"entries\" array"});
  }
  Manifest manifest;
  std::set<std::string> ids;
  const json& entries = doc["entries"];
  for (size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    const std::string where = source_name + ": entries[" + std::to_string(i) + "]";
    if (!e.is_object()) {
      problems.push_back(where + ": not an object");
      continue;
    }
    ManifestEntry entry;
    bool ok = true;
    auto required = [&](const char* field, std::string& out) {
      if (!e.contains(field) || !e[field].is_string() ||
          e[field].get<std::string>().empty()) {
        problems.push_back(where + ": field '" + field +
                           "' must be a non-empty string");
        ok = false;
        return;
      }
      out = e[field].get<std::string>();
    };
    auto optional = [&](const char* field, std::optional<std::string>& out) {
      if (!e.contains(field) || e[field].is_null()) return;
      if (!e[field].is_string()) {
        problems.push_back(where + ": field '" + field + "' must be a string");
        ok = false;
        return;
      }
      out = e[field].get<std::string>();
    };
    required("image_id", entry.image_id);
    required("image_path", entry.image_path);
    required("task", entry.task);
    required("domain", entry.domain);
    std::string split;
    required("split", split);
    optional("mask_path", entry.mask_path);
    optional("gt_mask_path", entry.gt_mask_path);
    optional("label_map_path", entry.label_map_path);
    optional("group", entry.group);
    if (!split.empty()) {
      if (auto s = ParseSplit(split)) {
        entry.split = *s;
      } else {
        problems.push_back(where + ": split '" + split +
                           "' is not one of train, val, test");
        ok = false;
      }
    }
    if (!entry.image_id.empty() && !ids.insert(entry.image_id).second) {
      problems.push_back(where + ": duplicate image_id '" + entry.image_id + "'");
      ok = false;
    }
    auto check_file = [&](std::string& p) {
      p = Resolve(base_dir, p);
      if (!fs::exists(p)) {
        problems.push_back(where + ": file '" + p + "' does not exist");
        ok = false;
      }
    };
    if (!entry.image_path.empty()) check_file(entry.image_path);
    for (auto* opt : {&entry.mask_path, &entry.gt_mask_path,
                      &entry.label_map_path}) {
      if (*opt) check_file(**opt);
    }
    if (ok) manifest.entries.push_back(std::move(entry));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return manifest;
}

Manifest LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open manifest '" + path + "'"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseManifest(buffer.str(), fs::path(path).parent_path().string(),
                       path);
}

std::string ManifestToJson(const Manifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json j = {{"image_id", e.image_id},
              {"image_path", e.image_path},
              {"task", e.task},
              {"domain", e.domain},
              {"split", std::string(SplitName(e.split))}};
    if (e.mask_path) j["mask_path"] = *e.mask_path;
    if (e.gt_mask_path) j["gt_mask_path"] = *e.gt_mask_path;
    if (e.label_map_path) j["label_map_path"] = *e.label_map_path;
    if (e.group) j["group"] = *e.group;
    entries.push_back(std::move(j));
  }
  return json{{"entries", entries}}.dump(2) + "\n";
}

void AssignSplits(Manifest& manifest, uint64_t seed) {
  std::vector<size_t> order(manifest.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return manifest.entries[a].image_id < manifest.entries[b].image_id;
  });
  // Fisher-Yates with an explicit generator; std::shuffle's algorithm is
  // implementation-defined.
  std::mt19937_64 rng(seed);
  for (size_t i = order.size(); i > 1; --i) {
    const size_t j = rng() % i;
    std::swap(order[i - 1], order[j]);
  }
  const size_t n = order.size();
  const auto n_train = static_cast<size_t>(std::llround(0.8 * n));
  const auto n_val = std::min(n - n_train, static_cast<size_t>(std::llround(0.1 * n)));
  for (size_t k = 0; k < n; ++k) {
    Split s = k < n_train ? Split::kTrain
              : k < n_train + n_val ? Split::kVal
                                    : Split::kTest;
    manifest.entries[order[k]].split = s;
  }
}

std::map<Split, SplitCount> SummarizeSplits(const Manifest& manifest) {
  std::map<Split, SplitCount> out = {
      {Split::kTrain, {}}, {Split::kVal, {}}, {Split::kTest, {}}};
  for (const auto& e : manifest.entries) ++out[e.split].count;
  const double n = static_cast<double>(manifest.entries.size());
  for (auto& [split, c] : out) c.fraction = n > 0 ? c.count / n : 0.0;
  return out;
}

}  // namespace pal
