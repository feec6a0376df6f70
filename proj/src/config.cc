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

#include "pal/config.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pal/errors.h"

namespace pal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void Keys(const json& obj, const std::string& where,
            std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
      if (!ok.count(key)) problems_.push_back(where + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  void Get(const json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      problems_.push_back(where + "." + key + ": wrong type");
    }
  }

  void Problem(std::string msg) { problems_.push_back(std::move(msg)); }

 private:
  std::vector<std::string>& problems_;
};

void ReadRemote(Reader& r, const json& j, const std::string& where,
                RemoteOptions& out) {
  int64_t timeout_ms = out.timeout.count();
  int64_t backoff_ms = out.initial_backoff.count();
  r.Get(j, "endpoint", where, out.endpoint);
  r.Get(j, "timeout_ms", where, timeout_ms);
  r.Get(j, "retries", where, out.retries);
  r.Get(j, "backoff_ms", where, backoff_ms);
  r.Get(j, "max_concurrency", where, out.max_concurrency);
  out.timeout = std::chrono::milliseconds(timeout_ms);
  out.initial_backoff = std::chrono::milliseconds(backoff_ms);
  for (auto& p : out.Validate()) r.Problem(where + ": " + p);
  if (out.max_concurrency < 0) r.Problem(where + ": max_concurrency must be >= 0");
}

json RemoteJson(const RemoteOptions& o) {
  return {{"endpoint", o.endpoint},
          {"timeout_ms", o.timeout.count()},
          {"retries", o.retries},
          {"backoff_ms", o.initial_backoff.count()},
          {"max_concurrency", o.max_concurrency}};
}

}  // namespace

int DilationRule::RadiusFor(int width, int height) const {
  if (pixels) return *pixels;
  return DefaultDilationRadius(width, height, percent.value_or(1.0));
}

PipelineConfig ParseConfig(std::string_view json_text,
                           const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config parse error: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"config must be a JSON object"});

  std::vector<std::string> problems;
  Reader r(problems);
  PipelineConfig cfg;
  r.Keys(doc, "config",
         {"detector", "inpainter", "dilation", "crop_scale", "feather",
          "connectivity", "prompt_rules", "parallelism", "mask_threshold",
          "heatmap_grid", "class_names"});

  if (doc.contains("detector")) {
    const json& d = doc["detector"];
    std::string type = "stub";
    r.Get(d, "type", "detector", type);
    if (type == "stub") {
      cfg.detector.kind = DetectorSpec::Kind::kStub;
      r.Keys(d, "detector", {"type", "laplacian_threshold"});
      r.Get(d, "laplacian_threshold", "detector", cfg.detector.laplacian_threshold);
    } else if (type == "file") {
      cfg.detector.kind = DetectorSpec::Kind::kFile;
      r.Keys(d, "detector", {"type", "masks"});
      r.Get(d, "masks", "detector", cfg.detector.masks);
      for (auto& [id, path] : cfg.detector.masks) {
        fs::path p(path);
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        path = p.lexically_normal().string();
        if (!fs::exists(path)) {
          problems.push_back("detector.masks: file '" + path + "' does not exist");
        }
      }
    } else if (type == "remote") {
      cfg.detector.kind = DetectorSpec::Kind::kRemote;
      r.Keys(d, "detector", {"type", "endpoint", "timeout_ms", "retries",
                             "backoff_ms", "max_concurrency"});
      ReadRemote(r, d, "detector", cfg.detector.remote);
    } else {
      problems.push_back("detector.type '" + type + "' is not file, remote or stub");
    }
  }

  if (doc.contains("inpainter")) {
    const json& d = doc["inpainter"];
    std::string type = "stub";
    r.Get(d, "type", "inpainter", type);
    if (type == "stub") {
      cfg.inpainter.kind = InpainterSpec::Kind::kStub;
      r.Keys(d, "inpainter", {"type", "boundary_ring"});
      r.Get(d, "boundary_ring", "inpainter", cfg.inpainter.boundary_ring);
      if (cfg.inpainter.boundary_ring < 0) {
        problems.push_back("inpainter.boundary_ring must be >= 0");
      }
    } else if (type == "remote") {
      cfg.inpainter.kind = InpainterSpec::Kind::kRemote;
      r.Keys(d, "inpainter", {"type", "endpoint", "timeout_ms", "retries",
                              "backoff_ms", "max_concurrency", "max_side"});
      ReadRemote(r, d, "inpainter", cfg.inpainter.remote);
      r.Get(d, "max_side", "inpainter", cfg.inpainter.max_side);
      if (cfg.inpainter.max_side < 64) {
        problems.push_back("inpainter.max_side must be at least 64");
      }
    } else {
      problems.push_back("inpainter.type '" + type + "' is not remote or stub");
    }
  }

  if (doc.contains("dilation")) {
    const json& d = doc["dilation"];
    r.Keys(d, "dilation", {"pixels", "percent"});
    const bool has_pixels = d.contains("pixels");
    const bool has_percent = d.contains("percent");
    if (has_pixels == has_percent) {
      problems.push_back("dilation: set exactly one of 'pixels' or 'percent'");
    } else if (has_pixels) {
      int px = 0;
      r.Get(d, "pixels", "dilation", px);
      if (px < 0) problems.push_back("dilation.pixels must be >= 0");
      cfg.dilation.pixels = px;
      cfg.dilation.percent.reset();
    } else {
      double pct = 1.0;
      r.Get(d, "percent", "dilation", pct);
      if (!(pct >= 0.0)) problems.push_back("dilation.percent must be >= 0");
      cfg.dilation.percent = pct;
    }
  }

  r.Get(doc, "crop_scale", "config", cfg.crop_scale);
  if (!(cfg.crop_scale >= 1.0)) problems.push_back("crop_scale must be >= 1");
  r.Get(doc, "feather", "config", cfg.feather);
  if (cfg.feather < 0) problems.push_back("feather must be >= 0");
  if (doc.contains("connectivity")) {
    std::string c;
    r.Get(doc, "connectivity", "config", c);
    try {
      cfg.connectivity = ParseConnectivity(c);
    } catch (const Error& e) {
      problems.push_back(std::string("connectivity: ") + e.what());
    }
  }
  if (doc.contains("prompt_rules")) {
    cfg.prompt_rules.clear();
    if (!doc["prompt_rules"].is_array()) {
      problems.push_back("prompt_rules must be an array");
    } else {
      for (const auto& rule : doc["prompt_rules"]) {
        PromptRule pr;
        r.Get(rule, "domain", "prompt_rules", pr.domain);
        r.Get(rule, "prompt", "prompt_rules", pr.prompt);
        if (pr.domain.empty() || pr.prompt.empty()) {
          problems.push_back("prompt_rules: domain and prompt must be non-empty");
        }
        cfg.prompt_rules.push_back(std::move(pr));
      }
    }
  }
  r.Get(doc, "parallelism", "config", cfg.parallelism);
  if (cfg.parallelism < 1) problems.push_back("parallelism must be >= 1");
  r.Get(doc, "mask_threshold", "config", cfg.mask_threshold);
  if (cfg.mask_threshold < 0 || cfg.mask_threshold > 255) {
    problems.push_back("mask_threshold must be in [0, 255]");
  }
  if (doc.contains("heatmap_grid")) {
    std::vector<int> grid;
    r.Get(doc, "heatmap_grid", "config", grid);
    if (grid.size() != 2 || grid[0] < 1 || grid[1] < 1) {
      problems.push_back("heatmap_grid must be [width, height] with positive values");
    } else {
      cfg.heatmap_width = grid[0];
      cfg.heatmap_height = grid[1];
    }
  }
  if (doc.contains("class_names")) {
    std::map<std::string, std::string> names;
    r.Get(doc, "class_names", "config", names);
    for (const auto& [id, name] : names) {
      try {
        size_t used = 0;
        const int v = std::stoi(id, &used);
        if (used != id.size()) throw std::invalid_argument(id);
        cfg.class_names[v] = name;
      } catch (const std::exception&) {
        problems.push_back("class_names: key '" + id + "' is not an integer");
      }
    }
  }

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

PipelineConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config '" + path + "'"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseConfig(buffer.str(), fs::path(path).parent_path().string());
  } catch (const ConfigError& e) {
    std::vector<std::string> problems;
    for (const auto& p : e.problems()) problems.push_back(path + ": " + p);
    throw ConfigError(std::move(problems));
  }
}

std::string ConfigToJson(const PipelineConfig& c) {
  json det;
  switch (c.detector.kind) {
    case DetectorSpec::Kind::kStub:
      det = {{"type", "stub"},
             {"laplacian_threshold", c.detector.laplacian_threshold}};
      break;
    case DetectorSpec::Kind::kFile:
      det = {{"type", "file"}, {"masks", c.detector.masks}};
      break;
    case DetectorSpec::Kind::kRemote:
      det = RemoteJson(c.detector.remote);
      det["type"] = "remote";
      break;
  }
  json inp;
  if (c.inpainter.kind == InpainterSpec::Kind::kStub) {
    inp = {{"type", "stub"}, {"boundary_ring", c.inpainter.boundary_ring}};
  } else {
    inp = RemoteJson(c.inpainter.remote);
    inp["type"] = "remote";
    inp["max_side"] = c.inpainter.max_side;
  }
  json dilation = c.dilation.pixels ? json{{"pixels", *c.dilation.pixels}}
                                    : json{{"percent", c.dilation.percent.value_or(1.0)}};
  json rules = json::array();
  for (const auto& pr : c.prompt_rules) {
    rules.push_back({{"domain", pr.domain}, {"prompt", pr.prompt}});
  }
  std::map<std::string, std::string> names;
  for (const auto& [id, n] : c.class_names) names[std::to_string(id)] = n;
  json doc = {{"detector", det},
              {"inpainter", inp},
              {"dilation", dilation},
              {"crop_scale", c.crop_scale},
              {"feather", c.feather},
              {"connectivity", std::string(ConnectivityName(c.connectivity))},
              {"prompt_rules", rules},
              {"parallelism", c.parallelism},
              {"mask_threshold", c.mask_threshold},
              {"heatmap_grid", {c.heatmap_width, c.heatmap_height}},
              {"class_names", names}};
  return doc.dump();
}

std::string ConfigHash(const PipelineConfig& config) {
  // Parallelism does not change outputs, so it is left out of the hash.
  PipelineConfig copy = config;
  copy.parallelism = 1;
  const std::string text = ConfigToJson(copy);
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ApplyEnvironment(PipelineConfig& config) {
  if (const char* token = std::getenv("PAL_TOKEN"); token && *token) {
    config.detector.remote.bearer_token = token;
    config.inpainter.remote.bearer_token = token;
  }
}

std::unique_ptr<DetectorBackend> MakeDetector(const DetectorSpec& spec,
                                              int mask_threshold) {
  switch (spec.kind) {
    case DetectorSpec::Kind::kFile:
      return std::make_unique<FileDetector>(spec.masks, mask_threshold);
    case DetectorSpec::Kind::kRemote:
      return std::make_unique<RemoteDetector>(spec.remote);
    case DetectorSpec::Kind::kStub:
      break;
  }
  return std::make_unique<StubDetector>(spec.laplacian_threshold);
}

std::unique_ptr<InpainterBackend> MakeInpainter(const InpainterSpec& spec) {
  if (spec.kind == InpainterSpec::Kind::kRemote) {
    return std::make_unique<RemoteInpainter>(spec.remote, spec.max_side);
  }
  return std::make_unique<StubInpainter>(spec.boundary_ring);
}

}  // namespace pal
