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

#include <httplib.h>

#include <algorithm>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

#include "pal/backends.h"
#include "pal/errors.h"

namespace pal {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // "" or "/path" without trailing slash
};

Endpoint ParseEndpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidInputError("endpoint '" + url + "' has no scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw InvalidInputError("endpoint '" + url + "' must be http or https");
  }
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  if (e.origin.size() <= host_start) {
    throw InvalidInputError("endpoint '" + url + "' has no host");
  }
  if (path_start != std::string::npos) {
    e.prefix = url.substr(path_start);
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  }
  return e;
}

std::string ErrorDetail(const std::string& body) {
  auto parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_object() && parsed.contains("error") &&
      parsed["error"].is_string()) {
    return parsed["error"].get<std::string>();
  }
  return body.substr(0, 200);
}

bool Retryable(int status) {
  return status < 0 || status == 408 || status == 429 || status >= 500;
}

using Request = std::function<httplib::Result(httplib::Client&,
                                              const std::string& prefix)>;

// Issues `request` with the configured timeout, retrying transient failures
// with exponential backoff. Returns the 200 response body.
std::string CallWithRetries(const RemoteOptions& options,
                            const std::string& what, const Request& request) {
  const Endpoint endpoint = ParseEndpoint(options.endpoint);
  int last_status = -1;
  std::string last_error;
  auto backoff = options.initial_backoff;
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_write_timeout(options.timeout);
    if (options.bearer_token && !options.bearer_token->empty()) {
      client.set_bearer_token_auth(*options.bearer_token);
    }
    httplib::Result res = request(client, endpoint.prefix);
    if (!res) {
      last_status = -1;
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    last_status = res->status;
    last_error = ErrorDetail(res->body);
    if (!Retryable(res->status)) break;
  }
  throw BackendError(what + " failed (status " + std::to_string(last_status) +
                         "): " + last_error,
                     last_status);
}

bool CheckHealth(const RemoteOptions& options) {
  try {
    RemoteOptions once = options;
    once.retries = 0;
    const std::string body = CallWithRetries(
        once, "health check", [](httplib::Client& c, const std::string& p) {
          return c.Get(p + "/health");
        });
    auto parsed = nlohmann::json::parse(body, nullptr, false);
    return parsed.is_object() && parsed.value("status", "") == "ok";
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<std::string> RemoteOptions::Validate() const {
  std::vector<std::string> problems;
  try {
    ParseEndpoint(endpoint);
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  if (timeout.count() <= 0) problems.push_back("timeout must be positive");
  if (retries < 0) problems.push_back("retries must be non-negative");
  return problems;
}

RemoteDetector::RemoteDetector(RemoteOptions options)
    : options_(std::move(options)) {
  if (auto problems = options_.Validate(); !problems.empty()) {
    throw ConfigError(std::move(problems));
  }
}

bool RemoteDetector::Healthy() const { return CheckHealth(options_); }

BinaryMask RemoteDetector::DoDetect(const std::string& image_id,
                                    const RgbImage& image) {
  const auto png = EncodeRgb(image);
  const std::string body(png.begin(), png.end());
  const std::string reply = CallWithRetries(
      options_, "segment '" + image_id + "'",
      [&](httplib::Client& c, const std::string& prefix) {
        return c.Post(prefix + "/segment", body, "image/png");
      });
  try {
    return DecodeMask(std::span<const uint8_t>(
                          reinterpret_cast<const uint8_t*>(reply.data()),
                          reply.size()),
                      127, "segment response for '" + image_id + "'");
  } catch (const DecodeError& e) {
    throw ProtocolError(e.what());
  }
}

RemoteInpainter::RemoteInpainter(RemoteOptions options, int max_side)
    : options_(std::move(options)), max_side_(max_side) {
  auto problems = options_.Validate();
  if (max_side < 64) problems.push_back("max_side must be at least 64");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

bool RemoteInpainter::Healthy() const { return CheckHealth(options_); }

RgbImage RemoteInpainter::DoInpaint(const RgbImage& image,
                                    const BinaryMask& mask,
                                    const std::string& prompt) {
  const int longest = std::max(image.width(), image.height());
  RgbImage send_image = image;
  BinaryMask send_mask = mask;
  if (longest > max_side_) {
    const double s = static_cast<double>(max_side_) / longest;
    const int w = std::max(1, static_cast<int>(std::lround(image.width() * s)));
    const int h = std::max(1, static_cast<int>(std::lround(image.height() * s)));
    send_image = ResizeBilinear(image, w, h);
    send_mask = ResizeMaskConservative(mask, w, h);
  }
  const auto image_png = EncodeRgb(send_image);
  const auto mask_png = EncodeMask(send_mask);
  httplib::MultipartFormDataItems items = {
      {"image", std::string(image_png.begin(), image_png.end()), "image.png",
       "image/png"},
      {"mask", std::string(mask_png.begin(), mask_png.end()), "mask.png",
       "image/png"},
      {"prompt", prompt, "", "text/plain; charset=utf-8"},
  };
  const std::string reply = CallWithRetries(
      options_, "inpaint",
      [&](httplib::Client& c, const std::string& prefix) {
        return c.Post(prefix + "/inpaint", items);
      });
  RgbImage result = [&] {
    try {
      return DecodeRgb(std::span<const uint8_t>(
                           reinterpret_cast<const uint8_t*>(reply.data()),
                           reply.size()),
                       "inpaint response");
    } catch (const DecodeError& e) {
      throw ProtocolError(e.what());
    }
  }();
  if (result.width() != send_image.width() ||
      result.height() != send_image.height()) {
    throw ProtocolError("inpaint response is " + std::to_string(result.width()) +
                        "x" + std::to_string(result.height()) + ", expected " +
                        std::to_string(send_image.width()) + "x" +
                        std::to_string(send_image.height()));
  }
  const RgbImage upscaled =
      ResizeBilinear(result, image.width(), image.height());
  RgbImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask.at(x, y)) out.set(x, y, upscaled.at(x, y));
    }
  }
  return out;
}

}  // namespace pal
