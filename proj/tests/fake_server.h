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

// In-process stand-in for a model server speaking the remote backend wire
// contract, with knobs for failure injection.

#ifndef PAL_TESTS_FAKE_SERVER_H_
#define PAL_TESTS_FAKE_SERVER_H_

#include <httplib.h>

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "pal/image.h"
#include "pal/mask.h"

namespace pal::testing {

class FakeModelServer {
 public:
  // Per-request hooks; defaults implement a plausible server.
  std::function<std::string(const RgbImage&)> segment = [](const RgbImage& img) {
    BinaryMask m(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) m.set(x, y, Luminance(img.at(x, y)) > 100);
    const auto png = EncodeMask(m);
    return std::string(png.begin(), png.end());
  };
  std::function<std::string(const RgbImage&, const BinaryMask&, const std::string&)>
      inpaint = [](const RgbImage& img, const BinaryMask&, const std::string&) {
        const auto png = EncodeRgb(RgbImage(img.width(), img.height(), Rgb{7, 77, 177}));
        return std::string(png.begin(), png.end());
      };

  std::atomic<int> fail_next{0};  // answer 503 this many times first
  std::atomic<int> requests{0};
  std::string last_authorization;
  std::string last_prompt;
  int last_width = 0;
  int last_height = 0;

  FakeModelServer() {
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server_.Post("/segment", [this](const httplib::Request& req, httplib::Response& res) {
      if (Fail(req, res)) return;
      const RgbImage img = DecodeRgb(AsBytes(req.body));
      last_width = img.width();
      last_height = img.height();
      res.set_content(segment(img), "image/png");
    });
    server_.Post("/inpaint", [this](const httplib::Request& req, httplib::Response& res) {
      if (Fail(req, res)) return;
      if (!req.has_file("image") || !req.has_file("mask") || !req.has_file("prompt")) {
        res.status = 400;
        res.set_content(R"({"error":"missing field"})", "application/json");
        return;
      }
      const RgbImage img = DecodeRgb(AsBytes(req.get_file_value("image").content));
      const BinaryMask mask = DecodeMask(AsBytes(req.get_file_value("mask").content));
      last_prompt = req.get_file_value("prompt").content;
      last_width = img.width();
      last_height = img.height();
      res.set_content(inpaint(img, mask, last_prompt), "image/png");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeModelServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  static std::span<const uint8_t> AsBytes(const std::string& s) {
    return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
  }

  bool Fail(const httplib::Request& req, httplib::Response& res) {
    ++requests;
    last_authorization = req.get_header_value("Authorization");
    if (fail_next > 0) {
      --fail_next;
      res.status = 503;
      res.set_content(R"({"error":"model warming up"})", "application/json");
      return true;
    }
    return false;
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace pal::testing

#endif  // PAL_TESTS_FAKE_SERVER_H_
