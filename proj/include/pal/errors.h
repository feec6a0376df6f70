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

#ifndef PAL_ERRORS_H_
#define PAL_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace pal {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Bytes that are not a decodable image.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// A file-backed detector has no mask for the requested image.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Remote service failure (non-200, timeout, connection refused) after all
// retries. `status` is the last HTTP status seen, or -1 for transport errors.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, int status)
      : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// A backend answered, but with a payload that breaks the contract
// (wrong dimensions, undecodable body).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Inpainting of one planned crop failed. Carries the component label.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& what, int component_label)
      : Error(what), component_label_(component_label) {}
  int component_label() const { return component_label_; }

 private:
  int component_label_;
};

// Configuration or manifest problems; lists every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace pal

#endif  // PAL_ERRORS_H_
