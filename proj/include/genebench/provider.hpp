// Copyright 2026 The genebench Authors.
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

#ifndef GENEBENCH_PROVIDER_HPP_
#define GENEBENCH_PROVIDER_HPP_

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "genebench/clock.hpp"

namespace genebench {

// A text-generation endpoint, always driven in its non-sampling mode.
//
// Wire contract: one HTTP POST of {"model": ..., "prompt": ...,
// "deterministic": true} with Content-Type application/json; the reply is
// {"text": ...}. A bearer token is sent when GENEBENCH_PROVIDER_TOKEN is set.
struct ProviderSpec {
  std::string endpoint;          // http://host[:port]/path
  std::string model_name;
  bool deterministic = true;     // fixed; validate() rejects anything else
  double request_timeout = 60.0;  // seconds
  double rate_limit = 3.0;        // requests per second

  // Throws kConfigInvalid.
  void validate() const;
};

inline constexpr const char* kProviderTokenEnv = "GENEBENCH_PROVIDER_TOKEN";

class TextProvider {
 public:
  virtual ~TextProvider() = default;
  // Throws kProviderUnreachable when no connection can be made and
  // kProviderError for anything else (timeouts, HTTP errors, bad replies).
  virtual std::string complete(std::string_view prompt) = 0;
};

// Wraps a callable; handy for tests and in-process backends.
class FunctionProvider : public TextProvider {
 public:
  explicit FunctionProvider(std::function<std::string(std::string_view)> fn)
      : fn_(std::move(fn)) {}
  std::string complete(std::string_view prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(std::string_view)> fn_;
};

class HttpProvider : public TextProvider {
 public:
  explicit HttpProvider(ProviderSpec spec, Clock& clock = system_clock());
  std::string complete(std::string_view prompt) override;
  const ProviderSpec& spec() const { return spec_; }

 private:
  ProviderSpec spec_;
  std::string origin_;
  std::string path_;
  RateLimiter limiter_;
};

// True when the message of a kProviderError names a timeout.
bool is_timeout_message(std::string_view message);

}  // namespace genebench

#endif  // GENEBENCH_PROVIDER_HPP_
