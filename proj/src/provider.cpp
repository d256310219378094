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

#include "genebench/provider.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "genebench/error.hpp"

namespace genebench {

namespace {

struct Url {
  std::string origin;
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::kConfigInvalid, "endpoint is not a URL: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorKind::kConfigInvalid, "endpoint scheme must be http or https: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Url out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (out.origin.size() == scheme_end + 3) fail(ErrorKind::kConfigInvalid, "endpoint has no host: " + url);
  return out;
}

constexpr std::string_view kTimeoutTag = "timed out";

}  // namespace

void ProviderSpec::validate() const {
  split_url(endpoint);
  if (model_name.empty()) fail(ErrorKind::kConfigInvalid, "provider model name is empty");
  if (!deterministic) fail(ErrorKind::kConfigInvalid, "provider must use deterministic decoding");
  if (!(request_timeout > 0.0) || !std::isfinite(request_timeout)) {
    fail(ErrorKind::kConfigInvalid, "provider timeout must be positive");
  }
  if (!(rate_limit >= 1.0)) fail(ErrorKind::kConfigInvalid, "provider rate limit must be >= 1");
}

bool is_timeout_message(std::string_view message) {
  return message.find(kTimeoutTag) != std::string_view::npos;
}

HttpProvider::HttpProvider(ProviderSpec spec, Clock& clock)
    : spec_(std::move(spec)), limiter_((spec_.validate(), spec_.rate_limit), clock) {
  const Url url = split_url(spec_.endpoint);
  origin_ = url.origin;
  path_ = url.path;
}

std::string HttpProvider::complete(std::string_view prompt) {
  const nlohmann::json body{
      {"model", spec_.model_name}, {"prompt", std::string(prompt)}, {"deterministic", true}};
  httplib::Headers headers;
  if (const char* token = std::getenv(kProviderTokenEnv); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  limiter_.acquire();
  httplib::Client cli(origin_);
  const double whole = std::floor(spec_.request_timeout);
  const auto sec = static_cast<time_t>(whole);
  const auto usec = static_cast<time_t>((spec_.request_timeout - whole) * 1e6);
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Connection || err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::BindIPAddress || err == httplib::Error::SSLConnection) {
      fail(ErrorKind::kProviderUnreachable, "provider unreachable: " + httplib::to_string(err));
    }
    if (err == httplib::Error::Read) {
      fail(ErrorKind::kProviderError, std::string("provider request ") + std::string(kTimeoutTag));
    }
    fail(ErrorKind::kProviderError, "provider request failed: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    fail(ErrorKind::kProviderError, "provider returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kProviderError, std::string("provider reply: ") + e.what());
  }
}

}  // namespace genebench
