// Copyright 2026 The GazeBench Authors.
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

#ifndef GAZEBENCH_SERVICE_H_
#define GAZEBENCH_SERVICE_H_

#include <chrono>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "gazebench/error.h"
#include "httplib.h"

namespace gazebench {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
  // Replaceable so tests do not wait.
  std::function<void(std::chrono::milliseconds)> sleep =
      [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

// Calls attempt() until it returns, sleeping initial_backoff * multiplier^i
// between tries. Every failure is logged; when the policy is exhausted the
// log travels with the ServiceError.
template <typename F>
auto with_retry(const RetryPolicy& policy, std::string_view what, F&& attempt)
    -> decltype(attempt()) {
  std::vector<std::string> log;
  auto delay = policy.initial_backoff;
  for (int i = 1; i <= policy.max_attempts; ++i) {
    try {
      return attempt();
    } catch (const std::exception& e) {
      log.push_back("attempt " + std::to_string(i) + ": " + e.what());
    }
    if (i < policy.max_attempts) {
      if (policy.sleep) policy.sleep(delay);
      delay = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(delay.count()) * policy.multiplier));
    }
  }
  throw ServiceError(std::string(what) + " failed after " +
                         std::to_string(policy.max_attempts) + " attempts",
                     std::move(log));
}

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws on connection failure; any HTTP status is returned.
  virtual HttpResponse post_json(const std::string& body) = 0;
};

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // starts with '/'
};

inline Endpoint split_url(std::string_view url) {
  const auto scheme = url.find("://");
  if (scheme == std::string_view::npos) {
    throw ValidationError("endpoint URL needs a scheme: " + std::string(url));
  }
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

// JSON POST over cpp-httplib; one client per request so concurrent callers
// do not share connection state.
class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::string url, std::string api_key = {},
                            std::chrono::seconds timeout = std::chrono::seconds(30))
      : endpoint_(split_url(url)), api_key_(std::move(api_key)),
        timeout_(timeout) {}

  HttpResponse post_json(const std::string& body) override {
    httplib::Client client(endpoint_.base);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers headers;
    if (!api_key_.empty()) {
      headers.emplace("Authorization", "Bearer " + api_key_);
    }
    auto res = client.Post(endpoint_.path, headers, body, "application/json");
    if (!res) {
      throw std::runtime_error("POST " + endpoint_.base + endpoint_.path +
                               ": " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
  }

 private:
  Endpoint endpoint_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

}  // namespace gazebench

#endif  // GAZEBENCH_SERVICE_H_
