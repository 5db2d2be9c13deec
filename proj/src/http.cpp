// Copyright 2026 The Taxoforge Authors
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

#include "taxoforge/http.hpp"

#include <httplib.h>

namespace taxoforge {
namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse perform(const std::string& method, const std::string& url, const std::string& body,
                     const HttpHeaders& headers, std::chrono::seconds timeout) {
  auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_follow_location(true);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  httplib::Result result = method == "GET" ? client.Get(path, h) : client.Post(path, h, body, "application/json");
  HttpResponse out;
  if (!result) {
    out.error = httplib::to_string(result.error());
    return out;
  }
  out.status = result->status;
  out.body = std::move(result->body);
  return out;
}

}  // namespace

HttpResponse http_get(const std::string& url, const HttpHeaders& headers, std::chrono::seconds timeout) {
  return perform("GET", url, {}, headers, timeout);
}

HttpResponse http_post_json(const std::string& url, const std::string& body, const HttpHeaders& headers,
                            std::chrono::seconds timeout) {
  return perform("POST", url, body, headers, timeout);
}

std::string join_url(std::string base, std::string_view path) {
  while (!base.empty() && base.back() == '/') base.pop_back();
  if (!path.empty() && path.front() != '/') base.push_back('/');
  base.append(path);
  return base;
}

}  // namespace taxoforge
