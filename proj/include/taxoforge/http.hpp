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

#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace taxoforge {

struct HttpResponse {
  int status = 0;  // 0 on transport failure
  std::string body;
  std::string error;  // transport error description
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// One blocking request. `url` is absolute (http or https).
HttpResponse http_get(const std::string& url, const HttpHeaders& headers = {},
                      std::chrono::seconds timeout = std::chrono::seconds(30));
HttpResponse http_post_json(const std::string& url, const std::string& body, const HttpHeaders& headers = {},
                            std::chrono::seconds timeout = std::chrono::seconds(60));

/// Joins a base URL and a path without doubling slashes.
std::string join_url(std::string base, std::string_view path);

}  // namespace taxoforge
