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

#include <stdexcept>
#include <string>
#include <string_view>

namespace taxoforge {

// Numeric values are part of the C API (see taxoforge.h) and must stay stable.
enum class ErrorCode : int {
  kInvalidLabel = 1,
  kMissingTerm = 2,
  kDuplicateSeedEntry = 3,
  kInvalidQid = 4,
  kInvalidClustering = 5,
  kInvalidArgument = 6,
  kDimensionError = 7,
  kDegenerateVector = 8,
  kProviderError = 9,
  kParseError = 10,
  kFetchError = 11,
  kEntityNotFound = 12,
  kMissingTermList = 13,
  kMalformedResponse = 14,
  kClientError = 15,
  kMissingRecording = 16,
  kInsufficientAlternatives = 17,
  kInvalidMatrix = 18,
  kUndefined = 19,
  kUnknownRater = 20,
  kConfigError = 21,
  kIoError = 22,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code-name prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace taxoforge
