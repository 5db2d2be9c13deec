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

#include "taxoforge/error.hpp"

namespace taxoforge {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kMissingTerm: return "MissingTerm";
    case ErrorCode::kDuplicateSeedEntry: return "DuplicateSeedEntry";
    case ErrorCode::kInvalidQid: return "InvalidQid";
    case ErrorCode::kInvalidClustering: return "InvalidClustering";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionError: return "DimensionError";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kFetchError: return "FetchError";
    case ErrorCode::kEntityNotFound: return "EntityNotFound";
    case ErrorCode::kMissingTermList: return "MissingTermList";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kClientError: return "ClientError";
    case ErrorCode::kMissingRecording: return "MissingRecording";
    case ErrorCode::kInsufficientAlternatives: return "InsufficientAlternatives";
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kUndefined: return "Undefined";
    case ErrorCode::kUnknownRater: return "UnknownRater";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace taxoforge
