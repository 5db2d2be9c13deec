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

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taxoforge/llm.hpp"

namespace taxoforge {

using LabelPair = std::pair<std::string, std::string>;  // child, parent

class AnnotationTable {
 public:
  std::size_t add_pair(const LabelPair& pair);
  std::size_t add_rater(std::string_view rater);
  /// Throws kInvalidArgument for values other than 0/1 or a conflicting entry.
  void set(const LabelPair& pair, std::string_view rater, int value);

  const std::vector<LabelPair>& pairs() const noexcept { return pairs_; }
  const std::vector<std::string>& raters() const noexcept { return raters_; }
  std::optional<int> value(std::size_t pair, std::size_t rater) const;
  std::optional<std::size_t> rater_index(std::string_view rater) const;
  std::size_t annotation_count() const noexcept { return values_.size(); }

  /// Copy keeping only the listed raters (in the given order).
  AnnotationTable select_raters(std::span<const std::string> raters) const;

 private:
  std::vector<LabelPair> pairs_;
  std::vector<std::string> raters_;
  std::map<LabelPair, std::size_t> pair_index_;
  std::map<std::pair<std::size_t, std::size_t>, int> values_;
};

/// `child,parent,rater,value`.
AnnotationTable parse_annotations(std::string_view text);
AnnotationTable load_annotations(const std::filesystem::path& path);
std::string annotations_csv(const AnnotationTable& t);

/// Nominal alpha. Throws kUndefined when no unit holds two values.
double krippendorff_alpha(const AnnotationTable& t);

struct PairwiseAgreement {
  std::size_t shared = 0;
  std::optional<double> alpha;
};

std::vector<std::vector<PairwiseAgreement>> pairwise_alpha(const AnnotationTable& t);

/// Buckets for 0, 1, 2, 3 and more than 3 positive votes.
std::array<std::size_t, 5> vote_histogram(const AnnotationTable& t);

struct ScoreShare {
  double zero = 0.0;
  double one = 0.0;
  std::size_t annotated = 0;
};

ScoreShare score_share(const AnnotationTable& t, std::string_view rater);

/// Adds `rater` judgements for every pair. Unusable answers leave gaps.
std::vector<std::pair<std::string, std::string>> judge_pairs(AnnotationTable& t, std::string_view rater,
                                                             const LlmConfig& cfg, ChatClient& client);

/// `statistic,rater,other,shared,value` rows: alpha, pairwise, histogram, share.
std::string agreement_csv(const AnnotationTable& t);
std::string agreement_json(const AnnotationTable& t);

}  // namespace taxoforge
