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

#include "taxoforge/agreement.hpp"

#include <json.hpp>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/parallel.hpp"

namespace taxoforge {

std::size_t AnnotationTable::add_pair(const LabelPair& pair) {
  auto [it, fresh] = pair_index_.emplace(pair, pairs_.size());
  if (fresh) pairs_.push_back(pair);
  return it->second;
}

std::size_t AnnotationTable::add_rater(std::string_view rater) {
  if (auto i = rater_index(rater)) return *i;
  raters_.emplace_back(rater);
  return raters_.size() - 1;
}

void AnnotationTable::set(const LabelPair& pair, std::string_view rater, int value) {
  if (value != 0 && value != 1) throw Error(ErrorCode::kInvalidArgument, "annotation values are 0 or 1");
  const std::size_t p = add_pair(pair);
  const std::size_t r = add_rater(rater);
  auto [it, fresh] = values_.emplace(std::make_pair(p, r), value);
  if (!fresh && it->second != value)
    throw Error(ErrorCode::kInvalidArgument,
                "conflicting values from " + std::string(rater) + " for (" + pair.first + ", " + pair.second + ")");
}

std::optional<int> AnnotationTable::value(std::size_t pair, std::size_t rater) const {
  auto it = values_.find({pair, rater});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> AnnotationTable::rater_index(std::string_view rater) const {
  for (std::size_t i = 0; i < raters_.size(); ++i)
    if (raters_[i] == rater) return i;
  return std::nullopt;
}

AnnotationTable AnnotationTable::select_raters(std::span<const std::string> raters) const {
  AnnotationTable out;
  for (const LabelPair& p : pairs_) out.add_pair(p);
  for (const std::string& r : raters) {
    auto src = rater_index(r);
    if (!src) throw Error(ErrorCode::kUnknownRater, "unknown rater '" + r + "'");
    out.add_rater(r);
    for (std::size_t p = 0; p < pairs_.size(); ++p)
      if (auto v = value(p, *src)) out.set(pairs_[p], r, *v);
  }
  return out;
}

AnnotationTable parse_annotations(std::string_view text) {
  auto rows = parse_csv(text);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"child", "parent", "rater", "value"})
    throw Error(ErrorCode::kParseError, "annotation header must be child,parent,rater,value");
  AnnotationTable t;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    const std::string where = "line " + std::to_string(rows[i].line) + ": ";
    if (f.size() != 4) throw Error(ErrorCode::kParseError, where + "expected 4 fields");
    if (f[3] != "0" && f[3] != "1") throw Error(ErrorCode::kParseError, where + "value must be 0 or 1");
    try {
      t.set({f[0], f[1]}, f[2], f[3] == "1");
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, where + e.detail());
    }
  }
  return t;
}

AnnotationTable load_annotations(const std::filesystem::path& path) { return parse_annotations(read_file(path)); }

std::string annotations_csv(const AnnotationTable& t) {
  std::string out = "child,parent,rater,value\n";
  for (std::size_t p = 0; p < t.pairs().size(); ++p) {
    for (std::size_t r = 0; r < t.raters().size(); ++r) {
      if (auto v = t.value(p, r)) {
        std::vector<std::string> row{t.pairs()[p].first, t.pairs()[p].second, t.raters()[r], std::to_string(*v)};
        out += csv_row(row);
      }
    }
  }
  return out;
}

double krippendorff_alpha(const AnnotationTable& t) {
  double o[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t p = 0; p < t.pairs().size(); ++p) {
    std::size_t counts[2] = {0, 0};
    for (std::size_t r = 0; r < t.raters().size(); ++r)
      if (auto v = t.value(p, r)) ++counts[*v];
    const std::size_t m = counts[0] + counts[1];
    if (m < 2) continue;
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 2; ++k) {
        const double ordered = c == k ? static_cast<double>(counts[c]) * (counts[c] - 1.0)
                                      : static_cast<double>(counts[c]) * counts[k];
        o[c][k] += ordered / (m - 1.0);
      }
  }
  const double n0 = o[0][0] + o[0][1];
  const double n1 = o[1][0] + o[1][1];
  const double n = n0 + n1;
  if (n == 0.0) throw Error(ErrorCode::kUndefined, "no unit has two or more values");
  const double observed = (o[0][1] + o[1][0]) / n;
  const double expected = 2.0 * n0 * n1 / (n * (n - 1.0));
  if (expected == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

std::vector<std::vector<PairwiseAgreement>> pairwise_alpha(const AnnotationTable& t) {
  const std::size_t k = t.raters().size();
  std::vector<std::vector<PairwiseAgreement>> out(k, std::vector<PairwiseAgreement>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      AnnotationTable sub;
      std::size_t shared = 0;
      for (std::size_t p = 0; p < t.pairs().size(); ++p) {
        auto va = t.value(p, a);
        auto vb = t.value(p, b);
        if (!va || !vb) continue;
        ++shared;
        sub.set(t.pairs()[p], "a", *va);
        sub.set(t.pairs()[p], "b", *vb);
      }
      PairwiseAgreement entry{shared, std::nullopt};
      if (shared > 0) entry.alpha = a == b ? 1.0 : krippendorff_alpha(sub);
      out[a][b] = out[b][a] = entry;
    }
  }
  return out;
}

std::array<std::size_t, 5> vote_histogram(const AnnotationTable& t) {
  std::array<std::size_t, 5> buckets{};
  for (std::size_t p = 0; p < t.pairs().size(); ++p) {
    std::size_t votes = 0;
    for (std::size_t r = 0; r < t.raters().size(); ++r)
      if (t.value(p, r) == 1) ++votes;
    ++buckets[std::min<std::size_t>(votes, 4)];
  }
  return buckets;
}

ScoreShare score_share(const AnnotationTable& t, std::string_view rater) {
  auto r = t.rater_index(rater);
  if (!r) throw Error(ErrorCode::kUnknownRater, "unknown rater '" + std::string(rater) + "'");
  ScoreShare share;
  std::size_t zeros = 0;
  for (std::size_t p = 0; p < t.pairs().size(); ++p) {
    if (auto v = t.value(p, *r)) {
      ++share.annotated;
      if (*v == 0) ++zeros;
    }
  }
  if (share.annotated == 0) throw Error(ErrorCode::kUndefined, "rater '" + std::string(rater) + "' annotated nothing");
  share.zero = static_cast<double>(zeros) / static_cast<double>(share.annotated);
  share.one = 1.0 - share.zero;
  return share;
}

std::vector<std::pair<std::string, std::string>> judge_pairs(AnnotationTable& t, std::string_view rater,
                                                             const LlmConfig& cfg, ChatClient& client) {
  const auto pairs = t.pairs();
  std::vector<std::optional<int>> verdicts(pairs.size());
  std::vector<std::optional<std::string>> failures(pairs.size());
  parallel_for(pairs.size(), cfg.max_in_flight, [&](std::size_t i) {
    ChatRequest request{cfg.model_id, render_judge_prompt(pairs[i].first, pairs[i].second), cfg.temperature,
                        cfg.seed};
    try {
      verdicts[i] = parse_judgement(client.complete(request));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kClientError && e.code() != ErrorCode::kMalformedResponse) throw;
      failures[i] = e.what();
    }
  });
  t.add_rater(rater);
  std::vector<std::pair<std::string, std::string>> skipped;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (verdicts[i]) t.set(pairs[i], rater, *verdicts[i]);
    if (failures[i]) skipped.emplace_back(pairs[i].first + " -> " + pairs[i].second, *failures[i]);
  }
  return skipped;
}

std::string agreement_csv(const AnnotationTable& t) {
  std::string out = "statistic,rater,other,shared,value\n";
  auto row = [&](std::string stat, std::string a, std::string b, std::string shared, std::string value) {
    std::vector<std::string> f{std::move(stat), std::move(a), std::move(b), std::move(shared), std::move(value)};
    out += csv_row(f);
  };
  try {
    row("alpha", "", "", "", format_real(krippendorff_alpha(t)));
  } catch (const Error&) {
    row("alpha", "", "", "", "");
  }
  const auto pw = pairwise_alpha(t);
  for (std::size_t a = 0; a < t.raters().size(); ++a)
    for (std::size_t b = a + 1; b < t.raters().size(); ++b)
      row("pairwise", t.raters()[a], t.raters()[b], std::to_string(pw[a][b].shared),
          pw[a][b].alpha ? format_real(*pw[a][b].alpha) : "");
  const auto hist = vote_histogram(t);
  static constexpr const char* kBuckets[] = {"0", "1", "2", "3", ">3"};
  for (std::size_t i = 0; i < hist.size(); ++i) row("votes", kBuckets[i], "", "", std::to_string(hist[i]));
  for (const std::string& r : t.raters()) {
    try {
      ScoreShare s = score_share(t, r);
      row("zero_share", r, "", std::to_string(s.annotated), format_real(s.zero));
    } catch (const Error&) {
    }
  }
  return out;
}

std::string agreement_json(const AnnotationTable& t) {
  using nlohmann::json;
  json doc;
  try {
    doc["alpha"] = krippendorff_alpha(t);
  } catch (const Error&) {
    doc["alpha"] = nullptr;
  }
  doc["raters"] = t.raters();
  doc["pairs"] = t.pairs().size();
  json pairwise = json::array();
  const auto pw = pairwise_alpha(t);
  for (std::size_t a = 0; a < t.raters().size(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < t.raters().size(); ++b)
      row.push_back({{"shared", pw[a][b].shared},
                     {"alpha", pw[a][b].alpha ? json(*pw[a][b].alpha) : json(nullptr)}});
    pairwise.push_back(std::move(row));
  }
  doc["pairwise"] = std::move(pairwise);
  doc["votes"] = vote_histogram(t);
  json shares = json::object();
  for (const std::string& r : t.raters()) {
    try {
      shares[r] = score_share(t, r).zero;
    } catch (const Error&) {
      shares[r] = nullptr;
    }
  }
  doc["zeroShare"] = std::move(shares);
  return doc.dump(2);
}

}  // namespace taxoforge
