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

#include "taxoforge/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"

namespace taxoforge {
namespace {

void validate(const DecisionMatrix& m) {
  if (m.rows.size() < 2) throw Error(ErrorCode::kInsufficientAlternatives, "need at least two alternatives");
  if (m.directions.size() != m.columns.size() || m.values.size() != m.rows.size())
    throw Error(ErrorCode::kInvalidMatrix, "matrix shape mismatch");
  for (const auto& row : m.values) {
    if (row.size() != m.columns.size()) throw Error(ErrorCode::kInvalidMatrix, "ragged matrix row");
    for (double v : row)
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidMatrix, "non-finite matrix value");
  }
}

bool dominates(const DecisionMatrix& m, std::size_t a, std::size_t b) {
  bool strict = false;
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    double x = m.values[a][j], y = m.values[b][j];
    if (m.directions[j] == Direction::kMax) std::swap(x, y);
    if (x > y) return false;
    if (x < y) strict = true;
  }
  return strict;
}

}  // namespace

const std::vector<std::string>& selection_criteria() {
  static const std::vector<std::string> names{"new_nodes", "unlinked",   "density", "roots",
                                              "diameter",  "components", "cycles"};
  return names;
}

DecisionMatrix build_matrix(std::span<const std::pair<std::string, MetricsReport>> reports) {
  if (reports.size() < 2) throw Error(ErrorCode::kInsufficientAlternatives, "need at least two reports");
  DecisionMatrix m;
  m.columns = selection_criteria();
  m.directions.assign(m.columns.size(), Direction::kMin);
  for (const auto& [id, r] : reports) {
    m.rows.push_back(id);
    m.values.push_back({static_cast<double>(r.new_nodes), static_cast<double>(r.unlinked), r.density,
                        static_cast<double>(r.roots), static_cast<double>(r.diameter),
                        static_cast<double>(r.components), static_cast<double>(r.cycles)});
    m.saturated.push_back(r.cycles_saturated);
  }
  return m;
}

TopsisResult topsis(const DecisionMatrix& m, std::optional<std::span<const double>> weights) {
  validate(m);
  const std::size_t rows = m.rows.size(), cols = m.columns.size();
  std::vector<double> w(cols, 1.0 / static_cast<double>(cols));
  if (weights) {
    if (weights->size() != cols) throw Error(ErrorCode::kInvalidArgument, "weight count mismatch");
    if (std::any_of(weights->begin(), weights->end(), [](double x) { return !(x >= 0.0) || !std::isfinite(x); }) ||
        std::all_of(weights->begin(), weights->end(), [](double x) { return x == 0.0; }))
      throw Error(ErrorCode::kInvalidArgument, "weights must be non-negative and not all zero");
    w.assign(weights->begin(), weights->end());
  }

  std::vector<std::vector<double>> v(rows, std::vector<double>(cols, 0.0));
  std::vector<double> ideal(cols), anti(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += m.values[i][j] * m.values[i][j];
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < rows; ++i) v[i][j] = norm > 0.0 ? w[j] * m.values[i][j] / norm : 0.0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end(), [j](const auto& a, const auto& b) { return a[j] < b[j]; });
    const bool minimize = m.directions[j] == Direction::kMin;
    ideal[j] = minimize ? (*lo)[j] : (*hi)[j];
    anti[j] = minimize ? (*hi)[j] : (*lo)[j];
  }

  TopsisResult result;
  for (std::size_t i = 0; i < rows; ++i) {
    double dp = 0.0, dm = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      dp += (v[i][j] - ideal[j]) * (v[i][j] - ideal[j]);
      dm += (v[i][j] - anti[j]) * (v[i][j] - anti[j]);
    }
    dp = std::sqrt(dp);
    dm = std::sqrt(dm);
    result.scores.push_back(dp + dm == 0.0 ? 1.0 : dm / (dp + dm));
  }
  result.ranking.resize(rows);
  std::iota(result.ranking.begin(), result.ranking.end(), std::size_t{0});
  std::sort(result.ranking.begin(), result.ranking.end(), [&](std::size_t a, std::size_t b) {
    if (result.scores[a] != result.scores[b]) return result.scores[a] > result.scores[b];
    return m.rows[a] < m.rows[b];
  });
  return result;
}

std::set<std::size_t> pareto_front(const DecisionMatrix& m) {
  std::set<std::size_t> front;
  for (std::size_t a = 0; a < m.rows.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < m.rows.size() && !dominated; ++b) dominated = b != a && dominates(m, b, a);
    if (!dominated) front.insert(a);
  }
  return front;
}

std::string matrix_csv(const DecisionMatrix& m) {
  const bool flags = m.saturated.size() == m.rows.size() && !m.rows.empty();
  std::vector<std::string> header{"config_id"};
  std::vector<std::string> direction{"direction"};
  for (std::size_t j = 0; j < m.columns.size(); ++j) {
    header.push_back(m.columns[j]);
    direction.push_back(m.directions[j] == Direction::kMin ? "MIN" : "MAX");
  }
  if (flags) {
    header.push_back("cycles_saturated");
    direction.push_back("FLAG");
  }
  std::string out = csv_row(header) + csv_row(direction);
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    std::vector<std::string> row{m.rows[i]};
    for (double x : m.values[i]) row.push_back(format_real(x));
    if (flags) row.push_back(m.saturated[i] ? "1" : "0");
    out += csv_row(row);
  }
  return out;
}

DecisionMatrix parse_matrix_csv(std::string_view text) {
  auto records = parse_csv(text);
  if (records.size() < 2 || records[1].fields.empty() || records[1].fields[0] != "direction")
    throw Error(ErrorCode::kInvalidMatrix, "matrix CSV needs a header and a direction row");
  const auto& header = records[0].fields;
  const auto& dirs = records[1].fields;
  if (dirs.size() != header.size()) throw Error(ErrorCode::kInvalidMatrix, "direction row width mismatch");

  DecisionMatrix m;
  std::optional<std::size_t> flag_col;
  std::vector<std::size_t> criteria;
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (dirs[j] == "FLAG") {
      flag_col = j;
      continue;
    }
    if (dirs[j] != "MIN" && dirs[j] != "MAX")
      throw Error(ErrorCode::kInvalidMatrix, "column '" + header[j] + "' has no direction");
    criteria.push_back(j);
    m.columns.push_back(header[j]);
    m.directions.push_back(dirs[j] == "MIN" ? Direction::kMin : Direction::kMax);
  }
  for (std::size_t r = 2; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    if (f.size() != header.size())
      throw Error(ErrorCode::kInvalidMatrix, "line " + std::to_string(records[r].line) + ": width mismatch");
    m.rows.push_back(f[0]);
    std::vector<double> values;
    for (std::size_t j : criteria) {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(f[j].data(), f[j].data() + f[j].size(), x);
      if (ec != std::errc() || ptr != f[j].data() + f[j].size() || !std::isfinite(x))
        throw Error(ErrorCode::kInvalidMatrix,
                    "line " + std::to_string(records[r].line) + ": bad value '" + f[j] + "'");
      values.push_back(x);
    }
    m.values.push_back(std::move(values));
    if (flag_col) m.saturated.push_back(f[*flag_col] == "1");
  }
  return m;
}

std::string topsis_csv(const DecisionMatrix& m, const TopsisResult& result, const std::set<std::size_t>& front) {
  std::string out = "configId,score,rank,onParetoFront\n";
  for (std::size_t k = 0; k < result.ranking.size(); ++k) {
    const std::size_t i = result.ranking[k];
    std::vector<std::string> row{m.rows[i], format_real(result.scores[i]), std::to_string(k + 1),
                                 front.contains(i) ? "true" : "false"};
    out += csv_row(row);
  }
  return out;
}

}  // namespace taxoforge
