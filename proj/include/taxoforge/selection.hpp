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

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taxoforge/metrics.hpp"

namespace taxoforge {

enum class Direction { kMin, kMax };

struct DecisionMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<Direction> directions;
  std::vector<std::vector<double>> values;  // rows x columns
  std::vector<bool> saturated;              // per row; empty when unknown
};

struct TopsisResult {
  std::vector<double> scores;       // aligned with DecisionMatrix::rows
  std::vector<std::size_t> ranking;  // row indices, best first
};

/// newNodes, unlinked, density, roots, diameter, components, cycles.
const std::vector<std::string>& selection_criteria();

DecisionMatrix build_matrix(std::span<const std::pair<std::string, MetricsReport>> reports);

/// Throws kInvalidMatrix for ragged or non-finite input and kInvalidArgument
/// for bad weights (wrong count, negative, all zero).
TopsisResult topsis(const DecisionMatrix& m, std::optional<std::span<const double>> weights = std::nullopt);

std::set<std::size_t> pareto_front(const DecisionMatrix& m);

/// Header `config_id,<criteria>`, then a `direction` row of MIN/MAX, then
/// one row per alternative. A trailing `cycles_saturated` column is written
/// when saturation flags are known, with direction FLAG.
std::string matrix_csv(const DecisionMatrix& m);
DecisionMatrix parse_matrix_csv(std::string_view text);

/// `configId,score,rank,onParetoFront`, in rank order.
std::string topsis_csv(const DecisionMatrix& m, const TopsisResult& result, const std::set<std::size_t>& front);

}  // namespace taxoforge
