// Copyright 2026 The zanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zanon/popularity.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace zanon {

void RatePopularity::Validate() const {
  if (!labels.empty() && labels.size() != values.size()) {
    throw std::invalid_argument("labels must be empty or align with values");
  }
  double previous = std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("popularity values must be finite and >= 0");
    }
    if (kind == Kind::kExposureProbs && v > 1.0) {
      throw std::invalid_argument("exposure probabilities must be <= 1");
    }
    if (v > previous) {
      throw std::invalid_argument(
          "popularity values must be non-increasing by rank");
    }
    previous = v;
  }
}

RatePopularity PowerLawRates(int64_t attribute_count, double top_rate) {
  if (attribute_count < 1) {
    throw std::invalid_argument("attribute_count must be >= 1");
  }
  if (!std::isfinite(top_rate) || top_rate <= 0.0) {
    throw std::invalid_argument("top_rate must be positive and finite");
  }
  RatePopularity popularity;
  popularity.kind = RatePopularity::Kind::kRates;
  popularity.values.reserve(static_cast<size_t>(attribute_count));
  for (int64_t rank = 1; rank <= attribute_count; ++rank) {
    popularity.values.push_back(top_rate / static_cast<double>(rank));
  }
  return popularity;
}

void AccessLog::Validate() const {
  if (records.empty()) {
    throw std::invalid_argument("access log must contain records");
  }
  if (!std::isfinite(window) || window <= 0.0) {
    throw std::invalid_argument("window must be a positive finite duration");
  }
  if (!std::isfinite(period_length) || period_length < window) {
    throw std::invalid_argument("period_length must be >= window");
  }
}

RatePopularity EstimateExposureProbs(const AccessLog& log) {
  log.Validate();
  const int64_t window_count =
      static_cast<int64_t>(std::floor(log.period_length / log.window));

  double start = std::numeric_limits<double>::infinity();
  for (const Observation& record : log.records) {
    start = std::min(start, record.time);
  }
  const double end = start + static_cast<double>(window_count) * log.window;

  // Distinct users are counted over the whole log, including records that
  // fall in the truncated remainder of the period.
  std::unordered_map<std::string, int64_t> user_ids;
  for (const Observation& record : log.records) {
    user_ids.try_emplace(record.user,
                         static_cast<int64_t>(user_ids.size()));
  }
  const int64_t total_users = static_cast<int64_t>(user_ids.size());

  // Per attribute: distinct (user, window) pairs with an exposure.
  std::unordered_map<std::string, std::unordered_set<int64_t>> exposures;
  for (const Observation& record : log.records) {
    if (record.time >= end) {
      continue;
    }
    int64_t window_index =
        static_cast<int64_t>(std::floor((record.time - start) / log.window));
    window_index = std::clamp<int64_t>(window_index, 0, window_count - 1);
    const int64_t user_id = user_ids.at(record.user);
    exposures[record.attribute].insert(user_id * window_count + window_index);
  }

  const double denominator =
      static_cast<double>(window_count) * static_cast<double>(total_users);
  RatePopularity popularity;
  popularity.kind = RatePopularity::Kind::kExposureProbs;
  popularity.values.reserve(exposures.size());
  popularity.labels.reserve(exposures.size());
  std::vector<std::pair<std::string, double>> rows;
  rows.reserve(exposures.size());
  for (auto& [attribute, pairs] : exposures) {
    rows.emplace_back(attribute,
                      static_cast<double>(pairs.size()) / denominator);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) {
      return a.second > b.second;
    }
    return a.first < b.first;
  });
  for (auto& [attribute, value] : rows) {
    popularity.labels.push_back(std::move(attribute));
    popularity.values.push_back(value);
  }
  return popularity;
}

}  // namespace zanon
