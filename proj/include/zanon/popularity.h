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

#ifndef ZANON_POPULARITY_H_
#define ZANON_POPULARITY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "zanon/observation.h"

namespace zanon {

// Rank-ordered per-attribute popularity. Depending on `kind`, values are
// either exposure rates (events per second per user) or per-window
// exposure probabilities. Rank 1 is values[0].
struct RatePopularity {
  enum class Kind { kRates, kExposureProbs };

  Kind kind = Kind::kRates;
  // Non-increasing by rank. Rates are finite and >= 0; probabilities lie
  // in [0, 1].
  std::vector<double> values;
  // Optional attribute names aligned with ranks; empty or values.size().
  std::vector<std::string> labels;

  size_t size() const { return values.size(); }

  // Throws std::invalid_argument when an invariant is violated.
  void Validate() const;
};

// Power-law rate vector: values[r-1] = top_rate / r for r = 1..attribute_count.
RatePopularity PowerLawRates(int64_t attribute_count, double top_rate = 0.05);

// A recorded observation log spanning one measurement period, used to
// estimate per-window exposure probabilities empirically.
struct AccessLog {
  std::vector<Observation> records;
  // Total duration covered by the log, seconds.
  double period_length = 0.0;
  // Window length used for estimation, seconds.
  double window = 0.0;

  // Throws std::invalid_argument when empty or window/period bounds fail.
  void Validate() const;
};

// Empirical per-window exposure probability per attribute.
//
// The period is split into W = floor(period_length / window) whole windows
// anchored at the earliest record; the remainder, and any records falling
// in it, are discarded. For each attribute a the estimate is
//
//   p[a] = (number of distinct (user, window) pairs exposing a) / (W * U)
//
// where U counts distinct users across the whole log. This is the
// maximum-likelihood estimate for a Bernoulli exposure per user-window,
// which is exactly what the analytical model consumes. Results are sorted
// non-increasing with attribute tokens as labels (ties broken by token for
// determinism); kind is kExposureProbs.
RatePopularity EstimateExposureProbs(const AccessLog& log);

}  // namespace zanon

#endif  // ZANON_POPULARITY_H_
