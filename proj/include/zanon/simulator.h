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

#ifndef ZANON_SIMULATOR_H_
#define ZANON_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "zanon/anonymizer.h"
#include "zanon/observation.h"
#include "zanon/popularity.h"

namespace zanon {

struct SimConfig {
  int64_t users = 2;       // U >= 2
  int64_t attributes = 1;  // A >= 1, top-A ranks of `rates` are used
  RatePopularity rates;    // rates applied directly; exposure probabilities
                           // are inverted through rate = -ln(1-p)/delta_t
  double delta_t = 1.0;    // window length, seconds > 0
  int64_t horizon = 1;     // N >= 1 windows simulated
  int64_t z = 1;           // engine threshold >= 1
  uint64_t seed = 0;       // same seed => identical run, byte for byte

  // Throws std::invalid_argument when a bound is violated.
  void Validate() const;
};

// Draws one synthetic stream over [0, horizon * delta_t).
//
// Per attribute, the merged arrivals of all users form a Poisson process
// with rate users * lambda_a, so the total count is drawn as one Poisson
// variable and each arrival gets a uniform user and a uniform time
// (superposition; distributionally identical to simulating every user
// separately because users are homogeneous and independent, and it keeps
// large configurations tractable). Each attribute consumes an independent
// RNG substream derived from `seed`, and the merged stream is sorted by
// time with ties broken by rank then draw order, so runs are fully
// deterministic. Times are generated on the microsecond grid so streams
// serialize losslessly through the text format.
//
// User tokens are "u1".."uU"; attribute tokens come from rates.labels
// when present, otherwise "a<rank>".
std::vector<Observation> GenerateStream(const SimConfig& config);

// Reference z-anonymity decisions, one per observation: scan the whole
// preceding stream to count distinct users with the same attribute in
// [t - delta_t, t], current user included, and release iff count >= z.
// Quadratic on purpose; correctness over speed. Throws
// std::invalid_argument when the stream is not time-ordered.
std::vector<Decision> OracleAnonymize(std::span<const Observation> stream,
                                      int64_t z, double delta_t);

struct EmpiricalReport {
  // Per rank: fraction of (user, window) pairs in which the attribute was
  // published at least once, over users * horizon disjoint windows.
  std::vector<double> empirical_publish;
  // Per user (index 0 .. U-1): sorted 0-based rank indices of the
  // attributes the user published anywhere in the horizon. Users that
  // published nothing have an empty fingerprint; identical (including
  // empty) fingerprints form one anonymity class.
  std::vector<std::vector<int32_t>> user_fingerprints;
  // For each requested k: fraction of users whose fingerprint is shared
  // by at least k-1 others (class size >= k).
  std::vector<std::pair<int64_t, double>> k_anon_fraction;
  AnonymizerStats stream_stats;
};

// Generates a stream (same draw as GenerateStream for the same config),
// runs it through the engine, and measures published fractions,
// fingerprints over the horizon's disjoint windows, and the k-anonymity
// fractions for each requested k. Deterministic given config.seed.
// Throws std::invalid_argument on invalid config or k values < 1.
EmpiricalReport RunExperiment(const SimConfig& config,
                              std::span<const int64_t> k_values);

}  // namespace zanon

#endif  // ZANON_SIMULATOR_H_
