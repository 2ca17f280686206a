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

#ifndef ZANON_MODEL_H_
#define ZANON_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "zanon/popularity.h"

namespace zanon {

// Closed-form evaluation of the z-anonymity probability chain. All
// functions are pure and thread-safe. U homogeneous users each expose
// attribute a as a Poisson process with rate lambda_a; the chain follows
// one attribute from "exposed within a window" through "released by the
// z filter" up to "a user's whole released attribute set is shared by at
// least k-1 others".
struct ModelParams {
  int64_t users = 2;       // U >= 2
  int64_t attributes = 1;  // A >= 1
  double delta_t = 1.0;    // window length, > 0 seconds
  int64_t horizon = 1;     // N >= 1 windows observed by the attacker
  int64_t z = 1;           // release threshold >= 1
  int64_t k = 1;           // anonymity-set size >= 1

  // Throws std::invalid_argument when a bound is violated.
  void Validate() const;
};

// P[at least one exposure in a window]: 1 - exp(-rate * delta_t), kept
// accurate for tiny rate * delta_t. Throws on negative rate or
// non-positive delta_t.
double ExposureProbability(double rate, double delta_t);

// P[Binomial(trials, success_prob) >= min_successes], evaluated term by
// term in the log domain with compensated summation, so extreme
// parameters (trials = 1e5 with success_prob = 1e-8) neither overflow nor
// underflow intermediate terms. min_successes = 0 gives 1;
// min_successes = trials + 1 gives 0. Throws on success_prob outside
// [0, 1] or min_successes outside [0, trials + 1].
double BinomialTail(int64_t trials, double success_prob,
                    int64_t min_successes);

// Same tail with the success probability supplied as a natural log, for
// callers whose probability underflows double. log_success_prob <= 0.
double BinomialTailFromLog(int64_t trials, double log_success_prob,
                           int64_t min_successes);

// P[a window exposure passes the z filter]: at least z-1 of the other
// users - 1 users must expose the attribute in the same window, so this is
// BinomialTail(users - 1, p_exposure, z - 1). z = 1 gives 1.
double ReleaseProbability(double p_exposure, int64_t users, int64_t z);

// P[a user publishes the attribute in a window]: exposure and filter
// passage jointly, p_exposure * p_release.
double PublishProbability(double p_exposure, double p_release);

// P[published in at least one of `horizon` windows]:
// 1 - (1 - p_publish)^horizon, stable for tiny p_publish * horizon.
double HorizonPublishProbability(double p_publish, int64_t horizon);

// P[two independent users have identical publish outcomes across every
// attribute]. Product over attributes of p^2 + (1-p)^2; each factor lies
// in [1/2, 1], so the product is accumulated in the log domain to survive
// tens of thousands of attributes. `log_value` is exact even when `value`
// underflows to 0.
struct PairMatch {
  double value = 1.0;
  double log_value = 0.0;  // natural log
};
PairMatch PairMatchProbability(std::span<const double> horizon_probs);

// P[at least k-1 of the other users share a user's published attribute
// set]: BinomialTail(users - 1, pair_match, k - 1). k = 1 gives 1. The
// FromLog variant preserves precision when the pair-match probability is
// too small for a double.
double KAnonymityProbability(double pair_match, int64_t users, int64_t k);
double KAnonymityProbabilityFromLog(double log_pair_match, int64_t users,
                                    int64_t k);

// The whole chain, per attribute rank plus the scalar tail.
struct KAnonReport {
  ModelParams params;
  std::vector<double> p_exposure;  // per rank, from rates or passed through
  std::vector<double> p_release;   // z-filter passage
  std::vector<double> p_publish;   // exposure * release
  std::vector<double> p_horizon;   // published within the horizon
  PairMatch pair_match;
  double p_k_anon = 0.0;
};

// Evaluates the chain for the top params.attributes ranks of `popularity`
// (longer vectors are truncated). Rate vectors go through
// ExposureProbability first; exposure-probability vectors are consumed
// directly. Throws when the popularity vector is shorter than
// params.attributes or invalid.
KAnonReport Evaluate(const ModelParams& params,
                     const RatePopularity& popularity);

}  // namespace zanon

#endif  // ZANON_MODEL_H_
