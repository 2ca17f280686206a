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

#include "zanon/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace zanon {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Also normalizes -0 (reachable when a log-domain factor underflows).
double ClampProbability(double p) { return std::clamp(p, 0.0, 1.0) + 0.0; }

void CheckProbability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {  // also rejects NaN
    throw std::invalid_argument(std::string(name) +
                                " must be a probability in [0, 1]");
  }
}

// P[Binomial(n, p) >= m] for 1 <= m <= n and p in (0, 1), with the
// success probability given as log_p (exact even when exp(log_p)
// underflows) and log_q = log(1 - p).
//
// The smaller side of the distribution is summed: below m when m - 1 sits
// under the mean (the result is then 1 - sum), at and above m otherwise.
// Along either direction the terms are monotonically decreasing, so the
// running log-sum-exp can stop once a term no longer moves the
// compensated sum.
double TailCore(int64_t n, double log_p, double log_q, int64_t m) {
  const double log_gamma_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  auto log_term = [&](int64_t i) {
    const double di = static_cast<double>(i);
    const double dni = static_cast<double>(n - i);
    return log_gamma_n1 - std::lgamma(di + 1.0) - std::lgamma(dni + 1.0) +
           di * log_p + dni * log_q;
  };

  // Single-term lower side reduces to 1 - (1-p)^n without cancellation.
  if (m == 1) {
    return ClampProbability(-std::expm1(static_cast<double>(n) * log_q));
  }

  const double mean = static_cast<double>(n) * std::exp(log_p);
  const bool sum_lower_side = static_cast<double>(m - 1) < mean;

  const int64_t start = sum_lower_side ? m - 1 : m;
  const int64_t step = sum_lower_side ? -1 : 1;
  const int64_t last = sum_lower_side ? 0 : n;

  const double log_max = log_term(start);
  if (log_max == -kInf) {
    // Every term on this side vanishes even in the log domain.
    return sum_lower_side ? 1.0 : 0.0;
  }
  double sum = 1.0;  // scaled by exp(-log_max)
  double compensation = 0.0;
  for (int64_t i = start + step; step > 0 ? i <= last : i >= last;
       i += step) {
    const double term = std::exp(log_term(i) - log_max);
    const double adjusted = term - compensation;
    const double next = sum + adjusted;
    compensation = (next - sum) - adjusted;
    sum = next;
    // Terms decay monotonically away from the mode; once one stops
    // registering against the compensated sum the remainder cannot
    // either.
    if (term < sum * 1e-19) {
      break;
    }
  }
  const double side = std::exp(log_max + std::log(sum));
  return ClampProbability(sum_lower_side ? 1.0 - side : side);
}

}  // namespace

void ModelParams::Validate() const {
  if (users < 2) {
    throw std::invalid_argument("users must be >= 2");
  }
  if (attributes < 1) {
    throw std::invalid_argument("attributes must be >= 1");
  }
  if (!std::isfinite(delta_t) || delta_t <= 0.0) {
    throw std::invalid_argument("delta_t must be a positive finite duration");
  }
  if (horizon < 1) {
    throw std::invalid_argument("horizon must be >= 1");
  }
  if (z < 1) {
    throw std::invalid_argument("z must be >= 1");
  }
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1");
  }
}

double ExposureProbability(double rate, double delta_t) {
  if (std::isnan(rate) || rate < 0.0) {
    throw std::invalid_argument("rate must be >= 0");
  }
  if (!std::isfinite(delta_t) || delta_t <= 0.0) {
    throw std::invalid_argument("delta_t must be a positive finite duration");
  }
  // expm1 keeps tiny rate * delta_t from rounding to zero.
  return ClampProbability(-std::expm1(-rate * delta_t));
}

double BinomialTail(int64_t trials, double success_prob,
                    int64_t min_successes) {
  if (trials < 0) {
    throw std::invalid_argument("trials must be >= 0");
  }
  CheckProbability(success_prob, "success_prob");
  if (min_successes < 0 || min_successes > trials + 1) {
    throw std::invalid_argument("min_successes must lie in [0, trials + 1]");
  }
  if (min_successes == 0) {
    return 1.0;
  }
  if (min_successes > trials) {
    return 0.0;
  }
  if (success_prob == 0.0) {
    return 0.0;
  }
  if (success_prob == 1.0) {
    return 1.0;
  }
  return TailCore(trials, std::log(success_prob), std::log1p(-success_prob),
                  min_successes);
}

double BinomialTailFromLog(int64_t trials, double log_success_prob,
                           int64_t min_successes) {
  if (trials < 0) {
    throw std::invalid_argument("trials must be >= 0");
  }
  if (std::isnan(log_success_prob) || log_success_prob > 0.0) {
    throw std::invalid_argument("log_success_prob must be <= 0");
  }
  if (min_successes < 0 || min_successes > trials + 1) {
    throw std::invalid_argument("min_successes must lie in [0, trials + 1]");
  }
  if (min_successes == 0) {
    return 1.0;
  }
  if (min_successes > trials) {
    return 0.0;
  }
  if (log_success_prob == -kInf) {
    return 0.0;
  }
  if (log_success_prob == 0.0) {
    return 1.0;
  }
  // log(1 - p) in whichever form keeps relative precision: -expm1 carries
  // q when p is near 1; log1p(-exp(log_p)) carries it when p is so small
  // that 1 - p would round to 1 and erase it entirely.
  constexpr double kLogHalf = -0.69314718055994531;
  const double log_q =
      log_success_prob > kLogHalf
          ? std::log(-std::expm1(log_success_prob))
          : std::log1p(-std::exp(log_success_prob));
  return TailCore(trials, log_success_prob, log_q, min_successes);
}

double ReleaseProbability(double p_exposure, int64_t users, int64_t z) {
  CheckProbability(p_exposure, "p_exposure");
  if (users < 2) {
    throw std::invalid_argument("users must be >= 2");
  }
  if (z < 1) {
    throw std::invalid_argument("z must be >= 1");
  }
  if (z - 1 > users - 1) {
    return 0.0;
  }
  return BinomialTail(users - 1, p_exposure, z - 1);
}

double PublishProbability(double p_exposure, double p_release) {
  CheckProbability(p_exposure, "p_exposure");
  CheckProbability(p_release, "p_release");
  return ClampProbability(p_exposure * p_release);
}

double HorizonPublishProbability(double p_publish, int64_t horizon) {
  CheckProbability(p_publish, "p_publish");
  if (horizon < 1) {
    throw std::invalid_argument("horizon must be >= 1");
  }
  if (p_publish == 1.0) {
    return 1.0;
  }
  if (horizon == 1) {
    return p_publish;  // identity, bit-exact
  }
  return ClampProbability(
      -std::expm1(static_cast<double>(horizon) * std::log1p(-p_publish)));
}

PairMatch PairMatchProbability(std::span<const double> horizon_probs) {
  double log_sum = 0.0;
  double compensation = 0.0;
  for (double p : horizon_probs) {
    CheckProbability(p, "horizon probability");
    // p^2 + (1-p)^2 = 1 - 2p(1-p); the log1p form keeps factors near 1
    // exact, and with every factor in [1/2, 1] the compensated sum stays
    // accurate across tens of thousands of them.
    const double log_factor = std::log1p(-2.0 * p * (1.0 - p));
    const double adjusted = log_factor - compensation;
    const double next = log_sum + adjusted;
    compensation = (next - log_sum) - adjusted;
    log_sum = next;
  }
  return PairMatch{std::exp(log_sum), log_sum};
}

double KAnonymityProbability(double pair_match, int64_t users, int64_t k) {
  CheckProbability(pair_match, "pair_match");
  if (users < 2) {
    throw std::invalid_argument("users must be >= 2");
  }
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1");
  }
  if (k - 1 > users - 1) {
    return 0.0;
  }
  return BinomialTail(users - 1, pair_match, k - 1);
}

double KAnonymityProbabilityFromLog(double log_pair_match, int64_t users,
                                    int64_t k) {
  if (users < 2) {
    throw std::invalid_argument("users must be >= 2");
  }
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1");
  }
  if (k - 1 > users - 1) {
    return 0.0;
  }
  return BinomialTailFromLog(users - 1, log_pair_match, k - 1);
}

KAnonReport Evaluate(const ModelParams& params,
                     const RatePopularity& popularity) {
  params.Validate();
  popularity.Validate();
  const size_t count = static_cast<size_t>(params.attributes);
  if (popularity.values.size() < count) {
    throw std::invalid_argument(
        "popularity vector shorter than the attribute count");
  }

  KAnonReport report;
  report.params = params;
  report.p_exposure.reserve(count);
  report.p_release.reserve(count);
  report.p_publish.reserve(count);
  report.p_horizon.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    const double value = popularity.values[i];
    const double p_exposure =
        popularity.kind == RatePopularity::Kind::kRates
            ? ExposureProbability(value, params.delta_t)
            : value;
    const double p_release =
        ReleaseProbability(p_exposure, params.users, params.z);
    const double p_publish = PublishProbability(p_exposure, p_release);
    report.p_exposure.push_back(p_exposure);
    report.p_release.push_back(p_release);
    report.p_publish.push_back(p_publish);
    report.p_horizon.push_back(
        HorizonPublishProbability(p_publish, params.horizon));
  }
  report.pair_match = PairMatchProbability(report.p_horizon);
  report.p_k_anon = KAnonymityProbabilityFromLog(report.pair_match.log_value,
                                                 params.users, params.k);
  return report;
}

}  // namespace zanon
