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

#include "zanon/simulator.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace zanon {
namespace {

struct SimEvent {
  double time = 0.0;
  int32_t user = 0;       // 0-based
  int32_t attribute = 0;  // 0-based rank index
  uint64_t sequence = 0;  // per-attribute draw order, for tie-breaking
};

// splitmix64 finalizer; decorrelates the per-attribute RNG substreams
// drawn from consecutive seed offsets.
uint64_t Splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Floors to the microsecond grid, staying within [0, upper).
double QuantizeTime(double t, double upper) {
  const double grid = std::floor(t * 1e6) / 1e6;
  return std::clamp(grid, 0.0, std::nexttoward(upper, 0.0L));
}

double RateForRank(const SimConfig& config, size_t rank_index) {
  const double value = config.rates.values[rank_index];
  if (config.rates.kind == RatePopularity::Kind::kRates) {
    return value;
  }
  // Invert the per-window exposure probability back to a Poisson rate.
  if (value >= 1.0) {
    throw std::invalid_argument(
        "exposure probability 1 has no finite generating rate");
  }
  return -std::log1p(-value) / config.delta_t;
}

std::vector<SimEvent> GenerateEvents(const SimConfig& config) {
  config.Validate();
  const double total_time =
      static_cast<double>(config.horizon) * config.delta_t;
  const size_t attribute_count = static_cast<size_t>(config.attributes);

  std::vector<SimEvent> events;
  for (size_t a = 0; a < attribute_count; ++a) {
    const double rate = RateForRank(config, a);
    const double mean =
        static_cast<double>(config.users) * rate * total_time;
    if (mean <= 0.0) {
      continue;
    }
    std::mt19937_64 rng(Splitmix64(config.seed + static_cast<uint64_t>(a)));
    std::poisson_distribution<int64_t> arrivals(mean);
    std::uniform_int_distribution<int32_t> user(
        0, static_cast<int32_t>(config.users - 1));
    std::uniform_real_distribution<double> when(0.0, total_time);
    const int64_t count = arrivals(rng);
    for (int64_t i = 0; i < count; ++i) {
      events.push_back(SimEvent{QuantizeTime(when(rng), total_time),
                                user(rng), static_cast<int32_t>(a),
                                static_cast<uint64_t>(i)});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const SimEvent& a, const SimEvent& b) {
              if (a.time != b.time) {
                return a.time < b.time;
              }
              if (a.attribute != b.attribute) {
                return a.attribute < b.attribute;
              }
              return a.sequence < b.sequence;
            });
  return events;
}

std::string UserToken(int32_t user) { return "u" + std::to_string(user + 1); }

std::string AttributeToken(const SimConfig& config, int32_t rank_index) {
  if (!config.rates.labels.empty()) {
    return config.rates.labels[static_cast<size_t>(rank_index)];
  }
  return "a" + std::to_string(rank_index + 1);
}

}  // namespace

void SimConfig::Validate() const {
  if (users < 2) {
    throw std::invalid_argument("users must be >= 2");
  }
  if (attributes < 1) {
    throw std::invalid_argument("attributes must be >= 1");
  }
  rates.Validate();
  if (rates.values.size() < static_cast<size_t>(attributes)) {
    throw std::invalid_argument(
        "popularity vector shorter than the attribute count");
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
}

std::vector<Observation> GenerateStream(const SimConfig& config) {
  const std::vector<SimEvent> events = GenerateEvents(config);
  std::vector<Observation> stream;
  stream.reserve(events.size());
  for (const SimEvent& event : events) {
    stream.push_back(Observation{event.time, UserToken(event.user),
                                 AttributeToken(config, event.attribute)});
  }
  return stream;
}

std::vector<Decision> OracleAnonymize(std::span<const Observation> stream,
                                      int64_t z, double delta_t) {
  ZAnonConfig check{.z = z, .delta_t = delta_t};
  check.Validate();
  std::vector<Decision> decisions;
  decisions.reserve(stream.size());
  std::unordered_set<std::string_view> window_users;
  for (size_t i = 0; i < stream.size(); ++i) {
    if (i > 0 && stream[i].time < stream[i - 1].time) {
      throw std::invalid_argument("stream is not time-ordered");
    }
    const double cutoff = stream[i].time - delta_t;
    window_users.clear();
    window_users.insert(stream[i].user);
    for (size_t j = i; j-- > 0;) {
      if (stream[j].time < cutoff) {
        break;
      }
      if (stream[j].attribute == stream[i].attribute) {
        window_users.insert(stream[j].user);
      }
    }
    const int64_t count = static_cast<int64_t>(window_users.size());
    decisions.push_back(Decision{
        count >= z ? Verdict::kRelease : Verdict::kSuppress, count});
  }
  return decisions;
}

EmpiricalReport RunExperiment(const SimConfig& config,
                              std::span<const int64_t> k_values) {
  for (int64_t k : k_values) {
    if (k < 1) {
      throw std::invalid_argument("k values must be >= 1");
    }
  }
  const std::vector<SimEvent> events = GenerateEvents(config);

  Anonymizer engine(ZAnonConfig{
      .z = config.z,
      .delta_t = config.delta_t,
      .initial_capacity = static_cast<size_t>(config.attributes)});

  const int64_t horizon = config.horizon;
  const int64_t attribute_count = config.attributes;
  // Released (user, window, attribute) and (user, attribute) combinations,
  // deduplicated; only released events enter, so these stay small.
  std::unordered_set<uint64_t> published_user_windows;
  std::unordered_set<uint64_t> published_user_attributes;

  Observation observation;
  for (const SimEvent& event : events) {
    observation.time = event.time;
    observation.user = UserToken(event.user);
    observation.attribute = AttributeToken(config, event.attribute);
    const std::optional<Decision> decision = engine.Process(observation);
    // Generated streams are time-ordered, so nothing is ever rejected.
    if (decision->verdict != Verdict::kRelease) {
      continue;
    }
    int64_t window_index =
        static_cast<int64_t>(event.time / config.delta_t);
    window_index = std::clamp<int64_t>(window_index, 0, horizon - 1);
    const uint64_t user_attribute = static_cast<uint64_t>(
        event.user * attribute_count + event.attribute);
    published_user_windows.insert(user_attribute *
                                      static_cast<uint64_t>(horizon) +
                                  static_cast<uint64_t>(window_index));
    published_user_attributes.insert(user_attribute);
  }

  EmpiricalReport report;
  report.stream_stats = engine.stats();

  std::vector<int64_t> publish_counts(
      static_cast<size_t>(attribute_count), 0);
  for (uint64_t key : published_user_windows) {
    const auto attribute =
        static_cast<size_t>((key / static_cast<uint64_t>(horizon)) %
                            static_cast<uint64_t>(attribute_count));
    ++publish_counts[attribute];
  }
  const double user_windows = static_cast<double>(config.users) *
                              static_cast<double>(horizon);
  report.empirical_publish.reserve(publish_counts.size());
  for (int64_t count : publish_counts) {
    report.empirical_publish.push_back(static_cast<double>(count) /
                                       user_windows);
  }

  report.user_fingerprints.assign(static_cast<size_t>(config.users), {});
  for (uint64_t key : published_user_attributes) {
    const auto user = static_cast<size_t>(
        key / static_cast<uint64_t>(attribute_count));
    const auto attribute = static_cast<int32_t>(
        key % static_cast<uint64_t>(attribute_count));
    report.user_fingerprints[user].push_back(attribute);
  }
  std::map<std::vector<int32_t>, int64_t> class_sizes;
  for (std::vector<int32_t>& fingerprint : report.user_fingerprints) {
    std::sort(fingerprint.begin(), fingerprint.end());
    ++class_sizes[fingerprint];
  }

  report.k_anon_fraction.reserve(k_values.size());
  for (int64_t k : k_values) {
    int64_t covered = 0;
    for (const auto& [fingerprint, size] : class_sizes) {
      if (size >= k) {
        covered += size;
      }
    }
    report.k_anon_fraction.emplace_back(
        k, static_cast<double>(covered) / static_cast<double>(config.users));
  }
  return report;
}

}  // namespace zanon
