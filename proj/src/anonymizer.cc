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

#include "zanon/anonymizer.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace zanon {

void ZAnonConfig::Validate() const {
  if (z < 1) {
    throw std::invalid_argument("z must be >= 1");
  }
  if (!std::isfinite(delta_t) || delta_t <= 0.0) {
    throw std::invalid_argument("delta_t must be a positive finite duration");
  }
  if (!std::isfinite(clock_slack) || clock_slack < 0.0) {
    throw std::invalid_argument("clock_slack must be >= 0");
  }
}

Anonymizer::Anonymizer(ZAnonConfig config) : config_(config) {
  config_.Validate();
  if (config_.initial_capacity > 0) {
    table_.reserve(config_.initial_capacity);
  }
}

std::optional<Decision> Anonymizer::Process(const Observation& observation) {
  if (!std::isfinite(observation.time) || observation.time < 0.0) {
    throw std::invalid_argument(
        "observation time must be finite and non-negative");
  }
  if (observation.user.empty() || observation.attribute.empty()) {
    throw std::invalid_argument("observation tokens must be non-empty");
  }

  if (has_last_seen_ &&
      observation.time < last_seen_time_ - config_.clock_slack) {
    ++stats_.rejected;
    return std::nullopt;
  }
  ++stats_.observations_in;

  // A late record within the slack is handled at the stream's current
  // logical time; the window never rewinds.
  const double now = has_last_seen_
                         ? std::max(observation.time, last_seen_time_)
                         : observation.time;
  last_seen_time_ = now;
  has_last_seen_ = true;

  auto table_it = table_.find(std::string_view(observation.attribute));
  if (table_it == table_.end()) {
    table_it = table_.try_emplace(observation.attribute).first;
    table_it->second.recency_pos = attribute_recency_.insert(
        attribute_recency_.begin(), std::string_view(table_it->first));
  } else {
    attribute_recency_.splice(attribute_recency_.begin(), attribute_recency_,
                              table_it->second.recency_pos);
  }
  AttributeEntry& entry = table_it->second;
  entry.last_update = now;

  auto user_it = entry.users.find(std::string_view(observation.user));
  if (user_it == entry.users.end()) {
    entry.nodes.emplace_front(now, observation.user);
    entry.users.emplace(std::string_view(entry.nodes.front().second),
                        entry.nodes.begin());
    ++node_count_;
    ++stats_.node_insertions;
  } else {
    user_it->second->first = now;
    entry.nodes.splice(entry.nodes.begin(), entry.nodes, user_it->second);
    ++stats_.node_updates;
  }

  EvictAgedNodes(entry, now);

  const int64_t count = static_cast<int64_t>(entry.users.size());
  Decision decision{count >= config_.z ? Verdict::kRelease
                                       : Verdict::kSuppress,
                    count};
  if (decision.verdict == Verdict::kRelease) {
    ++stats_.released;
  } else {
    ++stats_.suppressed;
  }

  // The entry just touched has last_update == now, so it always survives.
  CollectIdleAttributes(now);

  stats_.peak_attribute_count =
      std::max(stats_.peak_attribute_count, table_.size());
  stats_.peak_node_count = std::max(stats_.peak_node_count, node_count_);
  return decision;
}

int64_t Anonymizer::WindowUserCount(std::string_view attribute, double now) {
  auto table_it = table_.find(attribute);
  if (table_it == table_.end()) {
    return 0;
  }
  AttributeEntry& entry = table_it->second;
  EvictAgedNodes(entry, now);
  if (entry.users.empty()) {
    attribute_recency_.erase(entry.recency_pos);
    table_.erase(table_it);
    return 0;
  }
  return static_cast<int64_t>(entry.users.size());
}

void Anonymizer::EvictAgedNodes(AttributeEntry& entry, double now) {
  const double cutoff = now - config_.delta_t;
  // Strict comparison: a node exactly delta_t old still counts.
  while (!entry.nodes.empty() && entry.nodes.back().first < cutoff) {
    entry.users.erase(std::string_view(entry.nodes.back().second));
    entry.nodes.pop_back();
    --node_count_;
    ++stats_.node_evictions;
  }
}

void Anonymizer::CollectIdleAttributes(double now) {
  const double cutoff = now - config_.delta_t;
  while (!attribute_recency_.empty()) {
    auto tail = std::prev(attribute_recency_.end());
    auto table_it = table_.find(*tail);
    AttributeEntry& entry = table_it->second;
    if (entry.last_update >= cutoff) {
      break;
    }
    node_count_ -= entry.nodes.size();
    stats_.node_evictions += entry.nodes.size();
    attribute_recency_.erase(tail);
    table_.erase(table_it);
  }
}

void Anonymizer::CheckInvariants() const {
  size_t total_nodes = 0;
  for (const auto& [attribute, entry] : table_) {
    if (entry.users.size() != entry.nodes.size()) {
      throw std::logic_error("user index size differs from node list size");
    }
    double previous = entry.nodes.empty() ? 0.0 : entry.nodes.front().first;
    for (auto node_it = entry.nodes.begin(); node_it != entry.nodes.end();
         ++node_it) {
      if (node_it->first > previous) {
        throw std::logic_error("recency list not newest-first");
      }
      previous = node_it->first;
      auto user_it = entry.users.find(std::string_view(node_it->second));
      if (user_it == entry.users.end() || user_it->second != node_it) {
        throw std::logic_error("user index does not point at its node");
      }
    }
    if (!entry.nodes.empty() && entry.nodes.front().first > entry.last_update) {
      throw std::logic_error("entry last_update behind its newest node");
    }
    total_nodes += entry.nodes.size();
  }
  if (total_nodes != node_count_) {
    throw std::logic_error("node count out of sync");
  }
  if (attribute_recency_.size() != table_.size()) {
    throw std::logic_error("attribute recency list out of sync with table");
  }
  double previous_update = has_last_seen_ ? last_seen_time_ : 0.0;
  for (std::string_view name : attribute_recency_) {
    auto table_it = table_.find(name);
    if (table_it == table_.end()) {
      throw std::logic_error("recency list names a missing attribute");
    }
    if (table_it->second.recency_pos->data() != name.data()) {
      throw std::logic_error("attribute recency position out of sync");
    }
    if (table_it->second.last_update > previous_update) {
      throw std::logic_error("attribute recency list not newest-first");
    }
    previous_update = table_it->second.last_update;
  }
  if (stats_.released + stats_.suppressed != stats_.observations_in) {
    throw std::logic_error("decision counters do not add up");
  }
  if (stats_.node_evictions > stats_.node_insertions) {
    throw std::logic_error("more evictions than insertions");
  }
}

}  // namespace zanon
