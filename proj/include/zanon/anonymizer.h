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

#ifndef ZANON_ANONYMIZER_H_
#define ZANON_ANONYMIZER_H_

#include <cstddef>
#include <cstdint>
#include <list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "zanon/observation.h"

namespace zanon {

enum class Verdict { kSuppress, kRelease };

// Outcome for one processed observation. `window_user_count` is the number
// of distinct users (current one included) that exposed the observation's
// attribute within the trailing window, after eviction.
struct Decision {
  Verdict verdict = Verdict::kSuppress;
  int64_t window_user_count = 0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

struct ZAnonConfig {
  // Distinct users required inside the window before a record is released.
  int64_t z = 1;
  // Trailing window length, seconds.
  double delta_t = 1.0;
  // Expected number of concurrently active attributes. Sizing hint only;
  // the table grows on demand regardless.
  size_t initial_capacity = 0;
  // Tolerated timestamp regression, seconds. Records arriving more than
  // this far behind the newest accepted timestamp are rejected.
  double clock_slack = 0.0;

  // Throws std::invalid_argument when a bound is violated.
  void Validate() const;
};

struct AnonymizerStats {
  uint64_t observations_in = 0;
  uint64_t released = 0;
  uint64_t suppressed = 0;
  uint64_t rejected = 0;
  // Node bookkeeping. Every eviction removes a node that exactly one
  // insertion created, so node_evictions <= node_insertions always holds.
  uint64_t node_insertions = 0;
  uint64_t node_updates = 0;
  uint64_t node_evictions = 0;
  size_t peak_attribute_count = 0;
  size_t peak_node_count = 0;
};

// Streaming z-anonymity filter.
//
// Feed time-ordered observations through Process(); each call returns a
// release/suppress verdict for that observation before the next one is
// read (zero delay, no buffering). A record is released iff its attribute
// was exposed by at least z distinct users, the current one included,
// within the closed trailing window [t - delta_t, t]. Suppressed records
// still update the window state.
//
// Resident state is bounded by the attributes and users active within one
// window, not by the totals ever seen: attribute entries whose newest
// observation has aged out of the window are discarded wholesale.
//
// Sequential object: one logical writer calls Process() in stream order.
// Distinct instances are independent and may run in parallel.
class Anonymizer {
 public:
  explicit Anonymizer(ZAnonConfig config);

  Anonymizer(const Anonymizer&) = delete;
  Anonymizer& operator=(const Anonymizer&) = delete;

  // Decides one observation. Returns std::nullopt, leaving all filter
  // state untouched, when the timestamp regresses more than
  // config().clock_slack behind the newest accepted timestamp; such
  // records are counted in stats().rejected. A regression within the
  // slack is processed at the stream's current logical time: the window
  // never moves backwards. Throws std::invalid_argument for observations
  // violating their own invariants (non-finite or negative time, empty
  // tokens).
  std::optional<Decision> Process(const Observation& observation);

  // Distinct users that exposed `attribute` within [now - delta_t, now].
  // Evicts that attribute's aged nodes as a side effect; returns 0 for
  // unknown attributes. Does not advance the stream clock.
  int64_t WindowUserCount(std::string_view attribute, double now);

  const ZAnonConfig& config() const { return config_; }
  const AnonymizerStats& stats() const { return stats_; }

  // Attribute entries currently resident.
  size_t attribute_count() const { return table_.size(); }
  // Resident (time, user) nodes across all attributes.
  size_t node_count() const { return node_count_; }

  // Full structural self-check, O(resident nodes). Throws std::logic_error
  // describing the first violated invariant. Intended for tests.
  void CheckInvariants() const;

 private:
  // Newest-first recency list; each node owns its user token.
  using NodeList = std::list<std::pair<double, std::string>>;
  // Keys view the user strings owned by NodeList nodes (list nodes are
  // address-stable, so the views stay valid until their node is erased).
  using UserIndex =
      std::unordered_map<std::string_view, NodeList::iterator>;

  struct AttributeEntry {
    NodeList nodes;
    UserIndex users;
    // Position in attribute_recency_; views the owning table key.
    std::list<std::string_view>::iterator recency_pos;
    double last_update = 0.0;
  };

  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  using AttributeTable =
      std::unordered_map<std::string, AttributeEntry, StringHash,
                         std::equal_to<>>;

  // Removes nodes older than `now - delta_t` from one entry.
  void EvictAgedNodes(AttributeEntry& entry, double now);
  // Discards whole attribute entries whose newest observation has aged out
  // of the window ending at `now`. Such entries would evict to an empty
  // user set before the next count anyway, so decisions are unaffected;
  // dropping them keeps memory proportional to the active window.
  void CollectIdleAttributes(double now);

  ZAnonConfig config_;
  AnonymizerStats stats_;
  AttributeTable table_;
  // Attributes ordered by last update, newest first. Entries view the
  // table keys.
  std::list<std::string_view> attribute_recency_;
  size_t node_count_ = 0;
  double last_seen_time_ = 0.0;
  bool has_last_seen_ = false;
};

}  // namespace zanon

#endif  // ZANON_ANONYMIZER_H_
