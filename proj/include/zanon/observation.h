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

#ifndef ZANON_OBSERVATION_H_
#define ZANON_OBSERVATION_H_

#include <string>

namespace zanon {

// One stream event: user `user` exposed attribute value `attribute` at
// `time` (seconds). Tokens are opaque and must be non-empty; time must be
// finite and non-negative.
struct Observation {
  double time = 0.0;
  std::string user;
  std::string attribute;

  friend bool operator==(const Observation&, const Observation&) = default;
};

}  // namespace zanon

#endif  // ZANON_OBSERVATION_H_
