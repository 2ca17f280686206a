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

#ifndef ZANON_CSV_H_
#define ZANON_CSV_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "zanon/observation.h"
#include "zanon/popularity.h"

namespace zanon {
namespace csv {

// Observation wire format: one `t,u,a` line per record, LF-terminated.
// `t` is decimal seconds with up to microsecond precision; `u` and `a`
// are UTF-8 tokens with ',', '%', LF and CR percent-escaped (%2C, %25,
// %0A, %0D). Lines starting with '#' are comments; an optional leading
// `t,u,a` header row is auto-detected.

// Escapes the characters that would break the line structure.
std::string EscapeToken(std::string_view token);

// Inverse of EscapeToken. Returns std::nullopt on a malformed escape.
std::optional<std::string> UnescapeToken(std::string_view token);

// Decimal seconds with up to six fractional digits, trailing zeros
// trimmed ("5", "5.25", "0.000001"). Values on the microsecond grid
// round-trip exactly through ParseObservationLine.
std::string FormatTime(double t);

// `t,u,a` with tokens escaped; no trailing newline.
std::string FormatObservation(const Observation& observation);

// True for the optional header row.
bool IsObservationHeader(std::string_view line);

// True for '#' comment lines and blank lines, which carry no record.
bool IsIgnorableLine(std::string_view line);

// Parses one record line (not a comment/header). Returns std::nullopt and
// fills *error (if non-null) when the line is malformed: wrong field
// count, unparseable or negative time, empty token, bad escape, or the
// reserved attribute token "*".
std::optional<Observation> ParseObservationLine(std::string_view line,
                                                std::string* error);

// Popularity file format: `# key=value` comment header, optional
// `rank,label,p_x` header row, then one `rank,label,value` row per
// attribute, rank ascending from 1.
void WritePopularityCsv(std::ostream& out, const RatePopularity& popularity,
                        std::string_view comment_header);

// Reads the format above. Values are per-window exposure probabilities
// (kind kExposureProbs) and must lie in [0, 1]; rows are re-sorted by
// value descending so hand-edited files stay usable. Throws
// std::runtime_error on malformed input.
RatePopularity ReadPopularityCsv(std::istream& in);

}  // namespace csv
}  // namespace zanon

#endif  // ZANON_CSV_H_
