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

#include "zanon/csv.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace zanon {
namespace csv {
namespace {

bool NeedsEscape(char c) {
  return c == ',' || c == '%' || c == '\n' || c == '\r';
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') {
    return c - '0';
  }
  if (c >= 'A' && c <= 'F') {
    return c - 'A' + 10;
  }
  if (c >= 'a' && c <= 'f') {
    return c - 'a' + 10;
  }
  return -1;
}

void SetError(std::string* error, std::string_view message) {
  if (error != nullptr) {
    *error = message;
  }
}

std::string_view StripCarriageReturn(std::string_view line) {
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  return line;
}

// Splits on raw commas; escaped field content never contains one.
std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t begin = 0;
  while (true) {
    const size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

}  // namespace

std::string EscapeToken(std::string_view token) {
  std::string escaped;
  escaped.reserve(token.size());
  static constexpr char kHex[] = "0123456789ABCDEF";
  for (char c : token) {
    if (NeedsEscape(c)) {
      const auto byte = static_cast<unsigned char>(c);
      escaped.push_back('%');
      escaped.push_back(kHex[byte >> 4]);
      escaped.push_back(kHex[byte & 0xF]);
    } else {
      escaped.push_back(c);
    }
  }
  return escaped;
}

std::optional<std::string> UnescapeToken(std::string_view token) {
  std::string raw;
  raw.reserve(token.size());
  for (size_t i = 0; i < token.size(); ++i) {
    if (token[i] != '%') {
      raw.push_back(token[i]);
      continue;
    }
    if (i + 2 >= token.size()) {
      return std::nullopt;
    }
    const int high = HexValue(token[i + 1]);
    const int low = HexValue(token[i + 2]);
    if (high < 0 || low < 0) {
      return std::nullopt;
    }
    raw.push_back(static_cast<char>((high << 4) | low));
    i += 2;
  }
  return raw;
}

std::string FormatTime(double t) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", t);
  std::string text(buffer);
  const size_t dot = text.find('.');
  size_t last = text.find_last_not_of('0');
  if (last == dot) {
    --last;
  }
  text.erase(last + 1);
  return text;
}

std::string FormatObservation(const Observation& observation) {
  std::string line = FormatTime(observation.time);
  line.push_back(',');
  line += EscapeToken(observation.user);
  line.push_back(',');
  line += EscapeToken(observation.attribute);
  return line;
}

bool IsObservationHeader(std::string_view line) {
  return StripCarriageReturn(line) == "t,u,a";
}

bool IsIgnorableLine(std::string_view line) {
  line = StripCarriageReturn(line);
  const size_t content = line.find_first_not_of(" \t");
  return content == std::string_view::npos || line[content] == '#';
}

std::optional<Observation> ParseObservationLine(std::string_view line,
                                                std::string* error) {
  line = StripCarriageReturn(line);
  const std::vector<std::string_view> fields = SplitFields(line);
  if (fields.size() != 3) {
    SetError(error, "expected 3 comma-separated fields");
    return std::nullopt;
  }

  double time = 0.0;
  const auto [end, ec] =
      std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(),
                      time);
  if (ec != std::errc() || end != fields[0].data() + fields[0].size()) {
    SetError(error, "unparseable timestamp");
    return std::nullopt;
  }
  if (!std::isfinite(time) || time < 0.0) {
    SetError(error, "timestamp must be finite and non-negative");
    return std::nullopt;
  }

  std::optional<std::string> user = UnescapeToken(fields[1]);
  std::optional<std::string> attribute = UnescapeToken(fields[2]);
  if (!user || !attribute) {
    SetError(error, "bad percent escape");
    return std::nullopt;
  }
  if (user->empty() || attribute->empty()) {
    SetError(error, "tokens must be non-empty");
    return std::nullopt;
  }
  if (*attribute == "*") {
    SetError(error, "attribute token '*' is reserved for blurred records");
    return std::nullopt;
  }
  return Observation{time, std::move(*user), std::move(*attribute)};
}

void WritePopularityCsv(std::ostream& out, const RatePopularity& popularity,
                        std::string_view comment_header) {
  popularity.Validate();
  if (!comment_header.empty()) {
    out << "# " << comment_header << "\n";
  }
  out << "rank,label,p_x\n";
  char buffer[64];
  for (size_t i = 0; i < popularity.values.size(); ++i) {
    const std::string label = popularity.labels.empty()
                                  ? "a" + std::to_string(i + 1)
                                  : popularity.labels[i];
    std::snprintf(buffer, sizeof(buffer), "%.17g", popularity.values[i]);
    out << (i + 1) << ',' << EscapeToken(label) << ',' << buffer << "\n";
  }
}

RatePopularity ReadPopularityCsv(std::istream& in) {
  RatePopularity popularity;
  popularity.kind = RatePopularity::Kind::kExposureProbs;
  std::vector<std::pair<std::string, double>> rows;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = StripCarriageReturn(line);
    if (IsIgnorableLine(view) || view == "rank,label,p_x") {
      continue;
    }
    const std::vector<std::string_view> fields = SplitFields(view);
    if (fields.size() != 3) {
      throw std::runtime_error("popularity file line " +
                               std::to_string(line_number) +
                               ": expected rank,label,p_x");
    }
    std::optional<std::string> label = UnescapeToken(fields[1]);
    if (!label || label->empty()) {
      throw std::runtime_error("popularity file line " +
                               std::to_string(line_number) + ": bad label");
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(
        fields[2].data(), fields[2].data() + fields[2].size(), value);
    if (ec != std::errc() || end != fields[2].data() + fields[2].size() ||
        !(value >= 0.0 && value <= 1.0)) {
      throw std::runtime_error("popularity file line " +
                               std::to_string(line_number) +
                               ": p_x must be in [0, 1]");
    }
    rows.emplace_back(std::move(*label), value);
  }
  if (rows.empty()) {
    throw std::runtime_error("popularity file contains no rows");
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  popularity.values.reserve(rows.size());
  popularity.labels.reserve(rows.size());
  for (auto& [label, value] : rows) {
    popularity.labels.push_back(std::move(label));
    popularity.values.push_back(value);
  }
  return popularity;
}

}  // namespace csv
}  // namespace zanon
