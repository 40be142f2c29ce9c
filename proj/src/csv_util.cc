// Copyright 2026 The viewsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "viewsim/csv_util.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "viewsim/errors.h"

namespace viewsim::csv {

namespace {

std::string_view StripCr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::string FormatDouble(double x) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf, n);
}

std::vector<std::string_view> SplitLine(std::string_view line) {
  line = StripCr(line);
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string JoinHeader(const std::vector<std::string>& columns) {
  std::string out;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  return out;
}

void ExpectHeader(std::istream& in, const std::vector<std::string>& columns) {
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("missing header; expected column '" + columns.front() +
                      "'");
  }
  const auto fields = SplitLine(line);
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i >= fields.size() || fields[i] != columns[i]) {
      throw FormatError("header: expected column '" + columns[i] +
                        "' at position " + std::to_string(i) + ", found '" +
                        (i < fields.size() ? std::string(fields[i]) : "") +
                        "'");
    }
  }
  if (fields.size() != columns.size()) {
    throw FormatError("header: unexpected extra column '" +
                      std::string(fields[columns.size()]) + "'");
  }
}

int64_t ParseInt(std::string_view field, std::string_view column, int line) {
  int64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError("column '" + std::string(column) +
                         "': expected an integer, got '" + std::string(field) +
                         "'",
                     line);
  }
  return value;
}

double ParseDouble(std::string_view field, std::string_view column, int line) {
  // std::from_chars for double is not available in every libstdc++ we build
  // against, so go through strtod with a full-consumption check.
  const std::string s(field);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || std::isnan(value)) {
    throw ParseError("column '" + std::string(column) +
                         "': expected a number, got '" + s + "'",
                     line);
  }
  return value;
}

bool ParseBool01(std::string_view field, std::string_view column, int line) {
  if (field == "0") return false;
  if (field == "1") return true;
  throw ParseError("column '" + std::string(column) + "': expected 0 or 1, got '" +
                       std::string(field) + "'",
                   line);
}

std::vector<std::string_view> SplitRow(std::string_view line, size_t expected,
                                       int line_number) {
  auto fields = SplitLine(line);
  if (fields.size() != expected) {
    throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                         std::to_string(fields.size()),
                     line_number);
  }
  return fields;
}

}  // namespace viewsim::csv
