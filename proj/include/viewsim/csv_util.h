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

#ifndef VIEWSIM_CSV_UTIL_H_
#define VIEWSIM_CSV_UTIL_H_

// Small helpers shared by the CSV readers and writers. The files written by
// this project never need quoting, so a line is split on every comma.

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace viewsim::csv {

// Shortest-safe decimal for exact round trips (17 significant digits).
std::string FormatDouble(double x);

std::vector<std::string_view> SplitLine(std::string_view line);

// Reads the header line and checks it column by column. Throws FormatError
// naming the first expected column that is missing or out of place.
void ExpectHeader(std::istream& in, const std::vector<std::string>& columns);

std::string JoinHeader(const std::vector<std::string>& columns);

// Field parsers. `column` and `line` only feed the error message.
int64_t ParseInt(std::string_view field, std::string_view column, int line);
double ParseDouble(std::string_view field, std::string_view column, int line);
bool ParseBool01(std::string_view field, std::string_view column, int line);

// Splits `line` and checks the field count.
std::vector<std::string_view> SplitRow(std::string_view line, size_t expected,
                                       int line_number);

}  // namespace viewsim::csv

#endif  // VIEWSIM_CSV_UTIL_H_
