// Copyright 2026 The ionlearn Authors.
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

#ifndef IONLEARN_CSV_HPP
#define IONLEARN_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace ionlearn::csv {

/// %.17g rendering; parse_real(format_real(v)) == v for every finite v.
std::string format_real(double v);
double parse_real(std::string_view text);
long long parse_integer(std::string_view text);

/// Splits one line on commas; trailing '\r' is dropped.
std::vector<std::string_view> split_line(std::string_view line);

}  // namespace ionlearn::csv

#endif  // IONLEARN_CSV_HPP
