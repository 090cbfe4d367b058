// Copyright 2026 The mdplan Authors
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

#ifndef MDPLAN_PIPELINE_CSV_HPP_
#define MDPLAN_PIPELINE_CSV_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace mdplan::pipeline {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comma-separated table without quoting. Errors name the source and line.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;  // source line of each row

  bool has_column(const std::string& name) const;
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
  std::vector<double> numbers(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source);
CsvTable read_csv(const std::string& path);

}  // namespace mdplan::pipeline

#endif  // MDPLAN_PIPELINE_CSV_HPP_
