// Copyright 2026 The Dissim Authors
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

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dissim/amplitude.hpp"
#include "dissim/device.hpp"
#include "dissim/hilbert.hpp"

namespace dissim {

// 17-significant-digit decimal form; round-trips exactly and is stable
// across runs (data files carry no locale or timestamp dependence).
std::string format_double(double value);

nlohmann::json scattering_to_json(const ScatteringMatrix& s);
ScatteringMatrix scattering_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const ReciprocityReport& report);
nlohmann::json state_to_json(const DeviceState& state);

// Minimal CSV emitter: header row, LF line endings, '.' decimal separator.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  const std::string& text() const { return text_; }
  void write_file(const std::string& path) const;

 private:
  size_t columns_;
  std::string text_;
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace dissim
