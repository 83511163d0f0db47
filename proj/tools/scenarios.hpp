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

namespace dissim::scenarios {

struct ScenarioResult {
  std::string name;
  std::vector<std::string> files;   // paths written, relative to out dir
  nlohmann::json metrics;           // headline metrics; keys are stable
};

// Known scenario names, in canonical order.
const std::vector<std::string>& scenario_names();

// Run one named scenario, writing its data files under out_dir/<name>/.
ScenarioResult run_scenario(const std::string& name, const std::string& out_dir);

}  // namespace dissim::scenarios
