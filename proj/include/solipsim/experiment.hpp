// Copyright 2026 The solipsim Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * JSON experiment descriptions: `layout`, `steps` and `halting`, one field
 * per Protocol member.
 *
 * Complex numbers are either a JSON number or a [re, im] pair. Vectors and
 * matrices are arrays (of rows) of such numbers.
 */

#pragma once

#include <string>

#include <json.hpp>

#include "solipsim/scenarios.hpp"

namespace solipsim {

/// Throws MalformedInput with the offending path on any schema violation.
[[nodiscard]] ScenarioBundle parse_experiment(const nlohmann::json &doc, const std::string &name = "custom");
[[nodiscard]] ScenarioBundle load_experiment(const std::string &path);

} // namespace solipsim
