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
 * Command-line front end: `solipsim run <scenario> --mode <mode> ...`.
 *
 * Reports are built as ordered JSON and rendered either as JSON (17
 * significant digits, fixed field order) or as indented text.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace solipsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char *kReportSchema = "report/v1";
inline constexpr const char *kVersion = "0.1.0";

struct RunConfig {
    std::string scenario;
    std::string mode = "unitary";
    std::uint64_t seed = 0;
    /// Unset means the mode's default.
    std::optional<std::uint64_t> shots;
    std::string output = "text";
    /// agent, after-step, wbar-basis, intinf, experiment, max-rounds, workers.
    std::map<std::string, std::string> options;
};

struct ParseOutcome {
    std::optional<RunConfig> config;
    int exit_code = kExitOk;
    /// Help text or diagnostic.
    std::string message;
};

[[nodiscard]] const std::vector<std::string> &scenario_names();
[[nodiscard]] const std::vector<std::string> &mode_names();
[[nodiscard]] std::vector<std::string> modes_for(const std::string &scenario);

/// Arguments exclude the program name.
[[nodiscard]] ParseOutcome parse_args(const std::vector<std::string> &args);

struct Report {
    nlohmann::ordered_json json;
    int exit_code = kExitOk;
};

/// Throws solipsim::Error subclasses on failure; MalformedInput marks bad
/// user input.
[[nodiscard]] Report execute(const RunConfig &config);

[[nodiscard]] std::string to_json_text(const nlohmann::ordered_json &j);
[[nodiscard]] std::string to_text(const nlohmann::ordered_json &j);

/// Full CLI: parse, execute, render. Returns the process exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace solipsim
