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
 * Virtual disclosure: copy an agent's classical record onto a fresh flag
 * register right after they reason, finish the protocol, and check each
 * conclusion against the flag.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solipsim/epistemics.hpp"
#include "solipsim/scenarios.hpp"

namespace solipsim {

struct DisclosurePoint {
    std::string agent;
    /// Index of the last step executed before the copy.
    std::size_t after_step = 0;
    /// Basis to copy; defaults to the agent's memory in its record basis.
    std::optional<ProjectiveMeasurement> basis;
    std::string flag_register = "G";
};

/// Latest valid point: right before the next step that measures the agent's
/// memory.
[[nodiscard]] DisclosurePoint default_disclosure_point(const ScenarioBundle &bundle, const std::string &agent);

/// V = sum_k P_k (x) |k>_G from the basis target to target + G.
[[nodiscard]] Isometry copy_isometry(const ProjectiveMeasurement &basis, const std::string &flag_register);

struct DisclosedBundle {
    ScenarioBundle bundle;
    DisclosurePoint point;
    /// Position of the copy step in the disclosed protocol.
    std::size_t position = 0;
    ProjectiveMeasurement flag;

    /// Maps an executed-step count of the original protocol.
    [[nodiscard]] std::size_t map_step(std::size_t original) const {
        return original > position ? original + 1 : original;
    }
};

/// Throws MalformedInput when the point lies before the agent's own
/// measurement, at or past a later measurement of the agent's memory, or
/// past the end of the protocol.
[[nodiscard]] DisclosedBundle insert_disclosure(const ScenarioBundle &bundle, const DisclosurePoint &point);

/// P(event | G = flag_value); `event.step` counts steps of the original
/// protocol. Throws ImpossibleEvent when the flag value cannot occur.
[[nodiscard]] double evaluate_conclusion(const DisclosedBundle &disclosed, const std::string &flag_value,
                                         const Event &event);

struct DisclosureVerdict {
    std::string inference_id;
    bool certainty = true;
    double probability = 0.0;
    bool sound = false;
};

/// Certainty conclusions are sound iff the flag of the agent's own record
/// makes them certain; probabilistic ones iff the asserted value is exact.
[[nodiscard]] std::vector<DisclosureVerdict> vdis_oracle(const ScenarioBundle &bundle, const ReasoningChain &chain,
                                                         const DisclosurePoint &point);

struct AnnouncedCheck {
    std::string inference_id;
    bool certainty = true;
    double exact = 0.0;
    /// Present when the conclusion is itself an announced outcome.
    std::optional<double> sampled;
    std::optional<double> standard_error;
    std::uint64_t conditioning_shots = 0;
    bool sound = false;
};

/// Checks a chain of an announcing agent against the actual announcement:
/// exact conditionals from the unitary state and, for announced events,
/// conditional frequencies over `shots` sampled rounds.
[[nodiscard]] std::vector<AnnouncedCheck> announced_outcome_check(const ScenarioBundle &bundle,
                                                                  const ReasoningChain &chain, std::uint64_t seed,
                                                                  std::uint64_t shots);

/// Copies disclosure results into matching audit verdicts.
void attach_disclosure(std::vector<AuditVerdict> &verdicts, const std::vector<DisclosureVerdict> &results);
void attach_announced(std::vector<AuditVerdict> &verdicts, const std::vector<AnnouncedCheck> &results);

} // namespace solipsim
