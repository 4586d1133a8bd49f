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
 * The casino game built on the four-agent round: the gambler W is paid if
 * r=heads. Disputes over a round are settled by a fixed rule table that
 * reuses the audit and disclosure machinery.
 */

#pragma once

#include <string>
#include <vector>

#include "solipsim/epistemics.hpp"
#include "solipsim/protocol.hpp"
#include "solipsim/scenarios.hpp"

namespace solipsim {

enum class CasinoCheck {
    /// Look up the audit verdict of one of the party's inferences.
    sps_audit,
    /// P(flag = value | announced outcomes) under another agent's disclosure.
    disclosure_compatibility,
    /// The party's memory is coherently measured later on.
    agency,
};

struct CasinoRule {
    std::string party;
    /// Claimed value of r.
    std::string claim;
    /// Announced outcomes under which the party makes the claim.
    std::vector<AnnouncedOutcome> when;
    CasinoCheck check = CasinoCheck::agency;
    std::string inference_id;
    std::string disclosed_agent;
};

struct Casino {
    ScenarioBundle bundle;
    FrChains chains;
    std::vector<CasinoRule> rules;
};

struct DisputeEntry {
    std::string party;
    std::string claim;
    std::string finding;
    bool flagged = false;
};

struct DisputeReport {
    std::vector<AnnouncedOutcome> trace;
    bool dispute = false;
    std::vector<DisputeEntry> entries;
    std::string ruling;
};

[[nodiscard]] Casino build_casino();

/// A dispute arises when the claims that apply to the trace disagree.
[[nodiscard]] DisputeReport arbitrate(const Casino &casino, const RoundTrace &trace);

} // namespace solipsim
