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
 * Builders for the canonical experiments: Alice and Bob, the four-agent
 * Wigner's-friend round and its alternative preparation.
 *
 * FR register layout, in order: R, Dbar, Fbar (the lab Lbar), S, D, F (the
 * lab L), Ebar, Wbar, E, W. All are qubits.
 */

#pragma once

#include <map>
#include <string>
#include <vector>

#include "solipsim/hilbert.hpp"
#include "solipsim/protocol.hpp"

namespace solipsim {

struct AgentInfo {
    std::string name;
    std::string memory;
    /// Observable id under which the agent's record stores its outcome.
    std::string observable;
    std::vector<std::string> labels;
    /// Index of the agent's measure-and-record step.
    std::size_t step = 0;
};

struct ReferenceState {
    PureState state;
    /// Number of executed steps after which the state is reached.
    std::size_t prefix = 0;
    std::string time_tag;
};

struct ScenarioBundle {
    std::string name;
    Protocol protocol;
    std::map<std::string, ReferenceState> reference_states;
    std::map<std::string, ProjectiveMeasurement> named_measurements;
    /// Composite basis vectors on sub-layouts (for example hbar on R Dbar Fbar).
    std::map<std::string, PureState> composites;
    std::vector<AgentInfo> agents;

    [[nodiscard]] const AgentInfo &agent(const std::string &name) const;
    [[nodiscard]] bool has_agent(const std::string &name) const;
    [[nodiscard]] const ProjectiveMeasurement &measurement(const std::string &name) const;
    [[nodiscard]] const ReferenceState &reference(const std::string &name) const;
    [[nodiscard]] const PureState &composite(const std::string &name) const;
};

/// Names of reference states whose prefix run does not reproduce them.
[[nodiscard]] std::vector<std::string> failing_references(const ScenarioBundle &bundle);

/// Bob's measurement must act on the qubits S, M, A (8 dimensions); Bob
/// records the outcome in a fresh memory B. Throws DimensionError otherwise.
[[nodiscard]] ScenarioBundle build_alice_bob(const ProjectiveMeasurement &bob_basis);
/// Alice–Bob with Bob's basis {|0,0,zero>, |1,1,one>, rest}.
[[nodiscard]] ScenarioBundle build_alice_bob_matched();
/// Alice–Bob with Bob's basis {Phi+ (x) |+>_A, Phi- (x) |->_A, rest}.
[[nodiscard]] ScenarioBundle build_alice_bob_bell();

enum class WbarBasis { okfail, ht };

[[nodiscard]] ScenarioBundle build_fr(WbarBasis wbar_basis = WbarBasis::okfail);
[[nodiscard]] ScenarioBundle build_fr_alt_prep();

/// Label vectors of the FR composite systems, on their own sub-layouts.
namespace fr {
inline constexpr const char *kHeads = "heads";
inline constexpr const char *kTails = "tails";
inline constexpr const char *kMinusHalf = "-1/2";
inline constexpr const char *kPlusHalf = "+1/2";
inline constexpr const char *kOk = "ok";
inline constexpr const char *kFail = "fail";

[[nodiscard]] RegisterLayout layout();
[[nodiscard]] RegisterLayout lbar_layout();
[[nodiscard]] RegisterLayout l_layout();
/// Step index of each agent's measurement in build_fr.
inline constexpr std::size_t kFbarStep = 1;
inline constexpr std::size_t kFStep = 4;
inline constexpr std::size_t kWbarStep = 5;
inline constexpr std::size_t kWStep = 6;
} // namespace fr

} // namespace solipsim
