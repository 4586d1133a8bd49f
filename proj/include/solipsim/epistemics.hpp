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
 * Observational records, reasoning chains and their audit.
 *
 * Events are evaluated on the global state after a given number of executed
 * steps. An agent reasons from the state collapsed onto its own record
 * (sps_collapse); rule Q reads Born probabilities off that state and rule C
 * reuses the conclusions of an imagined agent's chain.
 */

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "solipsim/hilbert.hpp"
#include "solipsim/scenarios.hpp"

namespace solipsim {

inline constexpr double kCertainty = 1.0 - 1e-10;

enum class Provenance { observed, inferred, imagined };

[[nodiscard]] std::string to_string(Provenance p);

struct RecordEntry {
    std::string observable;
    std::string value;
    /// Index of the measure-and-record step that produced the value.
    std::size_t step = 0;
    Provenance provenance = Provenance::observed;
};

/// Single-valued map from observable id to value.
class ObservationalRecord {
  public:
    explicit ObservationalRecord(std::string agent = {}) : agent_(std::move(agent)) {}
    ObservationalRecord(std::string agent, std::vector<RecordEntry> entries);

    /// Adding a second value for an existing observable throws
    /// InvariantViolation; repeating the same value is a no-op.
    ObservationalRecord &add(RecordEntry entry);

    [[nodiscard]] const std::string &agent() const { return agent_; }
    [[nodiscard]] const std::vector<RecordEntry> &entries() const { return entries_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] std::optional<std::string> value_of(const std::string &observable) const;

    /// Entries of `other` are appended with provenance `tag`, ordered by step.
    /// Throws ImpossibleEvent when the two records disagree on an observable.
    [[nodiscard]] ObservationalRecord merged(const ObservationalRecord &other,
                                            Provenance tag = Provenance::imagined) const;

  private:
    std::string agent_;
    std::vector<RecordEntry> entries_;
};

/// Checks every observed entry against the agent table of `bundle`.
void validate_record(const ScenarioBundle &bundle, const ObservationalRecord &record);

struct Event {
    std::string description;
    ProjectiveMeasurement measurement;
    std::string label;
    /// Number of executed steps at which the measurement is evaluated.
    std::size_t step = 0;
};

/// Event "the memory of the agent owning `observable` holds `value`".
[[nodiscard]] Event record_event(const ScenarioBundle &bundle, const std::string &observable,
                                 const std::string &value, std::size_t step);

struct Premise {
    Event event;
    Provenance provenance = Provenance::inferred;
    /// Observable id backing an observed premise.
    std::string observable;
};

struct Conclusion {
    Event event;
    double probability = 1.0;

    [[nodiscard]] bool certain() const { return probability >= kCertainty; }
};

enum class Rule { Q, C };
/// A C step either attributes a record to the imagined agent or inherits one
/// of the imagined agent's conclusions.
enum class CKind { attribute, inherit };

struct ReasoningChain;

struct Inference {
    std::string id;
    Rule rule = Rule::Q;
    CKind c_kind = CKind::inherit;
    std::vector<Premise> premises;
    Conclusion conclusion;
    std::shared_ptr<const ReasoningChain> sub_chain;
    /// Index into sub_chain->steps of the inherited conclusion.
    std::optional<std::size_t> inherited;
    bool intinf = false;

    [[nodiscard]] std::string rule_name() const;
};

struct ReasoningChain {
    std::string agent;
    ObservationalRecord record;
    std::size_t at_step = 0;
    std::vector<Inference> steps;
    std::optional<bool> transmissively_stable;
};

/// Global state after `at_step` steps, conditioned on every entry of the
/// record. Throws ImpossibleEvent for an inconsistent record.
[[nodiscard]] PureState sps_collapse(const ScenarioBundle &bundle, const ObservationalRecord &record,
                                     std::size_t at_step);

/// Probability of `event` given the state reached after `state_step` steps.
/// Later events are reached by evolving forward; earlier ones are read off
/// the given state, and are Unevaluable when a preparation has since reset
/// one of their registers.
[[nodiscard]] double event_probability(const Protocol &p, const PureState &state, std::size_t state_step,
                                       const Event &event);

/// Born probability of a future event under the agent's collapsed state.
[[nodiscard]] double infer_q(const ScenarioBundle &bundle, const ObservationalRecord &record, std::size_t at_step,
                             const Event &event);

[[nodiscard]] bool check_premise_sps(const ScenarioBundle &bundle, const ObservationalRecord &record,
                                     std::size_t at_step, const Premise &premise);

struct InferCResult {
    std::vector<Inference> inferences;
    /// The union of records was inconsistent; results use the outer record.
    bool conflict = false;
    std::string note;
};

/// Recomputes the conclusions of `inner` (a chain template carrying the
/// imagined record) as the outer agent would inherit them. With intinf the
/// outer record is injected into the imagined one and everything is
/// evaluated at `outer_at_step`.
[[nodiscard]] InferCResult infer_c(const ScenarioBundle &bundle, const ObservationalRecord &outer_record,
                                   std::size_t outer_at_step, const ReasoningChain &inner, bool intinf);

enum class Soundness { unevaluated, sound, unsound, scripted };

[[nodiscard]] std::string to_string(Soundness s);

struct AuditVerdict {
    std::string inference_id;
    std::string agent;
    std::string rule;
    std::string conclusion;
    double asserted = 1.0;
    double derived = 1.0;
    bool certainty = true;
    bool premises_hold = true;
    bool self_state_holds = true;
    bool sps_compliant = true;
    bool scripted = false;
    Soundness empirically_sound = Soundness::unevaluated;
    std::optional<bool> disclosure_sound;
    std::string note;
};

/// True when a later measure-and-record step targets the agent's memory with
/// projectors that do not commute with its computational basis.
[[nodiscard]] bool is_scripted(const ScenarioBundle &bundle, const std::string &agent);

/// State from which the conclusion of `chain.steps[index]` is derived, on the
/// layout after `chain.at_step` steps.
[[nodiscard]] PureState derivation_state(const ScenarioBundle &bundle, const ReasoningChain &chain,
                                         std::size_t index);

[[nodiscard]] std::vector<AuditVerdict> audit_chain(const ScenarioBundle &bundle, const ReasoningChain &chain);

/// The three chains of the four-agent experiment.
struct FrChains {
    std::shared_ptr<const ReasoningChain> fbar;
    std::shared_ptr<const ReasoningChain> f;
    std::shared_ptr<const ReasoningChain> wbar;
};

[[nodiscard]] FrChains build_fr_chains(const ScenarioBundle &bundle);

} // namespace solipsim
