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
 * Gedankenexperiments as ordered step lists, executed either fully unitarily
 * or with announced measurements collapsing on sampled outcomes.
 *
 * Every register starts at digit 0, which doubles as the "blank" state of
 * device and memory registers. A measure-and-record step with outcome
 * projectors P_k acts as sum_k P_k (x) X^k (x) X^k on target, device and
 * memory, where X is the cyclic shift, so a blank record ends at digit k.
 */

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "solipsim/hilbert.hpp"

namespace solipsim {

enum class Coherence { coherent, announced };

/// Rotates a blank register into `fragment`.
struct Prepare {
    std::string reg;
    Vector fragment;
};

struct ApplyIsometry {
    Isometry op;
    std::vector<std::string> targets;
};

struct MeasureRecord {
    std::string agent;
    ProjectiveMeasurement measurement;
    std::optional<std::string> device;
    std::string memory;
    Coherence coherence = Coherence::coherent;
};

/// Transfers custody of a register; amplitudes are untouched.
struct Send {
    std::string reg;
    std::string from;
    std::string to;
};

using StepAction = std::variant<Prepare, ApplyIsometry, MeasureRecord, Send>;

struct Step {
    StepAction action;
    std::string time_tag;

    [[nodiscard]] const MeasureRecord *measure() const { return std::get_if<MeasureRecord>(&action); }
    [[nodiscard]] bool announced() const {
        const auto *m = measure();
        return m != nullptr && m->coherence == Coherence::announced;
    }
    [[nodiscard]] std::string kind() const;
};

struct AnnouncedOutcome {
    std::string agent;
    std::string label;

    bool operator==(const AnnouncedOutcome &) const = default;
};

struct RoundTrace {
    std::vector<AnnouncedOutcome> announced;
    std::size_t round = 1;

    [[nodiscard]] std::optional<std::string> label_of(const std::string &agent) const;
};

/// Conjunction of required announced outcomes; an empty conjunction always
/// holds.
struct HaltingPredicate {
    std::vector<AnnouncedOutcome> required;

    [[nodiscard]] bool trivial() const { return required.empty(); }
    [[nodiscard]] bool satisfied_by(const RoundTrace &trace) const;
};

class Protocol {
  public:
    /// Validates every step against the layout as it evolves.
    Protocol(RegisterLayout layout, std::vector<Step> steps, HaltingPredicate halting = {});

    [[nodiscard]] const RegisterLayout &layout() const { return layout_; }
    [[nodiscard]] const std::vector<Step> &steps() const { return steps_; }
    [[nodiscard]] const HaltingPredicate &halting() const { return halting_; }
    [[nodiscard]] std::size_t size() const { return steps_.size(); }

    /// Layout reached after executing the first `count` steps.
    [[nodiscard]] const RegisterLayout &layout_after(std::size_t count) const { return layouts_.at(count); }
    [[nodiscard]] const RegisterLayout &final_layout() const { return layouts_.back(); }
    [[nodiscard]] std::vector<std::size_t> announced_steps() const;
    /// Index of the measure-and-record step performed by `agent`, if any.
    [[nodiscard]] std::optional<std::size_t> measurement_of(const std::string &agent) const;

    [[nodiscard]] Protocol without_announced() const;
    [[nodiscard]] Protocol with_step_replaced(std::size_t index, Step step) const;
    [[nodiscard]] Protocol with_step_inserted(std::size_t position, Step step) const;
    [[nodiscard]] Protocol prefix(std::size_t count) const;

  private:
    RegisterLayout layout_;
    std::vector<Step> steps_;
    HaltingPredicate halting_;
    std::vector<RegisterLayout> layouts_;
};

/// Unitary on targets + device + memory implementing a measure-and-record step.
[[nodiscard]] Isometry record_unitary(const MeasureRecord &step, const RegisterLayout &layout);

/// Blank state over the protocol's initial layout.
[[nodiscard]] PureState initial_state(const Protocol &p);
/// Executes step `index` unitarily. Throws BlankRegisterViolation when a
/// record register is not blank and `check_blank` is set.
[[nodiscard]] PureState apply_step(const Protocol &p, std::size_t index, const PureState &state,
                                   bool check_blank = true);
/// Executes steps [from, to) unitarily.
[[nodiscard]] PureState evolve(const Protocol &p, const PureState &state, std::size_t from, std::size_t to);
[[nodiscard]] PureState run_prefix(const Protocol &p, std::size_t count);
[[nodiscard]] PureState run_unitary(const Protocol &p);

/// Measurement of the memory registers of every announced step, in step
/// order; labels are the joined outcome labels.
[[nodiscard]] ProjectiveMeasurement announced_record_measurement(const Protocol &p);
[[nodiscard]] ProjectiveMeasurement memory_measurement(const Protocol &p, std::size_t step_index);

/// Register custody after the first `count` steps (registers never sent are
/// absent).
[[nodiscard]] std::map<std::string, std::string> custody_after(const Protocol &p, std::size_t count);

/// Samples rounds of a protocol. Coherent steps are applied unitarily; at
/// each announced step an outcome is drawn from the Born distribution and the
/// state is conditioned on it. Branch states are memoized per outcome prefix,
/// so repeated rounds cost one traversal of the outcome tree.
class Sampler {
  public:
    explicit Sampler(Protocol p);
    ~Sampler();
    Sampler(Sampler &&) noexcept;
    Sampler &operator=(Sampler &&) noexcept;

    [[nodiscard]] const Protocol &protocol() const { return protocol_; }
    /// One round drawn from the (seed, stream) sequence.
    [[nodiscard]] RoundTrace sample(std::uint64_t seed, std::uint64_t stream = 0);
    /// Exact probability of a complete announced-outcome sequence.
    [[nodiscard]] double sequence_probability(const std::vector<std::string> &labels);

  private:
    struct Node;
    Node &node(const std::vector<std::size_t> &path);

    Protocol protocol_;
    std::vector<std::size_t> announced_;
    std::map<std::vector<std::size_t>, std::unique_ptr<Node>> nodes_;
};

[[nodiscard]] RoundTrace run_sampled(const Protocol &p, std::uint64_t seed);

struct RoundsOutcome {
    std::optional<std::size_t> halted_at;
    [[nodiscard]] bool exhausted() const { return !halted_at.has_value(); }
};

/// Repeats rounds (round r drawn from stream r - 1) until the halting
/// predicate holds. Throws MalformedInput when max_rounds is 0.
[[nodiscard]] RoundsOutcome run_rounds(Sampler &sampler, std::uint64_t seed, std::size_t max_rounds);
[[nodiscard]] RoundsOutcome run_rounds(const Protocol &p, std::uint64_t seed, std::size_t max_rounds);

/// Counts of announced-outcome tuples over `shots` rounds; shot i uses
/// stream i, so the result does not depend on `workers`.
struct SampleCounts {
    std::vector<std::string> agents;
    std::map<std::vector<std::string>, std::uint64_t> counts;
    std::uint64_t shots = 0;

    [[nodiscard]] std::uint64_t count(const std::vector<std::string> &labels) const;
    bool operator==(const SampleCounts &) const = default;
};

[[nodiscard]] SampleCounts sample_counts(const Protocol &p, std::uint64_t seed, std::uint64_t shots,
                                         unsigned workers = 1);

} // namespace solipsim
