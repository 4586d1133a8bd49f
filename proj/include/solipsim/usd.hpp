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
 * Unambiguous discrimination of two pure states, and its use as Wbar's
 * measurement in the four-agent experiment.
 */

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "solipsim/hilbert.hpp"
#include "solipsim/scenarios.hpp"

namespace solipsim {

struct DiscriminationInstance {
    PureState state_a;
    PureState state_b;
    double prior_a = 0.5;
    double prior_b = 0.5;

    /// Throws InvariantViolation on bad priors or mismatched layouts.
    void validate() const;
    [[nodiscard]] double overlap() const { return std::abs(inner(state_a, state_b)); }
};

class Povm {
  public:
    Povm(RegisterLayout target, std::vector<std::pair<std::string, Matrix>> effects);

    [[nodiscard]] const RegisterLayout &target() const { return target_; }
    [[nodiscard]] const std::vector<std::pair<std::string, Matrix>> &effects() const { return effects_; }
    [[nodiscard]] const Matrix &effect(const std::string &label) const;
    [[nodiscard]] double probability(const PureState &state, const std::string &label) const;

  private:
    RegisterLayout target_;
    std::vector<std::pair<std::string, Matrix>> effects_;
};

inline constexpr const char *kGuessA = "guess-a";
inline constexpr const char *kGuessB = "guess-b";
inline constexpr const char *kInconclusive = "inconclusive";

struct UsdStrategy {
    Povm povm;
    double inconclusive = 0.0;
    /// Failure probability on each input state.
    double q_a = 0.0;
    double q_b = 0.0;
    /// Unit vectors spanning the guess-a and guess-b effects.
    Vector direction_a;
    Vector direction_b;
};

/// The two Lbar states correlated with W's ok and fail outcomes in |phi>.
[[nodiscard]] DiscriminationInstance build_fr_usd_instance();

/// Error-free strategy with failure probability q_a on state a and
/// overlap^2 / q_a on state b. Throws MalformedInput when q_a is outside
/// [overlap^2, 1].
[[nodiscard]] UsdStrategy usd_strategy(const DiscriminationInstance &instance, double q_a);

/// Minimizes the prior-weighted inconclusive probability. Throws
/// ImpossibleEvent for parallel states.
[[nodiscard]] UsdStrategy optimal_usd(const DiscriminationInstance &instance);

struct UsdPrediction {
    std::string outcome;
    /// W's predicted outcome, empty when uncertain.
    std::string w;
    bool certain = false;
    std::string statement;
};

[[nodiscard]] UsdPrediction usd_predictions(const std::string &outcome_label);

struct UsdEndToEnd {
    std::string outcome;
    double outcome_probability = 0.0;
    /// W's predicted outcome, empty when uncertain.
    std::string predicted_w;
    double p_w_ok = 0.0;
    double p_w_fail = 0.0;
    /// The outcome never occurs; conditionals are the limit along the
    /// effect's support.
    bool limit = false;
};

/// Replaces Wbar's measurement in `fr` by the Naimark isometry of the
/// strategy (outcome register "O"), completes the round and conditions.
[[nodiscard]] std::vector<UsdEndToEnd> usd_end_to_end(const ScenarioBundle &fr, const UsdStrategy &strategy);

} // namespace solipsim
