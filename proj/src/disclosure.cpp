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

#include "solipsim/disclosure.hpp"

#include <algorithm>
#include <cmath>

#include "solipsim/errors.hpp"

namespace solipsim {

namespace {

/// First step after the agent's own measurement that measures their memory.
std::optional<std::size_t> next_memory_measurement(const ScenarioBundle &bundle, const AgentInfo &a) {
    const auto &steps = bundle.protocol.steps();
    for (std::size_t i = a.step + 1; i < steps.size(); ++i) {
        if (const auto *m = steps[i].measure(); m != nullptr && m->measurement.target().contains(a.memory)) {
            return i;
        }
    }
    return std::nullopt;
}

bool same_measurement(const ProjectiveMeasurement &a, const ProjectiveMeasurement &b) {
    if (!(a.target() == b.target()) || a.labels() != b.labels()) {
        return false;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (max_abs(a.outcomes()[k].projector - b.outcomes()[k].projector) > kStructuralTolerance) {
            return false;
        }
    }
    return true;
}

std::string own_value(const ReasoningChain &chain, const AgentInfo &a) {
    const auto v = chain.record.value_of(a.observable);
    if (!v) {
        throw MalformedInput("chain of '" + chain.agent + "' does not record " + a.observable);
    }
    return *v;
}

} // namespace

DisclosurePoint default_disclosure_point(const ScenarioBundle &bundle, const std::string &agent) {
    const AgentInfo &a = bundle.agent(agent);
    const auto next = next_memory_measurement(bundle, a);
    const std::size_t after = next ? *next - 1 : bundle.protocol.size() - 1;
    return {agent, after, std::nullopt, "G"};
}

Isometry copy_isometry(const ProjectiveMeasurement &basis, const std::string &flag_register) {
    const RegisterLayout &in = basis.target();
    if (in.contains(flag_register)) {
        throw MalformedInput("flag register '" + flag_register + "' is already a target");
    }
    const std::size_t k_count = basis.size();
    const RegisterLayout out = in.appended({flag_register, k_count});
    const auto d = static_cast<Eigen::Index>(in.total_dim());
    const auto kk = static_cast<Eigen::Index>(k_count);
    Matrix v = Matrix::Zero(d * kk, d);
    for (Eigen::Index k = 0; k < kk; ++k) {
        const Matrix &p = basis.outcomes()[static_cast<std::size_t>(k)].projector;
        for (Eigen::Index i = 0; i < d; ++i) {
            v.row(i * kk + k) = p.row(i);
        }
    }
    return Isometry(in, out, std::move(v));
}

DisclosedBundle insert_disclosure(const ScenarioBundle &bundle, const DisclosurePoint &point) {
    const AgentInfo &a = bundle.agent(point.agent);
    const auto &p = bundle.protocol;
    if (point.after_step < a.step || point.after_step >= p.size()) {
        throw MalformedInput("disclosure point " + std::to_string(point.after_step) + " is outside the steps after " +
                             point.agent + "'s measurement");
    }
    if (const auto next = next_memory_measurement(bundle, a); next && point.after_step >= *next) {
        throw MalformedInput("disclosure point " + std::to_string(point.after_step) + " follows step " +
                             std::to_string(*next) + ", which measures " + point.agent + "'s memory");
    }
    const ProjectiveMeasurement basis = point.basis ? *point.basis : memory_measurement(p, a.step);
    const std::size_t position = point.after_step + 1;
    Step copy{ApplyIsometry{copy_isometry(basis, point.flag_register), basis.target_names()}, "disclose"};

    ScenarioBundle out{bundle.name + "+disclosure(" + point.agent + ")", p.with_step_inserted(position, copy),
                       {}, bundle.named_measurements, bundle.composites, bundle.agents};
    for (auto &agent : out.agents) {
        if (agent.step >= position) {
            ++agent.step;
        }
    }
    auto flag = ProjectiveMeasurement::computational({point.flag_register, basis.size()}, basis.labels());
    out.named_measurements.insert_or_assign("flag", flag);
    return {std::move(out), point, position, std::move(flag)};
}

double evaluate_conclusion(const DisclosedBundle &disclosed, const std::string &flag_value, const Event &event) {
    const auto &p = disclosed.bundle.protocol;
    Event mapped = event;
    mapped.step = disclosed.map_step(event.step);
    const std::size_t at = std::max(mapped.step, disclosed.position + 1);
    const PureState s = run_prefix(p, at);
    Conditioned c{0.0, s};
    try {
        c = condition(s, disclosed.flag, flag_value);
    } catch (const ImpossibleEvent &) {
        throw ImpossibleEvent("flag value '" + flag_value + "' has probability 0");
    }
    return event_probability(p, c.state, at, mapped);
}

std::vector<DisclosureVerdict> vdis_oracle(const ScenarioBundle &bundle, const ReasoningChain &chain,
                                           const DisclosurePoint &point) {
    if (chain.agent != point.agent) {
        throw MalformedInput("chain of '" + chain.agent + "' checked against a disclosure of '" + point.agent + "'");
    }
    std::vector<DisclosureVerdict> out;
    if (chain.steps.empty()) {
        return out;
    }
    const DisclosedBundle d = insert_disclosure(bundle, point);
    const std::string flag_value = own_value(chain, bundle.agent(chain.agent));
    for (const auto &inf : chain.steps) {
        DisclosureVerdict v;
        v.inference_id = inf.id;
        v.certainty = inf.conclusion.certain();
        v.probability = evaluate_conclusion(d, flag_value, inf.conclusion.event);
        v.sound = v.certainty ? v.probability >= kCertainty
                              : std::abs(v.probability - inf.conclusion.probability) <= kEqualityTolerance;
        out.push_back(v);
    }
    return out;
}

std::vector<AnnouncedCheck> announced_outcome_check(const ScenarioBundle &bundle, const ReasoningChain &chain,
                                                    std::uint64_t seed, std::uint64_t shots) {
    const auto &p = bundle.protocol;
    const AgentInfo &a = bundle.agent(chain.agent);
    if (!p.steps()[a.step].announced()) {
        throw MalformedInput("'" + chain.agent + "' does not announce an outcome");
    }
    const std::string value = own_value(chain, a);
    const auto memory = memory_measurement(p, a.step);
    const auto announced = p.announced_steps();
    const std::size_t own_slot =
        static_cast<std::size_t>(std::find(announced.begin(), announced.end(), a.step) - announced.begin());

    std::optional<SampleCounts> counts;
    std::vector<AnnouncedCheck> out;
    for (const auto &inf : chain.steps) {
        const Event &e = inf.conclusion.event;
        AnnouncedCheck c;
        c.inference_id = inf.id;
        c.certainty = inf.conclusion.certain();
        const std::size_t at = std::max({e.step, a.step + 1, chain.at_step});
        const auto cond = condition(run_prefix(p, at), memory, value);
        c.exact = event_probability(p, cond.state, at, e);
        c.sound = c.certainty ? c.exact >= kCertainty
                              : std::abs(c.exact - inf.conclusion.probability) <= kEqualityTolerance;

        // Conclusions about another announced outcome can be checked against
        // sampled rounds as well.
        for (std::size_t slot = 0; slot < announced.size() && shots > 0; ++slot) {
            const std::size_t idx = announced[slot];
            const auto *m = p.steps()[idx].measure();
            const bool before = e.step == idx && same_measurement(e.measurement, m->measurement);
            const bool after = e.step > idx && same_measurement(e.measurement, memory_measurement(p, idx));
            if (slot == own_slot || !(before || after)) {
                continue;
            }
            if (!counts) {
                counts = sample_counts(p, seed, shots);
            }
            std::uint64_t given = 0;
            std::uint64_t hit = 0;
            for (const auto &[labels, n] : counts->counts) {
                if (labels[own_slot] == value) {
                    given += n;
                    if (labels[slot] == e.label) {
                        hit += n;
                    }
                }
            }
            c.conditioning_shots = given;
            if (given > 0) {
                const double f = static_cast<double>(hit) / static_cast<double>(given);
                const double q = inf.conclusion.probability;
                c.sampled = f;
                c.standard_error = std::sqrt(q * (1.0 - q) / static_cast<double>(given));
                if (std::abs(f - q) > 3.0 * *c.standard_error + 1e-12) {
                    c.sound = false;
                }
            }
            break;
        }
        out.push_back(c);
    }
    return out;
}

void attach_disclosure(std::vector<AuditVerdict> &verdicts, const std::vector<DisclosureVerdict> &results) {
    for (auto &v : verdicts) {
        for (const auto &r : results) {
            if (r.inference_id == v.inference_id) {
                v.disclosure_sound = r.sound;
            }
        }
    }
}

void attach_announced(std::vector<AuditVerdict> &verdicts, const std::vector<AnnouncedCheck> &results) {
    for (auto &v : verdicts) {
        for (const auto &r : results) {
            if (r.inference_id == v.inference_id && v.empirically_sound != Soundness::scripted) {
                v.empirically_sound = r.sound ? Soundness::sound : Soundness::unsound;
                v.disclosure_sound = r.sound;
            }
        }
    }
}

} // namespace solipsim
