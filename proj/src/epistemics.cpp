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

#include "solipsim/epistemics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "solipsim/errors.hpp"

namespace solipsim {

namespace {

const AgentInfo &agent_for_observable(const ScenarioBundle &bundle, const std::string &observable) {
    for (const auto &a : bundle.agents) {
        if (a.observable == observable) {
            return a;
        }
    }
    throw MalformedInput("no agent records observable '" + observable + "'");
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

/// Records whose union feeds an intinf derivation of chain.steps[index].
ObservationalRecord records_along(const ReasoningChain &chain, std::size_t index) {
    const Inference &inf = chain.steps.at(index);
    if (inf.rule == Rule::C && inf.c_kind == CKind::inherit && inf.sub_chain && inf.inherited) {
        return chain.record.merged(records_along(*inf.sub_chain, *inf.inherited));
    }
    if (inf.rule == Rule::C && inf.sub_chain) {
        return chain.record.merged(inf.sub_chain->record);
    }
    return chain.record;
}

PureState derivation(const ScenarioBundle &bundle, const ReasoningChain &chain, std::size_t index,
                     std::optional<bool> intinf_override) {
    const Inference &inf = chain.steps.at(index);
    if (inf.rule == Rule::Q || inf.c_kind == CKind::attribute) {
        return sps_collapse(bundle, chain.record, chain.at_step);
    }
    if (!inf.sub_chain || !inf.inherited || *inf.inherited >= inf.sub_chain->steps.size()) {
        throw MalformedInput("inference '" + inf.id + "' inherits from no valid step");
    }
    const bool intinf = intinf_override.value_or(inf.intinf);
    if (intinf) {
        try {
            return sps_collapse(bundle, records_along(chain, index), chain.at_step);
        } catch (const ImpossibleEvent &) {
            return sps_collapse(bundle, chain.record, chain.at_step);
        }
    }
    const ReasoningChain &inner = *inf.sub_chain;
    if (inner.at_step > chain.at_step) {
        throw MalformedInput("inference '" + inf.id + "' imagines a chain later than the reasoning agent");
    }
    const PureState s = derivation(bundle, inner, *inf.inherited, intinf_override);
    return evolve(bundle.protocol, s, inner.at_step, chain.at_step);
}

double trace_distance(const Matrix &a, const Matrix &b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::observed:
        return "observed";
    case Provenance::inferred:
        return "inferred";
    case Provenance::imagined:
        return "imagined";
    }
    return "?";
}

std::string to_string(Soundness s) {
    switch (s) {
    case Soundness::unevaluated:
        return "unevaluated";
    case Soundness::sound:
        return "sound";
    case Soundness::unsound:
        return "unsound";
    case Soundness::scripted:
        return "scripted";
    }
    return "?";
}

std::string Inference::rule_name() const {
    if (rule == Rule::Q) {
        return "Q";
    }
    return c_kind == CKind::attribute ? "C-attribute" : "C-inherit";
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

ObservationalRecord::ObservationalRecord(std::string agent, std::vector<RecordEntry> entries)
    : agent_(std::move(agent)) {
    for (auto &e : entries) {
        add(std::move(e));
    }
}

ObservationalRecord &ObservationalRecord::add(RecordEntry entry) {
    if (const auto existing = value_of(entry.observable)) {
        if (*existing != entry.value) {
            throw InvariantViolation("record of '" + agent_ + "' already holds " + entry.observable + "=" + *existing +
                                     "; cannot also hold " + entry.value);
        }
        return *this;
    }
    entries_.push_back(std::move(entry));
    return *this;
}

std::optional<std::string> ObservationalRecord::value_of(const std::string &observable) const {
    for (const auto &e : entries_) {
        if (e.observable == observable) {
            return e.value;
        }
    }
    return std::nullopt;
}

ObservationalRecord ObservationalRecord::merged(const ObservationalRecord &other, Provenance tag) const {
    std::vector<RecordEntry> all = entries_;
    for (auto e : other.entries_) {
        if (const auto mine = value_of(e.observable)) {
            if (*mine != e.value) {
                throw ImpossibleEvent("records disagree on " + e.observable + ": " + *mine + " vs " + e.value);
            }
            continue;
        }
        e.provenance = tag;
        all.push_back(std::move(e));
    }
    std::stable_sort(all.begin(), all.end(), [](const RecordEntry &a, const RecordEntry &b) {
        return a.step != b.step ? a.step < b.step : a.observable < b.observable;
    });
    return ObservationalRecord(agent_, std::move(all));
}

void validate_record(const ScenarioBundle &bundle, const ObservationalRecord &record) {
    for (const auto &e : record.entries()) {
        const AgentInfo &a = agent_for_observable(bundle, e.observable);
        if (std::find(a.labels.begin(), a.labels.end(), e.value) == a.labels.end()) {
            throw MalformedInput("'" + e.value + "' is not a value of " + e.observable);
        }
        if (e.step != a.step) {
            throw MalformedInput(e.observable + " is recorded at step " + std::to_string(a.step) + ", not " +
                                 std::to_string(e.step));
        }
        if (e.provenance == Provenance::observed && a.name != record.agent()) {
            throw MalformedInput("observed entry " + e.observable + " does not belong to '" + record.agent() + "'");
        }
    }
}

Event record_event(const ScenarioBundle &bundle, const std::string &observable, const std::string &value,
                   std::size_t step) {
    const AgentInfo &a = agent_for_observable(bundle, observable);
    return {observable + "=" + value, memory_measurement(bundle.protocol, a.step), value, step};
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

PureState sps_collapse(const ScenarioBundle &bundle, const ObservationalRecord &record, std::size_t at_step) {
    validate_record(bundle, record);
    PureState s = run_prefix(bundle.protocol, at_step);
    for (const auto &e : record.entries()) {
        if (e.step >= at_step) {
            throw MalformedInput(e.observable + " is recorded at step " + std::to_string(e.step) +
                                 ", not before step " + std::to_string(at_step));
        }
        const AgentInfo &a = agent_for_observable(bundle, e.observable);
        try {
            s = condition(s, memory_measurement(bundle.protocol, a.step), e.value).state;
        } catch (const ImpossibleEvent &) {
            throw ImpossibleEvent("record entry " + e.observable + "=" + e.value + " is inconsistent with the rest");
        }
    }
    return s;
}

double event_probability(const Protocol &p, const PureState &state, std::size_t state_step, const Event &event) {
    if (event.step > p.size() || state_step > p.size()) {
        throw MalformedInput("event '" + event.description + "' lies beyond the protocol");
    }
    const auto names = event.measurement.target_names();
    if (event.step >= state_step) {
        return born_probability(evolve(p, state, state_step, event.step), event.measurement, event.label);
    }
    for (std::size_t i = event.step; i < state_step; ++i) {
        if (const auto *prep = std::get_if<Prepare>(&p.steps()[i].action)) {
            if (std::find(names.begin(), names.end(), prep->reg) != names.end()) {
                throw Unevaluable("event '" + event.description + "': register '" + prep->reg +
                                  "' was reset at step " + std::to_string(i));
            }
        }
    }
    for (const auto &n : names) {
        if (!state.layout().contains(n)) {
            throw Unevaluable("event '" + event.description + "': register '" + n + "' does not exist");
        }
    }
    return born_probability(state, event.measurement, event.label);
}

double infer_q(const ScenarioBundle &bundle, const ObservationalRecord &record, std::size_t at_step,
               const Event &event) {
    return event_probability(bundle.protocol, sps_collapse(bundle, record, at_step), at_step, event);
}

bool check_premise_sps(const ScenarioBundle &bundle, const ObservationalRecord &record, std::size_t at_step,
                       const Premise &premise) {
    if (premise.provenance == Provenance::observed) {
        const auto v = record.value_of(premise.observable);
        if (!v) {
            throw MalformedInput("observed premise '" + premise.event.description + "' is not in the record of '" +
                                 record.agent() + "'");
        }
        if (*v != premise.event.label) {
            return false;
        }
    }
    return infer_q(bundle, record, at_step, premise.event) >= kCertainty;
}

InferCResult infer_c(const ScenarioBundle &bundle, const ObservationalRecord &outer_record, std::size_t outer_at_step,
                     const ReasoningChain &inner, bool intinf) {
    InferCResult result;
    for (std::size_t j = 0; j < inner.steps.size(); ++j) {
        Inference out = inner.steps[j];
        out.intinf = intinf;
        if (!intinf) {
            out.conclusion.probability = event_probability(
                bundle.protocol, derivation(bundle, inner, j, false), inner.at_step, out.conclusion.event);
        } else {
            PureState s = PureState::blank(bundle.protocol.layout());
            try {
                s = sps_collapse(bundle, outer_record.merged(records_along(inner, j)), outer_at_step);
            } catch (const ImpossibleEvent &) {
                result.conflict = true;
                result.note = "conflict: outer perspective upheld";
                s = sps_collapse(bundle, outer_record, outer_at_step);
            }
            out.conclusion.probability = event_probability(bundle.protocol, s, outer_at_step, out.conclusion.event);
        }
        result.inferences.push_back(std::move(out));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Audit
// ---------------------------------------------------------------------------

bool is_scripted(const ScenarioBundle &bundle, const std::string &agent_name) {
    const AgentInfo &a = bundle.agent(agent_name);
    const auto &steps = bundle.protocol.steps();
    for (std::size_t i = a.step + 1; i < steps.size(); ++i) {
        const auto *m = steps[i].measure();
        if (m == nullptr) {
            continue;
        }
        const auto &target = m->measurement.target();
        if (!target.contains(a.memory)) {
            continue;
        }
        const Register mem{a.memory, target.dim(a.memory)};
        for (std::size_t k = 0; k < mem.dim; ++k) {
            Matrix q = Matrix::Identity(1, 1);
            for (const auto &r : target.registers()) {
                Matrix f = Matrix::Identity(static_cast<Eigen::Index>(r.dim), static_cast<Eigen::Index>(r.dim));
                if (r.name == a.memory) {
                    f.setZero();
                    f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
                }
                q = kron(q, f);
            }
            for (const auto &o : m->measurement.outcomes()) {
                if (max_abs(o.projector * q - q * o.projector) > kEqualityTolerance) {
                    return true;
                }
            }
        }
    }
    return false;
}

PureState derivation_state(const ScenarioBundle &bundle, const ReasoningChain &chain, std::size_t index) {
    return derivation(bundle, chain, index, std::nullopt);
}

std::vector<AuditVerdict> audit_chain(const ScenarioBundle &bundle, const ReasoningChain &chain) {
    validate_record(bundle, chain.record);
    const AgentInfo &agent = bundle.agent(chain.agent);
    const bool scripted = is_scripted(bundle, chain.agent);
    const auto own_value = chain.record.value_of(agent.observable);
    std::vector<AuditVerdict> verdicts;
    for (std::size_t i = 0; i < chain.steps.size(); ++i) {
        const Inference &inf = chain.steps[i];
        AuditVerdict v;
        v.inference_id = inf.id;
        v.agent = chain.agent;
        v.rule = inf.rule_name();
        v.conclusion = inf.conclusion.event.description;
        v.asserted = inf.conclusion.probability;
        v.certainty = inf.conclusion.certain();
        v.scripted = scripted;
        v.empirically_sound = scripted ? Soundness::scripted : Soundness::unevaluated;
        std::vector<std::string> notes;

        for (const auto &premise : inf.premises) {
            if (!check_premise_sps(bundle, chain.record, chain.at_step, premise)) {
                v.premises_hold = false;
                const double p = infer_q(bundle, chain.record, chain.at_step, premise.event);
                notes.push_back("premise " + premise.event.description + " holds with probability " + fmt(p));
            }
        }

        const PureState d = derivation_state(bundle, chain, i);
        v.derived = event_probability(bundle.protocol, d, chain.at_step, inf.conclusion.event);
        if (own_value) {
            const Matrix rho = reduced_density(d, {agent.memory});
            const auto mem_meas = memory_measurement(bundle.protocol, agent.step);
            const double dist = trace_distance(rho, mem_meas.projector(*own_value));
            if (dist > kEqualityTolerance) {
                v.self_state_holds = false;
                notes.push_back("derivation leaves own record " + agent.observable + "=" + *own_value +
                                " indefinite (trace distance " + fmt(dist) + ")");
            }
        }
        const bool consistent = std::abs(v.derived - v.asserted) <= kEqualityTolerance;
        if (!consistent) {
            notes.push_back("derivation gives probability " + fmt(v.derived));
        }
        v.sps_compliant = v.premises_hold && v.self_state_holds && consistent;
        if (notes.empty()) {
            v.note = "compliant";
        } else {
            for (std::size_t n = 0; n < notes.size(); ++n) {
                v.note += (n ? "; " : "") + notes[n];
            }
        }
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

// ---------------------------------------------------------------------------
// FR chains
// ---------------------------------------------------------------------------

FrChains build_fr_chains(const ScenarioBundle &b) {
    const std::size_t fbar_at = fr::kFbarStep + 2;
    const std::size_t f_at = fr::kFStep + 1;
    const std::size_t wbar_at = fr::kWbarStep + 1;

    const Event w_fail{"w=fail", b.measurement("w"), fr::kFail, fr::kWStep};
    const Event w_ok{"w=ok", b.measurement("w"), fr::kOk, fr::kWStep};
    Event w_recorded_fail = record_event(b, "w", fr::kFail, fr::kWStep + 1);
    w_recorded_fail.description = "W records w=fail";
    const Event r_tails = record_event(b, "r", fr::kTails, fr::kFbarStep + 1);
    Event fbar_holds_tails = record_event(b, "r", fr::kTails, fbar_at);
    fbar_holds_tails.description = "Fbar holds r=tails";
    const Event z_half = record_event(b, "z", fr::kPlusHalf, f_at);

    auto observed = [&](const std::string &observable, const std::string &value, std::size_t at) {
        return Premise{record_event(b, observable, value, at), Provenance::observed, observable};
    };
    auto inferred = [](const Conclusion &c) { return Premise{c.event, Provenance::inferred, {}}; };

    auto fbar = std::make_shared<ReasoningChain>();
    fbar->agent = "Fbar";
    fbar->record = ObservationalRecord("Fbar", {{"r", fr::kTails, fr::kFbarStep}});
    fbar->at_step = fbar_at;
    fbar->transmissively_stable = true;
    {
        Inference q1{"Fbar1", Rule::Q, CKind::inherit, {observed("r", fr::kTails, fbar_at)}, {w_fail, 1.0}, nullptr,
                     std::nullopt, false};
        Inference q2{"Fbar2", Rule::Q, CKind::inherit, {observed("r", fr::kTails, fbar_at)}, {w_recorded_fail, 1.0},
                     nullptr, std::nullopt, false};
        fbar->steps = {q1, q2};
    }

    auto f = std::make_shared<ReasoningChain>();
    f->agent = "F";
    f->record = ObservationalRecord("F", {{"z", fr::kPlusHalf, fr::kFStep}});
    f->at_step = f_at;
    f->transmissively_stable = true;
    {
        Inference s1{"F1", Rule::Q, CKind::inherit, {observed("z", fr::kPlusHalf, f_at)}, {r_tails, 1.0}, nullptr,
                     std::nullopt, false};
        Inference s2{"F2", Rule::C, CKind::attribute, {inferred(s1.conclusion)}, {fbar_holds_tails, 1.0}, fbar,
                     std::nullopt, false};
        Inference s3{"F3", Rule::C, CKind::inherit, {inferred(s2.conclusion)}, {w_fail, 1.0}, fbar, 0, false};
        f->steps = {s1, s2, s3};
    }

    FrChains chains{fbar, f, nullptr};
    const auto &wbar_labels = b.agent("Wbar").labels;
    if (std::find(wbar_labels.begin(), wbar_labels.end(), fr::kOk) == wbar_labels.end()) {
        return chains;
    }
    auto wbar = std::make_shared<ReasoningChain>();
    wbar->agent = "Wbar";
    wbar->record = ObservationalRecord("Wbar", {{"wbar", fr::kOk, fr::kWbarStep}});
    wbar->at_step = wbar_at;
    wbar->transmissively_stable = true;
    {
        Inference s1{"Wbar1", Rule::Q, CKind::inherit, {observed("wbar", fr::kOk, wbar_at)}, {z_half, 1.0}, nullptr,
                     std::nullopt, false};
        Inference s2{"Wbar2", Rule::Q, CKind::inherit, {observed("wbar", fr::kOk, wbar_at)}, {w_ok, 0.5}, nullptr,
                     std::nullopt, false};
        Inference s3{"Wbar3", Rule::C, CKind::inherit, {inferred(s1.conclusion)}, {r_tails, 1.0}, f, 0, false};
        Inference s4{"Wbar4", Rule::C, CKind::inherit, {inferred(s3.conclusion)}, {w_fail, 1.0}, f, 2, false};
        wbar->steps = {s1, s2, s3, s4};
    }
    chains.wbar = wbar;
    return chains;
}

} // namespace solipsim
