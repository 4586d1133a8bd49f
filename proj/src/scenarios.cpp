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

#include "solipsim/scenarios.hpp"

#include <cmath>

#include "solipsim/errors.hpp"

namespace solipsim {

namespace {

const double kRootHalf = std::sqrt(0.5);

Vector qubit(Complex a, Complex b) {
    Vector v(2);
    v << a, b;
    return v;
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix hadamard() {
    Matrix m(2, 2);
    m << kRootHalf, kRootHalf, kRootHalf, -kRootHalf;
    return m;
}

Matrix projector(const Vector &v) { return v * v.adjoint(); }

/// Controlled operation on (control qubit, target qubit): op0 on control 0,
/// op1 on control 1.
Matrix controlled(const Matrix &op0, const Matrix &op1) {
    return kron(projector(qubit(1, 0)), op0) + kron(projector(qubit(0, 1)), op1);
}

Vector kron_all(std::initializer_list<Vector> parts) {
    Vector out = Vector::Ones(1);
    for (const auto &p : parts) {
        out = kron(out, p);
    }
    return out;
}

template <class T> const T &lookup(const std::map<std::string, T> &m, const std::string &key, const char *what) {
    const auto it = m.find(key);
    if (it == m.end()) {
        throw MalformedInput(std::string("unknown ") + what + " '" + key + "'");
    }
    return it->second;
}

struct FrVectors {
    Vector hbar, tbar, okbar, failbar;
    Vector half, minus_half, ok, fail;
    Vector rec_ok, rec_fail;  // device (x) memory pair for ok / fail
    Vector rec_blank;
};

FrVectors fr_vectors() {
    const auto lbar = fr::lbar_layout();
    const auto l = fr::l_layout();
    FrVectors v;
    v.hbar = basis_vector(lbar, {{"R", 0}, {"Dbar", 0}, {"Fbar", 0}});
    v.tbar = basis_vector(lbar, {{"R", 1}, {"Dbar", 1}, {"Fbar", 1}});
    v.okbar = kRootHalf * (v.hbar - v.tbar);
    v.failbar = kRootHalf * (v.hbar + v.tbar);
    // S: up = 0, down = 1. D and F: -1/2 = 0, +1/2 = 1.
    v.half = basis_vector(l, {{"S", 0}, {"D", 1}, {"F", 1}});
    v.minus_half = basis_vector(l, {{"S", 1}, {"D", 0}, {"F", 0}});
    v.ok = kRootHalf * (v.minus_half - v.half);
    v.fail = kRootHalf * (v.minus_half + v.half);
    v.rec_ok = kron(qubit(1, 0), qubit(1, 0));
    v.rec_fail = kron(qubit(0, 1), qubit(0, 1));
    v.rec_blank = v.rec_ok;
    return v;
}

Vector assemble(const Vector &lbar, const Vector &l, const Vector &ebar_wbar, const Vector &e_w) {
    return kron_all({lbar, l, ebar_wbar, e_w});
}

MeasureRecord fbar_measurement(Coherence c = Coherence::coherent) {
    auto meas = ProjectiveMeasurement::computational({"R", 2}, {fr::kHeads, fr::kTails});
    return {"Fbar", std::move(meas), std::string("Dbar"), "Fbar", c};
}

MeasureRecord f_measurement() {
    const RegisterLayout s{{"S", 2}};
    auto meas = ProjectiveMeasurement::from_vectors(
        s, {{fr::kMinusHalf, {qubit(0, 1)}}, {fr::kPlusHalf, {qubit(1, 0)}}});
    return {"F", std::move(meas), std::string("D"), "F", Coherence::coherent};
}

ProjectiveMeasurement wbar_okfail(const FrVectors &v) {
    return ProjectiveMeasurement::from_vectors(fr::lbar_layout(), {{fr::kOk, {v.okbar}}}, std::string(fr::kFail));
}

ProjectiveMeasurement wbar_ht(const FrVectors &v) {
    return ProjectiveMeasurement::from_vectors(fr::lbar_layout(), {{"t", {v.tbar}}}, std::string("h"));
}

ProjectiveMeasurement w_okfail(const FrVectors &v) {
    return ProjectiveMeasurement::from_vectors(fr::l_layout(), {{fr::kOk, {v.ok}}}, std::string(fr::kFail));
}

std::vector<Step> superagent_steps(const FrVectors &v, const ProjectiveMeasurement &wbar) {
    return {
        {MeasureRecord{"Wbar", wbar, std::string("Ebar"), "Wbar", Coherence::announced}, "n:30"},
        {MeasureRecord{"W", w_okfail(v), std::string("E"), "W", Coherence::announced}, "n:40"},
    };
}

void add_fr_measurements(ScenarioBundle &b, const FrVectors &v) {
    const auto &p = b.protocol;
    for (const auto &agent : b.agents) {
        b.named_measurements.emplace(agent.observable, p.steps()[agent.step].measure()->measurement);
        b.named_measurements.emplace(agent.observable + "_record", memory_measurement(p, agent.step));
    }
    b.named_measurements.emplace("joint", announced_record_measurement(p));
    b.named_measurements.emplace("Lbar_ht", wbar_ht(v));
    b.named_measurements.emplace("Lbar_okfail", wbar_okfail(v));
    b.named_measurements.emplace("L_half", ProjectiveMeasurement::from_vectors(
                                               fr::l_layout(), {{fr::kMinusHalf, {v.minus_half}}, {fr::kPlusHalf, {v.half}}},
                                               std::string("other")));
    b.named_measurements.emplace("L_okfail", w_okfail(v));
}

void add_fr_composites(ScenarioBundle &b, const FrVectors &v) {
    const auto lbar = fr::lbar_layout();
    const auto l = fr::l_layout();
    b.composites.emplace("hbar", PureState(lbar, v.hbar));
    b.composites.emplace("tbar", PureState(lbar, v.tbar));
    b.composites.emplace("okbar", PureState(lbar, v.okbar));
    b.composites.emplace("failbar", PureState(lbar, v.failbar));
    b.composites.emplace("half", PureState(l, v.half));
    b.composites.emplace("minus_half", PureState(l, v.minus_half));
    b.composites.emplace("ok", PureState(l, v.ok));
    b.composites.emplace("fail", PureState(l, v.fail));
}

} // namespace

const AgentInfo &ScenarioBundle::agent(const std::string &agent_name) const {
    for (const auto &a : agents) {
        if (a.name == agent_name) {
            return a;
        }
    }
    throw MalformedInput("unknown agent '" + agent_name + "' in scenario '" + name + "'");
}

bool ScenarioBundle::has_agent(const std::string &agent_name) const {
    for (const auto &a : agents) {
        if (a.name == agent_name) {
            return true;
        }
    }
    return false;
}

const ProjectiveMeasurement &ScenarioBundle::measurement(const std::string &key) const {
    return lookup(named_measurements, key, "measurement");
}

const ReferenceState &ScenarioBundle::reference(const std::string &key) const {
    return lookup(reference_states, key, "reference state");
}

const PureState &ScenarioBundle::composite(const std::string &key) const {
    return lookup(composites, key, "composite vector");
}

std::vector<std::string> failing_references(const ScenarioBundle &bundle) {
    std::vector<std::string> failing;
    for (const auto &[key, ref] : bundle.reference_states) {
        const PureState s = run_prefix(bundle.protocol, ref.prefix);
        if (!(s.layout() == ref.state.layout()) || !states_equal(s, ref.state)) {
            failing.push_back(key);
        }
    }
    return failing;
}

// ---------------------------------------------------------------------------
// FR
// ---------------------------------------------------------------------------

RegisterLayout fr::layout() {
    return {{"R", 2}, {"Dbar", 2}, {"Fbar", 2}, {"S", 2}, {"D", 2},
            {"F", 2}, {"Ebar", 2}, {"Wbar", 2}, {"E", 2}, {"W", 2}};
}

RegisterLayout fr::lbar_layout() { return {{"R", 2}, {"Dbar", 2}, {"Fbar", 2}}; }

RegisterLayout fr::l_layout() { return {{"S", 2}, {"D", 2}, {"F", 2}}; }

ScenarioBundle build_fr(WbarBasis wbar_basis) {
    const FrVectors v = fr_vectors();
    const Vector init = qubit(std::sqrt(1.0 / 3.0), std::sqrt(2.0 / 3.0));
    const bool okfail = wbar_basis == WbarBasis::okfail;

    std::vector<Step> steps{
        {Prepare{"R", init}, "n:00"},
        {fbar_measurement(), "n:10"},
        {ApplyIsometry{Isometry::unitary({{"Fbar", 2}, {"S", 2}}, controlled(pauli_x(), hadamard())), {"Fbar", "S"}},
         "n:10"},
        {Send{"S", "Fbar", "F"}, "n:15"},
        {f_measurement(), "n:20"},
    };
    for (auto &s : superagent_steps(v, okfail ? wbar_okfail(v) : wbar_ht(v))) {
        steps.push_back(std::move(s));
    }
    HaltingPredicate halting;
    if (okfail) {
        halting.required = {{"Wbar", fr::kOk}, {"W", fr::kOk}};
    }
    ScenarioBundle b{okfail ? "fr" : "fr-ht", Protocol(fr::layout(), std::move(steps), halting), {}, {}, {}, {}};
    b.agents = {
        {"Fbar", "Fbar", "r", {fr::kHeads, fr::kTails}, fr::kFbarStep},
        {"F", "F", "z", {fr::kMinusHalf, fr::kPlusHalf}, fr::kFStep},
        {"Wbar", "Wbar", "wbar", okfail ? std::vector<std::string>{fr::kOk, fr::kFail} : std::vector<std::string>{"t", "h"},
         fr::kWbarStep},
        {"W", "W", "w", {fr::kOk, fr::kFail}, fr::kWStep},
    };

    const auto layout = fr::layout();
    const Vector up = qubit(1, 0);
    const Vector down = qubit(0, 1);
    const Vector right = qubit(kRootHalf, kRootHalf);
    const Vector blank_df = kron(up, up);
    const Vector blank4 = v.rec_blank;

    const Vector init_full = assemble(kron(init, kron(up, up)), kron(up, blank_df), blank4, blank4);
    b.reference_states.emplace("init", ReferenceState{PureState(layout, init_full), 1, "n:00"});

    const Vector psi = std::sqrt(1.0 / 3.0) * assemble(v.hbar, kron(down, blank_df), blank4, blank4) +
                       std::sqrt(2.0 / 3.0) * assemble(v.tbar, kron(right, blank_df), blank4, blank4);
    b.reference_states.emplace("psi", ReferenceState{PureState(layout, psi), 3, "n:10"});

    const Vector phi = std::sqrt(1.0 / 3.0) * (assemble(v.hbar, v.minus_half, blank4, blank4) +
                                               assemble(v.tbar, v.minus_half, blank4, blank4) +
                                               assemble(v.tbar, v.half, blank4, blank4));
    b.reference_states.emplace("phi", ReferenceState{PureState(layout, phi), 5, "n:20"});

    if (okfail) {
        const Vector xi =
            std::sqrt(2.0 / 3.0) * (assemble(v.failbar, v.minus_half, v.rec_fail, blank4) +
                                    0.5 * (assemble(v.failbar, v.half, v.rec_fail, blank4) -
                                           assemble(v.okbar, v.half, v.rec_ok, blank4)));
        b.reference_states.emplace("xi", ReferenceState{PureState(layout, xi), 6, "n:30"});

        const Vector zeta = std::sqrt(1.0 / 12.0) * (assemble(v.okbar, v.ok, v.rec_ok, v.rec_ok) -
                                                     assemble(v.okbar, v.fail, v.rec_ok, v.rec_fail) +
                                                     assemble(v.failbar, v.ok, v.rec_fail, v.rec_ok) +
                                                     3.0 * assemble(v.failbar, v.fail, v.rec_fail, v.rec_fail));
        b.reference_states.emplace("zeta", ReferenceState{PureState(layout, zeta), 7, "n:40"});
    }
    add_fr_measurements(b, v);
    add_fr_composites(b, v);
    return b;
}

ScenarioBundle build_fr_alt_prep() {
    const FrVectors v = fr_vectors();
    const Vector s_init = qubit(std::sqrt(1.0 / 3.0), std::sqrt(2.0 / 3.0));
    std::vector<Step> steps{
        {Prepare{"S", s_init}, "n:00"},
        {f_measurement(), "n:10"},
        // F's record controls R: +1/2 flips R to tails, -1/2 rotates it
        // into an equal superposition.
        {ApplyIsometry{Isometry::unitary({{"F", 2}, {"R", 2}}, controlled(hadamard(), pauli_x())), {"F", "R"}}, "n:10"},
        {Send{"R", "F", "Fbar"}, "n:15"},
        {fbar_measurement(), "n:20"},
    };
    for (auto &s : superagent_steps(v, wbar_okfail(v))) {
        steps.push_back(std::move(s));
    }
    HaltingPredicate halting{{{"Wbar", fr::kOk}, {"W", fr::kOk}}};
    ScenarioBundle b{"fr-alt-prep", Protocol(fr::layout(), std::move(steps), halting), {}, {}, {}, {}};
    b.agents = {
        {"F", "F", "z", {fr::kMinusHalf, fr::kPlusHalf}, 1},
        {"Fbar", "Fbar", "r", {fr::kHeads, fr::kTails}, 4},
        {"Wbar", "Wbar", "wbar", {fr::kOk, fr::kFail}, fr::kWbarStep},
        {"W", "W", "w", {fr::kOk, fr::kFail}, fr::kWStep},
    };
    const auto layout = fr::layout();
    const Vector blank4 = v.rec_blank;
    const Vector phi = std::sqrt(1.0 / 3.0) * (assemble(v.hbar, v.minus_half, blank4, blank4) +
                                               assemble(v.tbar, v.minus_half, blank4, blank4) +
                                               assemble(v.tbar, v.half, blank4, blank4));
    b.reference_states.emplace("phi", ReferenceState{PureState(layout, phi), 5, "n:20"});
    const Vector rendering = std::sqrt(1.0 / 3.0) * assemble(v.tbar, v.half, blank4, blank4) +
                             std::sqrt(2.0 / 3.0) * assemble(v.failbar, v.minus_half, blank4, blank4);
    b.reference_states.emplace("rendering", ReferenceState{PureState(layout, rendering), 5, "n:20"});
    add_fr_measurements(b, v);
    add_fr_composites(b, v);
    return b;
}

// ---------------------------------------------------------------------------
// Alice and Bob
// ---------------------------------------------------------------------------

ScenarioBundle build_alice_bob(const ProjectiveMeasurement &bob_basis) {
    if (bob_basis.target().total_dim() != 8) {
        throw DimensionError("Bob's basis must act on an 8-dimensional space, got " +
                             std::to_string(bob_basis.target().total_dim()));
    }
    const RegisterLayout sma{{"S", 2}, {"M", 2}, {"A", 2}};
    if (!(bob_basis.target() == sma)) {
        throw DimensionError("Bob's basis must act on the registers S, M, A");
    }
    const std::size_t outcomes = bob_basis.size();
    const RegisterLayout layout{{"S", 2}, {"M", 2}, {"A", 2}, {"B", outcomes}};
    const Vector plus = qubit(kRootHalf, kRootHalf);
    std::vector<Step> steps{
        {Prepare{"S", plus}, "prepare"},
        {MeasureRecord{"Alice", ProjectiveMeasurement::computational({"S", 2}, {"zero", "one"}), std::string("M"), "A",
                       Coherence::coherent},
         "alice"},
        {MeasureRecord{"Bob", bob_basis, std::nullopt, "B", Coherence::announced}, "bob"},
    };
    ScenarioBundle b{"alice-bob", Protocol(layout, std::move(steps)), {}, {}, {}, {}};
    b.agents = {
        {"Alice", "A", "m", {"zero", "one"}, 1},
        {"Bob", "B", "b", bob_basis.labels(), 2},
    };

    const RegisterLayout sm{{"S", 2}, {"M", 2}};
    const Vector zero = qubit(1, 0);
    const Vector one = qubit(0, 1);
    const Vector phi_plus = kRootHalf * (kron(zero, zero) + kron(one, one));
    const Vector phi_minus = kRootHalf * (kron(zero, zero) - kron(one, one));
    const Vector blank_b = basis_vector(RegisterLayout{{"B", outcomes}}, {});
    const Vector phi = kRootHalf * (kron_all({zero, zero, zero}) + kron_all({one, one, one}));
    const Vector bell = 0.5 * (kron(phi_plus, zero + one) + kron(phi_minus, zero - one));
    b.reference_states.emplace("phi_SMA", ReferenceState{PureState(layout, kron(phi, blank_b)), 2, "alice"});
    b.reference_states.emplace("phi_SMA_bell", ReferenceState{PureState(layout, kron(bell, blank_b)), 2, "alice"});
    b.composites.emplace("phi_plus", PureState(sm, phi_plus));
    b.composites.emplace("phi_minus", PureState(sm, phi_minus));
    b.composites.emplace("phi_SMA", PureState(sma, phi));

    b.named_measurements.emplace("m", b.protocol.steps()[1].measure()->measurement);
    b.named_measurements.emplace("m_record", memory_measurement(b.protocol, 1));
    b.named_measurements.emplace("b", bob_basis);
    b.named_measurements.emplace("b_record", memory_measurement(b.protocol, 2));
    return b;
}

ScenarioBundle build_alice_bob_matched() {
    const RegisterLayout sma{{"S", 2}, {"M", 2}, {"A", 2}};
    return build_alice_bob(ProjectiveMeasurement::from_vectors(
        sma,
        {{"0,0,zero", {basis_vector(sma, {})}}, {"1,1,one", {basis_vector(sma, {{"S", 1}, {"M", 1}, {"A", 1}})}}},
        std::string("other")));
}

ScenarioBundle build_alice_bob_bell() {
    const RegisterLayout sma{{"S", 2}, {"M", 2}, {"A", 2}};
    const Vector zero = qubit(1, 0);
    const Vector one = qubit(0, 1);
    const Vector phi_plus = kRootHalf * (kron(zero, zero) + kron(one, one));
    const Vector phi_minus = kRootHalf * (kron(zero, zero) - kron(one, one));
    return build_alice_bob(ProjectiveMeasurement::from_vectors(
        sma,
        {{"Phi+,+", {kron(phi_plus, kRootHalf * (zero + one))}},
         {"Phi-,-", {kron(phi_minus, kRootHalf * (zero - one))}}},
        std::string("other")));
}

} // namespace solipsim
