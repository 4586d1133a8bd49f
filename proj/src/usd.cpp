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

#include "solipsim/usd.hpp"

#include <algorithm>
#include <cmath>

#include "solipsim/errors.hpp"

namespace solipsim {

namespace {

Matrix psd_sqrt(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

/// Pure Lbar state correlated with outcome `label` of W's measurement in phi.
std::pair<PureState, double> lbar_branch(const ScenarioBundle &fr, const std::string &label) {
    const auto c = condition(fr.reference("phi").state, fr.measurement("L_okfail"), label);
    const Matrix rho = reduced_density(c.state, fr::lbar_layout().names());
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    if (std::abs(es.eigenvalues()[top] - 1.0) > kEqualityTolerance) {
        throw InvariantViolation("Lbar branch for '" + label + "' is not pure");
    }
    Vector v = es.eigenvectors().col(top);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    v *= std::conj(v[arg]) / std::abs(v[arg]);
    return {PureState(fr::lbar_layout(), v), c.probability};
}

} // namespace

void DiscriminationInstance::validate() const {
    if (!(state_a.layout() == state_b.layout())) {
        throw InvariantViolation("discrimination states live on different layouts");
    }
    if (prior_a < 0.0 || prior_b < 0.0 || std::abs(prior_a + prior_b - 1.0) > kStructuralTolerance) {
        throw InvariantViolation("priors must be nonnegative and sum to 1");
    }
}

Povm::Povm(RegisterLayout target, std::vector<std::pair<std::string, Matrix>> effects)
    : target_(std::move(target)), effects_(std::move(effects)) {
    const auto d = static_cast<Eigen::Index>(target_.total_dim());
    Matrix total = Matrix::Zero(d, d);
    for (const auto &[label, e] : effects_) {
        if (e.rows() != d || e.cols() != d) {
            throw DimensionError("effect '" + label + "' has the wrong shape");
        }
        if (max_abs(e - e.adjoint()) > kEqualityTolerance) {
            throw InvariantViolation("effect '" + label + "' is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(e);
        if (es.eigenvalues().minCoeff() < -kEqualityTolerance) {
            throw InvariantViolation("effect '" + label + "' is not positive semidefinite");
        }
        total += e;
    }
    if (max_abs(total - Matrix::Identity(d, d)) > kEqualityTolerance) {
        throw InvariantViolation("effects do not sum to the identity");
    }
}

const Matrix &Povm::effect(const std::string &label) const {
    for (const auto &[l, e] : effects_) {
        if (l == label) {
            return e;
        }
    }
    throw MalformedInput("unknown effect '" + label + "'");
}

double Povm::probability(const PureState &state, const std::string &label) const {
    if (!(state.layout() == target_)) {
        throw DimensionError("state does not live on the POVM's target");
    }
    return std::max(0.0, state.amplitudes().dot(effect(label) * state.amplitudes()).real());
}

DiscriminationInstance build_fr_usd_instance() {
    const ScenarioBundle fr = build_fr();
    auto [a, pa] = lbar_branch(fr, fr::kOk);
    auto [b, pb] = lbar_branch(fr, fr::kFail);
    DiscriminationInstance inst{std::move(a), std::move(b), pa, pb};
    inst.validate();
    return inst;
}

UsdStrategy usd_strategy(const DiscriminationInstance &instance, double q_a) {
    instance.validate();
    const double s = instance.overlap();
    if (s >= 1.0 - kStructuralTolerance) {
        throw ImpossibleEvent("parallel states admit no error-free discrimination");
    }
    const double s2 = s * s;
    if (q_a < s2 - kStructuralTolerance || q_a > 1.0 + kStructuralTolerance) {
        throw MalformedInput("failure probability outside the error-free range");
    }
    q_a = std::clamp(q_a, s2, 1.0);
    const double q_b = s2 == 0.0 ? 0.0 : std::min(1.0, s2 / q_a);

    const Vector &a = instance.state_a.amplitudes();
    const Vector &b = instance.state_b.amplitudes();
    const Complex ab = b.dot(a);  // <b|a>
    Vector b_perp = a - ab * b;
    b_perp /= b_perp.norm();
    Vector a_perp = b - std::conj(ab) * a;
    a_perp /= a_perp.norm();

    const double c_a = (1.0 - q_a) / (1.0 - s2);
    const double c_b = (1.0 - q_b) / (1.0 - s2);
    const auto d = static_cast<Eigen::Index>(instance.state_a.layout().total_dim());
    const Matrix e_a = c_a * (b_perp * b_perp.adjoint());
    const Matrix e_b = c_b * (a_perp * a_perp.adjoint());
    const Matrix e_q = Matrix::Identity(d, d) - e_a - e_b;
    Povm povm(instance.state_a.layout(), {{kGuessA, e_a}, {kGuessB, e_b}, {kInconclusive, e_q}});
    const double inconclusive = instance.prior_a * povm.probability(instance.state_a, kInconclusive) +
                                instance.prior_b * povm.probability(instance.state_b, kInconclusive);
    return {std::move(povm), inconclusive, q_a, q_b, b_perp, a_perp};
}

UsdStrategy optimal_usd(const DiscriminationInstance &instance) {
    instance.validate();
    const double s = instance.overlap();
    if (s >= 1.0 - kStructuralTolerance) {
        throw ImpossibleEvent("parallel states admit no error-free discrimination");
    }
    const double s2 = s * s;
    double q_a = 0.0;
    if (instance.prior_a == 0.0) {
        q_a = 1.0;
    } else if (instance.prior_b == 0.0) {
        q_a = s2;
    } else {
        q_a = std::clamp(s * std::sqrt(instance.prior_b / instance.prior_a), s2, 1.0);
    }
    return usd_strategy(instance, q_a);
}

UsdPrediction usd_predictions(const std::string &outcome_label) {
    if (outcome_label == kGuessB) {
        return {outcome_label, fr::kFail, true, "Lbar is not in |hbar>; therefore w=fail"};
    }
    if (outcome_label == kGuessA) {
        return {outcome_label, fr::kOk, true, "Lbar is not in sqrt(1/5)|hbar>+sqrt(4/5)|tbar>; therefore w=ok"};
    }
    if (outcome_label == kInconclusive) {
        return {outcome_label, "", false, "uncertain about the outcome of W's measurement"};
    }
    throw MalformedInput("unknown discrimination outcome '" + outcome_label + "'");
}

std::vector<UsdEndToEnd> usd_end_to_end(const ScenarioBundle &fr, const UsdStrategy &strategy) {
    const auto &effects = strategy.povm.effects();
    const RegisterLayout &target = strategy.povm.target();
    const RegisterLayout out_layout = target.appended({"O", effects.size()});
    const auto d = static_cast<Eigen::Index>(target.total_dim());
    const auto k_count = static_cast<Eigen::Index>(effects.size());
    Matrix v = Matrix::Zero(d * k_count, d);
    std::vector<std::string> labels;
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const Matrix root = psd_sqrt(effects[static_cast<std::size_t>(k)].second);
        for (Eigen::Index i = 0; i < d; ++i) {
            v.row(i * k_count + k) = root.row(i);
        }
        labels.push_back(effects[static_cast<std::size_t>(k)].first);
    }
    auto steps = fr.protocol.steps();
    steps.at(fr::kWbarStep) = Step{ApplyIsometry{Isometry(target, out_layout, v), target.names()}, "n:30"};
    const Protocol p(fr.protocol.layout(), std::move(steps));
    const PureState final_state = run_unitary(p);
    const auto o_meas = ProjectiveMeasurement::computational({"O", effects.size()}, labels);
    const auto w_meas = memory_measurement(p, fr::kWStep);
    const PureState before = run_prefix(p, fr::kWbarStep);

    std::vector<UsdEndToEnd> out;
    for (const auto &label : labels) {
        UsdEndToEnd r;
        r.outcome = label;
        r.predicted_w = usd_predictions(label).w;
        r.outcome_probability = born_probability(final_state, o_meas, label);
        Distribution w = born(final_state, w_meas);
        if (r.outcome_probability >= kImpossibleThreshold) {
            w = born(condition(final_state, o_meas, label).state, w_meas);
        } else if (label != kInconclusive) {
            r.limit = true;
            const Vector &dir = label == kGuessA ? strategy.direction_a : strategy.direction_b;
            const auto support = ProjectiveMeasurement::from_vectors(target, {{"support", {dir}}}, std::string("rest"));
            const auto c = condition(before, support, "support");
            w = born(evolve(p, c.state, fr::kWbarStep + 1, p.size()), w_meas);
        }
        r.p_w_ok = w.at(fr::kOk);
        r.p_w_fail = w.at(fr::kFail);
        out.push_back(r);
    }
    return out;
}

} // namespace solipsim
