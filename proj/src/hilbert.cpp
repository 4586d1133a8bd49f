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

#include "solipsim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "solipsim/errors.hpp"

namespace solipsim {

namespace {

// Flat offsets of every multi-index over `positions` (row-major in the listed
// order), measured against `layout` strides.
std::vector<std::size_t> group_offsets(const RegisterLayout &layout,
                                       const std::vector<std::size_t> &positions) {
    const auto strides = layout.strides();
    std::vector<std::size_t> offsets{0};
    for (std::size_t pos : positions) {
        const std::size_t d = layout.registers()[pos].dim;
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * d);
        for (std::size_t base : offsets) {
            for (std::size_t k = 0; k < d; ++k) {
                next.push_back(base + k * strides[pos]);
            }
        }
        offsets = std::move(next);
    }
    return offsets;
}

std::vector<std::size_t> complement_positions(const RegisterLayout &layout,
                                              const std::vector<std::size_t> &positions) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (std::find(positions.begin(), positions.end(), i) == positions.end()) {
            rest.push_back(i);
        }
    }
    return rest;
}

std::vector<std::size_t> resolve(const RegisterLayout &layout,
                                 const std::vector<std::string> &names) {
    std::vector<std::size_t> positions;
    positions.reserve(names.size());
    for (const auto &n : names) {
        const std::size_t p = layout.position(n);
        if (std::find(positions.begin(), positions.end(), p) != positions.end()) {
            throw DimensionError("register '" + n + "' listed twice");
        }
        positions.push_back(p);
    }
    return positions;
}

void check_target_dims(const RegisterLayout &state_layout, const std::vector<std::string> &names,
                       const RegisterLayout &expected) {
    if (names.size() != expected.size()) {
        throw DimensionError("expected " + std::to_string(expected.size()) + " target registers, got " +
                             std::to_string(names.size()));
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (state_layout.dim(names[i]) != expected.registers()[i].dim) {
            throw DimensionError("register '" + names[i] + "' has dimension " +
                                 std::to_string(state_layout.dim(names[i])) + ", operator expects " +
                                 std::to_string(expected.registers()[i].dim));
        }
    }
}

// Gathers the target sub-vector at each rest offset.
template <typename Fn>
void for_each_block(const Vector &amps, const std::vector<std::size_t> &rest,
                    const std::vector<std::size_t> &target, Fn &&fn) {
    Vector block(static_cast<Eigen::Index>(target.size()));
    for (std::size_t r : rest) {
        for (std::size_t j = 0; j < target.size(); ++j) {
            block[static_cast<Eigen::Index>(j)] = amps[static_cast<Eigen::Index>(r + target[j])];
        }
        fn(r, block);
    }
}

void apply_projector_local(const PureState &state, const ProjectiveMeasurement &meas, std::size_t k,
                           Vector &out) {
    const auto &layout = state.layout();
    check_target_dims(layout, meas.target_names(), meas.target());
    const auto positions = resolve(layout, meas.target_names());
    const auto target = group_offsets(layout, positions);
    const auto rest = group_offsets(layout, complement_positions(layout, positions));
    const Matrix &p = meas.outcomes()[k].projector;
    out = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    for_each_block(state.amplitudes(), rest, target, [&](std::size_t r, const Vector &block) {
        const Vector y = p * block;
        for (std::size_t j = 0; j < target.size(); ++j) {
            out[static_cast<Eigen::Index>(r + target[j])] = y[static_cast<Eigen::Index>(j)];
        }
    });
}

void check_projector_family(const RegisterLayout &target, const std::vector<MeasurementOutcome> &outcomes) {
    const auto d = static_cast<Eigen::Index>(target.total_dim());
    if (outcomes.empty()) {
        throw InvariantViolation("measurement needs at least one outcome");
    }
    Matrix sum = Matrix::Zero(d, d);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto &[label, p] = outcomes[i];
        if (!seen.insert(label).second) {
            throw InvariantViolation("duplicate outcome label '" + label + "'");
        }
        if (p.rows() != d || p.cols() != d) {
            throw DimensionError("projector for '" + label + "' has the wrong shape");
        }
        if (max_abs(p - p.adjoint()) > kStructuralTolerance) {
            throw InvariantViolation("projector for '" + label + "' is not Hermitian");
        }
        if (max_abs(p * p - p) > kStructuralTolerance) {
            throw InvariantViolation("projector for '" + label + "' is not idempotent");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (max_abs(p * outcomes[j].projector) > kStructuralTolerance) {
                throw InvariantViolation("projectors '" + label + "' and '" + outcomes[j].label +
                                         "' are not orthogonal");
            }
        }
        sum += p;
    }
    if (max_abs(sum - Matrix::Identity(d, d)) > kStructuralTolerance) {
        throw InvariantViolation("projectors do not sum to the identity");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// RegisterLayout
// ---------------------------------------------------------------------------

RegisterLayout::RegisterLayout(std::initializer_list<Register> regs)
    : RegisterLayout(std::vector<Register>(regs)) {}

RegisterLayout::RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
    std::set<std::string> names;
    for (const auto &r : regs_) {
        if (r.name.empty()) {
            throw InvariantViolation("register names must be nonempty");
        }
        if (!names.insert(r.name).second) {
            throw InvariantViolation("duplicate register name '" + r.name + "'");
        }
        if (r.dim == 0) {
            throw InvariantViolation("register '" + r.name + "' has dimension 0");
        }
        total_dim_ *= r.dim;
    }
}

bool RegisterLayout::contains(std::string_view name) const {
    return std::any_of(regs_.begin(), regs_.end(), [&](const Register &r) { return r.name == name; });
}

std::size_t RegisterLayout::position(std::string_view name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        if (regs_[i].name == name) {
            return i;
        }
    }
    throw UnknownRegister(std::string(name));
}

std::size_t RegisterLayout::dim(std::string_view name) const { return regs_[position(name)].dim; }

std::vector<std::string> RegisterLayout::names() const {
    std::vector<std::string> out;
    out.reserve(regs_.size());
    for (const auto &r : regs_) {
        out.push_back(r.name);
    }
    return out;
}

std::vector<std::size_t> RegisterLayout::strides() const {
    std::vector<std::size_t> s(regs_.size(), 1);
    for (std::size_t i = regs_.size(); i-- > 1;) {
        s[i - 1] = s[i] * regs_[i].dim;
    }
    return s;
}

RegisterLayout RegisterLayout::appended(const Register &reg) const {
    auto regs = regs_;
    regs.push_back(reg);
    return RegisterLayout(std::move(regs));
}

RegisterLayout RegisterLayout::subset(const std::vector<std::string> &names) const {
    std::vector<Register> regs;
    regs.reserve(names.size());
    for (const auto &n : names) {
        regs.push_back(regs_[position(n)]);
    }
    return RegisterLayout(std::move(regs));
}

std::size_t RegisterLayout::index_of(const std::vector<Digit> &digits) const {
    const auto s = strides();
    std::size_t index = 0;
    std::set<std::string> seen;
    for (const auto &[name, value] : digits) {
        const std::size_t p = position(name);
        if (!seen.insert(name).second) {
            throw DimensionError("digit for register '" + name + "' given twice");
        }
        if (value >= regs_[p].dim) {
            throw DimensionError("digit " + std::to_string(value) + " out of range for register '" + name + "'");
        }
        index += value * s[p];
    }
    return index;
}

// ---------------------------------------------------------------------------
// Vectors and small helpers
// ---------------------------------------------------------------------------

Vector basis_vector(const RegisterLayout &layout, const std::vector<Digit> &digits) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    v[static_cast<Eigen::Index>(layout.index_of(digits))] = 1.0;
    return v;
}

Vector kron(const Vector &a, const Vector &b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a[i] * b;
    }
    return out;
}

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix cyclic_shift(std::size_t dim, std::size_t shift) {
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < dim; ++k) {
        m(static_cast<Eigen::Index>((k + shift) % dim), static_cast<Eigen::Index>(k)) = 1.0;
    }
    return m;
}

double max_abs(const Matrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// PureState
// ---------------------------------------------------------------------------

PureState::PureState(RegisterLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != layout_.total_dim()) {
        throw DimensionError("amplitude count " + std::to_string(amps_.size()) + " does not match layout dimension " +
                             std::to_string(layout_.total_dim()));
    }
    if (std::abs(amps_.norm() - 1.0) > kStructuralTolerance) {
        throw InvariantViolation("state is not normalized (norm " + std::to_string(amps_.norm()) + ")");
    }
}

PureState PureState::blank(const RegisterLayout &layout) { return basis(layout, {}); }

PureState PureState::basis(const RegisterLayout &layout, const std::vector<Digit> &digits) {
    return PureState(layout, basis_vector(layout, digits));
}

PureState PureState::normalized(RegisterLayout layout, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n < kImpossibleThreshold) {
        throw ImpossibleEvent("cannot normalize a zero vector");
    }
    return PureState(std::move(layout), amplitudes / n);
}

Complex PureState::amplitude(const std::vector<Digit> &digits) const {
    return amps_[static_cast<Eigen::Index>(layout_.index_of(digits))];
}

PureState tensor(const PureState &a, const PureState &b) {
    auto regs = a.layout().registers();
    const auto &more = b.layout().registers();
    regs.insert(regs.end(), more.begin(), more.end());
    return PureState(RegisterLayout(std::move(regs)), kron(a.amplitudes(), b.amplitudes()));
}

// ---------------------------------------------------------------------------
// Isometry
// ---------------------------------------------------------------------------

Isometry::Isometry(RegisterLayout input, RegisterLayout output, Matrix matrix)
    : input_(std::move(input)), output_(std::move(output)), matrix_(std::move(matrix)) {
    if (static_cast<std::size_t>(matrix_.rows()) != output_.total_dim() ||
        static_cast<std::size_t>(matrix_.cols()) != input_.total_dim()) {
        throw DimensionError("isometry matrix shape does not match its layouts");
    }
    for (const auto &r : input_.registers()) {
        if (!output_.contains(r.name) || output_.dim(r.name) != r.dim) {
            throw DimensionError("isometry output must keep input register '" + r.name + "'");
        }
    }
    const auto n = matrix_.cols();
    if (max_abs(matrix_.adjoint() * matrix_ - Matrix::Identity(n, n)) > kStructuralTolerance) {
        throw InvariantViolation("matrix is not an isometry");
    }
}

Isometry Isometry::identity(const RegisterLayout &layout) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    return Isometry(layout, layout, Matrix::Identity(d, d));
}

Isometry Isometry::unitary(const RegisterLayout &layout, Matrix matrix) {
    return Isometry(layout, layout, std::move(matrix));
}

std::vector<Register> Isometry::fresh_registers() const {
    std::vector<Register> out;
    for (const auto &r : output_.registers()) {
        if (!input_.contains(r.name)) {
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// ProjectiveMeasurement
// ---------------------------------------------------------------------------

ProjectiveMeasurement::ProjectiveMeasurement(RegisterLayout target, std::vector<MeasurementOutcome> outcomes)
    : target_(std::move(target)), outcomes_(std::move(outcomes)) {
    check_projector_family(target_, outcomes_);
}

ProjectiveMeasurement ProjectiveMeasurement::computational(const Register &reg,
                                                           const std::vector<std::string> &labels) {
    if (labels.size() != reg.dim) {
        throw DimensionError("register '" + reg.name + "' needs " + std::to_string(reg.dim) + " labels");
    }
    const RegisterLayout target{reg};
    std::vector<std::pair<std::string, std::vector<Vector>>> spans;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        spans.push_back({labels[k], {basis_vector(target, {{reg.name, k}})}});
    }
    return from_vectors(target, spans);
}

ProjectiveMeasurement
ProjectiveMeasurement::from_vectors(const RegisterLayout &target,
                                    const std::vector<std::pair<std::string, std::vector<Vector>>> &spans,
                                    const std::optional<std::string> &complement_label) {
    const auto d = static_cast<Eigen::Index>(target.total_dim());
    std::vector<MeasurementOutcome> outcomes;
    Matrix covered = Matrix::Zero(d, d);
    for (const auto &[label, vectors] : spans) {
        Matrix p = Matrix::Zero(d, d);
        for (const auto &v : vectors) {
            if (v.size() != d) {
                throw DimensionError("basis vector for '" + label + "' has the wrong length");
            }
            p += v * v.adjoint();
        }
        covered += p;
        outcomes.push_back({label, std::move(p)});
    }
    if (complement_label) {
        outcomes.push_back({*complement_label, Matrix::Identity(d, d) - covered});
    }
    return ProjectiveMeasurement(target, std::move(outcomes));
}

ProjectiveMeasurement ProjectiveMeasurement::product(const ProjectiveMeasurement &a,
                                                     const ProjectiveMeasurement &b) {
    auto regs = a.target().registers();
    for (const auto &r : b.target().registers()) {
        regs.push_back(r);
    }
    std::vector<MeasurementOutcome> outcomes;
    for (const auto &oa : a.outcomes()) {
        for (const auto &ob : b.outcomes()) {
            outcomes.push_back({oa.label + "," + ob.label, kron(oa.projector, ob.projector)});
        }
    }
    return ProjectiveMeasurement(RegisterLayout(std::move(regs)), std::move(outcomes));
}

std::vector<std::string> ProjectiveMeasurement::labels() const {
    std::vector<std::string> out;
    out.reserve(outcomes_.size());
    for (const auto &o : outcomes_) {
        out.push_back(o.label);
    }
    return out;
}

bool ProjectiveMeasurement::has_label(std::string_view label) const {
    return std::any_of(outcomes_.begin(), outcomes_.end(),
                       [&](const MeasurementOutcome &o) { return o.label == label; });
}

std::size_t ProjectiveMeasurement::index_of(std::string_view label) const {
    for (std::size_t k = 0; k < outcomes_.size(); ++k) {
        if (outcomes_[k].label == label) {
            return k;
        }
    }
    throw MalformedInput("measurement has no outcome '" + std::string(label) + "'");
}

const Matrix &ProjectiveMeasurement::projector(std::string_view label) const {
    return outcomes_[index_of(label)].projector;
}

// ---------------------------------------------------------------------------
// Distribution
// ---------------------------------------------------------------------------

Distribution::Distribution(std::vector<std::string> labels, std::vector<double> probabilities)
    : labels_(std::move(labels)), probs_(std::move(probabilities)) {
    if (labels_.size() != probs_.size()) {
        throw DimensionError("distribution labels and probabilities differ in length");
    }
}

double Distribution::at(std::string_view label) const {
    for (std::size_t k = 0; k < labels_.size(); ++k) {
        if (labels_[k] == label) {
            return probs_[k];
        }
    }
    throw MalformedInput("distribution has no outcome '" + std::string(label) + "'");
}

double Distribution::total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

PureState embed_apply(const Isometry &op, const PureState &state, const std::vector<std::string> &targets) {
    const auto &layout = state.layout();
    check_target_dims(layout, targets, op.input_layout());
    const auto in_positions = resolve(layout, targets);

    // Output registers: inputs map onto their targets, fresh ones are appended.
    RegisterLayout out_layout = layout;
    std::vector<std::string> out_names;
    for (const auto &r : op.output_layout().registers()) {
        if (op.input_layout().contains(r.name)) {
            out_names.push_back(targets[op.input_layout().position(r.name)]);
        } else {
            if (layout.contains(r.name)) {
                throw DimensionError("fresh register '" + r.name + "' already exists in the state");
            }
            out_layout = out_layout.appended(r);
            out_names.push_back(r.name);
        }
    }
    const auto out_positions = resolve(out_layout, out_names);
    const auto rest_positions = complement_positions(layout, in_positions);

    const auto in_offsets = group_offsets(layout, in_positions);
    const auto out_offsets = group_offsets(out_layout, out_positions);
    const auto rest_in = group_offsets(layout, rest_positions);
    const auto rest_out = group_offsets(out_layout, rest_positions);

    Vector out = Vector::Zero(static_cast<Eigen::Index>(out_layout.total_dim()));
    Vector block(static_cast<Eigen::Index>(in_offsets.size()));
    const Matrix &m = op.matrix();
    for (std::size_t r = 0; r < rest_in.size(); ++r) {
        for (std::size_t j = 0; j < in_offsets.size(); ++j) {
            block[static_cast<Eigen::Index>(j)] = state.amplitudes()[static_cast<Eigen::Index>(rest_in[r] + in_offsets[j])];
        }
        const Vector y = m * block;
        for (std::size_t i = 0; i < out_offsets.size(); ++i) {
            out[static_cast<Eigen::Index>(rest_out[r] + out_offsets[i])] = y[static_cast<Eigen::Index>(i)];
        }
    }
    return PureState(std::move(out_layout), std::move(out));
}

PureState embed_apply(const Isometry &op, const PureState &state) {
    return embed_apply(op, state, op.input_layout().names());
}

Distribution born(const PureState &state, const ProjectiveMeasurement &meas) {
    const auto &layout = state.layout();
    check_target_dims(layout, meas.target_names(), meas.target());
    const auto positions = resolve(layout, meas.target_names());
    const auto target = group_offsets(layout, positions);
    const auto rest = group_offsets(layout, complement_positions(layout, positions));
    std::vector<double> probs(meas.size(), 0.0);
    for_each_block(state.amplitudes(), rest, target, [&](std::size_t, const Vector &block) {
        for (std::size_t k = 0; k < meas.size(); ++k) {
            probs[k] += block.dot(meas.outcomes()[k].projector * block).real();
        }
    });
    for (auto &p : probs) {
        p = std::clamp(p, 0.0, 1.0);
    }
    return Distribution(meas.labels(), std::move(probs));
}

double born_probability(const PureState &state, const ProjectiveMeasurement &meas, std::string_view label) {
    return born(state, meas).at(label);
}

Conditioned condition(const PureState &state, const ProjectiveMeasurement &meas, std::string_view label) {
    const std::size_t k = meas.index_of(label);
    const double p = born(state, meas).probabilities()[k];
    if (p < kImpossibleThreshold) {
        throw ImpossibleEvent("outcome '" + std::string(label) + "' has probability " + std::to_string(p));
    }
    Vector projected;
    apply_projector_local(state, meas, k, projected);
    return {p, PureState::normalized(state.layout(), std::move(projected))};
}

Complex inner(const PureState &a, const PureState &b) {
    if (!(a.layout() == b.layout())) {
        throw DimensionError("states live on different layouts");
    }
    return a.amplitudes().dot(b.amplitudes());
}

double fidelity(const PureState &a, const PureState &b) { return std::norm(inner(a, b)); }

bool states_equal(const PureState &a, const PureState &b, double tol) { return std::abs(inner(a, b)) >= 1.0 - tol; }

Matrix reduced_density(const PureState &state, const std::vector<std::string> &keep) {
    const auto &layout = state.layout();
    const auto positions = resolve(layout, keep);
    const auto target = group_offsets(layout, positions);
    const auto rest = group_offsets(layout, complement_positions(layout, positions));
    const auto d = static_cast<Eigen::Index>(target.size());
    Matrix rho = Matrix::Zero(d, d);
    for_each_block(state.amplitudes(), rest, target,
                   [&](std::size_t, const Vector &block) { rho += block * block.adjoint(); });
    return rho;
}

} // namespace solipsim
