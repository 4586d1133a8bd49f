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
 * Exact small-dimension linear algebra over named tensor registers: pure
 * states, isometries, projective measurements, Born probabilities and
 * conditioning.
 *
 * Amplitudes are stored row-major over the register declaration order, so
 * the first register is the most significant digit of a basis index.
 * Registers are never reordered implicitly.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace solipsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Norm and completeness tolerance for constructed values.
inline constexpr double kStructuralTolerance = 1e-12;
/// Tolerance for state equality and for "certain" outcomes.
inline constexpr double kEqualityTolerance = 1e-10;
/// Outcomes below this probability cannot be conditioned on.
inline constexpr double kImpossibleThreshold = 1e-12;

struct Register {
    std::string name;
    std::size_t dim = 2;

    bool operator==(const Register &) const = default;
};

/// A register assignment used to address one basis vector, e.g. {"R", 1}.
using Digit = std::pair<std::string, std::size_t>;

class RegisterLayout {
  public:
    RegisterLayout() = default;
    RegisterLayout(std::initializer_list<Register> regs);
    explicit RegisterLayout(std::vector<Register> regs);

    [[nodiscard]] const std::vector<Register> &registers() const { return regs_; }
    [[nodiscard]] std::size_t size() const { return regs_.size(); }
    [[nodiscard]] bool empty() const { return regs_.empty(); }
    [[nodiscard]] std::size_t total_dim() const { return total_dim_; }

    [[nodiscard]] bool contains(std::string_view name) const;
    /// Position of a register in declaration order; throws UnknownRegister.
    [[nodiscard]] std::size_t position(std::string_view name) const;
    [[nodiscard]] std::size_t dim(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> names() const;
    [[nodiscard]] std::vector<std::size_t> strides() const;

    [[nodiscard]] RegisterLayout appended(const Register &reg) const;
    /// The listed registers, in the listed order.
    [[nodiscard]] RegisterLayout subset(const std::vector<std::string> &names) const;

    /// Flat index of the basis vector with the given digits; unmentioned
    /// registers are at digit 0.
    [[nodiscard]] std::size_t index_of(const std::vector<Digit> &digits) const;

    bool operator==(const RegisterLayout &other) const { return regs_ == other.regs_; }

  private:
    std::vector<Register> regs_;
    std::size_t total_dim_ = 1;
};

/// Unit basis vector of a layout.
[[nodiscard]] Vector basis_vector(const RegisterLayout &layout,
                                  const std::vector<Digit> &digits);
/// Kronecker product with the left factor most significant.
[[nodiscard]] Vector kron(const Vector &a, const Vector &b);
[[nodiscard]] Matrix kron(const Matrix &a, const Matrix &b);
/// Permutation |k> -> |k + shift mod dim>.
[[nodiscard]] Matrix cyclic_shift(std::size_t dim, std::size_t shift);

class PureState {
  public:
    /// Throws InvariantViolation unless the amplitudes have unit norm.
    PureState(RegisterLayout layout, Vector amplitudes);

    /// Every register at digit 0.
    static PureState blank(const RegisterLayout &layout);
    static PureState basis(const RegisterLayout &layout, const std::vector<Digit> &digits);
    /// Rescales a nonzero vector to unit norm.
    static PureState normalized(RegisterLayout layout, Vector amplitudes);

    [[nodiscard]] const RegisterLayout &layout() const { return layout_; }
    [[nodiscard]] const Vector &amplitudes() const { return amps_; }
    [[nodiscard]] Complex amplitude(const std::vector<Digit> &digits) const;
    [[nodiscard]] double norm() const { return amps_.norm(); }

  private:
    RegisterLayout layout_;
    Vector amps_;
};

[[nodiscard]] PureState tensor(const PureState &a, const PureState &b);

/// A linear map V with V^dagger V = 1 from the input registers to the output
/// registers. Output registers are the input registers (same names and
/// dimensions, any order) plus zero or more fresh registers.
class Isometry {
  public:
    Isometry(RegisterLayout input, RegisterLayout output, Matrix matrix);

    static Isometry identity(const RegisterLayout &layout);
    /// Square unitary on a fixed set of registers.
    static Isometry unitary(const RegisterLayout &layout, Matrix matrix);

    [[nodiscard]] const RegisterLayout &input_layout() const { return input_; }
    [[nodiscard]] const RegisterLayout &output_layout() const { return output_; }
    [[nodiscard]] const Matrix &matrix() const { return matrix_; }
    /// Output registers absent from the input.
    [[nodiscard]] std::vector<Register> fresh_registers() const;

  private:
    RegisterLayout input_;
    RegisterLayout output_;
    Matrix matrix_;
};

struct MeasurementOutcome {
    std::string label;
    Matrix projector;
};

/// Orthogonal projectors on a target register group that sum to identity.
class ProjectiveMeasurement {
  public:
    ProjectiveMeasurement(RegisterLayout target, std::vector<MeasurementOutcome> outcomes);

    /// Digit-valued measurement of a single register, one label per level.
    static ProjectiveMeasurement computational(const Register &reg,
                                               const std::vector<std::string> &labels);
    /// Each outcome is the projector onto the span of its orthonormal vectors;
    /// an optional complement outcome collects the rest of the space.
    static ProjectiveMeasurement
    from_vectors(const RegisterLayout &target,
                 const std::vector<std::pair<std::string, std::vector<Vector>>> &spans,
                 const std::optional<std::string> &complement_label = std::nullopt);
    /// Joint measurement on disjoint targets; labels joined with ','.
    static ProjectiveMeasurement product(const ProjectiveMeasurement &a,
                                         const ProjectiveMeasurement &b);

    [[nodiscard]] const RegisterLayout &target() const { return target_; }
    [[nodiscard]] std::vector<std::string> target_names() const { return target_.names(); }
    [[nodiscard]] const std::vector<MeasurementOutcome> &outcomes() const { return outcomes_; }
    [[nodiscard]] std::size_t size() const { return outcomes_.size(); }
    [[nodiscard]] std::vector<std::string> labels() const;
    [[nodiscard]] bool has_label(std::string_view label) const;
    [[nodiscard]] std::size_t index_of(std::string_view label) const;
    [[nodiscard]] const Matrix &projector(std::string_view label) const;

  private:
    RegisterLayout target_;
    std::vector<MeasurementOutcome> outcomes_;
};

/// Outcome probabilities in measurement order.
class Distribution {
  public:
    Distribution(std::vector<std::string> labels, std::vector<double> probabilities);

    [[nodiscard]] const std::vector<std::string> &labels() const { return labels_; }
    [[nodiscard]] const std::vector<double> &probabilities() const { return probs_; }
    [[nodiscard]] std::size_t size() const { return labels_.size(); }
    [[nodiscard]] double at(std::string_view label) const;
    [[nodiscard]] double total() const;

  private:
    std::vector<std::string> labels_;
    std::vector<double> probs_;
};

/// Applies op (tensor identity) with op's i-th input register played by
/// targets[i]. Fresh output registers are appended to the layout.
[[nodiscard]] PureState embed_apply(const Isometry &op, const PureState &state,
                                    const std::vector<std::string> &targets);
/// Same, with the op's own input register names as targets.
[[nodiscard]] PureState embed_apply(const Isometry &op, const PureState &state);

[[nodiscard]] Distribution born(const PureState &state, const ProjectiveMeasurement &meas);
/// Born probability of a single outcome; the same arithmetic as born().
[[nodiscard]] double born_probability(const PureState &state, const ProjectiveMeasurement &meas,
                                      std::string_view label);

struct Conditioned {
    double probability = 0.0;
    PureState state;
};

/// Projects onto an outcome and renormalizes. Throws ImpossibleEvent when the
/// outcome probability is below kImpossibleThreshold.
[[nodiscard]] Conditioned condition(const PureState &state, const ProjectiveMeasurement &meas,
                                    std::string_view label);

[[nodiscard]] Complex inner(const PureState &a, const PureState &b);
/// |<a|b>|^2; throws DimensionError on layout mismatch.
[[nodiscard]] double fidelity(const PureState &a, const PureState &b);
/// Equality up to global phase: |<a|b>| >= 1 - tol.
[[nodiscard]] bool states_equal(const PureState &a, const PureState &b,
                                double tol = kEqualityTolerance);

/// Reduced density matrix on the kept registers, in the listed order.
[[nodiscard]] Matrix reduced_density(const PureState &state, const std::vector<std::string> &keep);

/// Largest absolute entry.
[[nodiscard]] double max_abs(const Matrix &m);

} // namespace solipsim
