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

#include <doctest.h>

#include <cmath>
#include <random>

#include "solipsim/errors.hpp"
#include "solipsim/hilbert.hpp"

using namespace solipsim;

namespace {

Matrix random_unitary(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = Complex(g(rng), g(rng));
        }
    }
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(n, n);
}

PureState random_state(const RegisterLayout &layout, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Vector v(static_cast<Eigen::Index>(layout.total_dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = Complex(g(rng), g(rng));
    }
    return PureState::normalized(layout, v);
}

} // namespace

TEST_CASE("first register is the most significant digit") {
    const RegisterLayout l{{"A", 2}, {"B", 3}};
    CHECK(l.total_dim() == 6);
    CHECK(l.index_of({{"A", 1}, {"B", 2}}) == 5);
    CHECK(l.index_of({{"B", 1}}) == 1);
    const Vector v = kron(basis_vector({{"A", 2}}, {{"A", 1}}), basis_vector({{"B", 3}}, {{"B", 2}}));
    CHECK(v(5) == Complex(1.0));
    CHECK_THROWS_AS((void)l.position("C"), UnknownRegister);
    CHECK_THROWS_AS(RegisterLayout({{"A", 2}, {"A", 2}}), InvariantViolation);
}

TEST_CASE("unnormalized states are rejected") {
    const RegisterLayout l{{"A", 2}};
    Vector v(2);
    v << 1.0, 1.0;
    CHECK_THROWS_AS(PureState(l, v), InvariantViolation);
    CHECK(PureState::normalized(l, v).norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)PureState::normalized(l, Vector::Zero(2)), ImpossibleEvent);
}

TEST_CASE("random isometries satisfy the contract and preserve norm") {
    std::mt19937_64 rng(11);
    const RegisterLayout in{{"A", 2}, {"B", 2}};
    const RegisterLayout out{{"A", 2}, {"B", 2}, {"C", 3}};
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix u = random_unitary(12, rng);
        const Matrix v = u.leftCols(4);
        const Isometry iso(in, out, v);
        CHECK(max_abs(v.adjoint() * v - Matrix::Identity(4, 4)) < 1e-10);
        const RegisterLayout host{{"X", 2}, {"A", 2}, {"B", 2}};
        const PureState s = random_state(host, rng);
        const PureState t = embed_apply(iso, s);
        CHECK(std::abs(t.norm() - 1.0) <= 1e-12);
        CHECK(t.layout().total_dim() == 24);
    }
    Matrix bad = Matrix::Identity(12, 4);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(Isometry(in, out, bad), InvariantViolation);
}

TEST_CASE("embedding respects the target mapping") {
    const RegisterLayout l{{"A", 2}, {"B", 2}};
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    const auto flip = Isometry::unitary({{"Q", 2}}, x);
    const PureState s = PureState::basis(l, {{"A", 0}, {"B", 0}});
    const PureState t = embed_apply(flip, s, {"B"});
    CHECK(std::abs(t.amplitude({{"B", 1}})) == doctest::Approx(1.0));
}

TEST_CASE("born probabilities are complete and match conditioning") {
    std::mt19937_64 rng(5);
    const RegisterLayout l{{"A", 3}, {"B", 2}};
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix u = random_unitary(6, rng);
        std::vector<std::pair<std::string, std::vector<Vector>>> spans{
            {"x", {u.col(0), u.col(1)}}, {"y", {u.col(2)}}, {"z", {u.col(3), u.col(4), u.col(5)}}};
        const auto m = ProjectiveMeasurement::from_vectors(l, spans);
        const PureState s = random_state(l, rng);
        const Distribution d = born(s, m);
        CHECK(std::abs(d.total() - 1.0) <= 1e-12);
        for (const auto &label : m.labels()) {
            const Conditioned c = condition(s, m, label);
            CHECK(c.probability == d.at(label));
            CHECK(c.probability == born_probability(s, m, label));
            CHECK(std::abs(c.state.norm() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("basis relabeling leaves born outcomes unchanged") {
    std::mt19937_64 rng(9);
    const RegisterLayout l{{"A", 2}, {"B", 2}};
    const Matrix u = random_unitary(4, rng);
    const auto m = ProjectiveMeasurement::from_vectors(l, {{"p", {u.col(0)}}, {"q", {u.col(1)}}}, std::string("r"));
    const PureState s = random_state(l, rng);
    // The same state written in the eigenbasis of m.
    const Vector coords = u.adjoint() * s.amplitudes();
    const PureState rewritten(l, u * coords);
    CHECK(states_equal(s, rewritten));
    const auto a = born(s, m);
    const auto b = born(rewritten, m);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a.probabilities()[i] - b.probabilities()[i]) <= 1e-12);
    }
    CHECK(std::abs(a.at("p") - std::norm(coords(0))) <= 1e-12);
}

TEST_CASE("measurements must be complete orthogonal projectors") {
    const RegisterLayout l{{"A", 2}};
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    CHECK_THROWS_AS(ProjectiveMeasurement(l, {{"0", p0}}), InvariantViolation);
    CHECK_THROWS_AS(ProjectiveMeasurement(l, {{"0", p0}, {"1", p0}}), InvariantViolation);
    CHECK_THROWS_AS((void)ProjectiveMeasurement::computational({"A", 2}, {"only"}), DimensionError);
}

TEST_CASE("zero-probability outcomes cannot be conditioned on") {
    const RegisterLayout l{{"A", 2}};
    const auto m = ProjectiveMeasurement::computational({"A", 2}, {"0", "1"});
    CHECK_THROWS_AS((void)condition(PureState::blank(l), m, "1"), ImpossibleEvent);
}

TEST_CASE("fidelity and equality up to phase") {
    const RegisterLayout l{{"A", 2}};
    Vector v(2);
    v << 1.0, Complex(0.0, 1.0);
    const PureState a = PureState::normalized(l, v);
    const PureState b = PureState::normalized(l, v * std::polar(1.0, 0.7));
    CHECK(states_equal(a, b));
    CHECK(fidelity(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)fidelity(a, PureState::blank({{"B", 2}})), DimensionError);
}

TEST_CASE("reduced density of an entangled pair") {
    const RegisterLayout l{{"A", 2}, {"B", 2}};
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    const Matrix rho = reduced_density(PureState(l, v), {"B"});
    CHECK(max_abs(rho - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
    const Matrix whole = reduced_density(PureState(l, v), {"B", "A"});
    CHECK(std::abs(whole.trace() - Complex(1.0)) < 1e-15);
}

TEST_CASE("cyclic shift permutes levels") {
    const Matrix s = cyclic_shift(3, 1);
    const Vector e0 = basis_vector({{"A", 3}}, {{"A", 0}});
    CHECK(std::abs((s * e0)(1) - Complex(1.0)) < 1e-15);
    CHECK(max_abs(s * s * s - Matrix::Identity(3, 3)) < 1e-15);
}
