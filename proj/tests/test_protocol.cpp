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

#include "solipsim/errors.hpp"
#include "solipsim/protocol.hpp"
#include "solipsim/rng.hpp"
#include "solipsim/scenarios.hpp"

using namespace solipsim;

namespace {

Vector qubit(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

/// Prepare Q, then Alice measures it into memory A.
Protocol single_measurement(Coherence c, double a, double b) {
    const RegisterLayout l{{"Q", 2}, {"D", 2}, {"A", 2}};
    std::vector<Step> steps{
        {Prepare{"Q", qubit(a, b)}, "t0"},
        {MeasureRecord{"Alice", ProjectiveMeasurement::computational({"Q", 2}, {"0", "1"}), std::string("D"), "A", c},
         "t1"},
    };
    return Protocol(l, std::move(steps));
}

} // namespace

TEST_CASE("measure-and-record correlates system, device and memory") {
    const double a = std::sqrt(0.3);
    const double b = std::sqrt(0.7);
    const PureState s = run_unitary(single_measurement(Coherence::coherent, a, b));
    // Hand-written result: a|000> + b|111>.
    Vector expected = Vector::Zero(8);
    expected(0) = a;
    expected(7) = b;
    CHECK(states_equal(s, PureState(s.layout(), expected)));
}

TEST_CASE("recording into an occupied memory is refused") {
    const RegisterLayout l{{"Q", 2}, {"A", 2}};
    const auto m = ProjectiveMeasurement::computational({"Q", 2}, {"0", "1"});
    std::vector<Step> steps{
        {Prepare{"Q", qubit(0.0, 1.0)}, ""},
        {MeasureRecord{"Alice", m, std::nullopt, "A", Coherence::coherent}, ""},
        {MeasureRecord{"Alice", m, std::nullopt, "A", Coherence::coherent}, ""},
    };
    const Protocol p(l, std::move(steps));
    CHECK_THROWS_AS((void)run_unitary(p), BlankRegisterViolation);
}

TEST_CASE("protocol validation") {
    const RegisterLayout l{{"Q", 2}, {"A", 3}};
    const auto m = ProjectiveMeasurement::computational({"Q", 2}, {"0", "1"});
    CHECK_THROWS_AS(Protocol(l, {{MeasureRecord{"Alice", m, std::nullopt, "A", Coherence::coherent}, ""}}),
                    DimensionError);
    CHECK_THROWS_AS(Protocol(l, {{Prepare{"Z", qubit(1, 0)}, ""}}), MalformedInput);
    CHECK_THROWS_AS(Protocol(l, {{Prepare{"Q", qubit(1, 1)}, ""}}), InvariantViolation);
    const RegisterLayout ok{{"Q", 2}, {"A", 2}};
    CHECK_THROWS_AS(Protocol(ok, {{MeasureRecord{"Alice", m, std::nullopt, "A", Coherence::coherent}, ""}},
                             HaltingPredicate{{{"Alice", "0"}}}),
                    MalformedInput);
}

TEST_CASE("custody follows send steps") {
    const auto b = build_fr();
    const auto before = custody_after(b.protocol, 3);
    const auto after = custody_after(b.protocol, 4);
    CHECK(before.count("S") == 0);
    CHECK(after.at("S") == "F");
}

TEST_CASE("removing announced steps leaves the coherent evolution unchanged") {
    const auto b = build_fr();
    const Protocol coherent = b.protocol.without_announced();
    CHECK(coherent.size() == b.protocol.size() - 2);
    CHECK(states_equal(run_unitary(coherent), run_prefix(b.protocol, coherent.size())));
}

TEST_CASE("sequence probabilities agree with the unitary joint distribution") {
    for (auto variant : {WbarBasis::okfail, WbarBasis::ht}) {
        const auto b = build_fr(variant);
        const auto d = born(run_unitary(b.protocol), b.measurement("joint"));
        Sampler s(b.protocol);
        for (const auto &l1 : b.agent("Wbar").labels) {
            for (const auto &l2 : b.agent("W").labels) {
                CHECK(std::abs(s.sequence_probability({l1, l2}) - d.at(l1 + "," + l2)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("sampled frequencies match born within three sigma") {
    const auto b = build_fr();
    const std::uint64_t n = 120000;
    const auto counts = sample_counts(b.protocol, 2024, n, 2);
    const auto d = born(run_unitary(b.protocol), b.measurement("joint"));
    for (const auto &[labels, k] : counts.counts) {
        const double p = d.at(labels[0] + "," + labels[1]);
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
        CHECK(std::abs(static_cast<double>(k) / static_cast<double>(n) - p) <= 3 * sigma);
    }
}

TEST_CASE("sampling is deterministic and independent of the worker count") {
    const auto b = build_fr();
    const auto one = sample_counts(b.protocol, 7, 20000, 1);
    CHECK(one == sample_counts(b.protocol, 7, 20000, 1));
    CHECK(one == sample_counts(b.protocol, 7, 20000, 3));
    CHECK(one == sample_counts(b.protocol, 7, 20000, 8));
    CHECK(!(one == sample_counts(b.protocol, 8, 20000, 1)));
    const auto t1 = run_sampled(b.protocol, 99);
    const auto t2 = run_sampled(b.protocol, 99);
    CHECK(t1.announced == t2.announced);
}

TEST_CASE("halting round follows the geometric law") {
    const auto b = build_fr();
    // p from the unitary joint distribution rather than the sampler.
    const double p = born(run_unitary(b.protocol), b.measurement("joint")).at("ok,ok");
    CHECK(std::abs(p - 1.0 / 12) < 1e-12);
    Sampler sampler(b.protocol);
    const int runs = 10000;
    double sum = 0;
    int exhausted_one = 0;
    for (int j = 0; j < runs; ++j) {
        const auto r = run_rounds(sampler, SplitMix64::derive(42, j), 1000);
        REQUIRE(!r.exhausted());
        sum += static_cast<double>(*r.halted_at);
        exhausted_one += run_rounds(sampler, SplitMix64::derive(43, j), 1).exhausted() ? 1 : 0;
    }
    const double mean = sum / runs;
    CHECK(std::abs(mean - 1 / p) <= 3 * std::sqrt((1 - p) / (p * p)) / std::sqrt(runs));
    const double q = 1 - p;
    CHECK(std::abs(exhausted_one / double(runs) - q) <= 3 * std::sqrt(q * p / runs));
    CHECK_THROWS_AS((void)run_rounds(sampler, 1, 0), MalformedInput);
}

TEST_CASE("a trivial halting predicate stops after one round") {
    const auto b = build_alice_bob_matched();
    CHECK(b.protocol.halting().trivial());
    CHECK(run_rounds(b.protocol, 3, 10).halted_at == std::size_t{1});
}

TEST_CASE("splitmix streams are reproducible") {
    SplitMix64 a(1, 2);
    SplitMix64 b(1, 2);
    SplitMix64 c(1, 3);
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}
