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

#include "solipsim/errors.hpp"
#include "solipsim/experiment.hpp"
#include "solipsim/scenarios.hpp"

#ifndef SOLIPSIM_SOURCE_DIR
#define SOLIPSIM_SOURCE_DIR "."
#endif

using namespace solipsim;
using nlohmann::json;

TEST_CASE("the shipped experiment reproduces the built-in alice-bob") {
    const auto b = load_experiment(SOLIPSIM_SOURCE_DIR "/docs/experiments/alice-bob.json");
    const auto ref = build_alice_bob_matched();
    CHECK(b.protocol.final_layout() == ref.protocol.final_layout());
    CHECK(states_equal(run_unitary(b.protocol), run_unitary(ref.protocol)));
    CHECK(b.has_agent("Alice"));
    CHECK(b.agent("Bob").labels == std::vector<std::string>{"0,0,zero", "1,1,one", "other"});
    CHECK(b.protocol.halting().required.size() == 1);
}

TEST_CASE("complex amplitudes and isometry steps") {
    const json doc = json::parse(R"({
      "layout": [{"name": "Q", "dim": 2}, {"name": "M", "dim": 2}],
      "steps": [
        {"type": "prepare", "register": "Q", "fragment": [[0.6, 0], [0, 0.8]]},
        {"type": "isometry", "targets": ["Q"], "fresh": [{"name": "X", "dim": 2}],
         "matrix": [[1, 0], [0, 0], [0, 0], [0, 1]]},
        {"type": "measure", "agent": "Ann", "targets": ["Q"], "labels": ["a", "b"], "memory": "M",
         "coherence": "announced"}
      ]
    })");
    const auto b = parse_experiment(doc);
    const PureState s = run_unitary(b.protocol);
    CHECK(s.layout().total_dim() == 8);
    CHECK(std::abs(s.amplitude({{"Q", 1}, {"M", 1}, {"X", 1}}) - Complex(0, 0.8)) < 1e-12);
    CHECK(b.protocol.announced_steps() == std::vector<std::size_t>{2});
}

TEST_CASE("malformed experiments are rejected") {
    const std::vector<std::string> docs{
        R"({"steps": []})",
        R"({"layout": [{"name": "Q", "dim": 2}], "steps": [{"type": "teleport"}]})",
        R"({"layout": [{"name": "Q", "dim": 2}], "steps": [{"type": "prepare", "register": "Q", "fragment": ["x", 1]}]})",
        R"({"layout": [{"name": "Q", "dim": 2}], "steps": [{"type": "prepare", "register": "Z", "fragment": [1, 0]}]})",
        R"({"layout": [{"name": "Q"}], "steps": []})",
        R"({"layout": [{"name": "Q", "dim": 2}, {"name": "M", "dim": 2}], "steps": [
            {"type": "measure", "agent": "A", "targets": ["Q"], "labels": ["a", "b"], "memory": "M",
             "coherence": "loud"}]})",
        R"({"layout": [{"name": "Q", "dim": 2}, {"name": "M", "dim": 2}], "steps": [
            {"type": "measure", "agent": "A", "targets": ["Q"], "labels": ["a", "b"], "memory": "M"}],
            "halting": [{"agent": "A", "label": "c"}]})",
    };
    for (const auto &d : docs) {
        CAPTURE(d);
        CHECK_THROWS_AS((void)parse_experiment(json::parse(d)), MalformedInput);
    }
    CHECK_THROWS_AS((void)load_experiment("/nonexistent/experiment.json"), MalformedInput);
}
