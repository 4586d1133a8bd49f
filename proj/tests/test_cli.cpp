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

#include <fstream>
#include <sstream>

#include "solipsim/cli.hpp"
#include "solipsim/errors.hpp"

#ifndef SOLIPSIM_SOURCE_DIR
#define SOLIPSIM_SOURCE_DIR "."
#endif

using namespace solipsim;

namespace {

RunConfig parsed(const std::vector<std::string> &args) {
    const auto r = parse_args(args);
    REQUIRE(r.config.has_value());
    return *r.config;
}

double probability(const nlohmann::ordered_json &report, const std::string &name) {
    for (const auto &p : report["probabilities"]) {
        if (p["name"] == name) {
            return p["value"].get<double>();
        }
    }
    FAIL("missing probability " << name);
    return 0.0;
}

} // namespace

TEST_CASE("argument parsing") {
    const auto c = parsed({"run", "fr", "--mode", "sample", "--shots", "120000", "--seed", "7", "--output", "json"});
    CHECK(c.scenario == "fr");
    CHECK(c.mode == "sample");
    CHECK(c.shots == std::uint64_t{120000});
    CHECK(c.seed == 7);
    CHECK(c.output == "json");

    const auto d = parsed({"run", "fr", "--mode", "disclose", "--agent", "Fbar", "--seed", "1"});
    CHECK(d.options.at("agent") == "Fbar");
    CHECK(parsed({"run", "fr-usd"}).mode == "usd");

    const auto bad = parse_args({"run", "nosuch"});
    CHECK(bad.exit_code == kExitUsage);
    CHECK(bad.message.find("nosuch") != std::string::npos);
    CHECK(parse_args({"run", "fr", "--mode", "warp"}).exit_code == kExitUsage);
    CHECK(parse_args({"run", "fr", "--frobnicate"}).exit_code == kExitUsage);
    CHECK(parse_args({"run", "fr", "--shots", "0"}).exit_code == kExitUsage);
    CHECK(parse_args({"run", "alice-bob", "--mode", "audit"}).exit_code == kExitUsage);
    CHECK(parse_args({"run", "custom"}).exit_code == kExitUsage);
    CHECK(parse_args({"run", "fr", "--wbar-basis", "xy"}).exit_code == kExitUsage);
}

TEST_CASE("unknown scenario goes to the error stream with exit 2") {
    std::ostringstream out;
    std::ostringstream err;
    CHECK(run_cli({"run", "nosuch"}, out, err) == kExitUsage);
    CHECK(out.str().empty());
    CHECK(err.str().find("unknown scenario 'nosuch'") != std::string::npos);
}

TEST_CASE("unitary report carries the reference fidelities and joint probabilities") {
    const auto r = execute(parsed({"run", "fr"}));
    CHECK(r.exit_code == kExitOk);
    bool zeta = false;
    for (const auto &f : r.json["fidelities"]) {
        if (f["name"] == "zeta") {
            zeta = true;
            CHECK(f["value"].get<double>() >= 1 - 1e-10);
        }
    }
    CHECK(zeta);
    CHECK(std::abs(probability(r.json, "P(Wbar=ok, W=ok)") - 1.0 / 12) <= 1e-12);
    CHECK(std::abs(probability(r.json, "P(Wbar=ok, W=fail)") - 1.0 / 12) <= 1e-12);
    CHECK(std::abs(probability(r.json, "P(Wbar=fail, W=ok)") - 1.0 / 12) <= 1e-12);
    CHECK(std::abs(probability(r.json, "P(Wbar=fail, W=fail)") - 0.75) <= 1e-12);
}

TEST_CASE("usd report") {
    const auto r = execute(parsed({"run", "fr-usd", "--mode", "usd"}));
    CHECK(r.exit_code == kExitOk);
    CHECK(std::abs(r.json["usd"]["inconclusive"].get<double>() - 1.0 / 3) <= 1e-9);
}

TEST_CASE("every scenario and mode runs clean") {
    for (const auto &s : scenario_names()) {
        if (s == "custom") {
            continue;
        }
        for (const auto &m : modes_for(s)) {
            CAPTURE(s);
            CAPTURE(m);
            const auto r = execute(parsed({"run", s, "--mode", m, "--shots", "20000", "--seed", "4"}));
            CHECK(r.exit_code == kExitOk);
            CHECK(r.json["summary"]["failed"] == 0);
        }
    }
    const auto r = execute(parsed({"run", "custom", "--experiment", SOLIPSIM_SOURCE_DIR "/docs/experiments/alice-bob.json",
                                   "--mode", "rounds"}));
    CHECK(r.exit_code == kExitOk);
}

TEST_CASE("reports are byte-identical for identical configs") {
    for (const auto &args : std::vector<std::vector<std::string>>{
             {"run", "fr", "--mode", "sample", "--seed", "7", "--shots", "30000"},
             {"run", "fr", "--mode", "audit", "--shots", "30000"},
             {"run", "casino", "--mode", "rounds", "--seed", "2"}}) {
        const auto c = parsed(args);
        CHECK(to_json_text(execute(c).json) == to_json_text(execute(c).json));
        CHECK(to_text(execute(c).json) == to_text(execute(c).json));
    }
    auto seq = parsed({"run", "fr", "--mode", "sample", "--seed", "9", "--shots", "30000"});
    auto par = seq;
    par.options["workers"] = "4";
    CHECK(to_json_text(execute(seq).json) == to_json_text(execute(par).json));
    auto other = seq;
    other.seed = 10;
    CHECK(to_json_text(execute(seq).json) != to_json_text(execute(other).json));
}

TEST_CASE("floats carry 17 significant digits") {
    nlohmann::ordered_json j;
    j["x"] = 1.0 / 3.0;
    j["n"] = 3;
    CHECK(to_json_text(j) == "{\n  \"x\": 0.33333333333333331,\n  \"n\": 3\n}\n");
}

TEST_CASE("fr audit report matches the golden file") {
    std::ifstream in(SOLIPSIM_SOURCE_DIR "/tests/golden/fr_audit.json");
    REQUIRE(in.good());
    std::stringstream golden;
    golden << in.rdbuf();
    const auto r = execute(parsed({"run", "fr", "--mode", "audit", "--output", "json"}));
    CHECK(to_json_text(r.json) == golden.str());
}

TEST_CASE("broken input surfaces as a usage error") {
    RunConfig c;
    c.scenario = "fr";
    c.mode = "usd";
    CHECK_THROWS_AS((void)execute(c), MalformedInput);
    c.mode = "disclose";
    c.options["agent"] = "Nobody";
    CHECK_THROWS_AS((void)execute(c), MalformedInput);
}
