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

#include "solipsim/casino.hpp"

using namespace solipsim;

namespace {

RoundTrace trace(const std::string &wbar, const std::string &w) {
    RoundTrace t;
    t.announced = {{"Wbar", wbar}, {"W", w}};
    return t;
}

const DisputeEntry &entry(const DisputeReport &r, const std::string &party) {
    for (const auto &e : r.entries) {
        if (e.party == party) {
            return e;
        }
    }
    FAIL("no entry for " << party);
    return r.entries.front();
}

} // namespace

TEST_CASE("the halting round is disputed and awarded to W") {
    const Casino c = build_casino();
    const auto r = arbitrate(c, trace(fr::kOk, fr::kOk));
    CHECK(r.dispute);
    CHECK(entry(r, "Wbar").flagged);
    CHECK_FALSE(entry(r, "W").flagged);
    CHECK(entry(r, "Fbar").flagged);
    CHECK(entry(r, "Fbar").finding.find("agency ceded") != std::string::npos);
    CHECK(r.ruling == "award the case to W (r=heads)");
}

TEST_CASE("no dispute when nobody sees ok") {
    const Casino c = build_casino();
    const auto r = arbitrate(c, trace(fr::kFail, fr::kFail));
    CHECK_FALSE(r.dispute);
    CHECK(r.ruling == "no dispute raised");
}

TEST_CASE("Fbar is flagged whenever they testify") {
    const Casino c = build_casino();
    for (const auto &t : {trace(fr::kOk, fr::kOk), trace(fr::kFail, fr::kOk)}) {
        const auto r = arbitrate(c, t);
        REQUIRE(r.dispute);
        CHECK(entry(r, "Fbar").flagged);
    }
}
