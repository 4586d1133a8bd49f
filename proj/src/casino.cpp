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

#include "solipsim/casino.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "solipsim/disclosure.hpp"
#include "solipsim/errors.hpp"

namespace solipsim {

namespace {

bool applies(const CasinoRule &rule, const RoundTrace &trace) {
    return std::all_of(rule.when.begin(), rule.when.end(),
                       [&](const AnnouncedOutcome &o) { return trace.label_of(o.agent) == o.label; });
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

const ReasoningChain &chain_of(const Casino &casino, const std::string &agent) {
    const auto &c = casino.chains;
    if (agent == "Fbar" && c.fbar) {
        return *c.fbar;
    }
    if (agent == "F" && c.f) {
        return *c.f;
    }
    if (agent == "Wbar" && c.wbar) {
        return *c.wbar;
    }
    throw MalformedInput("no reasoning chain for '" + agent + "'");
}

DisputeEntry evaluate(const Casino &casino, const CasinoRule &rule, const RoundTrace &trace) {
    DisputeEntry e{rule.party, "r=" + rule.claim, {}, false};
    switch (rule.check) {
    case CasinoCheck::sps_audit: {
        const auto verdicts = audit_chain(casino.bundle, chain_of(casino, rule.party));
        const auto it = std::find_if(verdicts.begin(), verdicts.end(),
                                     [&](const AuditVerdict &v) { return v.inference_id == rule.inference_id; });
        if (it == verdicts.end()) {
            throw MalformedInput("no inference '" + rule.inference_id + "' in the chain of " + rule.party);
        }
        e.flagged = !it->sps_compliant;
        e.finding = e.flagged ? "SPS-violating (" + it->note + ")" : "SPS-compliant";
        break;
    }
    case CasinoCheck::disclosure_compatibility: {
        const auto d = insert_disclosure(casino.bundle, default_disclosure_point(casino.bundle, rule.disclosed_agent));
        const auto &p = d.bundle.protocol;
        PureState s = run_unitary(p);
        for (std::size_t idx : p.announced_steps()) {
            const auto *m = p.steps()[idx].measure();
            if (const auto label = trace.label_of(m->agent)) {
                s = condition(s, memory_measurement(p, idx), *label).state;
            }
        }
        const double prob = born_probability(s, d.flag, rule.claim);
        e.flagged = prob < kCertainty;
        e.finding = (e.flagged ? "incompatible with " : "compatible with ") + rule.disclosed_agent +
                    "'s disclosed record (P(" + rule.disclosed_agent + " saw " + rule.claim + ") = " + fmt(prob) + ")";
        break;
    }
    case CasinoCheck::agency: {
        e.flagged = is_scripted(casino.bundle, rule.party);
        e.finding = e.flagged ? "agency ceded: their memory is later measured coherently"
                              : "eligible witness";
        break;
    }
    }
    return e;
}

} // namespace

Casino build_casino() {
    ScenarioBundle b = build_fr();
    b.name = "casino";
    FrChains chains = build_fr_chains(b);
    std::vector<CasinoRule> rules{
        {"Wbar", fr::kTails, {{"Wbar", fr::kOk}}, CasinoCheck::sps_audit, "Wbar3", {}},
        {"W", fr::kHeads, {{"W", fr::kOk}}, CasinoCheck::disclosure_compatibility, {}, "Fbar"},
        {"Fbar", fr::kTails, {}, CasinoCheck::agency, {}, {}},
    };
    return {std::move(b), std::move(chains), std::move(rules)};
}

DisputeReport arbitrate(const Casino &casino, const RoundTrace &trace) {
    DisputeReport report;
    report.trace = trace.announced;
    std::vector<const CasinoRule *> active;
    std::set<std::string> claims;
    for (const auto &r : casino.rules) {
        if (applies(r, trace)) {
            active.push_back(&r);
            claims.insert(r.claim);
        }
    }
    if (claims.size() < 2) {
        report.ruling = "no dispute raised";
        return report;
    }
    report.dispute = true;
    std::set<std::string> upheld;
    std::vector<std::string> winners;
    for (const auto *r : active) {
        report.entries.push_back(evaluate(casino, *r, trace));
        if (!report.entries.back().flagged) {
            upheld.insert(r->claim);
            winners.push_back(r->party);
        }
    }
    if (upheld.size() == 1) {
        report.ruling = "award the case to";
        for (const auto &w : winners) {
            report.ruling += " " + w;
        }
        report.ruling += " (r=" + *upheld.begin() + ")";
    } else {
        report.ruling = "undecided";
    }
    return report;
}

} // namespace solipsim
