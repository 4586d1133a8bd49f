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

#include "solipsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "solipsim/casino.hpp"
#include "solipsim/disclosure.hpp"
#include "solipsim/epistemics.hpp"
#include "solipsim/errors.hpp"
#include "solipsim/experiment.hpp"
#include "solipsim/rng.hpp"
#include "solipsim/scenarios.hpp"
#include "solipsim/usd.hpp"

namespace solipsim {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultShots = 120000;
constexpr std::uint64_t kDefaultRuns = 10000;
constexpr std::size_t kDefaultMaxRounds = 1000;
constexpr double kFidelityFloor = 1.0 - 1e-10;

const std::map<std::string, std::vector<std::string>> &scenario_modes() {
    static const std::map<std::string, std::vector<std::string>> m{
        {"alice-bob", {"unitary", "sample", "rounds"}},
        {"fr", {"unitary", "sample", "rounds", "audit", "disclose"}},
        {"fr-alt-prep", {"unitary", "sample", "rounds"}},
        {"casino", {"unitary", "sample", "rounds", "audit"}},
        {"fr-usd", {"usd"}},
        {"custom", {"unitary", "sample", "rounds"}},
    };
    return m;
}

std::string option(const RunConfig &c, const std::string &key, const std::string &fallback) {
    const auto it = c.options.find(key);
    return it == c.options.end() ? fallback : it->second;
}

std::uint64_t option_uint(const RunConfig &c, const std::string &key, std::uint64_t fallback) {
    const auto it = c.options.find(key);
    if (it == c.options.end()) {
        return fallback;
    }
    const std::string &s = it->second;
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
        throw MalformedInput("option --" + key + " expects a non-negative integer, got '" + s + "'");
    }
    return std::stoull(s);
}

std::string join(const std::vector<std::string> &parts, const std::string &sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? sep : "") + parts[i];
    }
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Accumulates the common report sections.
struct Builder {
    ojson probabilities = ojson::array();
    ojson fidelities = ojson::array();
    ojson checks = ojson::array();
    ojson sections = ojson::object();

    void probability(const std::string &name, double value) {
        ojson e;
        e["name"] = name;
        e["value"] = value;
        probabilities.push_back(std::move(e));
    }
    void fidelity(const std::string &name, double value, std::size_t prefix) {
        ojson e;
        e["name"] = name;
        e["prefix"] = prefix;
        e["value"] = value;
        fidelities.push_back(std::move(e));
    }
    bool check(const std::string &name, bool passed, const std::string &detail) {
        ojson e;
        e["name"] = name;
        e["passed"] = passed;
        e["detail"] = detail;
        checks.push_back(std::move(e));
        if (!passed) {
            spdlog::info("check failed: {} ({})", name, detail);
        }
        return passed;
    }
    [[nodiscard]] std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(checks.begin(), checks.end(), [](const ojson &c) { return !c["passed"].get<bool>(); }));
    }
};

// ---------------------------------------------------------------------------
// Scenario construction
// ---------------------------------------------------------------------------

WbarBasis wbar_basis(const RunConfig &c) {
    const std::string v = option(c, "wbar-basis", "okfail");
    if (v == "okfail") {
        return WbarBasis::okfail;
    }
    if (v == "ht") {
        return WbarBasis::ht;
    }
    throw MalformedInput("unknown W̄ basis '" + v + "' (expected okfail or ht)");
}

ScenarioBundle build_bundle(const RunConfig &c) {
    if (c.scenario == "alice-bob") {
        return build_alice_bob_matched();
    }
    if (c.scenario == "fr" || c.scenario == "fr-usd") {
        return build_fr(wbar_basis(c));
    }
    if (c.scenario == "fr-alt-prep") {
        return build_fr_alt_prep();
    }
    if (c.scenario == "casino") {
        return build_casino().bundle;
    }
    if (c.scenario == "custom") {
        const auto it = c.options.find("experiment");
        if (it == c.options.end()) {
            throw MalformedInput("scenario 'custom' requires --experiment <path>");
        }
        return load_experiment(it->second);
    }
    throw MalformedInput("unknown scenario '" + c.scenario + "'");
}

bool is_fr_family(const ScenarioBundle &b) {
    return b.has_agent("Wbar") && b.has_agent("W") && b.has_agent("F") && b.has_agent("Fbar");
}

bool has_label(const AgentInfo &a, const std::string &label) {
    return std::find(a.labels.begin(), a.labels.end(), label) != a.labels.end();
}

// ---------------------------------------------------------------------------
// Announced outcomes
// ---------------------------------------------------------------------------

struct AnnouncedView {
    std::vector<std::string> agents;
    std::vector<std::vector<std::string>> labels;
};

AnnouncedView announced_view(const Protocol &p) {
    AnnouncedView v;
    for (std::size_t idx : p.announced_steps()) {
        const auto *m = p.steps()[idx].measure();
        v.agents.push_back(m->agent);
        v.labels.push_back(m->measurement.labels());
    }
    return v;
}

/// Every complete outcome tuple, in lexicographic step order.
std::vector<std::vector<std::string>> outcome_tuples(const AnnouncedView &v) {
    std::vector<std::vector<std::string>> out{{}};
    for (const auto &labels : v.labels) {
        std::vector<std::vector<std::string>> next;
        for (const auto &prefix : out) {
            for (const auto &l : labels) {
                auto t = prefix;
                t.push_back(l);
                next.push_back(std::move(t));
            }
        }
        out = std::move(next);
    }
    return v.labels.empty() ? std::vector<std::vector<std::string>>{} : out;
}

std::string tuple_name(const AnnouncedView &v, const std::vector<std::string> &t) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < t.size(); ++i) {
        parts.push_back(v.agents[i] + "=" + t[i]);
    }
    return join(parts, ", ");
}

ojson tuple_json(const AnnouncedView &v, const std::vector<std::string> &t) {
    ojson o = ojson::object();
    for (std::size_t i = 0; i < t.size(); ++i) {
        o[v.agents[i]] = t[i];
    }
    return o;
}

RoundTrace trace_of(const AnnouncedView &v, const std::vector<std::string> &t) {
    RoundTrace r;
    for (std::size_t i = 0; i < t.size(); ++i) {
        r.announced.push_back({v.agents[i], t[i]});
    }
    return r;
}

ojson dispute_json(const DisputeReport &d) {
    ojson o;
    ojson trace = ojson::object();
    for (const auto &a : d.trace) {
        trace[a.agent] = a.label;
    }
    o["trace"] = trace;
    o["dispute"] = d.dispute;
    ojson entries = ojson::array();
    for (const auto &e : d.entries) {
        ojson x;
        x["party"] = e.party;
        x["claim"] = e.claim;
        x["flagged"] = e.flagged;
        x["finding"] = e.finding;
        entries.push_back(std::move(x));
    }
    o["entries"] = entries;
    o["ruling"] = d.ruling;
    return o;
}

// ---------------------------------------------------------------------------
// unitary
// ---------------------------------------------------------------------------

void reference_checks(Builder &B, const ScenarioBundle &b) {
    for (const auto &[name, ref] : b.reference_states) {
        const double f = fidelity(run_prefix(b.protocol, ref.prefix), ref.state);
        B.fidelity(name, f, ref.prefix);
        B.check("reference " + name, f >= kFidelityFloor, "fidelity " + fmt(f) + " after " +
                                                              std::to_string(ref.prefix) + " steps");
    }
}

void fr_predictions(Builder &B, const ScenarioBundle &b, const std::string &tag) {
    // F's forecasts from z=+1/2, evaluated right after F̄ and F have both measured.
    const std::size_t at = 5;
    const AgentInfo &f = b.agent("F");
    const ObservationalRecord rec("F", {{f.observable, fr::kPlusHalf, f.step}});
    const std::vector<Event> events{
        {"wbar=ok", b.measurement("wbar"), fr::kOk, at},
        {"wbar=fail", b.measurement("wbar"), fr::kFail, at},
        record_event(b, "r", fr::kTails, at),
        {"w=ok", b.measurement("w"), fr::kOk, 6},
        {"w=fail", b.measurement("w"), fr::kFail, 6},
    };
    for (const auto &e : events) {
        const std::string desc = e.description.empty() ? "r_record=tails" : e.description;
        B.probability(tag + "P(" + desc + " | z=+1/2)", infer_q(b, rec, at, e));
    }
}

void mode_unitary(Builder &B, const RunConfig &c, const ScenarioBundle &b) {
    const Protocol &p = b.protocol;
    const PureState final_state = run_unitary(p);
    reference_checks(B, b);

    const AnnouncedView view = announced_view(p);
    const auto tuples = outcome_tuples(view);
    if (!tuples.empty()) {
        const auto joint = announced_record_measurement(p);
        double total = 0.0;
        double halt = 0.0;
        std::map<std::vector<std::string>, double> probs;
        for (const auto &t : tuples) {
            const double pr = born_probability(final_state, joint, join(t, ","));
            probs[t] = pr;
            total += pr;
            if (p.halting().satisfied_by(trace_of(view, t))) {
                halt += pr;
            }
            B.probability("P(" + tuple_name(view, t) + ")", pr);
        }
        B.probability("P(halt)", halt);
        B.check("announced distribution normalized", std::abs(total - 1.0) <= 1e-12, "sum " + fmt(total));

        if (is_fr_family(b) && has_label(b.agent("Wbar"), fr::kOk)) {
            const double ok_ok = probs.at({fr::kOk, fr::kOk});
            const double wbar_ok = ok_ok + probs.at({fr::kOk, fr::kFail});
            const double cond = ok_ok / wbar_ok;
            B.probability("P(W=ok | Wbar=ok)", cond);
            B.check("halting probability 1/12", std::abs(halt - 1.0 / 12.0) <= 1e-12, "P(halt) = " + fmt(halt));
            B.check("P(W=ok | Wbar=ok) = 1/2", std::abs(cond - 0.5) <= 1e-12, "value " + fmt(cond));
        }
    }

    if (c.scenario == "alice-bob") {
        // Bob's matched basis agrees with Alice's record on every branch.
        const AgentInfo &alice = b.agent("Alice");
        const auto &b_record = b.measurement("b_record");
        const std::vector<std::pair<std::string, std::string>> pairs{{"zero", "0,0,zero"}, {"one", "1,1,one"}};
        double agree = 0.0;
        for (const auto &[a_label, b_label] : pairs) {
            const ObservationalRecord rec("Alice", {{alice.observable, a_label, alice.step}});
            const double pa = born_probability(run_prefix(p, alice.step + 1), b.measurement("m_record"), a_label);
            const Event e{"Bob records " + b_label, b_record, b_label, p.size()};
            const double pb = infer_q(b, rec, alice.step + 1, e);
            B.probability("P(Bob=" + b_label + " | Alice=" + a_label + ")", pb);
            agree += pa * pb;
        }
        B.probability("P(Bob agrees with Alice)", agree);
        B.check("Bob agrees with Alice", std::abs(agree - 1.0) <= 1e-12, "probability " + fmt(agree));

        const ScenarioBundle bell = build_alice_bob_bell();
        const PureState bell_final = run_unitary(bell.protocol);
        for (const std::string label : {"Phi+,+", "Phi-,-", "other"}) {
            B.probability("bell: P(Bob=" + label + ")", born_probability(bell_final, bell.measurement("b_record"),
                                                                          label));
        }
        const double f = fidelity(b.reference("phi_SMA").state, b.reference("phi_SMA_bell").state);
        B.fidelity("phi_SMA vs Bell re-expression", f, b.reference("phi_SMA").prefix);
        B.check("Bell re-expression equal", f >= kFidelityFloor, "fidelity " + fmt(f));
    }

    if (c.scenario == "fr-alt-prep") {
        const ScenarioBundle base = build_fr();
        const double f = fidelity(run_prefix(p, 5), base.reference("phi").state);
        B.fidelity("junction vs fr phi", f, 5);
        B.check("junction state equals fr phi", f >= kFidelityFloor, "fidelity " + fmt(f));
        Builder alt;
        Builder ref;
        fr_predictions(alt, b, "");
        fr_predictions(ref, base, "");
        double worst = 0.0;
        for (std::size_t i = 0; i < alt.probabilities.size(); ++i) {
            const double x = alt.probabilities[i]["value"].get<double>();
            const double y = ref.probabilities[i]["value"].get<double>();
            worst = std::max(worst, std::abs(x - y));
            B.probability("alt: " + alt.probabilities[i]["name"].get<std::string>(), x);
            B.probability("fr: " + ref.probabilities[i]["name"].get<std::string>(), y);
        }
        B.check("F's predictions match across preparations", worst <= 1e-12, "max difference " + fmt(worst));
    }

    if (c.scenario == "casino") {
        const Casino casino = build_casino();
        ojson table = ojson::array();
        for (const auto &t : tuples) {
            const DisputeReport d = arbitrate(casino, trace_of(view, t));
            table.push_back(dispute_json(d));
            if (t == std::vector<std::string>{fr::kOk, fr::kOk}) {
                B.check("halting round disputed", d.dispute, d.ruling);
                B.check("halting round awarded to W", d.ruling == "award the case to W (r=heads)", d.ruling);
            }
        }
        B.sections["casino"] = table;
    }
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

void mode_sample(Builder &B, const RunConfig &c, const ScenarioBundle &b) {
    const Protocol &p = b.protocol;
    const std::uint64_t shots = c.shots.value_or(kDefaultShots);
    const auto workers = static_cast<unsigned>(std::max<std::uint64_t>(1, option_uint(c, "workers", 1)));
    spdlog::info("sampling {} rounds on {} worker(s)", shots, workers);
    const SampleCounts counts = sample_counts(p, c.seed, shots, workers);
    Sampler exact(p);
    const AnnouncedView view = announced_view(p);
    const auto n = static_cast<double>(shots);

    ojson outcomes = ojson::array();
    for (const auto &t : outcome_tuples(view)) {
        const std::uint64_t k = counts.count(t);
        const double freq = static_cast<double>(k) / n;
        const double pr = exact.sequence_probability(t);
        const double sigma = std::sqrt(pr * (1.0 - pr) / n);
        ojson o;
        o["outcome"] = tuple_json(view, t);
        o["count"] = k;
        o["frequency"] = freq;
        o["exact"] = pr;
        o["sigma"] = sigma;
        outcomes.push_back(std::move(o));
        B.probability("sampled P(" + tuple_name(view, t) + ")", freq);
        B.check("sampled P(" + tuple_name(view, t) + ") within 3 sigma", std::abs(freq - pr) <= 3 * sigma + 1e-12,
                "frequency " + fmt(freq) + ", exact " + fmt(pr) + ", sigma " + fmt(sigma));
    }

    ojson conditionals = ojson::array();
    if (is_fr_family(b) && has_label(b.agent("Wbar"), fr::kOk)) {
        const std::uint64_t both = counts.count({fr::kOk, fr::kOk});
        const std::uint64_t given = both + counts.count({fr::kOk, fr::kFail});
        const double pr = exact.sequence_probability({fr::kOk, fr::kOk}) /
                          (exact.sequence_probability({fr::kOk, fr::kOk}) +
                           exact.sequence_probability({fr::kOk, fr::kFail}));
        const double freq = given ? static_cast<double>(both) / static_cast<double>(given) : 0.0;
        const double sigma = given ? std::sqrt(pr * (1.0 - pr) / static_cast<double>(given)) : 0.0;
        ojson o;
        o["name"] = "P(W=ok | Wbar=ok)";
        o["conditioning_count"] = given;
        o["count"] = both;
        o["frequency"] = freq;
        o["exact"] = pr;
        o["sigma"] = sigma;
        conditionals.push_back(std::move(o));
        B.probability("sampled P(W=ok | Wbar=ok)", freq);
        B.check("sampled P(W=ok | Wbar=ok) within 3 sigma", given > 0 && std::abs(freq - pr) <= 3 * sigma + 1e-12,
                "frequency " + fmt(freq) + " over " + std::to_string(given) + " rounds, exact " + fmt(pr));
    }

    ojson s;
    s["shots"] = shots;
    s["agents"] = view.agents;
    s["outcomes"] = outcomes;
    s["conditionals"] = conditionals;
    B.sections["samples"] = s;

    if (c.scenario == "casino") {
        const Casino casino = build_casino();
        ojson table = ojson::array();
        for (const auto &t : outcome_tuples(view)) {
            if (const std::uint64_t k = counts.count(t); k > 0) {
                ojson row = dispute_json(arbitrate(casino, trace_of(view, t)));
                row["count"] = k;
                table.push_back(std::move(row));
            }
        }
        B.sections["casino"] = table;
    }
}

// ---------------------------------------------------------------------------
// rounds
// ---------------------------------------------------------------------------

void mode_rounds(Builder &B, const RunConfig &c, const ScenarioBundle &b) {
    const Protocol &p = b.protocol;
    const std::uint64_t runs = c.shots.value_or(kDefaultRuns);
    const std::size_t max_rounds = option_uint(c, "max-rounds", kDefaultMaxRounds);
    if (max_rounds == 0) {
        throw MalformedInput("--max-rounds must be at least 1");
    }
    Sampler sampler(p);
    const AnnouncedView view = announced_view(p);
    double p_halt = 1.0;
    if (!p.halting().trivial()) {
        p_halt = 0.0;
        for (const auto &t : outcome_tuples(view)) {
            if (p.halting().satisfied_by(trace_of(view, t))) {
                p_halt += sampler.sequence_probability(t);
            }
        }
    }

    std::uint64_t halted = 0;
    std::uint64_t exhausted = 0;
    double sum = 0.0;
    std::size_t longest = 0;
    for (std::uint64_t j = 0; j < runs; ++j) {
        const RoundsOutcome r = run_rounds(sampler, SplitMix64::derive(c.seed, j), max_rounds);
        if (r.exhausted()) {
            ++exhausted;
        } else {
            ++halted;
            sum += static_cast<double>(*r.halted_at);
            longest = std::max(longest, *r.halted_at);
        }
    }

    // Truncated geometric law of the halting round.
    double mass = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double survive = 1.0;
    for (std::size_t t = 1; t <= max_rounds; ++t) {
        const double w = survive * p_halt;
        mass += w;
        m1 += w * static_cast<double>(t);
        m2 += w * static_cast<double>(t) * static_cast<double>(t);
        survive *= 1.0 - p_halt;
    }
    const double q_exhaust = survive;
    const double mean_exact = mass > 0 ? m1 / mass : 0.0;
    const double var_exact = mass > 0 ? m2 / mass - mean_exact * mean_exact : 0.0;
    const double mean = halted ? sum / static_cast<double>(halted) : 0.0;

    ojson r;
    r["runs"] = runs;
    r["max_rounds"] = max_rounds;
    r["halting_probability"] = p_halt;
    r["halted"] = halted;
    r["exhausted"] = exhausted;
    r["mean_rounds"] = mean;
    r["expected_mean_rounds"] = mean_exact;
    r["longest"] = longest;
    r["expected_exhausted_fraction"] = q_exhaust;
    B.sections["rounds"] = r;
    B.probability("P(halt per round)", p_halt);

    if (halted > 0) {
        const double se = std::sqrt(std::max(var_exact, 0.0) / static_cast<double>(halted));
        B.check("mean halting round within 3 sigma", std::abs(mean - mean_exact) <= 3 * se + 1e-9,
                "mean " + fmt(mean) + ", expected " + fmt(mean_exact) + ", standard error " + fmt(se));
    }
    const double frac = static_cast<double>(exhausted) / static_cast<double>(runs);
    const double se = std::sqrt(q_exhaust * (1.0 - q_exhaust) / static_cast<double>(runs));
    B.check("exhausted fraction within 3 sigma", std::abs(frac - q_exhaust) <= 3 * se + 1e-12,
            "fraction " + fmt(frac) + ", expected " + fmt(q_exhaust));

    if (c.scenario == "casino" && halted > 0) {
        RoundTrace t;
        t.announced = p.halting().required;
        B.sections["casino"] = ojson::array({dispute_json(arbitrate(build_casino(), t))});
    }
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

std::shared_ptr<const ReasoningChain> with_intinf(const std::shared_ptr<const ReasoningChain> &chain, bool on,
                                                  std::map<const ReasoningChain *, std::shared_ptr<const ReasoningChain>> &done) {
    if (!chain) {
        return nullptr;
    }
    if (const auto it = done.find(chain.get()); it != done.end()) {
        return it->second;
    }
    auto copy = std::make_shared<ReasoningChain>(*chain);
    for (auto &inf : copy->steps) {
        inf.sub_chain = with_intinf(inf.sub_chain, on, done);
        if (inf.rule == Rule::C && inf.c_kind == CKind::inherit) {
            inf.intinf = on;
        }
    }
    done[chain.get()] = copy;
    return copy;
}

ojson verdict_json(const AuditVerdict &v) {
    ojson o;
    o["id"] = v.inference_id;
    o["agent"] = v.agent;
    o["rule"] = v.rule;
    o["conclusion"] = v.conclusion;
    o["asserted"] = v.asserted;
    o["derived"] = v.derived;
    o["certainty"] = v.certainty;
    o["premises_hold"] = v.premises_hold;
    o["self_state_holds"] = v.self_state_holds;
    o["sps_compliant"] = v.sps_compliant;
    o["scripted"] = v.scripted;
    o["empirically_sound"] = to_string(v.empirically_sound);
    o["disclosure_sound"] = v.disclosure_sound ? ojson(*v.disclosure_sound) : ojson(nullptr);
    o["note"] = v.note;
    return o;
}

ojson record_json(const ObservationalRecord &r) {
    ojson a = ojson::array();
    for (const auto &e : r.entries()) {
        ojson o;
        o["observable"] = e.observable;
        o["value"] = e.value;
        o["step"] = e.step;
        o["provenance"] = to_string(e.provenance);
        a.push_back(std::move(o));
    }
    return a;
}

ojson point_json(const DisclosurePoint &pt, const std::string &basis) {
    ojson o;
    o["agent"] = pt.agent;
    o["after_step"] = pt.after_step;
    o["wbar_basis"] = basis;
    o["flag_register"] = pt.flag_register;
    return o;
}

ObservationalRecord union_along(const ReasoningChain &chain, std::size_t index) {
    const Inference &inf = chain.steps.at(index);
    if (inf.rule == Rule::C && inf.sub_chain) {
        const ObservationalRecord inner =
            inf.c_kind == CKind::inherit && inf.inherited ? union_along(*inf.sub_chain, *inf.inherited)
                                                          : inf.sub_chain->record;
        return chain.record.merged(inner);
    }
    return chain.record;
}

ojson inheritance_json(Builder &B, const ScenarioBundle &b, const ReasoningChain &outer, const ReasoningChain &inner) {
    ojson runs = ojson::array();
    for (const bool on : {false, true}) {
        const InferCResult res = infer_c(b, outer.record, outer.at_step, inner, on);
        ojson o;
        o["outer"] = outer.agent;
        o["inner"] = inner.agent;
        o["intinf"] = on;
        o["conflict"] = res.conflict;
        o["note"] = res.note;
        ojson list = ojson::array();
        for (std::size_t j = 0; j < res.inferences.size(); ++j) {
            const Inference &inf = res.inferences[j];
            ojson x;
            x["id"] = inf.id;
            x["event"] = inf.conclusion.event.description;
            x["probability"] = inf.conclusion.probability;
            list.push_back(std::move(x));
            if (on && !res.conflict) {
                const ObservationalRecord u = outer.record.merged(union_along(inner, j));
                const double q = infer_q(b, u, outer.at_step, inf.conclusion.event);
                B.check("intinf " + outer.agent + " on " + inf.id + " equals Q on the union record",
                        q == inf.conclusion.probability, "C " + fmt(inf.conclusion.probability) + ", Q " + fmt(q));
            }
        }
        o["conclusions"] = list;
        runs.push_back(std::move(o));
    }
    return runs;
}

void mode_audit(Builder &B, const RunConfig &c, const ScenarioBundle &b) {
    if (wbar_basis(c) != WbarBasis::okfail) {
        throw MalformedInput("audit needs the okfail W̄ basis");
    }
    const std::string intinf_opt = option(c, "intinf", "off");
    if (intinf_opt != "on" && intinf_opt != "off") {
        throw MalformedInput("--intinf expects on or off, got '" + intinf_opt + "'");
    }
    const bool intinf = intinf_opt == "on";
    const std::uint64_t shots = c.shots.value_or(kDefaultShots);

    const FrChains base = build_fr_chains(b);
    std::map<const ReasoningChain *, std::shared_ptr<const ReasoningChain>> done;
    const FrChains chains{with_intinf(base.fbar, intinf, done), with_intinf(base.f, intinf, done),
                          with_intinf(base.wbar, intinf, done)};
    const ScenarioBundle ht = build_fr(WbarBasis::ht);

    ojson out = ojson::array();
    std::vector<AuditVerdict> all;

    {
        auto v = audit_chain(b, *chains.fbar);
        const DisclosurePoint pt = default_disclosure_point(b, "Fbar");
        const auto d = vdis_oracle(b, *chains.fbar, pt);
        attach_disclosure(v, d);
        ojson o;
        o["agent"] = "Fbar";
        o["at_step"] = chains.fbar->at_step;
        o["record"] = record_json(chains.fbar->record);
        o["soundness_check"] = "virtual disclosure";
        o["disclosure_point"] = point_json(pt, "okfail");
        ojson rows = ojson::array();
        for (const auto &x : d) {
            ojson r;
            r["id"] = x.inference_id;
            r["probability"] = x.probability;
            r["sound"] = x.sound;
            rows.push_back(std::move(r));
        }
        o["disclosure"] = rows;
        ojson vs = ojson::array();
        for (const auto &x : v) {
            vs.push_back(verdict_json(x));
        }
        o["verdicts"] = vs;
        out.push_back(std::move(o));
        all.insert(all.end(), v.begin(), v.end());
    }
    {
        // F's record survives only when W̄ measures in the {h, t} basis.
        auto v = audit_chain(b, *chains.f);
        const DisclosurePoint pt = default_disclosure_point(ht, "F");
        const auto d = vdis_oracle(ht, *chains.f, pt);
        attach_disclosure(v, d);
        ojson o;
        o["agent"] = "F";
        o["at_step"] = chains.f->at_step;
        o["record"] = record_json(chains.f->record);
        o["soundness_check"] = "virtual disclosure";
        o["disclosure_point"] = point_json(pt, "ht");
        ojson rows = ojson::array();
        for (const auto &x : d) {
            ojson r;
            r["id"] = x.inference_id;
            r["probability"] = x.probability;
            r["sound"] = x.sound;
            rows.push_back(std::move(r));
        }
        o["disclosure"] = rows;
        ojson vs = ojson::array();
        for (const auto &x : v) {
            vs.push_back(verdict_json(x));
        }
        o["verdicts"] = vs;
        out.push_back(std::move(o));
        all.insert(all.end(), v.begin(), v.end());
    }
    {
        auto v = audit_chain(b, *chains.wbar);
        const auto a = announced_outcome_check(b, *chains.wbar, c.seed, shots);
        attach_announced(v, a);
        ojson o;
        o["agent"] = "Wbar";
        o["at_step"] = chains.wbar->at_step;
        o["record"] = record_json(chains.wbar->record);
        o["soundness_check"] = "announced outcomes";
        o["disclosure_point"] = nullptr;
        ojson rows = ojson::array();
        for (const auto &x : a) {
            ojson r;
            r["id"] = x.inference_id;
            r["probability"] = x.exact;
            r["sampled"] = x.sampled ? ojson(*x.sampled) : ojson(nullptr);
            r["standard_error"] = x.standard_error ? ojson(*x.standard_error) : ojson(nullptr);
            r["conditioning_shots"] = x.conditioning_shots;
            r["sound"] = x.sound;
            rows.push_back(std::move(r));
        }
        o["disclosure"] = rows;
        ojson vs = ojson::array();
        for (const auto &x : v) {
            vs.push_back(verdict_json(x));
        }
        o["verdicts"] = vs;
        out.push_back(std::move(o));
        all.insert(all.end(), v.begin(), v.end());
    }

    std::size_t audited = 0;
    std::size_t agree = 0;
    for (const auto &v : all) {
        if (!v.certainty || !v.disclosure_sound) {
            continue;
        }
        ++audited;
        agree += v.sps_compliant == *v.disclosure_sound ? 1 : 0;
    }
    B.probability("claim-1 agreement", audited ? static_cast<double>(agree) / static_cast<double>(audited) : 0.0);
    B.check("SPS compliance matches disclosure soundness", audited > 0 && agree == audited,
            std::to_string(agree) + "/" + std::to_string(audited) + " certainty conclusions agree");

    if (!intinf) {
        const std::map<std::string, bool> expected{
            {"Fbar1", true}, {"Fbar2", true}, {"F1", true},     {"F2", true},     {"F3", false},
            {"Wbar1", true}, {"Wbar2", true}, {"Wbar3", false}, {"Wbar4", false},
        };
        std::vector<std::string> mismatched;
        for (const auto &v : all) {
            const auto it = expected.find(v.inference_id);
            if (it == expected.end() || it->second != v.sps_compliant) {
                mismatched.push_back(v.inference_id);
            }
        }
        const bool scripted_ok = all.size() == expected.size() && all[0].scripted && all[1].scripted &&
                                 !all[5].scripted;
        B.check("verdict table", mismatched.empty() && all.size() == expected.size() && scripted_ok,
                mismatched.empty() ? "Fbar compliant and scripted; F3, Wbar3, Wbar4 non-compliant"
                                   : "mismatch at " + join(mismatched, ", "));
    }

    ojson inh = ojson::array();
    for (auto &x : inheritance_json(B, b, *base.f, *base.fbar)) {
        inh.push_back(std::move(x));
    }
    for (auto &x : inheritance_json(B, b, *base.wbar, *base.f)) {
        inh.push_back(std::move(x));
    }
    ojson a;
    a["intinf"] = intinf;
    a["chains"] = out;
    a["inheritance"] = inh;
    B.sections["audit"] = a;

    if (c.scenario == "casino") {
        const Casino casino = build_casino();
        const AnnouncedView view = announced_view(b.protocol);
        ojson table = ojson::array();
        for (const auto &t : outcome_tuples(view)) {
            table.push_back(dispute_json(arbitrate(casino, trace_of(view, t))));
        }
        B.sections["casino"] = table;
    }
}

// ---------------------------------------------------------------------------
// disclose
// ---------------------------------------------------------------------------

void mode_disclose(Builder &B, const RunConfig &c, const ScenarioBundle &b) {
    const std::string agent = option(c, "agent", "Fbar");
    if (!b.has_agent(agent)) {
        throw MalformedInput("unknown agent '" + agent + "'");
    }
    const WbarBasis basis = wbar_basis(c);
    const std::string basis_name = basis == WbarBasis::ht ? "ht" : "okfail";
    DisclosurePoint pt = default_disclosure_point(b, agent);
    const bool default_point = !c.options.count("after-step");
    if (!default_point) {
        pt.after_step = option_uint(c, "after-step", pt.after_step);
    }
    const DisclosedBundle d = insert_disclosure(b, pt);
    const PureState final_state = run_unitary(d.bundle.protocol);
    const Distribution flag = born(final_state, d.flag);
    const std::size_t end = b.protocol.size();

    std::vector<Event> events{
        {"w=ok", b.measurement("w"), fr::kOk, fr::kWStep},
        {"w=fail", b.measurement("w"), fr::kFail, fr::kWStep},
    };
    Event r_tails = record_event(b, "r", fr::kTails, end);
    r_tails.description = "r_record=tails";
    events.push_back(r_tails);
    if (basis == WbarBasis::ht) {
        Event t = record_event(b, "wbar", "t", end);
        t.description = "wbar_record=t";
        events.push_back(t);
    }

    ojson cond = ojson::array();
    std::map<std::pair<std::string, std::string>, double> table;
    for (std::size_t k = 0; k < flag.size(); ++k) {
        const std::string &g = flag.labels()[k];
        B.probability("P(G=" + g + ")", flag.probabilities()[k]);
        if (flag.probabilities()[k] < kImpossibleThreshold) {
            continue;
        }
        for (const auto &e : events) {
            const double pr = evaluate_conclusion(d, g, e);
            table[{g, e.description}] = pr;
            ojson o;
            o["flag"] = g;
            o["event"] = e.description;
            o["step"] = e.step;
            o["probability"] = pr;
            cond.push_back(std::move(o));
            B.probability("P(" + e.description + " | G=" + g + ")", pr);
        }
    }

    ojson verdicts = ojson::array();
    const FrChains chains = build_fr_chains(b);
    const ReasoningChain *chain = agent == "Fbar" ? chains.fbar.get() : agent == "F" ? chains.f.get() : nullptr;
    if (chain != nullptr) {
        for (const auto &v : vdis_oracle(b, *chain, pt)) {
            ojson o;
            o["id"] = v.inference_id;
            o["certainty"] = v.certainty;
            o["probability"] = v.probability;
            o["sound"] = v.sound;
            verdicts.push_back(std::move(o));
        }
    }

    if (default_point && agent == "Fbar") {
        const double pr = table.at({fr::kTails, "w=fail"});
        B.check("Fbar disclosure: P(w=fail | G=tails) = 1", pr >= 1.0 - 1e-10, "value " + fmt(pr));
    }
    if (default_point && agent == "F" && basis == WbarBasis::okfail) {
        const double pr = table.at({fr::kPlusHalf, "w=fail"});
        B.check("F disclosure: P(w=fail | G=+1/2) = 1/2", std::abs(pr - 0.5) <= 1e-10, "value " + fmt(pr));
    }
    if (default_point && agent == "F" && basis == WbarBasis::ht) {
        const double pr = table.at({fr::kPlusHalf, "r_record=tails"});
        B.check("F disclosure, ht basis: P(r_record=tails | G=+1/2) = 1", pr >= 1.0 - 1e-10, "value " + fmt(pr));
    }

    ojson o;
    o["point"] = point_json(pt, basis_name);
    o["position"] = d.position;
    o["flag_labels"] = flag.labels();
    o["conditionals"] = cond;
    o["verdicts"] = verdicts;
    B.sections["disclosure"] = o;
}

// ---------------------------------------------------------------------------
// usd
// ---------------------------------------------------------------------------

void mode_usd(Builder &B, const RunConfig &, const ScenarioBundle &b) {
    const DiscriminationInstance inst = build_fr_usd_instance();
    const UsdStrategy s = optimal_usd(inst);
    const PureState &a = inst.state_a;
    const PureState &bs = inst.state_b;

    ojson effects = ojson::array();
    const std::vector<std::pair<std::string, Vector>> basis{{"hbar", b.composite("hbar").amplitudes()},
                                                            {"tbar", b.composite("tbar").amplitudes()}};
    double imag = 0.0;
    for (const auto &[label, m] : s.povm.effects()) {
        ojson rows = ojson::array();
        for (const auto &x : basis) {
            ojson row = ojson::array();
            for (const auto &y : basis) {
                const Complex e = x.second.dot(m * y.second);
                imag = std::max(imag, std::abs(e.imag()));
                row.push_back(e.real());
            }
            rows.push_back(std::move(row));
        }
        ojson o;
        o["label"] = label;
        o["matrix"] = rows;
        effects.push_back(std::move(o));
    }

    const double err_a = s.povm.probability(a, kGuessB);
    const double err_b = s.povm.probability(bs, kGuessA);
    B.probability("prior a (W=ok branch)", inst.prior_a);
    B.probability("prior b (W=fail branch)", inst.prior_b);
    B.probability("overlap |<a|b>|", inst.overlap());
    B.probability("P(inconclusive)", s.inconclusive);
    B.probability("P(guess-b | a)", err_a);
    B.probability("P(guess-a | b)", err_b);
    B.check("error-free", err_a <= 1e-10 && err_b <= 1e-10, "errors " + fmt(err_a) + ", " + fmt(err_b));
    B.check("effects real in the hbar, tbar basis", imag <= 1e-12, "max imaginary part " + fmt(imag));
    const double weighted = inst.prior_a * s.q_a + inst.prior_b * s.q_b;
    B.check("inconclusive probability is the prior-weighted failure", std::abs(weighted - s.inconclusive) <= 1e-12,
            "weighted " + fmt(weighted) + ", reported " + fmt(s.inconclusive));
    const double ov2 = inst.overlap() * inst.overlap();
    double worst_neighbour = 1.0;
    for (const double qa : {s.q_a - 1e-3, s.q_a + 1e-3}) {
        if (qa >= ov2 && qa <= 1.0) {
            worst_neighbour = std::min(worst_neighbour, usd_strategy(inst, qa).inconclusive);
        }
    }
    B.check("locally optimal", s.inconclusive <= worst_neighbour + 1e-12,
            "best neighbour " + fmt(worst_neighbour) + ", optimum " + fmt(s.inconclusive));

    ojson preds = ojson::array();
    ojson e2e = ojson::array();
    for (const auto &r : usd_end_to_end(b, s)) {
        const UsdPrediction pr = usd_predictions(r.outcome);
        ojson p;
        p["outcome"] = pr.outcome;
        p["predicted_w"] = pr.w;
        p["certain"] = pr.certain;
        p["statement"] = pr.statement;
        preds.push_back(std::move(p));
        ojson o;
        o["outcome"] = r.outcome;
        o["probability"] = r.outcome_probability;
        o["predicted_w"] = r.predicted_w;
        o["p_w_ok"] = r.p_w_ok;
        o["p_w_fail"] = r.p_w_fail;
        o["limit"] = r.limit;
        e2e.push_back(std::move(o));
        B.probability("P(O=" + r.outcome + ")", r.outcome_probability);
        B.probability("P(W=ok | O=" + r.outcome + ")", r.p_w_ok);
        if (r.outcome == kGuessA) {
            B.check("guess-a implies W=ok", r.p_w_ok >= 1.0 - 1e-10, "P(W=ok | guess-a) = " + fmt(r.p_w_ok));
        } else if (r.outcome == kGuessB) {
            B.check("guess-b implies W=fail", r.p_w_fail >= 1.0 - 1e-10,
                    "P(W=fail | guess-b) = " + fmt(r.p_w_fail));
        }
    }

    ojson u;
    u["priors"] = {inst.prior_a, inst.prior_b};
    u["overlap"] = inst.overlap();
    u["q_a"] = s.q_a;
    u["q_b"] = s.q_b;
    u["inconclusive"] = s.inconclusive;
    u["basis"] = {"hbar", "tbar"};
    u["effects"] = effects;
    u["predictions"] = preds;
    u["end_to_end"] = e2e;
    B.sections["usd"] = u;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string number_text(double x, const char *format) {
    if (!std::isfinite(x)) {
        return "null";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

void write_json(const ojson &j, std::string &out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case ojson::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (const auto &[k, v] : j.items()) {
            out += pad + ojson(k).dump() + ": ";
            write_json(v, out, indent + 2);
            out += ++i < j.size() ? ",\n" : "\n";
        }
        out += close + "}";
        return;
    }
    case ojson::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            out += pad;
            write_json(j[i], out, indent + 2);
            out += i + 1 < j.size() ? ",\n" : "\n";
        }
        out += close + "]";
        return;
    }
    case ojson::value_t::number_float:
        out += number_text(j.get<double>(), "%.17g");
        return;
    default:
        out += j.dump();
    }
}

std::string scalar_text(const ojson &j) {
    switch (j.type()) {
    case ojson::value_t::string:
        return j.get<std::string>();
    case ojson::value_t::number_float:
        return number_text(j.get<double>(), "%.10g");
    default:
        return j.dump();
    }
}

bool is_scalar(const ojson &j) { return !j.is_object() && !j.is_array(); }

void write_text(const ojson &j, std::string &out, int indent);

void write_entry(const std::string &key, const ojson &v, std::string &out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (is_scalar(v) || v.empty()) {
        out += pad + key + ": " + (v.is_array() ? "[]" : v.is_object() ? "{}" : scalar_text(v)) + "\n";
        return;
    }
    if (v.is_array() && std::all_of(v.begin(), v.end(), is_scalar)) {
        std::vector<std::string> parts;
        for (const auto &x : v) {
            parts.push_back(scalar_text(x));
        }
        out += pad + key + ": [" + join(parts, ", ") + "]\n";
        return;
    }
    out += pad + key + ":\n";
    write_text(v, out, indent + 2);
}

void write_text(const ojson &j, std::string &out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        for (const auto &[k, v] : j.items()) {
            write_entry(k, v, out, indent);
        }
        return;
    }
    for (const auto &x : j) {
        if (x.is_object() && x.contains("name") && x.contains("value") && x.size() <= 3) {
            out += pad + "- " + x["name"].get<std::string>() + " = " + scalar_text(x["value"]) + "\n";
        } else if (x.is_object() && x.contains("name") && x.contains("passed")) {
            out += pad + (x["passed"].get<bool>() ? "[pass] " : "[FAIL] ") + x["name"].get<std::string>() +
                   " (" + x["detail"].get<std::string>() + ")\n";
        } else if (is_scalar(x)) {
            out += pad + "- " + scalar_text(x) + "\n";
        } else {
            out += pad + "-\n";
            write_text(x, out, indent + 2);
        }
    }
}

void configure_logging() {
    static const bool once = [] {
        auto logger = spdlog::stderr_logger_st("solipsim");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
        return true;
    }();
    (void)once;
    const char *env = std::getenv("SOLIPSIM_LOG");
    const std::string level = env ? env : "off";
    if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else if (level == "info") {
        spdlog::set_level(spdlog::level::info);
    } else {
        spdlog::set_level(spdlog::level::off);
    }
}

} // namespace

const std::vector<std::string> &scenario_names() {
    static const std::vector<std::string> names{"alice-bob", "fr", "fr-alt-prep", "casino", "fr-usd", "custom"};
    return names;
}

const std::vector<std::string> &mode_names() {
    static const std::vector<std::string> names{"unitary", "sample", "rounds", "audit", "disclose", "usd"};
    return names;
}

std::vector<std::string> modes_for(const std::string &scenario) {
    const auto it = scenario_modes().find(scenario);
    return it == scenario_modes().end() ? std::vector<std::string>{} : it->second;
}

ParseOutcome parse_args(const std::vector<std::string> &args) {
    CLI::App app{"Wigner's-friend protocol simulator", "solipsim"};
    app.require_subcommand(1);
    auto *run = app.add_subcommand("run", "Run a scenario in one mode");

    std::string scenario;
    std::optional<std::string> mode;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> shots;
    std::string output = "text";
    std::optional<std::string> agent;
    std::optional<std::size_t> after_step;
    std::optional<std::string> wbar;
    std::optional<std::string> intinf;
    std::optional<std::string> experiment;
    std::optional<std::size_t> max_rounds;
    std::optional<unsigned> workers;

    run->add_option("scenario", scenario, "alice-bob, fr, fr-alt-prep, casino, fr-usd or custom")->required();
    run->add_option("--mode", mode, "unitary, sample, rounds, audit, disclose or usd");
    run->add_option("--seed", seed, "64-bit seed");
    run->add_option("--shots", shots, "rounds to sample (runs in rounds mode)")->check(CLI::PositiveNumber);
    run->add_option("--output", output, "text or json")->check(CLI::IsMember({"text", "json"}));
    run->add_option("--agent", agent, "agent whose record is disclosed");
    run->add_option("--after-step", after_step, "last step index executed before the disclosure");
    run->add_option("--wbar-basis", wbar, "okfail or ht")->check(CLI::IsMember({"okfail", "ht"}));
    run->add_option("--intinf", intinf, "on or off")->check(CLI::IsMember({"on", "off"}));
    run->add_option("--experiment", experiment, "experiment description (JSON)");
    run->add_option("--max-rounds", max_rounds, "round cap per run")->check(CLI::PositiveNumber);
    run->add_option("--workers", workers, "sampling threads")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    ParseOutcome result;
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        result.message = app.help("", CLI::AppFormatMode::All);
        return result;
    } catch (const CLI::ParseError &e) {
        result.exit_code = kExitUsage;
        result.message = e.what();
        return result;
    }

    const auto &known = scenario_names();
    if (std::find(known.begin(), known.end(), scenario) == known.end()) {
        result.exit_code = kExitUsage;
        result.message = "unknown scenario '" + scenario + "' (expected one of: " + join(known, ", ") + ")";
        return result;
    }
    const auto modes = modes_for(scenario);
    if (mode) {
        const auto &all = mode_names();
        if (std::find(all.begin(), all.end(), *mode) == all.end()) {
            result.exit_code = kExitUsage;
            result.message = "unknown mode '" + *mode + "' (expected one of: " + join(all, ", ") + ")";
            return result;
        }
        if (std::find(modes.begin(), modes.end(), *mode) == modes.end()) {
            result.exit_code = kExitUsage;
            result.message = "mode '" + *mode + "' is not available for scenario '" + scenario +
                             "' (available: " + join(modes, ", ") + ")";
            return result;
        }
    }
    if ((scenario == "custom") != experiment.has_value()) {
        result.exit_code = kExitUsage;
        result.message = scenario == "custom" ? "scenario 'custom' requires --experiment <path>"
                                              : "--experiment is only valid with scenario 'custom'";
        return result;
    }

    RunConfig c;
    c.scenario = scenario;
    c.mode = mode.value_or(modes.front());
    c.seed = seed;
    c.shots = shots;
    c.output = output;
    if (agent) {
        c.options["agent"] = *agent;
    }
    if (after_step) {
        c.options["after-step"] = std::to_string(*after_step);
    }
    if (wbar) {
        c.options["wbar-basis"] = *wbar;
    }
    if (intinf) {
        c.options["intinf"] = *intinf;
    }
    if (experiment) {
        c.options["experiment"] = *experiment;
    }
    if (max_rounds) {
        c.options["max-rounds"] = std::to_string(*max_rounds);
    }
    if (workers) {
        c.options["workers"] = std::to_string(*workers);
    }
    result.config = std::move(c);
    return result;
}

Report execute(const RunConfig &c) {
    const auto modes = modes_for(c.scenario);
    if (modes.empty()) {
        throw MalformedInput("unknown scenario '" + c.scenario + "'");
    }
    if (std::find(modes.begin(), modes.end(), c.mode) == modes.end()) {
        throw MalformedInput("mode '" + c.mode + "' is not available for scenario '" + c.scenario + "'");
    }
    if (c.shots && *c.shots == 0) {
        throw MalformedInput("--shots must be at least 1");
    }
    spdlog::info("scenario {} mode {} seed {}", c.scenario, c.mode, c.seed);
    const ScenarioBundle bundle = build_bundle(c);
    spdlog::debug("protocol has {} steps over {} registers", bundle.protocol.size(),
                  bundle.protocol.final_layout().size());

    Builder B;
    if (c.mode == "unitary") {
        mode_unitary(B, c, bundle);
    } else if (c.mode == "sample") {
        mode_sample(B, c, bundle);
    } else if (c.mode == "rounds") {
        mode_rounds(B, c, bundle);
    } else if (c.mode == "audit") {
        mode_audit(B, c, bundle);
    } else if (c.mode == "disclose") {
        mode_disclose(B, c, bundle);
    } else {
        mode_usd(B, c, bundle);
    }

    ojson config;
    config["scenario"] = c.scenario;
    config["mode"] = c.mode;
    config["seed"] = c.seed;
    const bool stochastic = c.mode == "sample" || c.mode == "rounds" || c.mode == "audit";
    if (stochastic) {
        config["shots"] = c.shots.value_or(c.mode == "rounds" ? kDefaultRuns : kDefaultShots);
    } else {
        config["shots"] = nullptr;
    }
    ojson opts = ojson::object();
    for (const auto &[k, v] : c.options) {
        if (k != "workers") {
            opts[k] = v;
        }
    }
    config["options"] = opts;

    ojson rng;
    rng["algorithm"] = std::string(SplitMix64::kAlgorithm);
    rng["seed"] = c.seed;

    Report r;
    const std::size_t failed = B.failures();
    r.exit_code = failed ? kExitCheckFailure : kExitOk;
    ojson j;
    j["schema"] = kReportSchema;
    j["version"] = kVersion;
    j["config"] = config;
    j["rng"] = rng;
    j["probabilities"] = B.probabilities;
    j["fidelities"] = B.fidelities;
    j["checks"] = B.checks;
    ojson summary;
    summary["checks"] = B.checks.size();
    summary["failed"] = failed;
    summary["status"] = failed ? "check failure" : "ok";
    j["summary"] = summary;
    for (const char *key : {"samples", "rounds", "audit", "disclosure", "usd", "casino"}) {
        if (B.sections.contains(key)) {
            j[key] = B.sections[key];
        }
    }
    r.json = std::move(j);
    return r;
}

std::string to_json_text(const ojson &j) {
    std::string out;
    write_json(j, out, 0);
    out += "\n";
    return out;
}

std::string to_text(const ojson &j) {
    std::string out;
    write_text(j, out, 0);
    return out;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    configure_logging();
    const ParseOutcome parsed = parse_args(args);
    if (!parsed.config) {
        (parsed.exit_code == kExitOk ? out : err) << parsed.message << (parsed.message.empty() ? "" : "\n");
        return parsed.exit_code;
    }
    const RunConfig &c = *parsed.config;
    try {
        const Report r = execute(c);
        out << (c.output == "json" ? to_json_text(r.json) : to_text(r.json));
        return r.exit_code;
    } catch (const MalformedInput &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnknownRegister &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error &e) {
        err << "error (" << c.scenario << ", mode " << c.mode << "): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace solipsim
