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

#include "solipsim/experiment.hpp"

#include <fstream>

#include "solipsim/errors.hpp"

namespace solipsim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &where, const std::string &what) {
    throw MalformedInput("experiment " + where + ": " + what);
}

const json &field(const json &obj, const char *key, const std::string &where) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(where, std::string("missing field '") + key + "'");
    }
    return obj.at(key);
}

std::string string_field(const json &obj, const char *key, const std::string &where) {
    const json &v = field(obj, key, where);
    if (!v.is_string()) {
        fail(where + "." + key, "expected a string");
    }
    return v.get<std::string>();
}

Complex complex_value(const json &v, const std::string &where) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    fail(where, "expected a number or a [re, im] pair");
}

Vector vector_value(const json &v, const std::string &where) {
    if (!v.is_array()) {
        fail(where, "expected an array");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = complex_value(v[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

Matrix matrix_value(const json &v, const std::string &where) {
    if (!v.is_array() || v.empty()) {
        fail(where, "expected a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(vector_value(v[0], where + "[0]").size());
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Vector row = vector_value(v[static_cast<std::size_t>(r)], where + "[" + std::to_string(r) + "]");
        if (row.size() != cols) {
            fail(where, "rows have different lengths");
        }
        out.row(r) = row.transpose();
    }
    return out;
}

std::vector<Register> registers_value(const json &v, const std::string &where) {
    if (!v.is_array()) {
        fail(where, "expected an array of registers");
    }
    std::vector<Register> regs;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        const json &dim = field(v[i], "dim", w);
        if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) {
            fail(w + ".dim", "expected a positive integer");
        }
        regs.push_back({string_field(v[i], "name", w), dim.get<std::size_t>()});
    }
    return regs;
}

std::vector<std::string> strings_value(const json &v, const std::string &where) {
    if (!v.is_array()) {
        fail(where, "expected an array of strings");
    }
    std::vector<std::string> out;
    for (const auto &s : v) {
        if (!s.is_string()) {
            fail(where, "expected an array of strings");
        }
        out.push_back(s.get<std::string>());
    }
    return out;
}

Step parse_step(const json &s, const RegisterLayout &layout, const std::string &where) {
    const std::string type = string_field(s, "type", where);
    const std::string tag = s.contains("time_tag") && s["time_tag"].is_string() ? s["time_tag"].get<std::string>() : "";
    if (type == "prepare") {
        return {Prepare{string_field(s, "register", where), vector_value(field(s, "fragment", where), where + ".fragment")},
                tag};
    }
    if (type == "send") {
        return {Send{string_field(s, "register", where), string_field(s, "from", where), string_field(s, "to", where)},
                tag};
    }
    if (type == "isometry") {
        const auto targets = strings_value(field(s, "targets", where), where + ".targets");
        std::vector<Register> in;
        for (const auto &t : targets) {
            if (!layout.contains(t)) {
                fail(where + ".targets", "unknown register '" + t + "'");
            }
            in.push_back({t, layout.dim(t)});
        }
        std::vector<Register> out = in;
        if (s.contains("fresh")) {
            for (const auto &r : registers_value(s["fresh"], where + ".fresh")) {
                out.push_back(r);
            }
        }
        Matrix m = matrix_value(field(s, "matrix", where), where + ".matrix");
        return {ApplyIsometry{Isometry(RegisterLayout(in), RegisterLayout(out), std::move(m)), targets}, tag};
    }
    if (type == "measure") {
        const auto targets = strings_value(field(s, "targets", where), where + ".targets");
        std::vector<Register> regs;
        for (const auto &t : targets) {
            if (!layout.contains(t)) {
                fail(where + ".targets", "unknown register '" + t + "'");
            }
            regs.push_back({t, layout.dim(t)});
        }
        const RegisterLayout target(regs);
        std::optional<ProjectiveMeasurement> meas;
        if (s.contains("labels")) {
            if (regs.size() != 1) {
                fail(where, "'labels' requires a single target register");
            }
            meas = ProjectiveMeasurement::computational(regs[0], strings_value(s["labels"], where + ".labels"));
        } else {
            const json &outcomes = field(s, "outcomes", where);
            if (!outcomes.is_array()) {
                fail(where + ".outcomes", "expected an array");
            }
            std::vector<std::pair<std::string, std::vector<Vector>>> spans;
            for (std::size_t i = 0; i < outcomes.size(); ++i) {
                const std::string w = where + ".outcomes[" + std::to_string(i) + "]";
                const json &vecs = field(outcomes[i], "vectors", w);
                if (!vecs.is_array()) {
                    fail(w + ".vectors", "expected an array of vectors");
                }
                std::vector<Vector> vs;
                for (std::size_t j = 0; j < vecs.size(); ++j) {
                    vs.push_back(vector_value(vecs[j], w + ".vectors[" + std::to_string(j) + "]"));
                }
                spans.push_back({string_field(outcomes[i], "label", w), std::move(vs)});
            }
            std::optional<std::string> complement;
            if (s.contains("complement")) {
                complement = string_field(s, "complement", where);
            }
            meas = ProjectiveMeasurement::from_vectors(target, spans, complement);
        }
        std::optional<std::string> device;
        if (s.contains("device") && !s["device"].is_null()) {
            device = string_field(s, "device", where);
        }
        Coherence c = Coherence::coherent;
        if (s.contains("coherence")) {
            const std::string v = string_field(s, "coherence", where);
            if (v == "announced") {
                c = Coherence::announced;
            } else if (v != "coherent") {
                fail(where + ".coherence", "expected 'coherent' or 'announced'");
            }
        }
        return {MeasureRecord{string_field(s, "agent", where), std::move(*meas), device,
                              string_field(s, "memory", where), c},
                tag};
    }
    fail(where + ".type", "unknown step type '" + type + "'");
}

} // namespace

ScenarioBundle parse_experiment(const json &doc, const std::string &name) {
    RegisterLayout layout(registers_value(field(doc, "layout", "document"), "layout"));
    const json &steps_json = field(doc, "steps", "document");
    if (!steps_json.is_array()) {
        fail("steps", "expected an array");
    }
    std::vector<Step> steps;
    RegisterLayout current = layout;
    for (std::size_t i = 0; i < steps_json.size(); ++i) {
        Step st = parse_step(steps_json[i], current, "steps[" + std::to_string(i) + "]");
        if (const auto *iso = std::get_if<ApplyIsometry>(&st.action)) {
            for (const auto &r : iso->op.fresh_registers()) {
                if (!current.contains(r.name)) {
                    current = current.appended(r);
                }
            }
        }
        steps.push_back(std::move(st));
    }
    HaltingPredicate halting;
    if (doc.contains("halting")) {
        const json &h = doc["halting"];
        if (!h.is_array()) {
            fail("halting", "expected an array of {agent, label}");
        }
        for (std::size_t i = 0; i < h.size(); ++i) {
            const std::string w = "halting[" + std::to_string(i) + "]";
            halting.required.push_back({string_field(h[i], "agent", w), string_field(h[i], "label", w)});
        }
    }
    ScenarioBundle b{name, Protocol(layout, std::move(steps), std::move(halting)), {}, {}, {}, {}};
    for (std::size_t i = 0; i < b.protocol.size(); ++i) {
        if (const auto *m = b.protocol.steps()[i].measure()) {
            if (!b.has_agent(m->agent)) {
                b.agents.push_back({m->agent, m->memory, m->memory, m->measurement.labels(), i});
            }
        }
    }
    return b;
}

ScenarioBundle load_experiment(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedInput("cannot open experiment file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw MalformedInput("experiment file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_experiment(doc);
}

} // namespace solipsim
