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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "solipsim/cli.hpp"
#include "solipsim/errors.hpp"
#include "solipsim/scenarios.hpp"
#include "solipsim/usd.hpp"

namespace py = pybind11;
using namespace solipsim;

namespace {

std::pair<std::string, int> execute_json(const std::string &scenario, const std::optional<std::string> &mode,
                                         std::uint64_t seed, std::optional<std::uint64_t> shots,
                                         const std::map<std::string, std::string> &options) {
    RunConfig c;
    c.scenario = scenario;
    c.mode = mode ? *mode : modes_for(scenario).at(0);
    c.seed = seed;
    c.shots = shots;
    c.options = options;
    const Report r = execute(c);
    return {to_json_text(r.json), r.exit_code};
}

std::tuple<int, std::string, std::string> cli(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, double> fr_joint(const std::string &basis) {
    if (basis != "okfail" && basis != "ht") {
        throw MalformedInput("wbar basis must be okfail or ht, got '" + basis + "'");
    }
    const auto b = build_fr(basis == "ht" ? WbarBasis::ht : WbarBasis::okfail);
    const auto d = born(run_unitary(b.protocol), b.measurement("joint"));
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        out[d.labels()[i]] = d.probabilities()[i];
    }
    return out;
}

py::dict usd_optimum() {
    const auto inst = build_fr_usd_instance();
    const auto s = optimal_usd(inst);
    py::dict d;
    d["prior_a"] = inst.prior_a;
    d["prior_b"] = inst.prior_b;
    d["overlap"] = inst.overlap();
    d["q_a"] = s.q_a;
    d["q_b"] = s.q_b;
    d["inconclusive"] = s.inconclusive;
    return d;
}

} // namespace

PYBIND11_MODULE(_solipsim, m) {
    m.doc() = "Native core of solipsim.";
    // Translators run newest first, so the subclass goes last.
    py::register_exception<Error>(m, "SolipsimError", PyExc_RuntimeError);
    py::register_exception<MalformedInput>(m, "MalformedInput", PyExc_ValueError);

    m.attr("__version__") = kVersion;
    m.attr("REPORT_SCHEMA") = kReportSchema;
    m.def("scenario_names", &scenario_names);
    m.def("modes_for", &modes_for, py::arg("scenario"));
    m.def("execute_json", &execute_json, py::arg("scenario"), py::arg("mode") = py::none(), py::arg("seed") = 0,
          py::arg("shots") = py::none(), py::arg("options") = std::map<std::string, std::string>{},
          "Runs one configuration; returns (report JSON text, exit code).");
    m.def("run_cli", &cli, py::arg("args"), "Runs the command line; returns (exit code, stdout, stderr).");
    m.def("fr_joint_probabilities", &fr_joint, py::arg("wbar_basis") = "okfail");
    m.def("usd_optimum", &usd_optimum);
}
