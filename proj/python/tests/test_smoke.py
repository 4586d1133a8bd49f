# Copyright 2026 The solipsim Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math
import pathlib

import jsonschema
import pytest

import solipsim

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMA = json.loads((ROOT / "docs" / "report-v1.schema.json").read_text())


def test_scenarios_and_modes():
    assert "fr" in solipsim.scenario_names()
    assert solipsim.modes_for("fr")[0] == "unitary"
    assert "usd" in solipsim.modes_for("fr-usd")


def test_joint_probabilities():
    p = solipsim.fr_joint_probabilities()
    assert math.isclose(p["ok,ok"], 1 / 12, abs_tol=1e-12)
    assert math.isclose(sum(p.values()), 1.0, abs_tol=1e-12)


def test_usd_optimum():
    u = solipsim.usd_optimum()
    assert math.isclose(u["inconclusive"], 1 / 3, abs_tol=1e-12)
    assert math.isclose(u["overlap"], 1 / math.sqrt(5), abs_tol=1e-12)


@pytest.mark.parametrize(
    "scenario,mode,options",
    [
        ("fr", "unitary", {}),
        ("fr", "sample", {}),
        ("fr", "audit", {}),
        ("fr", "disclose", {"agent": "F", "wbar_basis": "ht"}),
        ("fr-usd", "usd", {}),
        ("alice-bob", "unitary", {}),
        ("casino", "audit", {}),
    ],
)
def test_reports_validate(scenario, mode, options):
    shots = 5000 if mode in ("sample", "audit") else None
    report = solipsim.run(scenario, mode, seed=1, shots=shots, **options)
    jsonschema.validate(report, SCHEMA)
    assert report["schema"] == solipsim.REPORT_SCHEMA
    assert report["summary"]["failed"] == 0


def test_run_is_deterministic():
    a = solipsim.run("fr", "sample", seed=5, shots=3000)
    b = solipsim.run("fr", "sample", seed=5, shots=3000)
    assert a == b


def test_cli_entry():
    code, out, err = solipsim.run_cli(["run", "fr", "--output", "json"])
    assert code == 0
    assert json.loads(out)["config"]["scenario"] == "fr"
    code, _, err = solipsim.run_cli(["run", "nosuch"])
    assert code == 2
    assert "unknown scenario" in err


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        solipsim.run("fr", "disclose", agent="Nobody")
