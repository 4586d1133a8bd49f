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

"""Python access to the solipsim simulator."""

import json

from ._solipsim import (
    REPORT_SCHEMA,
    MalformedInput,
    SolipsimError,
    __version__,
    fr_joint_probabilities,
    modes_for,
    run_cli,
    scenario_names,
    usd_optimum,
)
from ._solipsim import execute_json as _execute_json

__all__ = [
    "REPORT_SCHEMA",
    "MalformedInput",
    "SolipsimError",
    "__version__",
    "fr_joint_probabilities",
    "modes_for",
    "run",
    "run_cli",
    "scenario_names",
    "usd_optimum",
]


def run(scenario, mode=None, seed=0, shots=None, **options):
    """Run one configuration and return the report as a dict.

    Keyword options use underscores (``wbar_basis="ht"``); they map to the
    command-line flags of the same name.
    """
    opts = {k.replace("_", "-"): str(v) for k, v in options.items()}
    text, _ = _execute_json(scenario, mode, seed, shots, opts)
    return json.loads(text)
