"""Memristive network simulator (C++ core)."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run_scenario as _run_scenario


def run_scenario(config, out_dir):
    """Run a scenario given as a dict or JSON text; returns (exit_code, summary dict)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    code, summary = _run_scenario(text, str(out_dir))
    return code, _json.loads(summary)
