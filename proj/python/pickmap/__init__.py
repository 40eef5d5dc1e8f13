"""Drury-Arveson kernels, Pick multiplier norms and holomap operators."""

import json as _json

from ._pickmap import *  # noqa: F401,F403
from ._pickmap import run_experiment_json as _run_experiment_json


def run_experiment(config):
    """Run an experiment from a config dict (or JSON string); returns the report dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_experiment_json(text))
