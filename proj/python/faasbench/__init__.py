"""Python bindings for the faasbench simulator and analyzer.

Configs, profiles and summaries cross the boundary as JSON; the helpers
below decode them.
"""

import json

from . import _core
from ._core import FaasbenchError, __version__, analyze, application, benchmarks, recipes, run, validate

__all__ = [
    "FaasbenchError",
    "__version__",
    "analyze",
    "application",
    "benchmarks",
    "recipe",
    "recipes",
    "run",
    "simulate",
    "summary",
    "validate",
]


def recipe(name):
    """Returns (config, profile) dicts for a named recipe."""
    config, profile = _core.recipe(name)
    return json.loads(config), json.loads(profile)


def _text(obj):
    if obj is None:
        return ""
    return obj if isinstance(obj, str) else json.dumps(obj)


def simulate(benchmark, seed=1, scale=0.0, config=None, profile=None):
    """Runs in memory. Returns a dict with run_id, log (raw text) and summary."""
    out = _core.simulate(benchmark, seed=seed, scale=scale, config=_text(config), profile=_text(profile))
    out["summary"] = json.loads(out["summary"])
    return out


def summary(outcome):
    """Decoded summary.json of a run() or analyze() outcome, or None."""
    return json.loads(outcome["summary"]) if outcome.get("summary") else None
