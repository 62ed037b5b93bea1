"""Python access to the splitsim simulator and trace checker.

Scenarios and reports cross the boundary as JSON text; the helpers here
accept and return plain dicts.
"""

import json

from . import _splitsim
from ._splitsim import (
    ApproxError,
    CorruptionInapplicable,
    TraceParseError,
    ValidationError,
    change_set,
    explain,
    limit_eval,
    pair,
    restrict_to,
    unpair,
)

__all__ = [
    "ApproxError",
    "CorruptionInapplicable",
    "TraceParseError",
    "ValidationError",
    "change_set",
    "corrupt",
    "explain",
    "fuzz",
    "generate_scenario",
    "limit_eval",
    "normalize_scenario",
    "pair",
    "restrict_to",
    "run",
    "unpair",
    "verify",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def normalize_scenario(scenario):
    return json.loads(_splitsim.normalize_scenario(_text(scenario)))


def run(scenario):
    """Run a scenario; returns trace text, the parsed report and status flags."""
    out = _splitsim.run(_text(scenario))
    out["report"] = json.loads(out["report"])
    return out


def verify(scenario, trace):
    out = _splitsim.verify(_text(scenario), trace)
    out["report"] = json.loads(out["report"])
    return out


def corrupt(scenario, trace, check):
    return _splitsim.corrupt(_text(scenario), trace, check)


def generate_scenario(seed, index, construction, max_horizon=256):
    return json.loads(_splitsim.generate_scenario(seed, index, construction, max_horizon))


def fuzz(seed, count, construction, max_horizon=256):
    return _splitsim.fuzz(seed, count, construction, max_horizon)
