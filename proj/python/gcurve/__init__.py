"""Python access to the gcurve solvers.

Configurations are the same JSON documents the ``gcurve`` command reads.
"""

import json as _json

from ._gcurve import (
    INF,
    GcurveError,
    __version__,
    aubry_set,
    evolve,
    fnv1a_hex,
    run,
    travel_cost,
    velocity_cone,
)
from ._gcurve import verify as _verify


def verify(config_text):
    """Verification report as a dict with ``checks`` and ``all_pass``."""
    return _json.loads(_verify(config_text))


__all__ = [
    "INF",
    "GcurveError",
    "__version__",
    "aubry_set",
    "evolve",
    "fnv1a_hex",
    "run",
    "travel_cost",
    "velocity_cone",
    "verify",
]
