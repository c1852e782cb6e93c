"""Closed-contour PT-symmetric three-mode optomechanics."""

import json

from ._core import (
    HBAR,
    BracketError,
    ConfigError,
    InconclusiveError,
    PhysicsError,
    SingularityError,
    SteadyState,
    SystemParams,
    UnstableError,
    __version__,
    default_params,
    delay_bandwidth_sweep,
    drive_amplitude,
    effective_shift_coefficient,
    fingerprint,
    gain_bandwidth_sweep,
    locate_ep,
    mechanical_pair,
    oracle_compare,
    solve_steady_state,
    spectrum,
    stability,
    stability_map,
    transmission,
    validate,
)
from ._core import params_from_json as _from_json
from ._core import params_to_json as _to_json
from ._core import params_to_normalized_json as _to_normalized_json


def params_from_dict(doc):
    """Build parameters from a config mapping (the same keys as the JSON config files)."""
    return _from_json(json.dumps(doc))


def load_params(path):
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if isinstance(doc, dict) and isinstance(doc.get("params"), dict):
        doc = doc["params"]
    return params_from_dict(doc)


def params_to_dict(params, normalized=False):
    return json.loads(_to_normalized_json(params) if normalized else _to_json(params))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
