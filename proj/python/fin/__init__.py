"""Minimum-energy placement of early-exit DNN blocks on multi-tiered networks."""

import os

from ._core import (  # noqa: F401
    ParseError,
    Scenario,
    SearchGuardError,
    UnitError,
    ValidationError,
    __version__,
    effective_bandwidth,
    effective_compute,
    evaluate,
    load_scenario,
    run_multi_app,
    scenario_from_json,
    solve,
    survival_fraction,
    sweep,
)


def data_path(name=""):
    """Path to a bundled scenario file (or the data directory itself).

    Honours the FIN_DATA_DIR environment variable so tests can point at a
    source checkout before the package is installed.
    """
    base = os.environ.get("FIN_DATA_DIR")
    if base is None:
        base = os.path.join(os.path.dirname(__file__), "data")
    return os.path.join(base, name) if name else base
