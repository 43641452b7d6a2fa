"""Thermodynamic formalism for rational maps of the Riemann sphere.

Points are Python complex numbers; ``None`` stands for the point at infinity.
"""

import json as _json

from ._tcethermo import (
    ConfigInvalid,
    CriticalOnJulia,
    DepthTooLarge,
    EmptySelection,
    InvalidArgument,
    InvalidMap,
    NonConvexCurve,
    Observable,
    RationalMap,
    Reducible,
    WeightedSft,
    __version__,
    bernoulli_rate,
    birkhoff_sum,
    conformal_atoms,
    itinerary,
    log_eigenvalue,
    preimage_tail,
    pressure_curve,
    pressure_periodic,
    pressure_tree,
    random_sft,
    rate_function,
    repelling_fixed_point,
    set_thread_count,
    sft_exact_tail,
)
from ._tcethermo import run_config as _run_config


def run(config, out="", threads=0):
    """Run an experiment config (dict or JSON string); returns (status, summary)."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_config(config, out, threads)
