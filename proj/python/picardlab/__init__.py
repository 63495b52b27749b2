"""Numerical laboratory for the first Picard iterate of cubic NLS with random data."""

import json

from ._core import (
    ConfigError,
    __version__,
    band_mass,
    cluster_cutoff,
    data_weight,
    eigenvalue_sq,
    equatorial_diagnostic,
    equatorial_term,
    eval_harmonic,
    expected_II_sq,
    experiments,
    fit_log_growth,
    lattice_count,
    lp_norm,
    pair_moment,
    picard_terms,
    resonance,
    run_experiment_json,
    sample_phi,
    time_factor,
    torus_expected_iterate_sq,
    window_edge,
)


def run_experiment(config, seed=None, threads=1, include_run=True):
    """Run an experiment and return its record as a dict.

    `config` is either the flat ``key = value`` text or a dict of the same keys.
    """
    if isinstance(config, dict):
        lines = []
        for key, value in config.items():
            if isinstance(value, (list, tuple)):
                value = ", ".join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        config = "\n".join(lines) + "\n"
    return json.loads(run_experiment_json(config, seed, threads, include_run))


__all__ = [
    "ConfigError",
    "band_mass",
    "cluster_cutoff",
    "data_weight",
    "eigenvalue_sq",
    "equatorial_diagnostic",
    "equatorial_term",
    "eval_harmonic",
    "expected_II_sq",
    "experiments",
    "fit_log_growth",
    "lattice_count",
    "lp_norm",
    "pair_moment",
    "picard_terms",
    "resonance",
    "run_experiment",
    "sample_phi",
    "time_factor",
    "torus_expected_iterate_sq",
    "window_edge",
]
