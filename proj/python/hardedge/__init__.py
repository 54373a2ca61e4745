"""Marchenko-Pastur hard-edge laboratory: analytic law, exact identities and
Monte Carlo experiments, backed by a C++ core."""

import json as _json

from ._hardedge import (
    __version__,
    check_delta_bounds,
    count_in_window,
    counting_bound,
    decompose,
    derive_trial_seed,
    empirical_stieltjes,
    eigenvector_identity_residual,
    fixed_point_residual,
    mp_cdf,
    mp_density,
    mp_expectation,
    mp_stieltjes,
    mp_window_mass,
    omega_terms,
    philox4x32_10,
    projection_mass_probe,
    resolvent_diag_leave_one_out,
    resolvent_diag_schur,
    run_command,
    sample_matrix,
)
from . import _hardedge

EXPERIMENTS = ("apriori", "locallaw", "deloc", "wegner", "hardedge", "hw", "projmass", "identities")


def normalize_config(config=None):
    """Validate a configuration dict and return it with every default filled in."""
    return _json.loads(_hardedge._normalize_config(_json.dumps(config or {})))


def run(name, config=None, threads=1):
    """Run one experiment and return its report as a dict."""
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")
    return _json.loads(_hardedge._run(name, _json.dumps(config or {}), threads))


def run_and_write(name, outdir, config=None, threads=1):
    """Run one experiment, write its report files into outdir and return the manifest."""
    return _json.loads(_hardedge._run_and_write(name, _json.dumps(config or {}), str(outdir), threads))
