"""Levy intensities, non-local Schrodinger spectra and decay diagnostics."""

import json

import numpy as np

from . import _core
from ._core import (
    ConfigError,
    DomainError,
    InconclusiveError,
    LevyModel,
    Potential,
    QuadratureError,
    dirichlet_mu,
    exponential,
    k2,
    polynomial,
    relativistic,
    stable,
    subexponential,
    superexponential,
)

__version__ = _core.__version__

__all__ = [
    "ConfigError", "DomainError", "QuadratureError", "InconclusiveError", "LevyModel", "Potential",
    "stable", "relativistic", "polynomial", "subexponential", "exponential", "superexponential",
    "model", "potential", "spectrum", "dirichlet_mu", "transition_density",
    "k1", "k2", "jump_paring_audit", "laplace_hitting", "fit_decay", "tail_ratio", "run_criterion",
]


def model(spec):
    """Model from a dict or JSON text in the configuration schema."""
    return _core.model_from_json(spec if isinstance(spec, str) else json.dumps(spec))


def potential(spec):
    return _core.potential_from_json(spec if isinstance(spec, str) else json.dumps(spec))


def spectrum(model, potential, L=64.0, N=4096, k=1, tol=1e-8):
    """Lowest eigenpairs; `x` and `vectors` come back as arrays."""
    r = json.loads(_core.spectrum(model, potential, L, N, k, tol))
    r["x"] = np.asarray(r["x"])
    r["vectors"] = [np.asarray(v) for v in r["vectors"]]
    return r


def transition_density(model, t, x):
    return np.asarray(_core.transition_density(model, t, np.asarray(x, dtype=float).tolist()))


def k1(model, s):
    return json.loads(_core.k1(model, s))


def jump_paring_audit(model):
    return json.loads(_core.jump_paring_audit(model))


def laplace_hitting(model, xs, r=1.0, etas=(1.0,), paths=10000, eps=0.1, dt=1e-3, horizon=50.0, seed=1, workers=0):
    return json.loads(_core.laplace_hitting(model, list(xs), r, list(etas), paths, eps, dt, horizon, seed, workers))


def fit_decay(x, phi, lo, hi, family="power"):
    return json.loads(_core.fit_decay(list(map(float, x)), list(map(float, phi)), lo, hi, family))


def tail_ratio(x, phi, model, lo, hi, cap=25.0):
    return json.loads(_core.tail_ratio(list(map(float, x)), list(map(float, phi)), model, lo, hi, cap))


def run_criterion(id, workers=0):
    return json.loads(_core.run_criterion(id, workers))
