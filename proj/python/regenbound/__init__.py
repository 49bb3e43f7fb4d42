"""Convergence-rate bounds for regenerative processes via coupling."""

import json

from . import _core
from ._core import (
    ConditionViolated,
    Distribution as _Distribution,
    DomainError,
    InvalidArgument,
    NotAdmissible,
    SplitDecomposition,
    compute_split,
    empirical_tv,
    exp_constant,
    ks_statistic,
    poly_constant,
    sample_xi_pair,
    tv_bound,
)

__all__ = [
    "ConditionViolated",
    "DomainError",
    "InvalidArgument",
    "NotAdmissible",
    "SplitDecomposition",
    "alt_check",
    "alt_polynomial_bound",
    "compute_split",
    "distribution",
    "empirical_tv",
    "exp_constant",
    "exponential_bound",
    "ks_statistic",
    "occupancy",
    "poly_constant",
    "polynomial_bound",
    "sample_tau",
    "sample_xi_pair",
    "tv_bound",
    "tv_curve",
]

_FIXED_AGE_0 = {"kind": "fixed_age", "age": 0.0}


def distribution(spec):
    """Build a distribution from a dict such as {"kind": "uniform", "lo": 0, "hi": 1}."""
    return _Distribution(json.dumps(spec))


def polynomial_bound(split, k, delay=None):
    return json.loads(_core.polynomial_bound(split, json.dumps(delay or _FIXED_AGE_0), k))


def exponential_bound(split, a=None, delay=None):
    return json.loads(_core.exponential_bound(split, json.dumps(delay or _FIXED_AGE_0), a))


def sample_tau(split, n, seed, delay=None):
    tau, attempts, summary = _core.sample_tau(split, json.dumps(delay or _FIXED_AGE_0), n, seed)
    return tau, attempts, json.loads(summary)


def tv_curve(split, t_grid, n, seed, k=(1.0,), bins=50, delay=None):
    curve, ok = _core.tv_curve(split, json.dumps(delay or _FIXED_AGE_0), list(t_grid), n, seed, list(k), bins)
    return json.loads(curve), ok


def occupancy(spec):
    return _core.occupancy(json.dumps(spec))


def alt_check(spec, n, seed):
    return json.loads(_core.alt_check(json.dumps(spec), n, seed))


def alt_polynomial_bound(spec, k):
    return json.loads(_core.alt_polynomial_bound(json.dumps(spec), k))
