"""Input validation helpers shared by the estimator API and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ValidationError
from .functions import BanachSpec, OperatorSpec
from .groups import GroupModel, make_group


def check_exponent(p) -> float:
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise ValidationError("p", f"not a number: {p!r}") from None
    if not (1 < p <= 2):
        raise ValidationError("p", "p must satisfy 1 < p ≤ 2")
    return p


def check_group(group) -> GroupModel:
    if group is None:
        raise ValidationError("group", "a group model is required")
    return make_group(group)


def check_operator(X, q_domain: float = 2.0, q_codomain: float = 2.0) -> OperatorSpec:
    """Accept an :class:`OperatorSpec`, a scalar or a 2-d complex array."""
    if isinstance(X, OperatorSpec):
        return X
    m = np.asarray(X, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValidationError("X", f"operator matrix must be 2-d, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("X", "operator matrix has non-finite entries")
    return OperatorSpec(m, BanachSpec(m.shape[1], q_domain), BanachSpec(m.shape[0], q_codomain))


def check_seed(seed) -> int:
    """A seed in ``[0, 2**64)``; ``None`` maps to 0."""
    if seed is None:
        return 0
    if isinstance(seed, (bool, np.bool_)):
        raise ValidationError("seed", "must be an integer")
    try:
        s = int(seed)
    except (TypeError, ValueError):
        raise ValidationError("seed", f"must be an integer, got {seed!r}") from None
    if s != seed and not isinstance(seed, str):
        raise ValidationError("seed", f"must be an integer, got {seed!r}")
    if not 0 <= s < 2**64:
        raise ValidationError("seed", "must be a 64-bit unsigned value")
    return s


def check_positive_int(name, value, minimum=1) -> int:
    if isinstance(value, (bool, np.bool_)) or int(value) != value or value < minimum:
        raise ValidationError(name, f"must be an integer ≥ {minimum}, got {value!r}")
    return int(value)


def check_tolerance(tol) -> float:
    tol = float(tol)
    if not (math.isfinite(tol) and tol > 0):
        raise ValidationError("tol", f"must be positive, got {tol!r}")
    return tol
