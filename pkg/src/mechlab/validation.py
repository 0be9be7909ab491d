"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from sklearn.utils import check_array

from .distributions import Distribution, from_spec
from .exceptions import DomainError, UnsupportedDistributionError


def check_delta(delta, allow_endpoints: bool = False) -> float:
    """Validate a discount factor; ``(0, 1)`` unless ``allow_endpoints``."""
    try:
        delta = float(delta)
    except (TypeError, ValueError):
        raise DomainError(f"discount factor must be a number, got {delta!r}") from None
    if math.isnan(delta):
        raise DomainError("discount factor is nan")
    if allow_endpoints:
        if not 0.0 <= delta <= 1.0:
            raise DomainError(f"discount factor {delta} outside [0, 1]")
    elif not 0.0 < delta < 1.0:
        raise DomainError(f"discount factor {delta} outside (0, 1)")
    return delta


def check_distribution(dist) -> Distribution:
    """Accept a Distribution, a JSON spec dict, or a family name."""
    return from_spec(dist)


def require_uniform(*dists: Optional[Distribution]):
    for d in dists:
        if d is not None and not d.is_uniform:
            raise UnsupportedDistributionError(
                "this mechanism is only solved for uniform value and cost distributions")


def check_type_pairs(X):
    """Validate an ``(n, 2)`` array of ``(theta, omega)`` draws; return both columns."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise DomainError(f"expected columns (theta, omega), got shape {X.shape}")
    if X.min() < 0.0 or X.max() > 1.0:
        raise DomainError("types must lie in [0, 1]")
    return X[:, 0], X[:, 1]
