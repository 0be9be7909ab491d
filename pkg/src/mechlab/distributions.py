"""Value and cost distributions on [0, 1].

Every distribution exposes the primitives the solvers need: the cdf, the
density, the left integral of the cdf (``G(x) = int_0^x G``), truncated means,
the truncated virtual valuation and the virtual cost.  All public methods
accept a float or a numpy array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .exceptions import (
    DomainError,
    UndefinedConditionalError,
    ZeroDensityError,
)

# successive differences of the virtual valuation must exceed this
REGULARITY_TOL = 1e-12


def _check_unit(x, name="x"):
    if isinstance(x, (float, int)):
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"{name}={x!r} outside [0, 1]")
        return float(x)
    arr = np.asarray(x, dtype=float)
    if arr.size and (np.isnan(arr).any() or arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{name} has values outside [0, 1]")
    return arr


class RegularityReport(NamedTuple):
    regular: bool
    violation: Optional[Tuple[float, float]] = None


class Distribution:
    """Base class: a law with strictly increasing cdf on [0, 1]."""

    family: str = "abstract"

    # family-specific hooks, no domain checks
    def _cdf(self, x):
        raise NotImplementedError

    def _pdf(self, x):
        raise NotImplementedError

    def _ppf(self, u):
        raise NotImplementedError

    def _left_integral(self, x):
        raise NotImplementedError

    def cdf(self, x):
        return self._cdf(_check_unit(x))

    def pdf(self, x):
        return self._pdf(_check_unit(x))

    def ppf(self, u):
        """Inverse cdf, used for inverse-transform sampling."""
        return self._ppf(_check_unit(u, "u"))

    def left_integral(self, x):
        """Return ``int_0^x cdf(y) dy``."""
        return self._left_integral(_check_unit(x))

    def mean(self) -> float:
        # integration by parts: E[X] = 1 - int_0^1 F
        return 1.0 - float(self._left_integral(1.0))

    def truncated_mean_below(self, x):
        """E[X | X < x] = x - left_integral(x) / cdf(x)."""
        x = _check_unit(x)
        c = self._cdf(x)
        if np.any(np.asarray(c) <= 0.0):
            raise UndefinedConditionalError(f"cdf vanishes at {x!r}")
        return x - self._left_integral(x) / c

    def virtual_valuation(self, theta, theta_bar=1.0):
        """Truncated virtual valuation ``theta - (F(theta_bar) - F(theta)) / f(theta)``."""
        theta = _check_unit(theta, "theta")
        theta_bar = _check_unit(theta_bar, "theta_bar")
        if np.any(np.asarray(theta) > np.asarray(theta_bar)):
            raise DomainError("theta must not exceed theta_bar")
        dens = self._pdf(theta)
        if np.any(np.asarray(dens) <= 0.0):
            raise ZeroDensityError(f"density vanishes at theta={theta!r}")
        return theta - (self._cdf(theta_bar) - self._cdf(theta)) / dens

    def _psi(self, theta, theta_bar):
        # unchecked variant for the inner loops of the solvers
        return theta - (self._cdf(theta_bar) - self._cdf(theta)) / self._pdf(theta)

    def virtual_cost(self, omega):
        """Virtual cost ``omega + G(omega) / g(omega)``."""
        omega = _check_unit(omega, "omega")
        dens = self._pdf(omega)
        if np.any(np.asarray(dens) <= 0.0):
            raise ZeroDensityError(f"density vanishes at omega={omega!r}")
        return omega + self._cdf(omega) / dens

    def check_regular(self, n: int = 10001) -> RegularityReport:
        """Check that ``virtual_valuation(theta, 1)`` strictly increases on an n-point grid.

        Grid points with zero or infinite density are skipped, since the
        virtual valuation is not evaluated there.
        """
        if n < 2:
            raise ValueError("n must be at least 2")
        grid = np.linspace(0.0, 1.0, n)
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = self._pdf(grid)
        ok = np.isfinite(dens) & (dens > 0.0)
        theta = grid[ok]
        psi = theta - (1.0 - self._cdf(theta)) / dens[ok]
        bad = np.nonzero(np.diff(psi) <= REGULARITY_TOL)[0]
        if bad.size:
            i = int(bad[0])
            return RegularityReport(False, (float(theta[i]), float(theta[i + 1])))
        return RegularityReport(True)

    def breakpoints(self, a: float, b: float) -> np.ndarray:
        """Points in ``(a, b)`` where the density is not smooth."""
        return np.empty(0)

    @property
    def is_uniform(self) -> bool:
        return False

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Power(Distribution):
    """``cdf(x) = x**k`` on [0, 1]; ``k = 1`` is the uniform law."""

    k: float = 1.0
    family = "power"

    def __post_init__(self):
        if not (isinstance(self.k, (int, float)) and math.isfinite(self.k) and self.k > 0):
            raise DomainError(f"power exponent must be positive, got {self.k!r}")
        object.__setattr__(self, "k", float(self.k))

    @property
    def is_uniform(self) -> bool:
        return self.k == 1.0

    def _cdf(self, x):
        return x if self.k == 1.0 else x**self.k

    def _pdf(self, x):
        k = self.k
        if k == 1.0:
            return x * 0.0 + 1.0
        if isinstance(x, float):
            if x == 0.0:
                return math.inf if k < 1.0 else 0.0
            return k * x ** (k - 1.0)
        with np.errstate(divide="ignore"):
            return k * np.power(x, k - 1.0)

    def _ppf(self, u):
        return u if self.k == 1.0 else u ** (1.0 / self.k)

    def _left_integral(self, x):
        return x ** (self.k + 1.0) / (self.k + 1.0)

    def to_spec(self) -> dict:
        if self.is_uniform and type(self) is Uniform:
            return {"family": "uniform"}
        return {"family": "power", "k": self.k}


@dataclass(frozen=True)
class Uniform(Power):
    """The uniform law on [0, 1]."""

    k: float = field(default=1.0, init=False)
    family = "uniform"


@dataclass(frozen=True)
class Tabulated(Distribution):
    """Piecewise-linear cdf through samples on an equally spaced grid of [0, 1].

    The density is the piecewise-constant slope; at an interior knot it is
    the mean of the two adjacent slopes.
    """

    cdf_values: Tuple[float, ...]
    family = "tabulated"

    def __post_init__(self):
        vals = np.asarray(self.cdf_values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise DomainError("tabulated cdf needs at least two samples")
        if abs(vals[0]) > 1e-12 or abs(vals[-1] - 1.0) > 1e-12:
            raise DomainError("tabulated cdf must start at 0 and end at 1")
        if not np.all(np.diff(vals) > 0.0):
            raise DomainError("tabulated cdf must be strictly increasing")
        vals[0], vals[-1] = 0.0, 1.0
        object.__setattr__(self, "cdf_values", tuple(float(v) for v in vals))
        m = vals.size - 1
        knots = np.linspace(0.0, 1.0, m + 1)
        slopes = np.diff(vals) * m
        # left integral at each knot, exact for the piecewise-linear cdf
        cum = np.concatenate(([0.0], np.cumsum((vals[:-1] + vals[1:]) / (2 * m))))
        object.__setattr__(self, "_vals", vals)
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_slopes", slopes)
        object.__setattr__(self, "_cum", cum)

    def __hash__(self):
        return hash(self.cdf_values)

    def _segment(self, x):
        m = self._slopes.size
        return np.minimum(np.floor(np.asarray(x) * m).astype(int), m - 1)

    def _cdf(self, x):
        out = np.interp(x, self._knots, self._vals)
        return float(out) if isinstance(x, float) else out

    def _pdf(self, x):
        m = self._slopes.size
        xa = np.asarray(x, dtype=float)
        i = self._segment(xa)
        dens = self._slopes[i]
        pos = xa * m
        at_knot = (pos == np.round(pos)) & (pos > 0) & (pos < m)
        if np.any(at_knot):
            j = np.round(pos[at_knot] if xa.ndim else pos).astype(int)
            mid = 0.5 * (self._slopes[j - 1] + self._slopes[j])
            if xa.ndim:
                dens = dens.copy()
                dens[at_knot] = mid
            else:
                dens = mid
        return float(dens) if isinstance(x, float) else dens

    def _ppf(self, u):
        out = np.interp(u, self._vals, self._knots)
        return float(out) if isinstance(u, float) else out

    def _left_integral(self, x):
        m = self._slopes.size
        xa = np.asarray(x, dtype=float)
        i = self._segment(xa)
        h = xa - self._knots[i]
        c0 = self._vals[i]
        out = self._cum[i] + c0 * h + 0.5 * self._slopes[i] * h * h
        return float(out) if isinstance(x, float) else out

    def breakpoints(self, a: float, b: float) -> np.ndarray:
        k = self._knots
        return k[(k > a) & (k < b)]

    def to_spec(self) -> dict:
        return {"family": "tabulated", "cdf": list(self.cdf_values)}

    @classmethod
    def from_distribution(cls, dist: Distribution, m: int = 200) -> "Tabulated":
        """Tabulate another distribution's cdf on ``m + 1`` equally spaced knots."""
        return cls(tuple(np.asarray(dist.cdf(np.linspace(0.0, 1.0, m + 1)), dtype=float)))


def from_spec(spec) -> Distribution:
    """Build a distribution from its JSON form (or pass a Distribution through)."""
    if isinstance(spec, Distribution):
        return spec
    if isinstance(spec, str):
        spec = {"family": spec}
    if not isinstance(spec, dict) or "family" not in spec:
        raise DomainError(f"not a distribution spec: {spec!r}")
    family = spec["family"]
    if family == "uniform":
        return Uniform()
    if family == "power":
        if "k" not in spec:
            raise DomainError("power family requires 'k'")
        return Power(float(spec["k"]))
    if family == "tabulated":
        if "cdf" not in spec:
            raise DomainError("tabulated family requires 'cdf'")
        return Tabulated(tuple(float(v) for v in spec["cdf"]))
    raise DomainError(f"unknown distribution family {family!r}")
