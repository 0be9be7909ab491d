"""Optimal seller mechanisms when the cost is learned after contracting.

The buyer's value ``theta ~ F`` is private from time 0; the seller's cost
``omega ~ G`` is revealed to her at time 1.  Four mechanisms are solved:

* ``EAFP``: a time-0 posted price with guaranteed delivery.
* ``EPO``: wait for the cost, then post the optimal price (worth ``delta``).
* ``EAO``: a time-0 posted price the seller may cancel when ``omega > p``.
* ``D``: a time-0 price accepted by types above a threshold, followed by an
  uncommitted ex-post price for the types that declined.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Dict, Optional

import numpy as np

from .distributions import Distribution
from .exceptions import RegularityError, ThresholdNotFoundError
from .numerics import bisect_array, find_root, integrate, maximize_1d

log = logging.getLogger(__name__)

KINDS = ("EAFP", "EPO", "EAO", "D")

# inner quadrature is tighter than the package default so that argmax
# locations are not perturbed by adaptive-refinement noise
PROFIT_QUAD_TOL = 1e-12
THETA_BAR_MIN = 1e-6
DELTA_ROOT_XTOL = 1e-10
_LOW_EDGE = 1e-12
_KNOT_INSET = 1e-12


@dataclass(frozen=True)
class ExPostPriceRule:
    """Time-1 posted price against beliefs truncated to ``[0, theta_bar]``.

    ``rule(omega)`` solves ``psi(p, theta_bar) = omega``; it is ``nan`` (no
    sale) when ``omega > theta_bar``.
    """

    F: Distribution
    theta_bar: float = 1.0

    def __call__(self, omega):
        tb = self.theta_bar
        if self.F.is_uniform:
            out = 0.5 * (tb + np.asarray(omega, dtype=float))
            out = np.where(np.asarray(omega) <= tb, out, np.nan)
            return float(out) if np.ndim(omega) == 0 else out
        if np.ndim(omega) == 0:
            omega = float(omega)
            if omega > tb:
                return math.nan
            lo = tb * _LOW_EDGE
            if self.F._psi(lo, tb) >= omega:
                return lo
            return find_root(lambda p: self.F._psi(p, tb) - omega, lo, tb, tol=1e-13).x
        omega = np.asarray(omega, dtype=float)
        ok = omega <= tb
        price = np.full(omega.shape, np.nan)
        w = omega[ok]
        lo = np.full(w.shape, tb * _LOW_EDGE)
        hi = np.full(w.shape, tb)
        with np.errstate(divide="ignore", invalid="ignore"):
            price[ok] = bisect_array(lambda p: self.F._psi(p, tb) - w, lo, hi)
        return price


@dataclass
class MechanismSolution:
    kind: str
    profit: float
    price0: Optional[float] = None
    theta_bar: Optional[float] = None
    theta_star: Optional[float] = None
    delta: Optional[float] = None
    price_rule: Optional[ExPostPriceRule] = field(default=None, repr=False, compare=False)
    metadata: dict = field(default_factory=dict, repr=False, compare=False)

    def to_dict(self) -> dict:
        """JSON record with the frozen field names."""
        keys = ("kind", "price0", "theta_bar", "theta_star", "profit", "delta")
        d = asdict(self)
        return {k: d[k] for k in keys}


@dataclass(frozen=True)
class RegimeThresholds:
    delta_star: float
    delta_bar: float
    delta_double_star: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ComparisonReport:
    delta: float
    profits: Dict[str, float]
    best: str
    solutions: Dict[str, MechanismSolution] = field(repr=False, default_factory=dict)

    def to_dict(self) -> dict:
        return {"delta": self.delta, "profits": dict(self.profits), "best": self.best}


def _require_regular(F: Distribution):
    report = F.check_regular()
    if not report.regular:
        raise RegularityError(f"value distribution is not regular near {report.violation}")


def _clip_unit(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def theta_star_star(F: Distribution, theta_bar: float) -> float:
    """Type at which the virtual valuation truncated at ``theta_bar`` is zero."""
    lo = theta_bar * _LOW_EDGE
    if F._psi(lo, theta_bar) >= 0.0:
        return lo
    return find_root(lambda t: F._psi(t, theta_bar), lo, theta_bar, tol=1e-14).x


@lru_cache(maxsize=65536)
def _dynamic_parts(F: Distribution, G: Distribution, theta_bar: float):
    """Return ``(theta**, int G(psi) dtheta, int calG(psi) f dtheta)`` over ``[theta**, theta_bar]``."""
    ts = theta_star_star(F, theta_bar)

    def option_value(t):
        return G._cdf(_clip_unit(F._psi(t, theta_bar)))

    def seller_value(t):
        return G._left_integral(_clip_unit(F._psi(t, theta_bar))) * F._pdf(t)

    # integrate piece by piece between density kinks; interior knots are
    # stepped over so each piece sees only its own one-sided density
    knots = F.breakpoints(ts, theta_bar)
    edges = [ts, *knots, theta_bar]
    tol = PROFIT_QUAD_TOL / (len(edges) - 1)
    i_g = i_cal = 0.0
    converged = True
    for j, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        if knots.size:
            inset = _KNOT_INSET * (b - a)
            a, b = (a + inset if j > 0 else a), (b - inset if j < knots.size else b)
        r_g = integrate(option_value, a, b, tol=tol)
        r_cal = integrate(seller_value, a, b, tol=tol)
        i_g += r_g.value
        i_cal += r_cal.value
        converged = converged and r_g.converged and r_cal.converged
    if not converged:
        log.warning("quadrature depth cap reached at theta_bar=%g", theta_bar)
    return float(ts), float(i_g), float(i_cal)


def ex_post_profit(F: Distribution, G: Distribution) -> float:
    """Undiscounted ex-post posted-price profit ``int_{theta*}^1 calG(psi(theta, 1)) f(theta) dtheta``."""
    return _dynamic_parts(F, G, 1.0)[2]


def eafp_objective(F: Distribution, G: Distribution, p):
    """Profit of a guaranteed-delivery price ``p``: ``(1 - F(p)) (p - E[omega])``."""
    return (1.0 - F.cdf(p)) * (p - G.mean())


def eao_objective(F: Distribution, G: Distribution, p):
    """Profit of a cancellable price ``p``: ``(1 - F(p)) * calG(p)``."""
    return (1.0 - F.cdf(p)) * G.left_integral(p)


def solve_eafp(F: Distribution, G: Distribution) -> MechanismSolution:
    _require_regular(F)
    mean_cost = G.mean()
    lo = _LOW_EDGE
    root = find_root(lambda p: F._psi(p, 1.0) - mean_cost, lo, 1.0, tol=1e-14)
    p = root.x
    return MechanismSolution("EAFP", float(eafp_objective(F, G, p)), price0=p)


def solve_epo(F: Distribution, G: Distribution, delta: float) -> MechanismSolution:
    _require_regular(F)
    ts = theta_star_star(F, 1.0)
    profit = delta * ex_post_profit(F, G)
    return MechanismSolution("EPO", profit, theta_star=ts, delta=delta,
                             price_rule=ExPostPriceRule(F, 1.0))


def solve_eao(F: Distribution, G: Distribution) -> MechanismSolution:
    res = maximize_1d(lambda p: eao_objective(F, G, p), 0.0, 1.0, vectorized=True)
    return MechanismSolution("EAO", res.value, price0=res.argmax,
                             metadata={"ties": res.ties})


def coasian_p0(F: Distribution, G: Distribution, theta_bar: float, delta: float) -> float:
    """Time-0 price that leaves type ``theta_bar`` indifferent to waiting."""
    if theta_bar <= 0.0:
        return 0.0
    return theta_bar - delta * _dynamic_parts(F, G, float(theta_bar))[1]


def dynamic_profit(F: Distribution, G: Distribution, theta_bar: float, delta: float) -> float:
    if theta_bar <= 0.0:
        return 0.0
    theta_bar = float(theta_bar)
    _, i_g, i_cal = _dynamic_parts(F, G, theta_bar)
    p0 = theta_bar - delta * i_g
    return (1.0 - F._cdf(theta_bar)) * (p0 - G.mean()) + delta * i_cal


def phi_cap(F: Distribution, G: Distribution, x: float) -> float:
    """Slope in ``delta`` of the dynamic-mechanism profit at threshold ``x``.

    ``dynamic_profit(x, delta) == eafp_objective(x) + delta * phi_cap(x)``.
    """
    if x <= 0.0:
        return 0.0
    _, i_g, i_cal = _dynamic_parts(F, G, float(x))
    return i_cal - (1.0 - F._cdf(float(x))) * i_g


def solve_dynamic(F: Distribution, G: Distribution, delta: float) -> MechanismSolution:
    _require_regular(F)
    res = maximize_1d(lambda tb: dynamic_profit(F, G, tb, delta), THETA_BAR_MIN, 1.0)
    tb = res.argmax
    return MechanismSolution(
        "D", res.value,
        price0=coasian_p0(F, G, tb, delta),
        theta_bar=tb,
        theta_star=theta_star_star(F, tb),
        delta=delta,
        price_rule=ExPostPriceRule(F, tb),
        metadata={"ties": res.ties},
    )


def solve(kind: str, F: Distribution, G: Distribution, delta: Optional[float] = None) -> MechanismSolution:
    kind = kind.upper()
    if kind == "EAFP":
        return solve_eafp(F, G)
    if kind == "EAO":
        return solve_eao(F, G)
    if delta is None:
        raise ValueError(f"{kind} needs a discount factor")
    if kind == "EPO":
        return solve_epo(F, G, delta)
    if kind == "D":
        return solve_dynamic(F, G, delta)
    raise ValueError(f"unknown mechanism kind {kind!r}")


def regime_thresholds(F: Distribution, G: Distribution) -> RegimeThresholds:
    """Discount factors where EPO beats EAFP, EPO beats EAO and D beats EAO."""
    _require_regular(F)
    fp = ex_post_profit(F, G)
    pi_eafp = solve_eafp(F, G).profit
    pi_eao = solve_eao(F, G).profit
    d_star = pi_eafp / fp
    d_bar = pi_eao / fp

    def gap(delta):
        return solve_dynamic(F, G, delta).profit - pi_eao

    lo, hi = 1e-6, min(d_bar, 1.0 - 1e-9)
    g_lo, g_hi = gap(lo), gap(hi)
    if not (g_lo < 0.0 < g_hi):
        raise ThresholdNotFoundError(
            f"D minus EAO profit has no sign change on [{lo}, {hi}] ({g_lo}, {g_hi})")
    d_ss = find_root(gap, lo, hi, tol=0.0, xtol=DELTA_ROOT_XTOL).x
    if not (0.0 < d_star < 1.0 and 0.0 < d_bar < 1.0):
        raise ThresholdNotFoundError(f"thresholds outside (0, 1): {d_star}, {d_bar}")
    return RegimeThresholds(d_star, d_bar, d_ss)


def compare(F: Distribution, G: Distribution, delta: float) -> ComparisonReport:
    sols = {k: solve(k, F, G, delta) for k in KINDS}
    profits = {k: s.profit for k, s in sols.items()}
    best = max(KINDS, key=lambda k: profits[k])
    return ComparisonReport(delta, profits, best, sols)
