"""Dynamic mechanisms whose time-0 contract is at-will (uniform F and G only).

In ``D1`` a reneged contract ends the interaction.  In ``D2`` the seller may
renegotiate after reneging, so the cost cutoff ``omega_bar`` for delivery and
the type cutoff ``theta_bar`` for acceptance are tied by a joint indifference
condition that has no closed-form solution; it is solved on a grid.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .distributions import Distribution
from .numerics import bisect_array, find_root, golden_section_max
from .validation import require_uniform

OMEGA_GRID = 2001
THETA_GRID = 2001
# candidates this close to omega_bar in {0, 1} are corner-like
DEGENERATE_BAND = 1e-3

# a crossing must clear this on both sides; tangencies are not roots here
SIGN_TOL = 1e-12

WEIGHTINGS = ("unconditional", "as_published")


@dataclass(frozen=True)
class D1Solution:
    theta_bar: float
    p0: float
    profit: float
    epo_equivalent: bool
    delta: float

    def to_dict(self) -> dict:
        return {"kind": "D1", **asdict(self)}


@dataclass(frozen=True)
class D2Candidate:
    theta_bar: float
    omega_bar: float
    p0: float
    branch: Optional[str]
    profit: float
    delta: float
    epo_equivalent: bool = False
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {"kind": "D2", **asdict(self)}


class Residual(NamedTuple):
    value: float
    branch: str


def d1_p0(theta_bar: float, delta: float) -> float:
    """Price at which the marginal type is indifferent: ``p0 (theta_bar - p0) = delta theta_bar^2 / 4``."""
    return 0.5 * theta_bar * (math.sqrt(1.0 - delta) + 1.0)


def d1_profit(theta_bar: float, delta: float) -> float:
    p0 = d1_p0(theta_bar, delta)
    return (1.0 - theta_bar) * p0 * p0 / 2.0 + delta * theta_bar**3 / 12.0


def d1_theta_bar(delta: float) -> float:
    s = math.sqrt(1.0 - delta)
    return min((4.0 * s - 2.0 * delta + 4.0) / (6.0 * s - 5.0 * delta + 6.0), 1.0)


def solve_d1(delta: float, F: Optional[Distribution] = None,
             G: Optional[Distribution] = None) -> D1Solution:
    require_uniform(F, G)
    tb = d1_theta_bar(delta)
    return D1Solution(tb, d1_p0(tb, delta), d1_profit(tb, delta), tb >= 1.0, delta)


def _branch_high(theta_bar, omega_bar):
    return omega_bar > 2.0 * theta_bar - 1.0


def d2_residual(theta_bar: float, omega_bar: float, delta: float) -> Residual:
    """Buyer-side price minus seller-side price for a ``(theta_bar, omega_bar)`` pair.

    A zero marks a pair at which both marginal agents are indifferent.
    """
    if omega_bar <= 0.0:
        return Residual(math.inf, "high")
    lhs = theta_bar - delta * theta_bar**2 / (4.0 * omega_bar)
    if _branch_high(theta_bar, omega_bar):
        rhs = omega_bar + delta * (1.0 - omega_bar) ** 2 / (4.0 * (1.0 - theta_bar))
        return Residual(lhs - rhs, "high")
    return Residual(lhs - omega_bar - delta * (theta_bar - omega_bar), "low")


def _residual_array(theta_bar, omega_bar, delta):
    tb = np.asarray(theta_bar, dtype=float)
    wb = np.asarray(omega_bar, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = tb - delta * tb**2 / (4.0 * wb)
        high = wb + delta * (1.0 - wb) ** 2 / (4.0 * (1.0 - tb))
        low = wb + delta * (tb - wb)
    return lhs - np.where(wb > 2.0 * tb - 1.0, high, low)


def d2_p0(theta_bar: float, omega_bar: float, delta: float) -> float:
    return theta_bar - delta * theta_bar**2 / (4.0 * omega_bar)


def d2_profit(theta_bar: float, omega_bar: float, delta: float,
              weighting: str = "unconditional") -> float:
    """Seller profit at a pair on the indifference manifold.

    The renegotiation term integrates the continuation profit against the
    cost density over ``(omega_bar, 1]``.  ``weighting="as_published"``
    additionally multiplies it by ``1 - omega_bar``; simulation of the
    allocation rule does not support that factor, so it is not the default.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    if theta_bar >= 1.0:
        return delta / 12.0
    p0 = d2_p0(theta_bar, omega_bar, delta)
    if omega_bar >= 2.0 * theta_bar - 1.0:
        cont = (1.0 - omega_bar) ** 3 / (12.0 * (1.0 - theta_bar))
    else:
        cont = (4.0 * theta_bar**2 - 6.0 * theta_bar * omega_bar - 2.0 * theta_bar
                + 3.0 * omega_bar**2 + 1.0) / 6.0
    if weighting == "as_published":
        cont *= 1.0 - omega_bar
    return (delta * theta_bar**3 / 12.0
            + (1.0 - theta_bar) * omega_bar * (p0 - omega_bar / 2.0)
            + (1.0 - theta_bar) * delta * cont)


def d2_candidates(delta: float, n_omega: int = OMEGA_GRID, n_theta: int = THETA_GRID):
    """All ``(theta_bar, omega_bar)`` solutions of the indifference condition on the grid.

    ``omega_bar`` runs over the interior of an ``n_omega``-point grid of [0, 1];
    for each, every sign change of the residual in ``theta_bar`` is refined by
    bisection.  Returns two equal-length arrays.
    """
    omegas = np.linspace(0.0, 1.0, n_omega)[1:-1]
    thetas = np.linspace(0.0, 1.0, n_theta)[1:-1]
    r = _residual_array(thetas[None, :], omegas[:, None], delta)
    # strict crossings only; a tangency (residual touching zero) is not counted
    sign_change = ((r[:, :-1] < -SIGN_TOL) & (r[:, 1:] > SIGN_TOL)) | (
        (r[:, :-1] > SIGN_TOL) & (r[:, 1:] < -SIGN_TOL))
    iw, it = np.nonzero(sign_change)
    if iw.size == 0:
        return np.empty(0), np.empty(0)
    w = omegas[iw]
    lo = thetas[it]
    hi = thetas[it + 1]
    # orient so the bisection sees an increasing function
    flip = np.where(r[iw, it] > 0.0, -1.0, 1.0)
    tb = bisect_array(lambda t: flip * _residual_array(t, w, delta), lo, hi)
    return tb, w


def _on_manifold_theta(omega_bar, delta, near):
    """Root in ``theta_bar`` of the residual at ``omega_bar``, nearest ``near``."""
    f = lambda t: d2_residual(t, omega_bar, delta).value
    step = 1.0 / THETA_GRID
    for _ in range(12):
        a, b = max(near - step, 1e-12), min(near + step, 1.0 - 1e-12)
        if f(a) * f(b) <= 0.0:
            return find_root(f, a, b, tol=1e-14).x
        step *= 2.0
    return None


def solve_d2(delta: float, F: Optional[Distribution] = None, G: Optional[Distribution] = None,
             weighting: str = "unconditional", n_omega: int = OMEGA_GRID) -> D2Candidate:
    """Best ``D2`` contract, or the EPO-equivalent corner when none beats it."""
    require_uniform(F, G)
    corner = D2Candidate(1.0, 1.0, 1.0, None, delta / 12.0, delta, epo_equivalent=True)
    tb, wb = d2_candidates(delta, n_omega=n_omega)
    if tb.size == 0:
        return corner
    profits = np.array([d2_profit(t, w, delta, weighting) for t, w in zip(tb, wb)])
    j = int(np.argmax(profits))
    t_best, w_best, v_best = float(tb[j]), float(wb[j]), float(profits[j])

    h = 1.0 / (n_omega - 1)

    def along(w):
        t = _on_manifold_theta(w, delta, t_best)
        return -math.inf if t is None else d2_profit(t, w, delta, weighting)

    w_ref, v_ref = golden_section_max(along, max(w_best - h, h), min(w_best + h, 1.0 - h), 1e-12)
    if v_ref > v_best:
        t_ref = _on_manifold_theta(w_ref, delta, t_best)
        if t_ref is not None:
            t_best, w_best, v_best = t_ref, w_ref, v_ref
    if v_best <= corner.profit:
        return corner
    res = d2_residual(t_best, w_best, delta)
    degenerate = w_best < DEGENERATE_BAND or w_best > 1.0 - DEGENERATE_BAND
    return D2Candidate(t_best, w_best, d2_p0(t_best, w_best, delta), res.branch, v_best, delta,
                       degenerate=degenerate)
