"""Deterministic root finding, quadrature and maximization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import BracketError

ROOT_TOL = 1e-10
QUAD_TOL = 1e-9
ARGMAX_TOL = 1e-10
SCAN_POINTS = 1025
MAX_DEPTH = 50

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RootResult:
    x: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error: float
    converged: bool
    evaluations: int

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class MaxResult:
    argmax: object
    value: float
    grid_resolution: float
    feasible: bool = True
    ties: Tuple = field(default=())


def find_root(f: Callable[[float], float], a: float, b: float, tol: float = ROOT_TOL,
              xtol: float = 0.0, maxiter: int = 200) -> RootResult:
    """Bracketed root of ``f`` on ``[a, b]``.

    Regula falsi with the Illinois modification; a step that fails to halve
    the bracket is followed by a bisection step.  Stops when ``|f(x)| <= tol`` or
    the bracket is narrower than ``xtol``.
    """
    fa, fb = f(a), f(b)
    if abs(fa) <= tol:
        return RootResult(a, fa, 0)
    if abs(fb) <= tol:
        return RootResult(b, fb, 0)
    if fa * fb > 0:
        raise BracketError(f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")

    best_x, best_f = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    if a > b:
        a, b, fa, fb = b, a, fb, fa
    retained = 0
    bisect_next = False
    it = 0
    for it in range(1, maxiter + 1):
        width = b - a
        x = 0.5 * (a + b) if bisect_next else (a * fb - b * fa) / (fb - fa)
        if not a < x < b:
            x = 0.5 * (a + b)
        fx = f(x)
        if abs(fx) < abs(best_f):
            best_x, best_f = x, fx
        if abs(fx) <= tol:
            return RootResult(x, fx, it)
        if (fx > 0) == (fb > 0):
            b, fb = x, fx
            if retained == -1:
                fa *= 0.5  # Illinois step on the stale endpoint
            retained = -1
        else:
            a, fa = x, fx
            if retained == 1:
                fb *= 0.5
            retained = 1
        bisect_next = (b - a) > 0.5 * width
        if b - a <= xtol or b - a <= 4 * np.finfo(float).eps * max(1.0, abs(a), abs(b)):
            mid = 0.5 * (a + b)
            return RootResult(mid, f(mid), it)
    return RootResult(best_x, best_f, it)


def bisect_array(f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                 iterations: int = 60) -> np.ndarray:
    """Elementwise bisection for increasing ``f`` with ``f(lo) <= 0 <= f(hi)``."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = f(mid) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def integrate(f: Callable[[float], float], a: float, b: float, tol: float = QUAD_TOL,
              max_depth: int = MAX_DEPTH) -> IntegralResult:
    """Adaptive Simpson quadrature with Richardson correction."""
    if b < a:
        raise ValueError("integration bounds must satisfy a <= b")
    if b == a:
        return IntegralResult(0.0, 0.0, True, 0)

    state = {"evals": 3, "converged": True, "err": 0.0}
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        state["evals"] += 2
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol or lm == a or rm == b:
            state["err"] += abs(delta) / 15.0
            return left + right + delta / 15.0
        if depth >= max_depth:
            state["converged"] = False
            state["err"] += abs(delta) / 15.0
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))

    value = recurse(a, b, fa, fm, fb, whole, tol, 1)
    return IntegralResult(value, state["err"], state["converged"], state["evals"])


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       xtol: float = ARGMAX_TOL) -> Tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on ``[a, b]``."""
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        if x1 >= x2:
            break
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _parabolic_polish(f, x, fx, a, b, h):
    """One three-point parabola step around an interior maximizer.

    Golden-section cannot resolve the argmax below the scale at which
    objective values agree to rounding; the parabola vertex can.
    """
    if x - h < a or x + h > b:
        return x, fx
    fl, fr = f(x - h), f(x + h)
    curv = fl - 2.0 * fx + fr
    if not curv < 0.0:
        return x, fx
    step = 0.5 * h * (fl - fr) / curv
    if abs(step) > h:
        return x, fx
    xn = x + step
    fn = f(xn)
    if fn >= fx - 1e-13 * max(1.0, abs(fx)):
        return xn, fn
    return x, fx


def maximize_1d(f: Callable[[float], float], a: float, b: float, n_scan: int = SCAN_POINTS,
                xtol: float = ARGMAX_TOL, vectorized: bool = False,
                polish: bool = True) -> MaxResult:
    """Global maximum on ``[a, b]``: coarse scan, then golden-section refinement.

    Ties on the scan resolve to the smallest argmax.  With ``vectorized=True``
    the scan calls ``f`` once on the whole grid.  ``polish`` adds a final
    parabolic step for smooth objectives.
    """
    grid = np.linspace(a, b, n_scan)
    if vectorized:
        values = np.asarray(f(grid), dtype=float)
    else:
        values = np.array([f(float(x)) for x in grid])
    i = int(np.argmax(values))
    best = float(values[i])
    tie_tol = 1e-15 * max(1.0, abs(best))
    ties = tuple(float(x) for x in grid[np.abs(values - best) <= tie_tol])
    h = (b - a) / (n_scan - 1)

    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, n_scan - 1)])
    x, fx = golden_section_max(f, lo, hi, xtol)
    if polish:
        x, fx = _parabolic_polish(f, x, fx, a, b, 1e-5 * (b - a))
    if fx > best:
        return MaxResult(float(x), float(fx), h, ties=ties)
    return MaxResult(float(grid[i]), best, h, ties=ties)


def maximize_2d_constrained(f: Callable[[float, float], float],
                            feasible: Callable[[float, float], bool],
                            box: Tuple[Tuple[float, float], Tuple[float, float]],
                            n: int = 401, sweeps: int = 4,
                            xtol: float = 1e-10) -> MaxResult:
    """Maximize ``f`` over feasible points of an ``n x n`` grid, then refine.

    Refinement is coordinate-wise golden-section search inside one grid cell
    around the incumbent, treating infeasible points as ``-inf``.
    """
    if n < 2:
        raise ValueError("n must be at least 2 per axis")
    (x0, x1), (y0, y1) = box
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    best: Optional[Tuple[float, float]] = None
    best_val = -math.inf
    for x in xs:
        for y in ys:
            if feasible(x, y):
                v = f(x, y)
                if v > best_val:
                    best, best_val = (float(x), float(y)), v
    hx = (x1 - x0) / (n - 1)
    hy = (y1 - y0) / (n - 1)
    if best is None:
        return MaxResult(None, -math.inf, max(hx, hy), feasible=False)

    def masked(x, y):
        return f(x, y) if feasible(x, y) else -math.inf

    bx, by = best
    for _ in range(sweeps):
        cx, cv = golden_section_max(lambda t: masked(t, by), max(x0, bx - hx), min(x1, bx + hx), xtol)
        if cv > best_val:
            bx, best_val = cx, cv
        cy, cv = golden_section_max(lambda t: masked(bx, t), max(y0, by - hy), min(y1, by + hy), xtol)
        if cv > best_val:
            by, best_val = cy, cv
    return MaxResult((float(bx), float(by)), float(best_val), max(hx, hy))
