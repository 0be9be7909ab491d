"""Monte Carlo play-out of solved mechanisms and a brute-force price oracle.

Nothing here reuses the solvers' quadrature: outcomes are computed from the
allocation rules on sampled ``(theta, omega)`` pairs, and the brute-force
oracle integrates on its own grid.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .atwill import D1Solution, D2Candidate
from .buyer_side import BuyerSolution, ex_post_offer
from .distributions import Distribution
from .mechanisms import ExPostPriceRule, MechanismSolution

T0, T1, NONE = 0, 1, -1
BLOCK_SIZE = 1 << 16
DEFAULT_N = 1_000_000
DEFAULT_SEED = 42


@dataclass
class Outcome:
    """Vectorized realized play: one entry per ``(theta, omega)`` draw."""

    stage: np.ndarray
    traded: np.ndarray
    transfer: np.ndarray
    canceled: np.ndarray

    def discount(self, delta: float) -> np.ndarray:
        return np.where(self.stage == T1, delta, 1.0)

    def seller_profit(self, omega, delta: float) -> np.ndarray:
        return (self.transfer - omega * self.traded) * self.discount(delta)

    def buyer_surplus(self, theta, delta: float) -> np.ndarray:
        return (theta * self.traded - self.transfer) * self.discount(delta)


@dataclass
class OutcomeRule:
    kind: str
    evaluate: Callable[[np.ndarray, np.ndarray], Outcome]
    delta: Optional[float] = None
    side: str = "seller"

    def __call__(self, theta, omega) -> Outcome:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        theta, omega = np.broadcast_arrays(theta, omega)
        return self.evaluate(theta, omega)

    @classmethod
    def never(cls) -> "OutcomeRule":
        def evaluate(theta, omega):
            z = np.zeros(theta.shape)
            return Outcome(np.full(theta.shape, NONE), z.astype(bool), z, z.astype(bool))
        return cls("NONE", evaluate)


@dataclass(frozen=True)
class SimEstimate:
    profit_mean: float
    profit_se: float
    buyer_surplus_mean: float
    buyer_surplus_se: float
    trade_prob: float
    n: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _outcome(stage, traded, transfer, canceled=None):
    if canceled is None:
        canceled = np.zeros(stage.shape, dtype=bool)
    return Outcome(stage, traded, np.where(traded, transfer, 0.0), canceled)


def _eafp(p):
    def evaluate(theta, omega):
        traded = theta >= p
        return _outcome(np.where(traded, T0, NONE), traded, np.full(theta.shape, p))
    return evaluate


def _eao(p):
    def evaluate(theta, omega):
        accepted = theta >= p
        traded = accepted & (omega <= p)
        canceled = accepted & ~traded
        return _outcome(np.where(traded, T0, NONE), traded, np.full(theta.shape, p), canceled)
    return evaluate


def _ex_post(rule: ExPostPriceRule):
    def evaluate(theta, omega):
        price = rule(omega)
        traded = ~np.isnan(price) & (theta >= np.nan_to_num(price, nan=np.inf))
        return _outcome(np.where(traded, T1, NONE), traded, np.nan_to_num(price))
    return evaluate


def _dynamic(p0, theta_bar, rule: ExPostPriceRule):
    later = _ex_post(rule)

    def evaluate(theta, omega):
        now = theta >= theta_bar
        out = later(np.where(now, 0.0, theta), omega)
        stage = np.where(now, T0, out.stage)
        traded = now | out.traded
        transfer = np.where(now, p0, out.transfer)
        return _outcome(stage, traded, transfer)
    return evaluate


def build_rule(solution: MechanismSolution, F: Distribution, G: Distribution) -> OutcomeRule:
    """Outcome map for a seller-designed mechanism."""
    kind = solution.kind
    if kind == "EAFP":
        return OutcomeRule(kind, _eafp(solution.price0))
    if kind == "EAO":
        return OutcomeRule(kind, _eao(solution.price0))
    if kind == "EPO":
        return OutcomeRule(kind, _ex_post(solution.price_rule or ExPostPriceRule(F, 1.0)),
                           solution.delta)
    if kind == "D":
        rule = solution.price_rule or ExPostPriceRule(F, solution.theta_bar)
        return OutcomeRule(kind, _dynamic(solution.price0, solution.theta_bar, rule),
                           solution.delta)
    raise ValueError(f"no outcome rule for mechanism kind {kind!r}")


def build_buyer_rule(solution: BuyerSolution) -> OutcomeRule:
    """Outcome map when the buyer designs the mechanism (uniform model)."""
    kind = solution.kind
    if kind == "EAFP":
        P = solution.price

        def evaluate(theta, omega):
            traded = omega <= P
            return _outcome(np.where(traded, T0, NONE), traded, np.full(theta.shape, P))
    elif kind == "EAO":
        P = solution.price

        def evaluate(theta, omega):
            accepted = omega <= P
            traded = accepted & (theta >= P)
            return _outcome(np.where(traded, T0, NONE), traded, np.full(theta.shape, P),
                            accepted & ~traded)
    elif kind == "EPO":
        def evaluate(theta, omega):
            offer = ex_post_offer(theta)
            traded = omega <= offer
            return _outcome(np.where(traded, T1, NONE), traded, offer)
    elif kind == "D":
        P0, wb = solution.price, solution.omega_bar

        def evaluate(theta, omega):
            now = omega <= wb
            offer = ex_post_offer(theta, wb)
            later = ~now & (theta > wb) & (omega <= offer)
            traded = now | later
            return _outcome(np.where(now, T0, np.where(later, T1, NONE)), traded,
                            np.where(now, P0, offer))
    else:
        raise ValueError(f"no outcome rule for mechanism kind {kind!r}")
    return OutcomeRule(kind, evaluate, solution.delta, side="buyer")


def build_atwill_rule(solution) -> OutcomeRule:
    """Outcome map for the at-will dynamic mechanisms (uniform model).

    Accepting types sign an at-will contract at ``p0`` that the seller honours
    when ``omega <= omega_bar`` (``omega_bar = p0`` in D1).  In D2 a reneging
    seller re-offers ``max(theta_bar, (1 + omega) / 2)`` at time 1.  Types
    below ``theta_bar`` get the time-1 offer ``(theta_bar + omega) / 2``.
    """
    if isinstance(solution, D1Solution):
        kind, omega_bar, renegotiate = "D1", solution.p0, False
    elif isinstance(solution, D2Candidate):
        kind, omega_bar, renegotiate = "D2", solution.omega_bar, True
    else:
        raise ValueError(f"not an at-will solution: {solution!r}")
    tb, p0 = solution.theta_bar, solution.p0

    def evaluate(theta, omega):
        accepted = theta >= tb
        delivered = accepted & (omega <= omega_bar)
        low_offer = 0.5 * (tb + omega)
        low_trade = ~accepted & (omega <= tb) & (theta >= low_offer)
        if renegotiate:
            re_offer = np.maximum(tb, 0.5 * (1.0 + omega))
            re_trade = accepted & ~delivered & (theta >= re_offer)
        else:
            re_offer = np.zeros(theta.shape)
            re_trade = np.zeros(theta.shape, dtype=bool)
        traded = delivered | low_trade | re_trade
        stage = np.where(delivered, T0, np.where(low_trade | re_trade, T1, NONE))
        transfer = np.where(delivered, p0, np.where(re_trade, re_offer, low_offer))
        canceled = accepted & ~delivered
        return _outcome(stage, traded, transfer, canceled)

    return OutcomeRule(kind, evaluate, solution.delta)


def _block_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _merge(acc, block):
    # Chan et al. pairwise update of (count, mean, M2)
    n_a, mean_a, m2_a = acc
    n_b, mean_b, m2_b = block
    n = n_a + n_b
    d = mean_b - mean_a
    return n, mean_a + d * n_b / n, m2_a + m2_b + d * d * n_a * n_b / n


def _stats(x):
    mean = float(x.mean())
    return x.size, mean, float(((x - mean) ** 2).sum())


def simulate(rule: OutcomeRule, F: Distribution, G: Distribution, delta: Optional[float] = None,
             n: int = DEFAULT_N, seed: int = DEFAULT_SEED) -> SimEstimate:
    """Estimate expected profit and surplus by inverse-cdf sampling.

    Draws are generated in fixed blocks whose streams depend only on
    ``(seed, block index)``, so the estimate does not depend on evaluation order.
    """
    if n < 1000:
        raise ValueError("n must be at least 1000")
    if delta is None:
        delta = rule.delta if rule.delta is not None else 1.0
    profit = (0, 0.0, 0.0)
    surplus = (0, 0.0, 0.0)
    trades = 0
    for b, start in enumerate(range(0, n, BLOCK_SIZE)):
        size = min(BLOCK_SIZE, n - start)
        u = _block_rng(seed, b).random((2, size))
        theta, omega = F.ppf(u[0]), G.ppf(u[1])
        out = rule(theta, omega)
        profit = _merge(profit, _stats(out.seller_profit(omega, delta)))
        surplus = _merge(surplus, _stats(out.buyer_surplus(theta, delta)))
        trades += int(out.traded.sum())

    def se(acc):
        count, _, m2 = acc
        return math.sqrt(m2 / (count - 1) / count)

    return SimEstimate(profit[1], se(profit), surplus[1], se(surplus), trades / n, n, seed)


def brute_force_price(F: Distribution, G: Distribution, kind: str, m: int = 10_000,
                      substeps: int = 16) -> Tuple[float, float]:
    """Grid argmax of the EAFP or EAO posted-price objective.

    The cost integrals use a cumulative trapezoid rule on a grid ``substeps``
    times finer than the price grid.
    """
    if m < 100:
        raise ValueError("m must be at least 100")
    kind = kind.upper()
    fine = np.linspace(0.0, 1.0, (m - 1) * substeps + 1)
    g = G.cdf(fine)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(fine))))
    prices = fine[::substeps]
    survival = 1.0 - F.cdf(prices)
    if kind == "EAFP":
        mean_cost = 1.0 - cum[-1]
        objective = survival * (prices - mean_cost)
    elif kind == "EAO":
        objective = survival * cum[::substeps]
    else:
        raise ValueError("brute force covers EAFP and EAO only")
    i = int(np.argmax(objective))
    return float(prices[i]), float(objective[i])
