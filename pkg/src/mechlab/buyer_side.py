"""Mirror model: the buyer designs the mechanism (uniform F and G only).

The seller knows her cost at time 0; the buyer learns her value at time 1.
Prices here are offers made by the buyer, and ``utility`` is the buyer's
expected surplus.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .distributions import Distribution
from .validation import require_uniform

BUYER_KINDS = ("EAFP", "EPO", "EAO", "D")


@dataclass
class BuyerSolution:
    kind: str
    utility: float
    price: Optional[float] = None
    omega_bar: Optional[float] = None
    delta: Optional[float] = None
    price_rule: Optional[Callable] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("price_rule")
        return {"side": "buyer", **d}


def eafp_utility(price):
    """Buyer surplus from a committed time-0 offer accepted by costs below it."""
    return (0.5 - price) * price


def eao_utility(price):
    """Buyer surplus from a time-0 offer the buyer may walk away from."""
    return 0.5 * (1.0 - price) ** 2 * price


def dynamic_utility(omega_bar, delta):
    """Buyer surplus when seller types below ``omega_bar`` accept the time-0 offer."""
    w = np.asarray(omega_bar, dtype=float)
    out = w * (0.5 - w - 0.25 * delta * (1.0 - w) ** 2) + delta * (1.0 - w) ** 3 / 12.0
    return float(out) if np.ndim(omega_bar) == 0 else out


def dynamic_p0(omega_bar: float, delta: float) -> float:
    return omega_bar + 0.25 * delta * (1.0 - omega_bar) ** 2


def dynamic_omega_bar(delta: float) -> float:
    return (3.0 * delta - 4.0 + math.sqrt(16.0 - 16.0 * delta + delta * delta)) / (4.0 * delta)


def ex_post_offer(theta, omega_bar: float = 0.0):
    """Time-1 offer of a buyer with value ``theta`` facing costs above ``omega_bar``."""
    return 0.5 * (omega_bar + np.asarray(theta, dtype=float))


def solve_buyer(kind: str, delta: Optional[float] = None, F: Optional[Distribution] = None,
                G: Optional[Distribution] = None) -> BuyerSolution:
    require_uniform(F, G)
    kind = kind.upper()
    if kind == "EAFP":
        return BuyerSolution("EAFP", 1.0 / 16.0, price=0.25, delta=delta)
    if kind == "EAO":
        return BuyerSolution("EAO", 2.0 / 27.0, price=1.0 / 3.0, delta=delta)
    if delta is None:
        raise ValueError(f"{kind} needs a discount factor")
    if kind == "EPO":
        return BuyerSolution("EPO", delta / 12.0, delta=delta, price_rule=ex_post_offer)
    if kind == "D":
        w = dynamic_omega_bar(delta)
        return BuyerSolution("D", dynamic_utility(w, delta), price=dynamic_p0(w, delta),
                             omega_bar=w, delta=delta,
                             price_rule=lambda theta: ex_post_offer(theta, w))
    raise ValueError(f"unknown mechanism kind {kind!r}")
