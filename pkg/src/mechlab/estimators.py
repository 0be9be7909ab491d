"""Estimator-style wrappers around the mechanism solvers.

``fit(value_dist, cost_dist)`` solves the mechanism and stores the solution in
trailing-underscore attributes.  The fitted estimator then plays out sampled
``(theta, omega)`` pairs: ``predict`` returns trade flags, ``transform`` the
realized outcome columns, and ``score`` the mean discounted seller profit.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import atwill, buyer_side, mechanisms, montecarlo
from .validation import check_delta, check_distribution, check_type_pairs, require_uniform


class _MechanismBase(BaseEstimator):
    _needs_delta = True

    def _delta(self):
        return check_delta(self.delta) if self._needs_delta else None

    def _solve(self, F, G):
        raise NotImplementedError

    def _rule(self):
        raise NotImplementedError

    def fit(self, value_dist="uniform", cost_dist="uniform"):
        F = check_distribution(value_dist)
        G = check_distribution(cost_dist)
        self.solution_ = self._solve(F, G)
        self.value_dist_, self.cost_dist_ = F, G
        self.rule_ = self._rule()
        return self

    def _discount(self):
        d = getattr(self, "delta", None)
        return 1.0 if d is None else float(d)

    def _outcome(self, X):
        check_is_fitted(self, "solution_")
        theta, omega = check_type_pairs(X)
        return theta, omega, self.rule_(theta, omega)

    def predict(self, X):
        """Trade flag for each ``(theta, omega)`` row."""
        return self._outcome(X)[2].traded

    def transform(self, X):
        """Columns ``stage, traded, transfer, seller_profit`` (stage -1 means no trade)."""
        _, omega, out = self._outcome(X)
        profit = out.seller_profit(omega, self._discount())
        return np.column_stack([out.stage, out.traded, out.transfer, profit]).astype(float)

    def score(self, X, y=None):
        """Mean discounted seller profit on the sample."""
        _, omega, out = self._outcome(X)
        return float(out.seller_profit(omega, self._discount()).mean())

    def simulate(self, n=montecarlo.DEFAULT_N, seed=montecarlo.DEFAULT_SEED):
        check_is_fitted(self, "solution_")
        return montecarlo.simulate(self.rule_, self.value_dist_, self.cost_dist_,
                                   self._discount(), n=n, seed=seed)


class _SellerMechanism(_MechanismBase):
    kind = None

    def _solve(self, F, G):
        return mechanisms.solve(self.kind, F, G, self._delta())

    def _rule(self):
        return montecarlo.build_rule(self.solution_, self.value_dist_, self.cost_dist_)

    @property
    def price_(self):
        check_is_fitted(self, "solution_")
        return self.solution_.price0

    @property
    def profit_(self):
        check_is_fitted(self, "solution_")
        return self.solution_.profit


class EAFPMechanism(_SellerMechanism):
    """Time-0 posted price with guaranteed delivery."""

    kind = "EAFP"
    _needs_delta = False


class EAOMechanism(_SellerMechanism):
    """Time-0 posted price that the seller may cancel once her cost is known."""

    kind = "EAO"
    _needs_delta = False


class EPOMechanism(_SellerMechanism):
    """Posted price chosen after the cost is revealed; profits are discounted."""

    kind = "EPO"

    def __init__(self, delta=0.5):
        self.delta = delta


class DynamicMechanism(_SellerMechanism):
    """Time-0 price for high types, uncommitted ex-post price for the rest."""

    kind = "D"

    def __init__(self, delta=0.5):
        self.delta = delta

    @property
    def theta_bar_(self):
        check_is_fitted(self, "solution_")
        return self.solution_.theta_bar


class AtWillDynamicMechanism(_MechanismBase):
    """At-will variants ``d1`` and ``d2`` of the dynamic mechanism (uniform only)."""

    def __init__(self, variant="d1", delta=0.5, weighting="unconditional"):
        self.variant = variant
        self.delta = delta
        self.weighting = weighting

    def _solve(self, F, G):
        require_uniform(F, G)
        delta = self._delta()
        variant = str(self.variant).lower()
        if variant == "d1":
            return atwill.solve_d1(delta)
        if variant == "d2":
            return atwill.solve_d2(delta, weighting=self.weighting)
        raise ValueError(f"variant must be 'd1' or 'd2', got {self.variant!r}")

    def _rule(self):
        return montecarlo.build_atwill_rule(self.solution_)

    @property
    def profit_(self):
        check_is_fitted(self, "solution_")
        return self.solution_.profit


class BuyerPrincipalMechanism(_MechanismBase):
    """The buyer designs the mechanism; ``score`` still reports seller profit."""

    def __init__(self, kind="eao", delta=0.5):
        self.kind = kind
        self.delta = delta

    def _solve(self, F, G):
        return buyer_side.solve_buyer(self.kind, self._delta(), F, G)

    def _rule(self):
        return montecarlo.build_buyer_rule(self.solution_)

    @property
    def utility_(self):
        check_is_fitted(self, "solution_")
        return self.solution_.utility

    def surplus(self, X):
        """Mean discounted buyer surplus on the sample."""
        theta, _, out = self._outcome(X)
        return float(out.buyer_surplus(theta, self._discount()).mean())
