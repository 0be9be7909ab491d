"""Optimal pricing when the seller learns her cost after contracting."""

from .distributions import Distribution, Power, Tabulated, Uniform, from_spec
from .estimators import (
    AtWillDynamicMechanism,
    BuyerPrincipalMechanism,
    DynamicMechanism,
    EAFPMechanism,
    EAOMechanism,
    EPOMechanism,
)
from .mechanisms import (
    MechanismSolution,
    RegimeThresholds,
    compare,
    regime_thresholds,
    solve,
    solve_dynamic,
    solve_eafp,
    solve_eao,
    solve_epo,
)

__all__ = [
    "AtWillDynamicMechanism",
    "BuyerPrincipalMechanism",
    "Distribution",
    "DynamicMechanism",
    "EAFPMechanism",
    "EAOMechanism",
    "EPOMechanism",
    "MechanismSolution",
    "Power",
    "RegimeThresholds",
    "Tabulated",
    "Uniform",
    "compare",
    "from_spec",
    "regime_thresholds",
    "solve",
    "solve_dynamic",
    "solve_eafp",
    "solve_eao",
    "solve_epo",
]

__version__ = "0.1.0"
