"""Predator-prey systems with repulsive chemotaxis and prey-taxis.

Steady states, dispersion-relation stability thresholds and a finite-volume
IMEX solver for the diffusive models with chemical predator evasion.
"""

from evasion.kinetics import (
    DomainError,
    FunctionalResponseSpec,
    GrowthSpec,
    KineticsSpec,
    ModelVariant,
    ResponseFamily,
    SignalLaw,
    SignalProductionSpec,
)
from evasion.model import ModelParams, para1
from evasion.equilibrium import (
    CoexistenceState,
    JacobianEntries,
    NoCoexistenceError,
    coexistence_bda,
    coexistence_rm,
    coexistence_state,
    jacobian_at,
)

__all__ = [
    "DomainError",
    "FunctionalResponseSpec",
    "GrowthSpec",
    "KineticsSpec",
    "ModelVariant",
    "ResponseFamily",
    "SignalLaw",
    "SignalProductionSpec",
    "ModelParams",
    "para1",
    "CoexistenceState",
    "JacobianEntries",
    "NoCoexistenceError",
    "coexistence_bda",
    "coexistence_rm",
    "coexistence_state",
    "jacobian_at",
]

__version__ = "0.1.0"
