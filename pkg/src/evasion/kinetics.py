"""Reaction terms of the predator-prey-signal system.

Prey growth ``f(N)``, the per-predator consumption rate ``F(N, P)``, the
signal production rate ``g`` and their analytic partial derivatives.  All
functions broadcast over numpy arrays so the PDE solver can evaluate them
cellwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class DomainError(ValueError):
    """Raised when a density argument is negative."""


class ResponseFamily(str, Enum):
    HOLLING_II = "HollingII"
    HOLLING_III = "HollingIII"
    BEDDINGTON_DEANGELIS = "BeddingtonDeAngelis"
    CROWLEY_MARTIN = "CrowleyMartin"


class SignalLaw(str, Enum):
    ODOR = "Odor"
    DAMAGE = "Damage"


class ModelVariant(str, Enum):
    A = "A"    # chemorepulsion + prey-taxis
    B = "B"    # chemorepulsion only
    B2 = "B2"  # model B with predator competition -eta*P^2


def _check_nonneg(**values) -> None:
    for name, v in values.items():
        if np.any(np.asarray(v) < 0):
            raise DomainError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class FunctionalResponseSpec:
    """Consumption rate per predator.

    ``beta`` is the handling coefficient, ``alpha`` the predator interference
    and ``d`` the joint prey-predator interference (Crowley-Martin only).
    ``exponent`` is the Holling III power (> 1).
    """

    family: ResponseFamily
    a: float
    beta: float
    alpha: float = 0.0
    d: float = 0.0
    exponent: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "family", ResponseFamily(self.family))
        for name in ("a", "beta", "alpha", "d"):
            if getattr(self, name) < 0:
                raise ValueError(f"response coefficient {name} must be >= 0")
        if self.a <= 0:
            raise ValueError("encounter rate a must be > 0")
        fam = self.family
        if fam is ResponseFamily.HOLLING_III and self.exponent <= 1:
            raise ValueError("Holling III exponent must exceed 1")
        if fam is ResponseFamily.BEDDINGTON_DEANGELIS and self.alpha <= 0:
            raise ValueError("Beddington-DeAngelis requires alpha > 0")
        if fam is ResponseFamily.CROWLEY_MARTIN and (self.alpha <= 0 or self.d <= 0):
            raise ValueError("Crowley-Martin requires alpha > 0 and d > 0")

    # interference coefficients that the formula actually uses
    @property
    def _alpha(self) -> float:
        if self.family in (ResponseFamily.HOLLING_II, ResponseFamily.HOLLING_III):
            return 0.0
        return self.alpha

    @property
    def _d(self) -> float:
        return self.d if self.family is ResponseFamily.CROWLEY_MARTIN else 0.0


@dataclass(frozen=True)
class GrowthSpec:
    """Logistic prey growth ``r N (1 - N/K)``."""

    r: float
    K: float = 1.0

    def __post_init__(self):
        if self.r <= 0 or self.K <= 0:
            raise ValueError("growth requires r > 0 and K > 0")


@dataclass(frozen=True)
class SignalProductionSpec:
    law: SignalLaw
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "law", SignalLaw(self.law))
        if self.gamma <= 0:
            raise ValueError("signal production coefficient must be > 0")


@dataclass(frozen=True)
class KineticsSpec:
    """Complete reaction part of the model.

    ``conversion`` multiplies ``P F`` in the predator equation.  For the
    nondimensional Rosenzweig-MacArthur form with ``c N P / (1 + beta N)`` it
    equals ``c / a``.
    """

    growth: GrowthSpec
    response: FunctionalResponseSpec
    signal: SignalProductionSpec
    conversion: float
    delta: float
    mu: float
    eta: float = 0.0

    def __post_init__(self):
        if self.delta <= 0 or self.mu <= 0:
            raise ValueError("delta and mu must be > 0")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.conversion <= 0:
            raise ValueError("conversion must be > 0")

    @property
    def c(self) -> float:
        """Predator numerical response coefficient ``conversion * a``."""
        return self.conversion * self.response.a


def _response(spec: FunctionalResponseSpec, N, P):
    a, beta = spec.a, spec.beta
    if spec.family is ResponseFamily.HOLLING_III:
        Nq = N ** spec.exponent
        return a * Nq / (1.0 + beta * Nq)
    den = 1.0 + beta * N + spec._alpha * P + spec._d * N * P
    return a * N / den


def _response_partials(spec: FunctionalResponseSpec, N, P):
    a, beta = spec.a, spec.beta
    if spec.family is ResponseFamily.HOLLING_III:
        q = spec.exponent
        Nq = N ** q
        dN = a * q * N ** (q - 1.0) / (1.0 + beta * Nq) ** 2
        return dN, np.zeros_like(dN)
    alpha, d = spec._alpha, spec._d
    den = 1.0 + beta * N + alpha * P + d * N * P
    dN = a * (1.0 + alpha * P) / den**2
    dP = -a * N * (alpha + d * N) / den**2
    return dN, dP


def eval_response(spec: FunctionalResponseSpec, N, P):
    """Consumption rate ``F(N, P)``."""
    _check_nonneg(N=N, P=P)
    return _response(spec, np.asarray(N, dtype=float), np.asarray(P, dtype=float))


def eval_response_partials(spec: FunctionalResponseSpec, N, P):
    """Analytic ``(dF/dN, dF/dP)``."""
    _check_nonneg(N=N, P=P)
    return _response_partials(spec, np.asarray(N, dtype=float), np.asarray(P, dtype=float))


def eval_growth(growth: GrowthSpec, N):
    _check_nonneg(N=N)
    N = np.asarray(N, dtype=float)
    return growth.r * N * (1.0 - N / growth.K)


def growth_derivative(growth: GrowthSpec, N):
    return growth.r * (1.0 - 2.0 * np.asarray(N, dtype=float) / growth.K)


def eval_signal_production(spec: SignalProductionSpec, N, P, F_value):
    """``gamma P`` for odor release, ``gamma * F * P`` for damage release."""
    _check_nonneg(N=N, P=P, F_value=F_value)
    P = np.asarray(P, dtype=float)
    if spec.law is SignalLaw.ODOR:
        return spec.gamma * P
    return spec.gamma * np.asarray(F_value, dtype=float) * P


def response_supremum(spec: FunctionalResponseSpec) -> float:
    """Tight bound ``C_F`` of ``F`` over the nonnegative quadrant.

    Every family saturates at ``a / beta`` as ``N`` grows with ``P = 0``;
    without handling (``beta = 0``) the rate is unbounded.
    """
    if spec.beta == 0:
        return math.inf
    return spec.a / spec.beta


@dataclass
class HypothesisReport:
    H1: bool
    H2: bool
    H3: bool
    H4: bool
    r1: float
    r2: float
    C_F: float
    C_g: float
    # H4 witnesses: P*F <= C_PF and g <= C_G (inf when unbounded)
    C_PF: float = math.inf
    C_G: float = math.inf
    notes: list[str] = field(default_factory=list)


def check_hypotheses(kinetics: KineticsSpec) -> HypothesisReport:
    g = kinetics.growth
    resp = kinetics.response
    r1, r2 = g.r, g.r / g.K
    C_F = response_supremum(resp)
    notes: list[str] = []

    if kinetics.signal.law is SignalLaw.ODOR:
        C_g = kinetics.signal.gamma
    else:
        C_g = kinetics.signal.gamma * C_F

    # P*F stays bounded only with joint interference: d N P dominates a N P
    if resp.family is ResponseFamily.CROWLEY_MARTIN and resp.d > 0:
        C_PF = resp.a / resp.d
    else:
        C_PF = math.inf
        notes.append("P*F is unbounded in P for this response family")
    if kinetics.signal.law is SignalLaw.DAMAGE:
        C_G = kinetics.signal.gamma * C_PF
    else:
        C_G = math.inf
        notes.append("odor production gamma*P is unbounded")

    return HypothesisReport(
        H1=True,
        H2=math.isfinite(C_F),
        H3=math.isfinite(C_g),
        H4=math.isfinite(C_PF) and math.isfinite(C_G),
        r1=r1,
        r2=r2,
        C_F=C_F,
        C_g=C_g,
        C_PF=C_PF,
        C_G=C_G,
        notes=notes,
    )


def _rhs(kinetics: KineticsSpec, variant: ModelVariant, N, P, W):
    F = _response(kinetics.response, N, P)
    g = kinetics.growth
    dN = g.r * N * (1.0 - N / g.K) - P * F
    eta = kinetics.eta if variant is ModelVariant.B2 else 0.0
    dP = -kinetics.delta * P - eta * P * P + kinetics.conversion * P * F
    sig = kinetics.signal
    prod = sig.gamma * P if sig.law is SignalLaw.ODOR else sig.gamma * F * P
    dW = prod - kinetics.mu * W
    return dN, dP, dW


def rhs_kinetics(kinetics: KineticsSpec, model_variant, N, P, W):
    """Reaction rates ``(dN, dP, dW)``; ``eta`` only acts in variant B2."""
    _check_nonneg(N=N, P=P, W=W)
    variant = ModelVariant(model_variant)
    return _rhs(
        kinetics,
        variant,
        np.asarray(N, dtype=float),
        np.asarray(P, dtype=float),
        np.asarray(W, dtype=float),
    )
