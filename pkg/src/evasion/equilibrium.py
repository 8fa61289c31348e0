"""Positive coexistence steady state and the kinetic Jacobian there."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import Polynomial

from evasion.kinetics import (
    KineticsSpec,
    ModelVariant,
    ResponseFamily,
    SignalLaw,
    _response,
    _response_partials,
    _rhs,
    growth_derivative,
)
from evasion.model import ModelParams
from evasion.roots import real_roots


class NoCoexistenceError(ValueError):
    """No positive coexistence state exists for the given kinetics."""


class AmbiguousCoexistenceError(ValueError):
    def __init__(self, message: str, roots):
        super().__init__(message)
        self.roots = list(roots)


@dataclass(frozen=True)
class CoexistenceState:
    N: float
    P: float
    W: float
    residual: float
    conditions_verified: bool = True

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.N, self.P, self.W)


@dataclass(frozen=True)
class JacobianEntries:
    """Kinetic Jacobian ``a_ij`` at a coexistence state.

    ``sign_ok`` is False when the pattern a11<0, a12<0, a21>0, a22<=0,
    a32>0, a33<0 fails; ``sign_violations`` names the offending entries.
    """

    a11: float
    a12: float
    a13: float
    a21: float
    a22: float
    a23: float
    a31: float
    a32: float
    a33: float
    state: CoexistenceState
    sign_ok: bool = True
    sign_violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.a11, self.a12, self.a13],
                [self.a21, self.a22, self.a23],
                [self.a31, self.a32, self.a33],
            ]
        )


def _variant_for(kinetics: KineticsSpec) -> ModelVariant:
    return ModelVariant.B2 if kinetics.eta > 0 else ModelVariant.B


def _signal_steady(kinetics: KineticsSpec, N: float, P: float) -> float:
    sig = kinetics.signal
    if sig.law is SignalLaw.ODOR:
        return sig.gamma / kinetics.mu * P
    return sig.gamma * float(_response(kinetics.response, N, P)) * P / kinetics.mu


def _residual(kinetics: KineticsSpec, variant: ModelVariant, N, P, W) -> float:
    return float(np.max(np.abs(_rhs(kinetics, variant, N, P, W))))


def coexistence_rm(kinetics: KineticsSpec) -> CoexistenceState:
    """Closed-form steady state for Holling II kinetics without competition.

    ``N = delta / (c - delta beta)``, ``P = f(N) / F(N)``.
    """
    resp = kinetics.response
    if resp.family is not ResponseFamily.HOLLING_II or kinetics.eta != 0:
        raise ValueError("closed form needs Holling II kinetics with eta = 0")
    c, d, beta = kinetics.c, kinetics.delta, resp.beta
    K, r, a = kinetics.growth.K, kinetics.growth.r, resp.a
    if c - d * beta <= 0:
        raise NoCoexistenceError("c <= delta*beta: predator cannot persist")
    N = d / (c - d * beta)
    if N >= K:
        raise NoCoexistenceError("c <= delta*beta + delta/K: no positive predator density")
    P = r * (1.0 - N / K) * (1.0 + beta * N) / a
    W = float(_signal_steady(kinetics, N, P))
    return CoexistenceState(N, P, W, _residual(kinetics, ModelVariant.B, N, P, W))


def _bda_polynomial(kinetics: KineticsSpec) -> tuple[Polynomial, Polynomial, Polynomial, Polynomial]:
    """Cubic in ``P`` whose positive roots give the steady states.

    Eliminating ``N = u (1 + alpha P) / D`` with ``u = delta + eta P`` and
    ``D = c - beta u`` from both kinetic balances.
    """
    resp = kinetics.response
    r, K, a = kinetics.growth.r, kinetics.growth.K, resp.a
    c, beta, alpha = kinetics.c, resp.beta, resp._alpha
    u = Polynomial([kinetics.delta, kinetics.eta])
    s1 = Polynomial([1.0, alpha])
    D = c - beta * u
    poly = r * c * s1 * (K * D - u * s1) - a * K * Polynomial([0.0, 1.0]) * D * D
    return poly, u, s1, D


def coexistence_bda(kinetics: KineticsSpec) -> CoexistenceState:
    """Steady state for Beddington-DeAngelis (or Holling II) with ``eta >= 0``."""
    resp = kinetics.response
    if resp.family not in (ResponseFamily.HOLLING_II, ResponseFamily.BEDDINGTON_DEANGELIS):
        raise ValueError("cubic reduction covers Holling II and Beddington-DeAngelis only")
    poly, u, s1, D = _bda_polynomial(kinetics)
    K = kinetics.growth.K
    candidates = []
    for P in real_roots(poly.coef, tol=1e-15):
        if P <= 0:
            continue
        Dv = D(P)
        if Dv <= 0:
            continue
        N = u(P) * s1(P) / Dv
        if 0 < N < K:
            candidates.append((N, P))
    if not candidates:
        raise NoCoexistenceError("no positive root of the steady-state cubic")
    if len(candidates) > 1:
        raise AmbiguousCoexistenceError(
            f"{len(candidates)} positive steady states", candidates
        )
    N, P = (float(x) for x in candidates[0])
    W = float(_signal_steady(kinetics, N, P))
    variant = _variant_for(kinetics)
    ok = all(uniqueness_conditions(kinetics).values())
    return CoexistenceState(N, P, W, _residual(kinetics, variant, N, P, W), conditions_verified=ok)


def coexistence_state(kinetics: KineticsSpec) -> CoexistenceState:
    """Dispatch to the closed form or the cubic reduction."""
    if kinetics.response.family is ResponseFamily.HOLLING_II and kinetics.eta == 0:
        return coexistence_rm(kinetics)
    return coexistence_bda(kinetics)


def uniqueness_conditions(kinetics: KineticsSpec) -> dict[str, bool]:
    """Sufficient inequalities for a single positive steady state.

    With interference (alpha > 0): r alpha > 2a, beta in (0, 1),
    delta in (c/2, c/(beta+1)).  Without: beta < min(1/2, c/delta).
    """
    resp = kinetics.response
    r, a, c, delta = kinetics.growth.r, resp.a, kinetics.c, kinetics.delta
    beta, alpha = resp.beta, resp._alpha
    if alpha > 0:
        return {
            "r*alpha > 2a": r * alpha > 2 * a,
            "0 < beta < 1": 0 < beta < 1,
            "c/2 < delta < c/(beta+1)": c / 2 < delta < c / (beta + 1),
        }
    return {"beta < min(1/2, c/delta)": beta < min(0.5, c / delta)}


def jacobian_at(kinetics: KineticsSpec, E: CoexistenceState, variant=None) -> JacobianEntries:
    """Analytic Jacobian of the kinetics at ``E``.

    ``variant`` defaults to B2 when ``eta > 0``.  A broken sign pattern is
    reported through ``sign_ok`` and a warning, not an exception.
    """
    variant = _variant_for(kinetics) if variant is None else ModelVariant(variant)
    N, P = E.N, E.P
    F = float(_response(kinetics.response, N, P))
    FN, FP = (float(x) for x in _response_partials(kinetics.response, N, P))
    eta = kinetics.eta if variant is ModelVariant.B2 else 0.0
    b = kinetics.conversion

    a11 = float(growth_derivative(kinetics.growth, N)) - P * FN
    a12 = -F - P * FP
    a21 = b * P * FN
    # -delta - eta P + b F vanishes at the steady state; dropping it keeps
    # a22 exactly zero for Holling responses
    a22 = b * P * FP - eta * P + 0.0
    sig = kinetics.signal
    if sig.law is SignalLaw.ODOR:
        a31, a32 = 0.0, sig.gamma
    else:
        a31, a32 = sig.gamma * P * FN, sig.gamma * (F + P * FP)
    a33 = -kinetics.mu

    checks = {
        "a11<0": a11 < 0,
        "a12<0": a12 < 0,
        "a21>0": a21 > 0,
        "a22<=0": a22 <= 0,
        "a32>0": a32 > 0,
        "a33<0": a33 < 0,
    }
    bad = tuple(k for k, v in checks.items() if not v)
    if bad:
        warnings.warn(f"Jacobian sign pattern violated: {', '.join(bad)}", RuntimeWarning, stacklevel=2)
    return JacobianEntries(
        a11=float(a11), a12=float(a12), a13=0.0,
        a21=float(a21), a22=float(a22), a23=0.0,
        a31=float(a31), a32=float(a32), a33=float(a33),
        state=E, sign_ok=not bad, sign_violations=bad,
    )


def linearize(params: ModelParams) -> JacobianEntries:
    """Steady state and Jacobian for a parameter set in one call."""
    kin = replace(params.kinetics, eta=params.eta)
    E = coexistence_state(kin)
    return jacobian_at(kin, E)
