"""Functionals monitored along trajectories.

Mass functional with its a-priori bound, the Lyapunov functional of the
competition model, a blow-up indicator, cosine-mode projections and an
oscillation-period estimator.  Quadrature is the cell-average (midpoint)
rule of the finite-volume grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.fft import dct

from evasion.equilibrium import CoexistenceState
from evasion.kinetics import DomainError, KineticsSpec, check_hypotheses
from evasion.model import ModelParams
from evasion.stability import chi_0_global


class NotApplicableError(ValueError):
    """The functional is undefined for this kinetics or state."""


class Health(str, Enum):
    HEALTHY = "Healthy"
    SUSPECTED = "Suspected"
    BLOWN_UP = "BlownUp"


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One row of the diagnostics stream.

    ``mode1_amp`` is the signed coefficient of ``cos(pi x / L)`` in ``N``
    (1D runs only); ``lyapunov`` is present only for the competition model.
    """

    t: float
    dt: float
    supN: float
    supP: float
    supW: float
    mass_v: float | None
    lyapunov: float | None
    mode1_amp: float | None
    status: str = Health.HEALTHY.value

    @property
    def sup(self) -> float:
        return max(self.supN, self.supP, self.supW)


# ---------------------------------------------------------------------------
# mass functional


@dataclass(frozen=True)
class MassConstants:
    """``v = int N + w_P int P + w_W int W`` and ``v' + c1 v <= c0``."""

    w_P: float
    w_W: float
    c0: float
    c1: float

    def bound(self, v0: float) -> float:
        return max(v0, self.c0 / self.c1)


def mass_constants(kinetics: KineticsSpec, area: float) -> MassConstants:
    rep = check_hypotheses(kinetics)
    if not math.isfinite(rep.C_g):
        raise NotApplicableError("signal production is not bounded by C_g P")
    b = kinetics.conversion
    c1 = min(kinetics.delta / 2.0, rep.r1 / 2.0, kinetics.mu)
    c0 = 3.0 * rep.r1**2 / (4.0 * rep.r2) * area
    return MassConstants(1.0 / b, kinetics.delta / (2.0 * b * rep.C_g), c0, c1)


def mass_functional(state, kinetics: KineticsSpec) -> float:
    """``int N + (1/b) int P + delta/(2 b C_g) int W``."""
    k = mass_constants(kinetics, state.grid.area)
    vol = state.grid.cell_volume
    return float(vol * (np.sum(state.N) + k.w_P * np.sum(state.P) + k.w_W * np.sum(state.W)))


def mass_bound(kinetics: KineticsSpec, v0: float, area: float) -> float:
    """``max{v(0), c0 / c1}``."""
    return mass_constants(kinetics, area).bound(v0)


# ---------------------------------------------------------------------------
# Lyapunov functional


def _entropy(z: np.ndarray, zs: float) -> np.ndarray:
    """``z - z* - z* ln(z/z*)``, nonnegative and zero only at ``z = z*``.

    Written as ``z* (u - log1p(u))`` with ``u = z/z* - 1`` and a Taylor
    series near ``u = 0`` to avoid cancellation.
    """
    u = np.asarray(z, dtype=float) / zs - 1.0
    small = np.abs(u) < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = u - np.log1p(u)
    series = u * u * (0.5 - u * (1.0 / 3.0 - u * (0.25 - u * 0.2)))
    return zs * np.where(small, series, direct)


def lyapunov_value(state, E: CoexistenceState, params: ModelParams, floor: float | None = None) -> float:
    """Quadrature of the competition-model Lyapunov functional.

    With ``floor=None`` a nonpositive ``N`` or ``P`` cell raises
    ``DomainError``; with a positive ``floor`` the densities are clamped.
    """
    g = chi_0_global(params)
    N, P, W = state.N, state.P, state.W
    if floor is None:
        if np.any(N <= 0) or np.any(P <= 0):
            raise DomainError("Lyapunov functional needs strictly positive N and P")
    else:
        N = np.maximum(N, floor)
        P = np.maximum(P, floor)
    dens = _entropy(N, E.N) + g.C1 * _entropy(P, E.P) + 0.5 * g.C2 * (W - E.W) ** 2
    return float(state.grid.cell_volume * np.sum(dens))


# ---------------------------------------------------------------------------
# blow-up indicator


def blowup_indicator(
    records: Sequence[DiagnosticsRecord],
    blowup_threshold: float = 1e6,
    dt_min: float = 0.0,
    pinned_steps: int = 100,
) -> Health:
    """Classify a window of diagnostics records.

    BlownUp: a sup-norm above the cap, or ``dt`` at ``dt_min`` for
    ``pinned_steps`` consecutive records.  Suspected: the sup-norm doubled
    on two consecutive records.
    """
    if len(records) < 3:
        raise ValueError("at least three records are needed")
    if any(r.sup > blowup_threshold or not math.isfinite(r.sup) for r in records):
        return Health.BLOWN_UP
    if any(r.status == Health.BLOWN_UP.value for r in records):
        return Health.BLOWN_UP
    run = 0
    for r in records:
        run = run + 1 if r.dt <= dt_min * (1 + 1e-12) else 0
        if run >= pinned_steps:
            return Health.BLOWN_UP
    sups = [r.sup for r in records]
    for a, b, c in zip(sups, sups[1:], sups[2:]):
        if b >= 2 * a and c >= 2 * b:
            return Health.SUSPECTED
    return Health.HEALTHY


# ---------------------------------------------------------------------------
# cosine modes


def cosine_coefficients(u: np.ndarray, m: int | None = None) -> np.ndarray:
    """Coefficients ``a_k`` with ``u_i = sum_k a_k cos(k pi x_i / L)``.

    Exact on cell centers for ``k < n`` (the DCT-II basis).
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    a = dct(u, type=2, axis=0) / n
    a[0] /= 2.0
    if m is not None:
        a = a[: m + 1]
    return a


def mode_amplitudes(state, m: int) -> dict[str, np.ndarray]:
    """Cosine coefficients of modes ``0..m`` for each field (1D only)."""
    if state.grid.dim != 1:
        raise NotImplementedError("mode projection is implemented for 1D grids only")
    if m >= state.grid.n:
        raise ValueError("m must be below the number of cells")
    return {name: cosine_coefficients(getattr(state, name), m) for name in ("N", "P", "W")}


def synthesize(coeffs: Sequence[float], x: np.ndarray, L: float) -> np.ndarray:
    """Inverse of :func:`cosine_coefficients` at the points ``x``."""
    out = np.zeros_like(np.asarray(x, dtype=float))
    for k, a in enumerate(coeffs):
        out += a * np.cos(k * np.pi * x / L)
    return out


# ---------------------------------------------------------------------------
# oscillation period


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    std: float
    crossings: int


def oscillation_period(t: Sequence[float], values: Sequence[float]) -> PeriodEstimate | None:
    """Mean spacing of upward zero crossings of the linearly detrended series.

    Returns ``None`` with fewer than four sign changes.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.size < 4:
        return None
    slope, icpt = np.polyfit(t, y, 1)
    y = y - (slope * t + icpt)
    s = np.sign(y)
    changes = np.flatnonzero(s[:-1] * s[1:] < 0)
    if changes.size < 4:
        return None
    up = changes[(y[changes] < 0) & (y[changes + 1] > 0)]
    # linear interpolation of the crossing time
    tc = t[up] - y[up] * (t[up + 1] - t[up]) / (y[up + 1] - y[up])
    if tc.size < 2:
        return None
    gaps = np.diff(tc)
    return PeriodEstimate(float(gaps.mean()), float(gaps.std()), int(tc.size))
