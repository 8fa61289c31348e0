"""Linear stability of the coexistence state.

Per spatial mode with Neumann-Laplacian eigenvalue ``h`` the linearization
reduces to a 3x3 matrix (``M`` without prey-taxis, ``S`` with it).  Its
characteristic cubic ``lam^3 + c1 lam^2 + c2 lam + c3`` is evaluated in
closed form and the Routh-Hurwitz conditions ``c1 > 0, c3 > 0,
c1 c2 - c3 > 0`` decide stability.  Thresholds for the chemorepulsion
strength ``chi`` and prey-taxis strength ``xi`` follow from the same
coefficients.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from evasion.equilibrium import JacobianEntries, coexistence_bda, linearize
from evasion.kinetics import ResponseFamily, SignalLaw
from evasion.model import ModelParams
from evasion.roots import cubic_roots


class ModeTruncationError(ValueError):
    """No admissible mode below the truncation index."""


# ---------------------------------------------------------------------------
# modes


@dataclass(frozen=True)
class ModeSet:
    """Nonzero Neumann-Laplacian eigenvalues sorted ascending.

    On ``(0, L)`` mode ``j`` has ``h = (j pi / L)^2``; on the square
    ``(0, L)^2`` mode ``(j1, j2)`` has ``h = pi^2 (j1^2 + j2^2) / L^2``.
    The constant mode is excluded.
    """

    domain: str
    L: float
    indices: tuple
    h: np.ndarray
    j_max: int

    @classmethod
    def interval(cls, L: float, j_max: int = 200) -> "ModeSet":
        j = np.arange(1, j_max + 1)
        return cls("interval", float(L), tuple((int(k),) for k in j), (j * np.pi / L) ** 2, j_max)

    @classmethod
    def square(cls, L: float, j_max: int = 60) -> "ModeSet":
        pairs = [(j1, j2) for j1 in range(j_max + 1) for j2 in range(j_max + 1) if (j1, j2) != (0, 0)]
        h = np.array([np.pi**2 * (j1 * j1 + j2 * j2) / L**2 for j1, j2 in pairs])
        order = np.argsort(h, kind="stable")
        return cls("square", float(L), tuple(pairs[k] for k in order), h[order], j_max)

    @classmethod
    def for_domain(cls, dim: int, L: float, j_max: int | None = None) -> "ModeSet":
        if dim == 1:
            return cls.interval(L, 200 if j_max is None else j_max)
        if dim == 2:
            return cls.square(L, 60 if j_max is None else j_max)
        raise ValueError("dim must be 1 or 2")

    def __len__(self) -> int:
        return len(self.indices)


def _label(index) -> str:
    return ",".join(str(k) for k in index)


# ---------------------------------------------------------------------------
# matrices and characteristic coefficients


def _require_linear_signal(J: JacobianEntries) -> None:
    if J.a13 or J.a23 or J.a31:
        raise ValueError("closed-form coefficients assume a W-independent response and odor production")


def assemble_matrix_B(J: JacobianEntries, params: ModelParams, h: float, chi: float | None = None) -> np.ndarray:
    """Mode matrix without prey-taxis; chemorepulsion enters at (1, 3)."""
    chi = params.chi if chi is None else chi
    return assemble_matrix_A(J, params, h, chi, 0.0)


def assemble_matrix_A(
    J: JacobianEntries,
    params: ModelParams,
    h: float,
    chi: float | None = None,
    xi: float | None = None,
) -> np.ndarray:
    """Mode matrix with prey-taxis entry ``a21 + xi P h`` at (2, 1)."""
    chi = params.chi if chi is None else chi
    xi = params.xi if xi is None else xi
    D1, D2, D3 = params.D
    N, P = J.state.N, J.state.P
    M = J.matrix.copy()
    M[0, 0] -= D1 * h
    M[1, 1] -= D2 * h
    M[2, 2] -= D3 * h
    M[0, 2] += -chi * N * h
    M[1, 0] += xi * P * h
    return M


def matrix_char_coeffs(M: np.ndarray) -> tuple[float, float, float]:
    """``(-trace, sum of principal 2x2 minors, -det)`` of a 3x3 matrix."""
    c1 = -(M[0, 0] + M[1, 1] + M[2, 2])
    c2 = (
        M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
        + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    )
    c3 = -float(np.linalg.det(M))
    return float(c1), float(c2), c3


@dataclass(frozen=True)
class DispersionPolynomials:
    """Coefficients of the mode polynomials in ``h`` (lowest order first).

    ``rho1 = alpha0 + alpha1 h``, ``rho2 = beta0 + beta1 h + beta2 h^2``,
    ``rho3 = gamma0 + ... + gamma3 h^3 + chi gamma4 h`` and
    ``Psi = rho1 rho2 - (rho3 at chi = 0)``.
    """

    alpha: tuple[float, float]
    beta: tuple[float, float, float]
    gamma: tuple[float, float, float, float]
    gamma4: float
    psi: tuple[float, float, float, float]


def dispersion_polynomials_B(J: JacobianEntries, params: ModelParams) -> DispersionPolynomials:
    _require_linear_signal(J)
    a11, a12, a21, a22, a32, a33 = J.a11, J.a12, J.a21, J.a22, J.a32, J.a33
    D1, D2, D3 = params.D
    alpha = (-(a11 + a22 + a33), D1 + D2 + D3)
    beta = (
        a11 * a22 - a12 * a21 + a11 * a33 + a22 * a33,
        -a22 * D1 - a33 * D1 - a11 * D2 - a22 * D3 - a11 * D3 - a33 * D2,
        D1 * D2 + D1 * D3 + D2 * D3,
    )
    gamma = (
        -a11 * a22 * a33 + a12 * a21 * a33,
        a22 * a33 * D1 + a11 * a22 * D3 - a12 * a21 * D3 + a11 * a33 * D2,
        -a22 * D1 * D3 - a33 * D1 * D2 - a11 * D2 * D3,
        D1 * D2 * D3,
    )
    gamma4 = a21 * a32 * J.state.N
    psi = (
        alpha[0] * beta[0] - gamma[0],
        alpha[1] * beta[0] + alpha[0] * beta[1] - gamma[1],
        alpha[0] * beta[2] + alpha[1] * beta[1] - gamma[2],
        alpha[1] * beta[2] - gamma[3],
    )
    return DispersionPolynomials(alpha, beta, gamma, gamma4, psi)


def _poly(coeffs, h):
    out = np.zeros_like(np.asarray(h, dtype=float))
    for c in reversed(coeffs):
        out = out * h + c
    return out


def dispersion_coeffs_B(J: JacobianEntries, params: ModelParams, h, chi: float | None = None):
    """``(rho1, rho2, rho3)``; broadcasts over ``h``."""
    chi = params.chi if chi is None else chi
    dp = dispersion_polynomials_B(J, params)
    h = np.asarray(h, dtype=float)
    rho1 = _poly(dp.alpha, h)
    rho2 = _poly(dp.beta, h)
    rho3 = _poly(dp.gamma, h) + chi * dp.gamma4 * h
    return rho1, rho2, rho3


def dispersion_coeffs_A(
    J: JacobianEntries,
    params: ModelParams,
    h,
    chi: float | None = None,
    xi: float | None = None,
):
    """``(phi1, phi2, phi3)`` with the prey-taxis corrections."""
    chi = params.chi if chi is None else chi
    xi = params.xi if xi is None else xi
    h = np.asarray(h, dtype=float)
    rho1, rho2, rho3 = dispersion_coeffs_B(J, params, h, chi)
    N, P = J.state.N, J.state.P
    D3 = params.D[2]
    phi21 = -J.a12 * P * h
    phi31 = (J.a12 * J.a33 - D3 * J.a12 * h + chi * N * J.a32 * h) * P * h
    return rho1, rho2 + xi * phi21, rho3 + xi * phi31


# ---------------------------------------------------------------------------
# Routh-Hurwitz


@dataclass(frozen=True)
class RouthHurwitz:
    stable: bool
    Q: float
    roots: np.ndarray


def routh_hurwitz(c1: float, c2: float, c3: float) -> RouthHurwitz:
    """Stable iff ``c1 > 0``, ``c3 > 0`` and ``c1 c2 - c3 > 0``."""
    Q = c1 * c2 - c3
    return RouthHurwitz(bool(c1 > 0 and c3 > 0 and Q > 0), Q, cubic_roots(c1, c2, c3))


def _rh_vector(c1, c2, c3) -> np.ndarray:
    return (c1 > 0) & (c3 > 0) & (c1 * c2 - c3 > 0)


@dataclass(frozen=True)
class DispersionRecord:
    index: tuple
    h: float
    coeffs: tuple[float, float, float]
    eigenvalues: np.ndarray
    rh_ok: bool
    Q: float


def dispersion_table(
    params: ModelParams,
    mode_set: ModeSet,
    chi: float | None = None,
    xi: float | None = None,
    J: JacobianEntries | None = None,
    include_zero: bool = True,
    max_modes: int | None = None,
) -> list[DispersionRecord]:
    """Per-mode coefficients, eigenvalues and verdicts (``phi`` if ``xi > 0``)."""
    J = linearize(params) if J is None else J
    idx = list(mode_set.indices)
    hs = list(mode_set.h)
    if max_modes is not None:
        idx, hs = idx[:max_modes], hs[:max_modes]
    if include_zero:
        idx.insert(0, (0,) * (1 if mode_set.domain == "interval" else 2))
        hs.insert(0, 0.0)
    c1, c2, c3 = dispersion_coeffs_A(J, params, np.array(hs), chi, xi)
    records = []
    for k, (ix, h) in enumerate(zip(idx, hs)):
        rh = routh_hurwitz(float(c1[k]), float(c2[k]), float(c3[k]))
        records.append(DispersionRecord(ix, float(h), (float(c1[k]), float(c2[k]), float(c3[k])), rh.roots, rh.stable, rh.Q))
    return records


def write_dispersion_csv(records: Sequence[DispersionRecord], stream, prey_taxis: bool = False) -> None:
    """Columns: j, h, rho1..rho3 (phi1..phi3), Re/Im of the roots, rh_ok."""
    name = "phi" if prey_taxis else "rho"
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(
        ["j", "h", f"{name}1", f"{name}2", f"{name}3"]
        + [f"re_lambda{k}" for k in (1, 2, 3)]
        + [f"im_lambda{k}" for k in (1, 2, 3)]
        + ["rh_ok"]
    )
    for r in records:
        w.writerow(
            [_label(r.index), repr(r.h)]
            + [repr(c) for c in r.coeffs]
            + [repr(float(z.real)) for z in r.eigenvalues]
            + [repr(float(z.imag)) for z in r.eigenvalues]
            + [int(r.rh_ok)]
        )


def dispersion_csv(records: Sequence[DispersionRecord], prey_taxis: bool = False) -> str:
    buf = io.StringIO()
    write_dispersion_csv(records, buf, prey_taxis)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# chi^H


def psi_tilde(J: JacobianEntries, params: ModelParams, h):
    """``(rho1 rho2 - rho3(chi=0)) / (gamma4 h)``; the value of ``chi`` at
    which mode ``h`` loses the third Routh-Hurwitz condition."""
    dp = dispersion_polynomials_B(J, params)
    h = np.asarray(h, dtype=float)
    return _poly(dp.psi, h) / (dp.gamma4 * h)


def _convex_min(values_at, hs: np.ndarray, patience: int = 3) -> tuple[int, float]:
    """Index and value of the minimum of a convex sequence.

    Stops after ``patience`` consecutive increases.
    """
    best_k, best = -1, math.inf
    rising = 0
    prev = math.inf
    for k, h in enumerate(hs):
        v = float(values_at(h))
        if v < best:
            best_k, best = k, v
        rising = rising + 1 if v > prev else 0
        prev = v
        if rising >= patience:
            break
    return best_k, best


@dataclass(frozen=True)
class ChiH:
    chi_H: float
    index: tuple
    h: float


def chi_H(params: ModelParams, mode_set: ModeSet, J: JacobianEntries | None = None) -> ChiH:
    """Smallest ``chi`` at which some nonzero mode violates Routh-Hurwitz."""
    if len(mode_set) == 0:
        raise ValueError("empty mode set")
    J = linearize(params) if J is None else J
    dp = dispersion_polynomials_B(J, params)
    if dp.psi[0] <= 0:
        raise ValueError("coexistence state is unstable for the kinetics alone")
    k, val = _convex_min(lambda h: _poly(dp.psi, h) / (dp.gamma4 * h), mode_set.h)
    return ChiH(val, mode_set.indices[k], float(mode_set.h[k]))


def polynomial_threshold(numerator: Sequence[float], slope: float, mode_set: ModeSet) -> ChiH:
    """Minimize ``numerator(h) / (slope h)`` over the modes.

    Evaluates the threshold from externally supplied (e.g. rounded,
    tabulated) coefficient strings instead of an assembled matrix.
    """
    k, val = _convex_min(lambda h: _poly(numerator, h) / (slope * h), mode_set.h)
    return ChiH(val, mode_set.indices[k], float(mode_set.h[k]))


# ---------------------------------------------------------------------------
# prey-taxis thresholds


def chi_S(params: ModelParams, J: JacobianEntries | None = None) -> float:
    """``-a12 (D1 + D2) / (a32 N)``: beyond it prey-taxis can destabilize."""
    J = linearize(params) if J is None else J
    den = J.a32 * J.state.N
    if den == 0:
        raise ZeroDivisionError("a32 * N vanishes")
    D1, D2, _ = params.D
    return -J.a12 * (D1 + D2) / den


def _zeta(J: JacobianEntries, params: ModelParams, chi: float) -> tuple[float, float]:
    D1, D2, _ = params.D
    zeta1 = -(J.a12 * J.a11 + J.a12 * J.a22)
    zeta2 = (D1 + D2) * J.a12 + chi * J.a32 * J.state.N
    return zeta1, zeta2


def _R_and_phi4(J: JacobianEntries, params: ModelParams, chi: float, h: np.ndarray):
    """Routh-Hurwitz margin of model A is ``R(h) - xi phi4(h)``."""
    dp = dispersion_polynomials_B(J, params)
    R = _poly(dp.psi, h) - chi * dp.gamma4 * h
    z1, z2 = _zeta(J, params, chi)
    phi4 = J.state.P * h * (z1 + z2 * h)
    return R, phi4


@dataclass(frozen=True)
class XiInterval:
    """Open interval of ``xi >= 0`` for which every mode is stable (may be empty)."""

    lower: float
    upper: float
    lower_mode: tuple | None
    upper_mode: tuple | None

    def contains(self, xi: float) -> bool:
        return self.lower < xi < self.upper or (xi == 0 and self.lower < 0 < self.upper)


def stable_xi_interval(
    params: ModelParams,
    chi: float,
    mode_set: ModeSet,
    J: JacobianEntries | None = None,
) -> XiInterval:
    """Exact set of prey-taxis strengths keeping all modes stable.

    Each mode requires ``R - xi phi4 > 0``: an upper bound where
    ``phi4 > 0``, a lower bound where ``phi4 < 0``.  ``phi1`` and ``phi3``
    stay positive for every ``xi >= 0``.
    """
    J = linearize(params) if J is None else J
    h = mode_set.h
    R, phi4 = _R_and_phi4(J, params, chi, h)
    lo, hi = -math.inf, math.inf
    lo_mode = hi_mode = None
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = R / phi4
    pos = phi4 > 0
    neg = phi4 < 0
    zero = ~(pos | neg)
    if np.any(zero & (R <= 0)):
        return XiInterval(math.inf, -math.inf, None, None)
    if np.any(pos):
        k = int(np.flatnonzero(pos)[np.argmin(ratio[pos])])
        hi, hi_mode = float(ratio[k]), mode_set.indices[k]
    if np.any(neg):
        k = int(np.flatnonzero(neg)[np.argmax(ratio[neg])])
        lo, lo_mode = float(ratio[k]), mode_set.indices[k]
    # the constant mode does not depend on xi
    dp = dispersion_polynomials_B(J, params)
    if dp.psi[0] <= 0:
        return XiInterval(math.inf, -math.inf, None, None)
    return XiInterval(lo, hi, lo_mode, hi_mode)


def xi_S(params: ModelParams, chi: float, mode_set: ModeSet, J: JacobianEntries | None = None) -> float:
    """Prey-taxis strength above which the state destabilizes (``chi`` in
    ``(chi^S, chi^H)``); ``inf`` when ``chi <= chi^S``."""
    J = linearize(params) if J is None else J
    if chi <= chi_S(params, J):
        return math.inf
    cH = chi_H(params, mode_set, J).chi_H
    if chi >= cH:
        raise ValueError(f"xi^S needs chi < chi^H = {cH:.6g}")
    z1, z2 = _zeta(J, params, chi)
    h_star = -z1 / z2
    h = mode_set.h
    qual = h > h_star
    if not np.any(qual):
        raise ModeTruncationError(f"no mode with h > h* = {h_star:.6g}; raise j_max")
    R, phi4 = _R_and_phi4(J, params, chi, h[qual])
    return float(np.min(R / phi4))


def xi_star(params: ModelParams, chi: float, mode_set: ModeSet, J: JacobianEntries | None = None) -> float:
    """Prey-taxis strength above which the state is restabilized
    (``chi`` in ``(chi^H, chi^S)``)."""
    J = linearize(params) if J is None else J
    cS = chi_S(params, J)
    cH = chi_H(params, mode_set, J).chi_H
    if not (cH < chi < cS):
        raise ValueError(f"xi* needs chi^H < chi < chi^S, got chi^H={cH:.6g}, chi^S={cS:.6g}, chi={chi:.6g}")
    h = mode_set.h
    R, phi4 = _R_and_phi4(J, params, chi, h)
    bad = R <= 0
    # zeta2 < 0 here, so phi4 < 0 on every mode and xi only helps
    return float(np.max(R[bad] / phi4[bad]))


def xi_threshold_from_polynomials(
    numerator: Sequence[float],
    chi_slope: float,
    offset: float,
    chi: float,
    mode_set: ModeSet,
) -> ChiH:
    """Minimize ``numerator(h) / ((chi_slope chi h - offset) h)`` over modes
    with a positive denominator."""
    h = mode_set.h
    den = (chi_slope * chi * h - offset) * h
    ok = den > 0
    if not np.any(ok):
        raise ModeTruncationError("denominator never positive")
    vals = _poly(numerator, h[ok]) / den[ok]
    k = int(np.argmin(vals))
    full = int(np.flatnonzero(ok)[k])
    return ChiH(float(vals[k]), mode_set.indices[full], float(h[full]))


@dataclass(frozen=True)
class ClassificationA:
    case: str
    stable: bool
    violating_mode: tuple | None
    chi_H: float
    chi_S: float
    threshold: float | None
    bruteforce_stable: bool
    consistent: bool


def _bruteforce_violation(J, params, chi, xi, mode_set) -> tuple | None:
    h = np.concatenate([[0.0], mode_set.h])
    c1, c2, c3 = dispersion_coeffs_A(J, params, h, chi, xi)
    ok = _rh_vector(c1, c2, c3)
    if ok.all():
        return None
    k = int(np.argmin(ok))
    if k == 0:
        return (0,) * (1 if mode_set.domain == "interval" else 2)
    return mode_set.indices[k - 1]


def classify_A(
    params: ModelParams,
    chi: float,
    xi: float,
    mode_set: ModeSet,
    J: JacobianEntries | None = None,
) -> ClassificationA:
    """Stability of model A via the threshold cases, checked mode by mode.

    Cases: ``1a`` chi < chi^S <= chi^H, ``1b`` chi^S < chi < chi^H (threshold
    xi^S), ``2a`` chi < chi^H < chi^S, ``2b`` chi^H < chi < chi^S (threshold
    xi*), ``beyond`` when chi exceeds both.
    """
    J = linearize(params) if J is None else J
    cH = chi_H(params, mode_set, J).chi_H
    cS = chi_S(params, J)
    interval = stable_xi_interval(params, chi, mode_set, J)
    threshold = None
    if cS <= cH:
        if chi <= cS:
            case = "1a"
        elif chi < cH:
            case, threshold = "1b", interval.upper
        else:
            case = "beyond"
    else:
        if chi < cH:
            case = "2a"
        elif chi < cS:
            case, threshold = "2b", interval.lower
        else:
            case = "beyond"
    stable = interval.contains(xi)
    viol = _bruteforce_violation(J, params, chi, xi, mode_set)
    brute = viol is None
    if brute != stable:
        warnings.warn(
            f"threshold classification ({stable}) disagrees with mode scan ({brute}) at chi={chi}, xi={xi}",
            RuntimeWarning,
            stacklevel=2,
        )
    return ClassificationA(case, brute, viol, cH, cS, threshold, brute, brute == stable)


# ---------------------------------------------------------------------------
# Hopf onset


def _sigma(J, params, h, chi) -> float:
    c1, c2, c3 = (float(x) for x in dispersion_coeffs_B(J, params, h, chi))
    roots = cubic_roots(c1, c2, c3)
    cplx = [z for z in roots if abs(z.imag) > 0]
    pool = cplx if cplx else list(roots)
    return float(max(z.real for z in pool))


def leading_growth_rate(params: ModelParams, h: float, chi=None, xi=None, J=None) -> complex:
    """Eigenvalue with the largest real part of the mode matrix at ``h``."""
    J = linearize(params) if J is None else J
    c1, c2, c3 = (float(x) for x in dispersion_coeffs_A(J, params, h, chi, xi))
    return complex(cubic_roots(c1, c2, c3)[0])


@dataclass(frozen=True)
class HopfReport:
    chi_H: float
    index: tuple
    h: float
    tau0: float
    sigma_at_threshold: float
    dsigma_dchi: float
    dsigma_dchi_analytic: float
    transversality_sign: int
    degenerate: bool


def hopf_report(params: ModelParams, mode_set: ModeSet, J: JacobianEntries | None = None) -> HopfReport:
    """Hopf frequency and crossing speed of the critical pair.

    ``sigma'`` is a centered difference with step ``1e-4 chi^H``; the analytic
    value ``rho32 / (2 (rho1^2 + tau0^2))`` is reported beside it.
    """
    J = linearize(params) if J is None else J
    ch = chi_H(params, mode_set, J)
    h = ch.h
    vals = psi_tilde(J, params, mode_set.h)
    k0 = mode_set.indices.index(ch.index)
    others = np.delete(vals, k0)
    degenerate = bool(np.any(np.isclose(others, ch.chi_H, rtol=1e-12, atol=0)))
    if degenerate:
        warnings.warn("critical value attained by more than one mode (degenerate Hopf)", RuntimeWarning, stacklevel=2)
    rho1, rho2, _ = (float(x) for x in dispersion_coeffs_B(J, params, h, ch.chi_H))
    tau0 = math.sqrt(rho2)
    step = 1e-4 * ch.chi_H
    ds = (_sigma(J, params, h, ch.chi_H + step) - _sigma(J, params, h, ch.chi_H - step)) / (2 * step)
    rho32 = dispersion_polynomials_B(J, params).gamma4 * h
    analytic = rho32 / (2 * (rho1**2 + tau0**2))
    return HopfReport(
        chi_H=ch.chi_H,
        index=ch.index,
        h=h,
        tau0=tau0,
        sigma_at_threshold=_sigma(J, params, h, ch.chi_H),
        dsigma_dchi=ds,
        dsigma_dchi_analytic=analytic,
        transversality_sign=int(np.sign(ds)),
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# global stability with predator competition


@dataclass(frozen=True)
class GlobalStability:
    chi_0: float
    C1: float
    C2: float
    hypothesis_ok: bool
    beta_margin: float  # beta (1 - N*), must stay below 1
    state: object


def chi_0_global(params: ModelParams) -> GlobalStability:
    """Chemorepulsion bound below which the Lyapunov functional decreases.

    ``chi_0^2 = 4 D1 D3 C2 / N*`` with ``C1 = a (1 + beta N*) / (c (1 + alpha P*))``
    and ``C2 = eta C1 mu / (4 gamma)``; for ``D1 = 1`` this is
    ``D3 eta mu a (1 + beta N*) / (N* c gamma (1 + alpha P*))``.
    """
    kin = params.kinetics
    if kin.eta <= 0:
        raise ValueError("global stability bound needs predator competition eta > 0")
    resp = kin.response
    if resp.family not in (ResponseFamily.HOLLING_II, ResponseFamily.BEDDINGTON_DEANGELIS):
        raise ValueError("Lyapunov construction covers Holling II and Beddington-DeAngelis")
    if kin.signal.law is not SignalLaw.ODOR:
        raise ValueError("Lyapunov construction assumes odor production")
    E = coexistence_bda(kin)
    a, beta, alpha = resp.a, resp.beta, resp._alpha
    c, mu, gamma = kin.c, kin.mu, kin.signal.gamma
    C1 = a * (1 + beta * E.N) / (c * (1 + alpha * E.P))
    C2 = kin.eta * C1 * mu / (4 * gamma)
    D1, _, D3 = params.D
    chi0 = math.sqrt(4 * D1 * D3 * C2 / E.N)
    margin = beta * (1 - E.N)
    return GlobalStability(chi0, C1, C2, margin < 1, margin, E)


# ---------------------------------------------------------------------------
# summary


@dataclass
class ThresholdReport:
    chi_H: float
    j0: tuple
    h_j0: float
    chi_S: float
    xi_S: float | None
    chi_0: float | None
    tau_0: float
    transversality_sign: int
    notes: list[str] = field(default_factory=list)

    def rows(self) -> list[tuple[str, str]]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, tuple):
                return _label(v)
            return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)

        return [
            ("chi_H", fmt(self.chi_H)),
            ("j0", fmt(self.j0)),
            ("h_j0", fmt(self.h_j0)),
            ("chi_S", fmt(self.chi_S)),
            ("xi_S", fmt(self.xi_S)),
            ("chi_0", fmt(self.chi_0)),
            ("tau_0", fmt(self.tau_0)),
            ("transversality_sign", fmt(self.transversality_sign)),
        ]


def threshold_report(params: ModelParams, mode_set: ModeSet, chi: float | None = None) -> ThresholdReport:
    """All thresholds for ``params``; ``xi_S`` is evaluated at ``chi``."""
    chi = params.chi if chi is None else chi
    J = linearize(params)
    hop = hopf_report(params, mode_set, J)
    cS = chi_S(params, J)
    notes = []
    try:
        xs = xi_S(params, chi, mode_set, J)
    except ValueError as exc:
        xs = None
        notes.append(f"xi_S: {exc}")
    chi0 = None
    if params.kinetics.eta > 0:
        try:
            g = chi_0_global(params)
            chi0 = g.chi_0
            if not g.hypothesis_ok:
                notes.append(f"chi_0: beta(1-N*) = {g.beta_margin:.6g} >= 1, hypothesis fails")
        except ValueError as exc:
            notes.append(f"chi_0: {exc}")
    return ThresholdReport(hop.chi_H, hop.index, hop.h, cS, xs, chi0, hop.tau0, hop.transversality_sign, notes)


def sweep_rows(
    params: ModelParams,
    mode_set: ModeSet,
    chis: Iterable[float],
    xis: Iterable[float],
) -> list[dict]:
    """Model A verdicts on a (chi, xi) grid."""
    J = linearize(params)
    out = []
    for chi in chis:
        for xi in xis:
            c = classify_A(params, chi, xi, mode_set, J)
            out.append(
                {
                    "chi": chi,
                    "xi": xi,
                    "case": c.case,
                    "stable": int(c.stable),
                    "violating_mode": "" if c.violating_mode is None else _label(c.violating_mode),
                    "chi_H": c.chi_H,
                    "chi_S": c.chi_S,
                }
            )
    return out
