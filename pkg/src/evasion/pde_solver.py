"""Finite-volume IMEX integration of the taxis systems.

Each step advances taxis and kinetics explicitly (first-order upwind fluxes
on faces, zero flux on the boundary) and then solves a backward-Euler
Helmholtz problem per field for diffusion: a tridiagonal system in 1D and
two tridiagonal sweeps (factorized, alternating direction) in 2D.  The time
step adapts to the taxis CFL limit and is halved whenever a stage would
produce a negative density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Union

import numpy as np
from scipy.fft import dct, idct
from scipy.linalg import solve_banded

from evasion.diagnostics import (
    DiagnosticsRecord,
    Health,
    NotApplicableError,
    blowup_indicator,
    cosine_coefficients,
    lyapunov_value,
    mass_constants,
)
from evasion.equilibrium import CoexistenceState, coexistence_state
from evasion.kinetics import DomainError, ModelVariant, _rhs
from evasion.model import ModelParams


class DtCollapse(RuntimeError):
    """The admissible time step fell below ``dt_min`` (blow-up suspected)."""


class NumericalFailure(RuntimeError):
    """A non-finite value appeared."""


class RunStatus(str, Enum):
    COMPLETED = "Completed"
    BLOWN_UP = "BlownUp"
    FAILED = "NumericalFailure"


# ---------------------------------------------------------------------------
# grid and state


@dataclass(frozen=True)
class Grid:
    """Uniform cells on ``(0, L)`` or ``(0, L)^2``."""

    dim: int
    L: float
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.n < 8:
            raise ValueError("at least 8 cells per side are required")
        if self.L <= 0:
            raise ValueError("L must be positive")

    @property
    def dx(self) -> float:
        return self.L / self.n

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.dx

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def area(self) -> float:
        return self.L**self.dim

    def coords(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinate arrays (``indexing='ij'``)."""
        x = self.centers
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def discrete_h(self, j) -> float:
        """Eigenvalue of the discrete Neumann Laplacian for cosine mode ``j``."""
        js = (j,) if np.isscalar(j) else tuple(j)
        return float(sum(4.0 / self.dx**2 * math.sin(k * math.pi * self.dx / (2 * self.L)) ** 2 for k in js))


@dataclass(frozen=True)
class SystemState:
    t: float
    N: np.ndarray
    P: np.ndarray
    W: np.ndarray
    grid: Grid

    def fields(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.N, self.P, self.W

    def frozen(self) -> "SystemState":
        """Read-only copy handed to trajectory consumers."""
        arrs = []
        for a in self.fields():
            b = np.array(a, copy=True)
            b.setflags(write=False)
            arrs.append(b)
        return SystemState(self.t, *arrs, self.grid)

    def sup(self) -> float:
        return float(max(np.max(np.abs(a)) for a in self.fields()))

    def distance(self, E: CoexistenceState) -> float:
        """Sup-norm distance to a constant state."""
        return float(max(np.max(np.abs(self.N - E.N)), np.max(np.abs(self.P - E.P)), np.max(np.abs(self.W - E.W))))


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping controls.

    ``positivity_floor`` is the tolerated undershoot: a stage value below
    ``-positivity_floor`` rejects the step, smaller undershoots are clipped
    to zero.  ``record_every`` thins the diagnostics stream (``None`` records
    every step).  ``reactions=False`` switches the kinetics off.
    """

    dt_init: float = 1e-3
    dt_min: float = 1e-8
    dt_max: float = 0.05
    cfl_safety: float = 0.5
    t_end: float = 1.0
    snapshot_every: float | None = None
    positivity_floor: float = 0.0
    blowup_threshold: float = 1e6
    record_every: float | None = None
    growth: float = 1.2
    reactions: bool = True
    max_steps: int | None = None

    def __post_init__(self):
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if not (0 < self.cfl_safety <= 1):
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.positivity_floor < 0:
            raise ValueError("positivity_floor must be >= 0")
        if self.growth < 1:
            raise ValueError("growth factor must be >= 1")

    @classmethod
    def fixed(cls, dt: float, t_end: float, **kw) -> "SolverConfig":
        """Constant step (still capped by CFL and halved on undershoot)."""
        return cls(dt_init=dt, dt_min=kw.pop("dt_min", min(1e-8, dt)), dt_max=dt, t_end=t_end, growth=1.0, **kw)


# Grid spacing and step of the reference runs; informational only
# (explicit taxis is not stable at this step for large chi).
REFERENCE_DISCRETIZATION = {"dx": 0.01, "dt": 0.1}


# ---------------------------------------------------------------------------
# initial data


@dataclass(frozen=True)
class Constant:
    value: float | None = None  # None: the coexistence value


@dataclass(frozen=True)
class CosineMode:
    """``base + amplitude cos(j pi x / L)`` (product of cosines in 2D)."""

    amplitude: float
    mode: Union[int, tuple] = 1
    base: float | None = None


@dataclass(frozen=True)
class Gaussian:
    """``base + amplitude exp(-|x - center|^2 / width^2)``; center ``None``
    is the middle of the domain."""

    amplitude: float = 1.0
    width: float = 1.0
    center: Union[float, tuple, None] = None
    base: float | None = None


Profile = Union[Constant, CosineMode, Gaussian]


@dataclass(frozen=True)
class InitialDataSpec:
    N: Profile = field(default_factory=Constant)
    P: Profile = field(default_factory=Constant)
    W: Profile = field(default_factory=Constant)

    @classmethod
    def cosine(cls, j=1, amplitudes=(0.1, 0.1, 1.0)) -> "InitialDataSpec":
        """Cosine perturbation of the steady state in all three fields."""
        aN, aP, aW = amplitudes
        return cls(CosineMode(aN, j), CosineMode(aP, j), CosineMode(aW, j))

    @classmethod
    def gaussian_P(cls, amplitude=1.0, width=1.0, center=None) -> "InitialDataSpec":
        return cls(P=Gaussian(amplitude, width, center))

    @classmethod
    def gaussian_NP(cls, amplitude=1.0, width=1.0, center=None) -> "InitialDataSpec":
        g = Gaussian(amplitude, width, center)
        return cls(N=g, P=g)


def _profile(grid: Grid, prof: Profile, base_default: float) -> np.ndarray:
    X = grid.coords()
    if isinstance(prof, Constant):
        v = base_default if prof.value is None else prof.value
        return np.full(grid.shape, float(v))
    base = base_default if prof.base is None else prof.base
    if isinstance(prof, CosineMode):
        js = (prof.mode,) * 1 if np.isscalar(prof.mode) else tuple(prof.mode)
        if len(js) == 1 and grid.dim == 2:
            js = (js[0], 0)
        if len(js) != grid.dim:
            raise ValueError("cosine mode index does not match the grid dimension")
        shape = np.ones(grid.shape)
        for k, x in zip(js, X):
            shape = shape * np.cos(k * np.pi * x / grid.L)
        return base + prof.amplitude * shape
    if isinstance(prof, Gaussian):
        c = prof.center
        if c is None:
            c = (grid.L / 2,) * grid.dim
        elif np.isscalar(c):
            c = (float(c),) * grid.dim
        r2 = sum((x - ci) ** 2 for x, ci in zip(X, c))
        return base + prof.amplitude * np.exp(-r2 / prof.width**2)
    raise TypeError(f"unknown profile {prof!r}")


def init_state(grid: Grid, spec: InitialDataSpec, E: CoexistenceState) -> SystemState:
    N = _profile(grid, spec.N, E.N)
    P = _profile(grid, spec.P, E.P)
    W = _profile(grid, spec.W, E.W)
    for name, a in (("N", N), ("P", P), ("W", W)):
        if np.any(a < 0):
            raise DomainError(f"initial {name} has negative values")
    return SystemState(0.0, N, P, W, grid)


# ---------------------------------------------------------------------------
# spatial operators


def _sl(ndim: int, axis: int, s: slice) -> tuple:
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def _face_velocity(potential: np.ndarray, coeff: float, dx: float, axis: int) -> np.ndarray:
    """``-coeff * dphi/dn`` on interior faces along ``axis``."""
    return (-coeff / dx) * np.diff(potential, axis=axis)


def _upwind_divergence(field: np.ndarray, velocities, dx: float) -> np.ndarray:
    out = np.zeros_like(field, dtype=float)
    nd = field.ndim
    for ax, v in enumerate(velocities):
        lo = field[_sl(nd, ax, slice(None, -1))]
        hi = field[_sl(nd, ax, slice(1, None))]
        flux = (np.maximum(v, 0.0) * lo + np.minimum(v, 0.0) * hi) / dx
        # face k sits between cells k and k+1; boundary faces carry no flux
        out[_sl(nd, ax, slice(None, -1))] -= flux
        out[_sl(nd, ax, slice(1, None))] += flux
    return out


def taxis_divergence(field: np.ndarray, potential: np.ndarray, coeff: float, grid: Grid) -> np.ndarray:
    """``div(coeff * u * grad(phi))`` in conservative upwind form.

    The advective velocity ``v = -coeff grad(phi)`` is evaluated on each
    interior face and the density is taken from the upwind cell; boundary
    faces carry no flux, so the cell sum of the result vanishes.
    """
    if coeff == 0:
        return np.zeros_like(field, dtype=float)
    vel = [_face_velocity(potential, coeff, grid.dx, ax) for ax in range(field.ndim)]
    return _upwind_divergence(field, vel, grid.dx)


def max_taxis_speed(field_potential_pairs, dx: float) -> float:
    vmax = 0.0
    for potential, coeff in field_potential_pairs:
        if coeff == 0:
            continue
        for ax in range(potential.ndim):
            v = np.abs(_face_velocity(potential, coeff, dx, ax))
            if v.size:
                vmax = max(vmax, float(v.max()))
    return vmax


def neumann_eigenvalues(n: int, dx: float) -> np.ndarray:
    """``-eig`` of the mirrored second difference: ``(4/dx^2) sin^2(k pi / 2n)``."""
    return 4.0 / dx**2 * np.sin(np.pi * np.arange(n) / (2 * n)) ** 2


def helmholtz_tridiagonal(rhs: np.ndarray, a: float, axis: int = 0) -> np.ndarray:
    """Solve ``(I - a Delta_h) u = rhs`` along ``axis`` by banded elimination.

    Mirror ghost cells give diagonal ``1 + a`` in the first and last rows.
    """
    moved = np.moveaxis(rhs, axis, 0)
    n = moved.shape[0]
    ab = np.empty((3, n))
    ab[0, :] = -a
    ab[0, 0] = 0.0
    ab[1, :] = 1.0 + 2.0 * a
    ab[1, 0] = ab[1, -1] = 1.0 + a
    ab[2, :] = -a
    ab[2, -1] = 0.0
    sol = solve_banded((1, 1), ab, moved, check_finite=False)
    return np.moveaxis(sol, 0, axis)


def _helmholtz(rhs: np.ndarray, a: float, axis: int) -> np.ndarray:
    """Same system as :func:`helmholtz_tridiagonal`, solved in the cosine basis.

    The DCT-II vectors are exact eigenvectors of the mirrored tridiagonal
    matrix, so the two solvers agree to rounding.
    """
    if a == 0:
        return rhs
    n = rhs.shape[axis]
    lam = 1.0 + a * neumann_eigenvalues(n, 1.0)
    shape = [1] * rhs.ndim
    shape[axis] = n
    c = dct(rhs, type=2, axis=axis, norm="ortho")
    c /= lam.reshape(shape)
    return idct(c, type=2, axis=axis, norm="ortho")


def implicit_diffusion(u: np.ndarray, D: float, dt: float, grid: Grid) -> np.ndarray:
    """Backward-Euler diffusion step (one sweep per direction in 2D).

    The solve acts on the deviation from one cell value so that constant
    fields come back bit-identical.
    """
    a = dt * D / grid.dx**2
    m = u.flat[0]
    d = u - m
    for ax in range(u.ndim):
        d = _helmholtz(d, a, ax)
    return m + d


# ---------------------------------------------------------------------------
# time stepping


def _explicit_rates(state: SystemState, params: ModelParams, config: SolverConfig):
    """Kinetics plus taxis rates and the largest face speed."""
    N, P, W = state.fields()
    dx = state.grid.dx
    if config.reactions:
        rN, rP, rW = _rhs(params.kinetics, params.variant, N, P, W)
    else:
        rN, rP, rW = (np.zeros_like(N),) * 3
    vmax = 0.0
    for u, phi, coeff, which in ((N, W, params.chi, 0), (P, N, -params.xi, 1)):
        if coeff == 0:
            continue
        vel = [_face_velocity(phi, coeff, dx, ax) for ax in range(u.ndim)]
        vmax = max(vmax, max(float(np.abs(v).max()) for v in vel))
        div = _upwind_divergence(u, vel, dx)
        if which == 0:
            rN = rN + div
        else:
            rP = rP + div
    return rN, rP, rW, vmax


def _cfl(vmax: float, grid: Grid, config: SolverConfig) -> float:
    if vmax == 0:
        return math.inf
    return config.cfl_safety * grid.dx / (grid.dim * vmax)


def cfl_dt(state: SystemState, params: ModelParams, config: SolverConfig) -> float:
    """Largest step for which upwinding keeps the taxis stage nonnegative."""
    vmax = max_taxis_speed(((state.W, params.chi), (state.N, -params.xi)), state.grid.dx)
    return _cfl(vmax, state.grid, config)


def advance(state: SystemState, params: ModelParams, config: SolverConfig, dt: float) -> tuple[SystemState, float, int]:
    """One accepted step with ``dt`` capped by CFL and halved on undershoot.

    Returns ``(new_state, dt_used, halvings)``.
    """
    rN, rP, rW, vmax = _explicit_rates(state, params, config)
    dt = min(dt, _cfl(vmax, state.grid, config))
    if dt < config.dt_min:
        raise DtCollapse(f"CFL step {dt:.3g} below dt_min at t={state.t:.6g}")
    N, P, W = state.fields()
    floor = config.positivity_floor
    halvings = 0
    while True:
        Ns, Ps, Ws = N + dt * rN, P + dt * rP, W + dt * rW
        lo = min(Ns.min(), Ps.min(), Ws.min())
        if not math.isfinite(lo + max(Ns.max(), Ps.max(), Ws.max())):
            raise NumericalFailure(f"non-finite stage value at t={state.t:.6g}")
        if lo >= -floor:
            break
        dt *= 0.5
        halvings += 1
        if dt < config.dt_min:
            raise DtCollapse(f"positivity forces dt below dt_min at t={state.t:.6g}")
    if floor > 0:
        Ns, Ps, Ws = (np.maximum(a, 0.0) for a in (Ns, Ps, Ws))
    g = state.grid
    new = [_nonneg(implicit_diffusion(u, D, dt, g)) for u, D in zip((Ns, Ps, Ws), params.D)]
    return SystemState(state.t + dt, *new, g), dt, halvings


def _nonneg(u: np.ndarray) -> np.ndarray:
    # backward Euler maps nonnegative data to nonnegative data; the cosine
    # transform solve can still leave rounding-level negatives where a
    # density is exactly zero
    if u.min() < 0:
        u = np.maximum(u, 0.0)
    return u


def step(state: SystemState, params: ModelParams, config: SolverConfig, dt: float | None = None) -> SystemState:
    """Advance by one IMEX step (``dt`` defaults to ``config.dt_init``)."""
    return advance(state, params, config, config.dt_init if dt is None else dt)[0]


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    status: RunStatus
    state: SystemState
    E: CoexistenceState
    records: list[DiagnosticsRecord]
    snapshots: list[SystemState]
    steps: int
    message: str = ""
    mass_bound: float | None = None

    @property
    def blown_up(self) -> bool:
        return self.status is RunStatus.BLOWN_UP

    def series(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        t = np.array([r.t for r in self.records])
        v = np.array([np.nan if getattr(r, name) is None else getattr(r, name) for r in self.records], dtype=float)
        return t, v


class _Monitor:
    def __init__(self, params: ModelParams, E: CoexistenceState, grid: Grid):
        self.params = params
        self.E = E
        try:
            self.mass = mass_constants(params.kinetics, grid.area)
        except NotApplicableError:
            self.mass = None
        self.lyap = params.variant is ModelVariant.B2 and params.kinetics.eta > 0
        self.floor_hit = False

    def record(self, state: SystemState, dt: float, status: str) -> DiagnosticsRecord:
        N, P, W = state.fields()
        vol = state.grid.cell_volume
        mass = None
        if self.mass is not None:
            mass = float(vol * (N.sum() + self.mass.w_P * P.sum() + self.mass.w_W * W.sum()))
        lyap = None
        if self.lyap:
            if N.min() <= 0 or P.min() <= 0:
                self.floor_hit = True
                lyap = lyapunov_value(state, self.E, self.params, floor=1e-300)
            else:
                lyap = lyapunov_value(state, self.E, self.params)
        mode1 = float(cosine_coefficients(N, 1)[1]) if state.grid.dim == 1 else None
        return DiagnosticsRecord(
            t=state.t,
            dt=dt,
            supN=float(np.max(N)),
            supP=float(np.max(P)),
            supW=float(np.max(W)),
            mass_v=mass,
            lyapunov=lyap,
            mode1_amp=mode1,
            status=status,
        )


def simulate(
    params: ModelParams,
    grid: Grid,
    initial: InitialDataSpec | SystemState,
    config: SolverConfig,
    on_snapshot: Callable[[SystemState], None] | None = None,
    on_record: Callable[[DiagnosticsRecord], None] | None = None,
    keep_snapshots: bool = True,
) -> Trajectory:
    """Integrate to ``config.t_end``.

    A sup-norm above ``blowup_threshold`` or a time step driven below
    ``dt_min`` ends the run with status BlownUp; the returned state is the
    last finite one.  A non-finite value ends it with NumericalFailure.
    """
    if params.L != grid.L:
        params = replace(params, L=grid.L)
    E = coexistence_state(replace(params.kinetics, eta=params.eta))
    state = initial if isinstance(initial, SystemState) else init_state(grid, initial, E)
    mon = _Monitor(params, E, grid)
    records: list[DiagnosticsRecord] = []
    snapshots: list[SystemState] = []
    last_snap = [None]

    def emit_snapshot(s):
        fz = s.frozen()
        last_snap[0] = fz.t
        if keep_snapshots:
            snapshots.append(fz)
        if on_snapshot is not None:
            on_snapshot(fz)

    def emit_record(rec):
        records.append(rec)
        if on_record is not None:
            on_record(rec)

    first = mon.record(state, 0.0, Health.HEALTHY.value)
    emit_record(first)
    bound = mon.mass.bound(first.mass_v) if mon.mass is not None else None
    emit_snapshot(state)
    t_end = config.t_end
    eps = 1e-12 * max(1.0, t_end)
    next_snap = config.snapshot_every if config.snapshot_every else math.inf
    next_rec = config.record_every if config.record_every else 0.0
    dt_ctrl = config.dt_init
    status, message = RunStatus.COMPLETED, ""
    steps = 0
    pinned = 0
    recent: list[DiagnosticsRecord] = [first]

    while state.t < t_end - eps:
        target = min(t_end, next_snap)
        dt_try = min(dt_ctrl, target - state.t)
        try:
            new, used, halvings = advance(state, params, config, dt_try)
        except DtCollapse as exc:
            status, message = RunStatus.BLOWN_UP, str(exc)
            break
        except NumericalFailure as exc:
            status, message = RunStatus.FAILED, str(exc)
            break
        steps += 1
        if halvings:
            dt_ctrl = used
        elif used >= dt_try * (1 - 1e-12):
            dt_ctrl = min(max(dt_ctrl, used) * config.growth, config.dt_max)
        else:
            dt_ctrl = min(used * config.growth, config.dt_max)
        pinned = pinned + 1 if used <= config.dt_min * (1 + 1e-12) else 0
        sup = new.sup()
        blown = sup > config.blowup_threshold or pinned >= 100
        if not blown:
            state = new
        if blown or state.t >= next_rec - eps or state.t >= t_end - eps:
            rec = mon.record(new, used, Health.BLOWN_UP.value if blown else Health.HEALTHY.value)
            recent = (recent + [rec])[-3:]
            if not blown and len(recent) == 3 and blowup_indicator(recent, config.blowup_threshold) is Health.SUSPECTED:
                rec = replace(rec, status=Health.SUSPECTED.value)
            emit_record(rec)
            if config.record_every:
                next_rec = state.t + config.record_every
        if blown:
            status = RunStatus.BLOWN_UP
            message = f"sup-norm {sup:.3g} above cap at t={new.t:.6g}" if sup > config.blowup_threshold else "dt pinned at dt_min"
            break
        if state.t >= next_snap - eps:
            emit_snapshot(state)
            next_snap += config.snapshot_every
        if config.max_steps is not None and steps >= config.max_steps:
            message = "max_steps reached"
            break

    if status is not RunStatus.COMPLETED or last_snap[0] != state.t:
        emit_snapshot(state)
    if mon.floor_hit:
        message = (message + "; " if message else "") + "Lyapunov monitor clamped nonpositive cells"
    return Trajectory(status, state, E, records, snapshots, steps, message, bound)


# ---------------------------------------------------------------------------
# linear growth rates


class FitWindowError(RuntimeError):
    """The perturbation left the measurable range during the fit window."""


@dataclass(frozen=True)
class GrowthRateFit:
    """``rate`` is the step-extrapolated value when two step sizes were run;
    ``raw_rates`` holds the per-step-size fits (``dt``, ``dt/2``)."""

    rate: float
    predicted: float
    eigenvalue: complex
    raw_rates: tuple[float, ...]
    t: np.ndarray
    log_amplitude: np.ndarray


def _fit_rate(params, grid, init, E, left, j, amplitude, window, dt, reactions):
    config = SolverConfig.fixed(dt, window[1], reactions=reactions)
    ts, logs = [], []
    state = init_state(grid, init, E)
    t0, t1 = window
    for _ in range(int(round(t1 / dt))):
        state, used, _ = advance(state, params, config, dt)
        if used != dt:
            raise FitWindowError("step was reduced; amplitude too large for the linear regime")
        if state.t >= t0 - 1e-12:
            coef = np.array([cosine_coefficients(a, j)[j] for a in state.fields()])
            z = abs(left @ coef)
            if not z > 1e-12 * amplitude:
                raise FitWindowError(f"mode amplitude {z:.3g} underflowed at t={state.t:.4g}")
            ts.append(state.t)
            logs.append(math.log(z))
    t_arr, l_arr = np.array(ts), np.array(logs)
    if t_arr.size < 2:
        raise FitWindowError("fit window contains fewer than two samples")
    return float(np.polyfit(t_arr, l_arr, 1)[0]), t_arr, l_arr


def linear_growth_rate(
    params: ModelParams,
    chi: float | None,
    xi: float | None,
    grid: Grid,
    j: int = 1,
    amplitude: float = 1e-4,
    window: tuple[float, float] = (2.0, 12.0),
    dt: float = 2e-3,
    reactions: bool = True,
    extrapolate: bool = True,
) -> GrowthRateFit:
    """Measured exponential rate of mode ``j`` in the linear regime.

    The run starts from ``E (1 + amplitude cos(j pi x / L))``.  The mode-j
    coefficients of ``(N, P, W)`` are projected on the left eigenvector of
    the leading eigenvalue of the mode matrix; the modulus of that
    coordinate grows like ``exp(Re lambda t)`` and its slope is fitted by
    least squares over ``window``.  The splitting error of the first-order
    step biases the rate by ``O(dt)``; with ``extrapolate`` the fit is
    repeated at ``dt/2`` and the two are combined as ``2 r(dt/2) - r(dt)``.
    """
    from evasion.equilibrium import linearize
    from evasion.stability import assemble_matrix_A

    if grid.dim != 1:
        raise NotImplementedError("growth-rate fits use 1D grids")
    chi = params.chi if chi is None else chi
    xi = params.xi if xi is None else xi
    variant = params.variant
    if xi and variant is not ModelVariant.A:
        variant = ModelVariant.A
    params = replace(params, chi=chi, xi=xi, variant=variant, L=grid.L)
    J = linearize(params)
    E = J.state
    h = (j * math.pi / grid.L) ** 2
    if reactions:
        M = assemble_matrix_A(J, params, h, chi, xi)
    else:
        M = -np.diag(params.D) * h
        M[0, 2] = -chi * E.N * h
        M[1, 0] = xi * E.P * h
    lam, vl = np.linalg.eig(M.T)
    k = int(np.argmax(lam.real))
    left = vl[:, k]
    amps = (amplitude * E.N, amplitude * E.P, amplitude * E.W)
    init = InitialDataSpec(*(CosineMode(a, j) for a in amps))
    args = (params, grid, init, E, left, j, amplitude, window)
    r1, t_arr, l_arr = _fit_rate(*args, dt, reactions)
    raw = (r1,)
    rate = r1
    if extrapolate:
        r2, t_arr, l_arr = _fit_rate(*args, dt / 2, reactions)
        raw = (r1, r2)
        rate = 2 * r2 - r1
    return GrowthRateFit(rate, float(lam[k].real), complex(lam[k]), raw, t_arr, l_arr)
