from __future__ import annotations

import math

import numpy as np
import pytest

from evasion.diagnostics import cosine_coefficients
from evasion.equilibrium import linearize
from evasion.kinetics import DomainError, FunctionalResponseSpec, GrowthSpec, KineticsSpec, SignalProductionSpec
from evasion.model import ModelParams, para1
from evasion.pde_solver import (
    Constant,
    CosineMode,
    Gaussian,
    Grid,
    InitialDataSpec,
    RunStatus,
    SolverConfig,
    SystemState,
    advance,
    cfl_dt,
    helmholtz_tridiagonal,
    implicit_diffusion,
    init_state,
    linear_growth_rate,
    simulate,
    step,
    taxis_divergence,
)
from evasion.stability import ModeSet, chi_H

E = linearize(para1()).state
G1 = Grid(1, 1.0, 100)


# ---------------------------------------------------------------------------
# grid, state, initial data


def test_grid_geometry():
    g = Grid(2, 10.0, 40)
    assert g.dx == 0.25 and g.shape == (40, 40) and g.cell_volume == 0.0625
    assert g.centers[0] == 0.125 and g.centers[-1] == pytest.approx(9.875)
    assert g.cell_volume * g.n**2 == pytest.approx(g.area)
    with pytest.raises(ValueError):
        Grid(1, 1.0, 7)
    with pytest.raises(ValueError):
        Grid(3, 1.0, 10)


def test_discrete_eigenvalue_tends_to_continuum():
    g = Grid(1, 1.0, 1000)
    assert g.discrete_h(1) == pytest.approx(math.pi**2, rel=1e-5)
    assert Grid(2, 1.0, 1000).discrete_h((1, 2)) == pytest.approx(5 * math.pi**2, rel=1e-4)


def test_initial_constant_and_cosine():
    s = init_state(G1, InitialDataSpec(), E)
    assert np.all(s.N == E.N) and np.all(s.P == E.P) and np.all(s.W == E.W) and s.t == 0.0
    s = init_state(G1, InitialDataSpec.cosine(1), E)
    x = G1.centers
    assert np.array_equal(s.N, E.N + 0.1 * np.cos(np.pi * x))
    assert np.array_equal(s.W, E.W + 1.0 * np.cos(np.pi * x))


def test_initial_gaussian_2d():
    g = Grid(2, 10.0, 50)
    s = init_state(g, InitialDataSpec.gaussian_P(), E)
    X, Y = g.coords()
    assert np.allclose(s.P, E.P + np.exp(-((X - 5) ** 2 + (Y - 5) ** 2)), rtol=0, atol=1e-15)
    assert np.all(s.N == E.N)
    # symmetric about the center
    assert np.allclose(s.P, s.P.T) and np.allclose(s.P, s.P[::-1, :])


def test_initial_negative_rejected():
    with pytest.raises(DomainError):
        init_state(G1, InitialDataSpec(N=CosineMode(1.0, 1)), E)
    with pytest.raises(DomainError):
        init_state(G1, InitialDataSpec(W=Constant(-1.0)), E)


def test_frozen_snapshot_is_read_only():
    s = init_state(G1, InitialDataSpec.cosine(1), E).frozen()
    with pytest.raises(ValueError):
        s.N[0] = 1.0


# ---------------------------------------------------------------------------
# spatial operators


def test_taxis_of_constant_potential_vanishes():
    u = np.random.default_rng(0).uniform(0.1, 1, 50)
    assert np.all(taxis_divergence(u, np.full(50, 3.0), 2.0, Grid(1, 1.0, 50)) == 0)


@pytest.mark.parametrize("dim", [1, 2])
def test_taxis_divergence_is_conservative(dim):
    rng = np.random.default_rng(dim)
    g = Grid(dim, 2.0, 16)
    u = rng.uniform(0, 2, g.shape)
    phi = rng.uniform(-1, 1, g.shape)
    div = taxis_divergence(u, phi, 1.7, g)
    assert abs(div.sum()) < 1e-12 * np.abs(div).sum()


def test_taxis_linear_potential_hand_computed():
    # 8 cells, dx = 1, phi = x, u = 1, coeff = 1: face velocity -1 (towards lower x)
    g = Grid(1, 8.0, 8)
    div = taxis_divergence(np.ones(8), g.centers.copy(), 1.0, g)
    expected = np.zeros(8)
    expected[0], expected[-1] = 1.0, -1.0
    assert np.array_equal(div, expected)


def test_cosine_solver_equals_tridiagonal_system():
    rng = np.random.default_rng(4)
    g = Grid(1, 1.0, 64)
    u = rng.uniform(0, 1, 64)
    a = 0.3 * 1.0 / g.dx**2
    assert np.allclose(implicit_diffusion(u, 1.0, 0.3, g), helmholtz_tridiagonal(u, a), rtol=1e-12, atol=1e-13)
    g2 = Grid(2, 1.0, 32)
    v = rng.uniform(0, 1, g2.shape)
    a2 = 0.01 / g2.dx**2
    ref = helmholtz_tridiagonal(helmholtz_tridiagonal(v, a2, 0), a2, 1)
    assert np.allclose(implicit_diffusion(v, 1.0, 0.01, g2), ref, rtol=1e-12, atol=1e-13)


def test_implicit_diffusion_mode_factor():
    g = Grid(1, 1.0, 100)
    for j in (1, 4, 17):
        u = 0.5 + 0.1 * np.cos(j * np.pi * g.centers)
        out = implicit_diffusion(u, 0.7, 0.02, g)
        factor = cosine_coefficients(out, j)[j] / 0.1
        assert factor == pytest.approx(1 / (1 + 0.02 * 0.7 * g.discrete_h(j)), abs=1e-12)


def test_constant_field_bit_identical():
    g = Grid(2, 10.0, 20)
    u = np.full(g.shape, 5.847953216374269)
    assert np.array_equal(implicit_diffusion(u, 0.01, 0.05, g), u)


# ---------------------------------------------------------------------------
# stepping


@pytest.mark.parametrize("dim", [1, 2])
def test_constant_steady_state_is_fixed(dim):
    g = Grid(dim, 1.0, 16)
    p = para1("A", chi=4.0, xi=3.0)
    s = init_state(g, InitialDataSpec(), E)
    cfg = SolverConfig.fixed(0.05, 50.0)
    for _ in range(1000):
        s = step(s, p, cfg)
    assert s.distance(E) <= 1e-13


def test_mass_identity_per_step():
    p = para1("A", chi=6.0, xi=4.0)
    x = G1.centers
    s = SystemState(0.0, 0.4 + 0.3 * np.cos(2 * np.pi * x), 0.3 + 0.2 * np.cos(np.pi * x), 6 + 4 * np.cos(3 * np.pi * x), G1)
    cfg = SolverConfig(dt_max=0.05, dt_init=0.05)
    from evasion.kinetics import rhs_kinetics

    for _ in range(50):
        rates = rhs_kinetics(p.kinetics, p.variant, *s.fields())
        new, dt, _ = advance(s, p, cfg, 0.05)
        for u0, u1, r in zip(s.fields(), new.fields(), rates):
            assert abs((u1.sum() - u0.sum() - dt * r.sum()) * G1.dx) <= 1e-10
        s = new


def test_mass_conserved_without_kinetics():
    p = para1("A", chi=6.0, xi=4.0)
    s = init_state(G1, InitialDataSpec.cosine(2), E)
    cfg = SolverConfig(dt_max=0.05, reactions=False)
    m0 = [u.sum() for u in s.fields()]
    for _ in range(100):
        s = step(s, p, cfg, 0.05)
    for a, b in zip(m0, (u.sum() for u in s.fields())):
        assert abs(a - b) * G1.dx <= 1e-12


def test_cfl_cap_and_positivity():
    p = para1("A", chi=20.0, xi=15.0)
    x = G1.centers
    s = SystemState(0.0, 0.01 + 0.5 * (x > 0.5), 0.3 + 0.29 * np.cos(5 * np.pi * x), 6 + 5.9 * np.cos(7 * np.pi * x), G1)
    cfg = SolverConfig(dt_max=1.0, dt_init=1.0)
    bound = cfl_dt(s, p, cfg)
    new, used, _ = advance(s, p, cfg, 1.0)
    assert used <= bound
    for _ in range(300):
        s, used, _ = advance(s, p, cfg, 1.0)
        assert min(u.min() for u in s.fields()) >= 0


def test_undershoot_halves_the_step():
    p = para1("B")
    s = SystemState(0.0, np.full(100, 0.01), np.full(100, 100.0), np.full(100, 1.0), G1)
    new, used, halvings = advance(s, p, SolverConfig(dt_max=0.05), 0.05)
    assert halvings >= 1 and used < 0.05
    assert new.N.min() >= 0


def test_blowup_status_keeps_last_finite_state():
    p = para1("B")
    cfg = SolverConfig(t_end=1.0, blowup_threshold=6.0)
    tr = simulate(p, G1, InitialDataSpec.cosine(1), cfg)
    assert tr.status is RunStatus.BLOWN_UP and tr.blown_up
    assert tr.state.t == 0.0 and tr.records[-1].status == "BlownUp"
    assert tr.snapshots[-1].t == 0.0


def test_dt_collapse_is_a_status():
    p = para1("B")
    s0 = InitialDataSpec(N=Constant(1e-3), P=Constant(1e3))
    cfg = SolverConfig(t_end=1.0, dt_min=1e-3, dt_init=1e-3)
    tr = simulate(p, G1, s0, cfg)
    assert tr.status is RunStatus.BLOWN_UP
    assert "dt_min" in tr.message


def test_simulate_snapshots_and_records():
    p = para1("B", chi=2.0)
    cfg = SolverConfig(t_end=2.0, snapshot_every=0.5, record_every=0.1)
    seen = []
    tr = simulate(p, G1, InitialDataSpec.cosine(1), cfg, on_snapshot=seen.append)
    assert [s.t for s in tr.snapshots] == pytest.approx([0, 0.5, 1.0, 1.5, 2.0], abs=1e-12)
    assert len(seen) == 5
    assert tr.status is RunStatus.COMPLETED and tr.state.t == pytest.approx(2.0)
    t = np.array([r.t for r in tr.records])
    assert t[0] == 0 and t[-1] == pytest.approx(2.0) and np.all(np.diff(t)[:-1] >= 0.1 - 1e-9)
    assert all(r.lyapunov is None for r in tr.records)


def test_damage_production_in_solver():
    bd = FunctionalResponseSpec("BeddingtonDeAngelis", a=1.0, beta=1.0, alpha=0.5)
    kin = KineticsSpec(GrowthSpec(1.0), bd, SignalProductionSpec("Damage", 2.0), 1.0, 0.2, 0.5)
    p = ModelParams(kin, "B", chi=1.0)
    tr = simulate(p, G1, InitialDataSpec.cosine(1, (0.05, 0.05, 0.05)), SolverConfig(t_end=5.0))
    assert tr.status is RunStatus.COMPLETED
    _, v = tr.series("mass_v")
    assert np.all(v <= tr.mass_bound + 1e-6)


def test_deterministic_runs():
    p = para1("A", chi=1.0, xi=2.0)
    cfg = SolverConfig(t_end=1.0)
    a = simulate(p, G1, InitialDataSpec.cosine(1), cfg)
    b = simulate(p, G1, InitialDataSpec.cosine(1), cfg)
    assert all(np.array_equal(x, y) for x, y in zip(a.state.fields(), b.state.fields()))


def test_grid_convergence_first_order():
    p = para1("B", chi=5.0)
    sol = {}
    for n in (25, 50, 100):
        g = Grid(1, 1.0, n)
        tr = simulate(p, g, InitialDataSpec.cosine(1), SolverConfig.fixed(0.1 / n, 10.0), keep_snapshots=False)
        sol[n] = np.stack(tr.state.fields())

    def coarsen(u):
        return 0.5 * (u[:, 0::2] + u[:, 1::2])

    d1 = np.abs(sol[25] - coarsen(sol[50])).max()
    d2 = np.abs(sol[50] - coarsen(sol[100])).max()
    assert 1.5 <= d1 / d2 <= 2.5


# ---------------------------------------------------------------------------
# linear growth rates


def test_pure_diffusion_rate():
    fit = linear_growth_rate(para1("B"), 0.0, 0.0, G1, 2, reactions=False, window=(0.1, 1.0), dt=1e-3)
    # slowest decaying component of mode 2 is the predator/signal rate -0.01 h
    assert fit.rate == pytest.approx(-0.01 * (2 * math.pi) ** 2, rel=0.02)


def test_growth_rate_without_taxis():
    fit = linear_growth_rate(para1("B"), 0.0, 0.0, G1, 1)
    assert fit.predicted == pytest.approx(-0.10043, abs=1e-5)
    assert fit.rate == pytest.approx(fit.predicted, rel=0.05)


def test_growth_rate_sign_brackets_threshold():
    cH = chi_H(para1("B"), ModeSet.interval(1.0)).chi_H
    lo = linear_growth_rate(para1("B"), 0.95 * cH, 0.0, G1, 1, extrapolate=False)
    hi = linear_growth_rate(para1("B"), 1.05 * cH, 0.0, G1, 1, extrapolate=False)
    assert lo.rate < 0 < hi.rate
