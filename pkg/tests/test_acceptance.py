"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete.  Every tolerance is fixed here; nothing is calibrated at run time.
"""

import time

import numpy as np
import pytest

from mlswe import (
    Bathymetry,
    BoundaryKind,
    BoundarySpec,
    Grid1D,
    LayerPartition,
    Model,
    PhysParams,
    FrictionLaw,
    SimState,
    StepConfig,
    advance,
    explicit_step,
    heun_step,
    nlayer_eigen,
    stable_dt,
    two_layer_charpoly,
    total_energy,
    vertical_velocity,
)
from mlswe.kinetic import half_moments
from mlswe.scenario import lake_at_rest_heights
from mlswe.stepper import compute_step_terms, full_step

from oracles import half_moment_quadrature, transcritical_shock_solution


def report(number, name, ok, detail):
    line = f"criterion {number:2d} ({name}): {detail} -> "
    line += "PASS" if ok else "FAIL"
    print(line)
    assert ok, line


def bump_bed(x, center=10.0, height=0.2, half_width=2.0):
    return height * np.maximum(0.0, 1.0 - ((x - center) / half_width) ** 2)


def march(model, state, steps):
    for _ in range(steps):
        terms = compute_step_terms(model, state)
        dt = stable_dt(state, terms.exchange_rates, model.grid, model.part,
                       model.phys.gravity, model.config)
        state = full_step(model, state, dt, terms)
    return state


def test_criterion_1_well_balance():
    start = time.perf_counter()
    grid = Grid1D.uniform(0.0, 20.0, 200)
    z = bump_bed(grid.x)
    part = LayerPartition.uniform(5)
    H0 = lake_at_rest_heights(z, 1.0)
    worst_u = worst_eta = 0.0
    for order in (1, 2):
        model = Model(grid=grid, bathy=Bathymetry(z=z), part=part,
                      phys=PhysParams(), config=StepConfig(order=order))
        state = SimState.from_velocity(H0.copy(), 0.0, part)
        state = march(model, state, 1000)
        worst_u = max(worst_u, float(np.abs(
            state.velocities(part)).max()))
        worst_eta = max(worst_eta, float(np.abs(
            state.H + z - 1.0).max()))
    elapsed = time.perf_counter() - start
    ok = worst_u <= 1e-13 and worst_eta <= 1e-13 and elapsed < 5.0
    report(1, "well-balance", ok,
           f"max|u|={worst_u:.2e} max|d eta|={worst_eta:.2e} "
           f"(tol 1e-13), {elapsed:.1f}s (<5s)")


def test_criterion_2_positivity():
    start = time.perf_counter()
    rng = np.random.RandomState(42)
    violations = 0
    worst = 0.0
    for _ in range(10000):
        cells = rng.randint(4, 14)
        n_layers = int(rng.choice([1, 2, 3, 5]))
        grid = Grid1D.uniform(0.0, rng.uniform(1.0, 10.0), cells)
        z = rng.uniform(0.0, 1.0, cells) if rng.rand() < 0.5 else np.zeros(cells)
        part = LayerPartition.uniform(n_layers)
        H = rng.uniform(0.0, 3.0, cells)
        H[rng.rand(cells) < 0.25] = 0.0
        u = rng.uniform(-5.0, 5.0, (n_layers, cells))
        state = SimState(H=H, q=part.column() * H[None, :] * u)
        periodic = rng.rand() < 0.5
        bc = (BoundarySpec(left=BoundaryKind.PERIODIC,
                           right=BoundaryKind.PERIODIC)
              if periodic else BoundarySpec())
        order = int(rng.choice([1, 2]))
        model = Model(grid=grid, bathy=Bathymetry(z=z), part=part,
                      phys=PhysParams(), bc=bc,
                      config=StepConfig(order=order))
        terms = compute_step_terms(model, state)
        dt = stable_dt(state, terms.exchange_rates, grid, part, 9.81,
                       model.config)
        if not np.isfinite(dt) or dt <= 0.0:
            continue
        if order == 2:
            new = heun_step(model, state, dt, terms)
        else:
            new = explicit_step(model, state, dt, terms)
        low = float(new.H.min())
        worst = min(worst, low)
        if low < 0.0:
            violations += 1

    # dam breaks onto a dry bed, both orders, checked every step
    for order in (1, 2):
        grid = Grid1D.uniform(0.0, 10.0, 150)
        part = LayerPartition.uniform(3)
        model = Model(grid=grid, bathy=Bathymetry(z=np.zeros(150)),
                      part=part, phys=PhysParams(),
                      config=StepConfig(order=order))
        state = SimState.from_velocity(
            np.where(grid.x < 5.0, 1.0, 0.0), 0.0, part)
        for _ in range(200):
            terms = compute_step_terms(model, state)
            dt = stable_dt(state, terms.exchange_rates, grid, part, 9.81,
                           model.config)
            state = full_step(model, state, dt, terms)
            low = float(state.H.min())
            worst = min(worst, low)
            if low < 0.0:
                violations += 1
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 60.0
    report(2, "positivity", ok,
           f"{violations} violations, min H={worst:.1e}, "
           f"{elapsed:.1f}s (<60s)")


def test_criterion_3_mass_conservation():
    grid = Grid1D.uniform(0.0, 20.0, 60)
    z = bump_bed(grid.x)
    part = LayerPartition.uniform(3)
    phys = PhysParams(viscosity=0.01, friction=FrictionLaw.NAVIER, k_l=0.02)
    model = Model(grid=grid, bathy=Bathymetry(z=z), part=part, phys=phys,
                  config=StepConfig(order=2))
    H0 = np.maximum(1.0 - z + 0.1 * np.cos(np.pi * grid.x / 20.0), 0.0)
    state = SimState.from_velocity(H0, 0.0, part)
    m0 = state.mass(grid)
    state = march(model, state, 10000)
    drift = abs(state.mass(grid) - m0) / m0
    ok = drift <= 1e-11
    report(3, "mass conservation", ok,
           f"|dM|/M={drift:.2e} over 10^4 steps (tol 1e-11)")


def test_criterion_4_monolayer_reduction():
    grid = Grid1D.uniform(0.0, 20.0, 100)
    z = bump_bed(grid.x)
    H0 = 1.2 - z + 0.05 * np.cos(np.pi * grid.x / 20.0)
    results = {}
    for n_layers in (1, 5):
        part = LayerPartition.uniform(n_layers)
        model = Model(grid=grid, bathy=Bathymetry(z=z), part=part,
                      phys=PhysParams())
        state = SimState.from_velocity(H0.copy(), 0.3, part)
        heights, discharges = [], []
        for _ in range(400):
            terms = compute_step_terms(model, state)
            dt = stable_dt(state, terms.exchange_rates, grid, part, 9.81,
                           model.config)
            state = full_step(model, state, dt, terms)
            heights.append(state.H.copy())
            discharges.append(state.total_discharge())
        results[n_layers] = (np.array(heights), np.array(discharges))
    dh = np.abs(results[1][0] - results[5][0]).max()
    dq = np.abs(results[1][1] - results[5][1]).max()
    ok = dh <= 1e-12 and dq <= 1e-12
    report(4, "N-to-1 reduction", ok,
           f"max|dH|={dh:.2e} max|dQ|={dq:.2e} over 400 steps (tol 1e-12)")


def test_criterion_5_two_layer_hyperbolicity():
    start = time.perf_counter()
    rng = np.random.RandomState(7)
    g = 9.81
    failures = 0
    for _ in range(10000):
        H = rng.uniform(0.01, 5.0)
        l = rng.uniform(0.02, 0.98)
        u1, u2 = rng.uniform(-5.0, 5.0, 2)
        u_int = u1 if rng.rand() < 0.5 else u2
        res = two_layer_charpoly(H, u1, u2, l, u_int, g)
        if not (np.all(np.diff(res.roots) > 0.0)
                and np.abs(res.evaluate(res.roots)).max()
                <= 1e-10 * np.abs(res.coefficients).max()):
            failures += 1
    # equal-velocity case gives the barotropic/baroclinic triple
    eq_err = 0.0
    for _ in range(200):
        H = rng.uniform(0.01, 5.0)
        u = rng.uniform(-5.0, 5.0)
        res = two_layer_charpoly(H, u, u, rng.uniform(0.05, 0.95), u, g)
        a = np.sqrt(g * H)
        eq_err = max(eq_err, np.abs(res.roots - [u - a, u, u + a]).max())
    elapsed = time.perf_counter() - start
    ok = failures == 0 and eq_err <= 1e-10 and elapsed < 10.0
    report(5, "two-layer hyperbolicity", ok,
           f"{failures} failures, equal-velocity err={eq_err:.1e} "
           f"(tol 1e-10), {elapsed:.1f}s (<10s)")


def test_criterion_6_kinetic_closed_forms():
    rng = np.random.RandomState(11)
    worst = 0.0
    for _ in range(1000):
        H = rng.uniform(1e-4, 5.0)
        g = rng.uniform(1.0, 20.0)
        u = rng.uniform(-6.0, 6.0)
        c = np.sqrt(0.5 * g * H)
        plus, minus = half_moments(u, c)
        for k in range(3):
            worst = max(worst, abs(float(plus[k])
                                   - half_moment_quadrature(u, c, k, +1)))
            worst = max(worst, abs(float(minus[k])
                                   - half_moment_quadrature(u, c, k, -1)))
    ok = worst <= 1e-10
    report(6, "kinetic closed forms", ok,
           f"max |closed - quadrature| = {worst:.1e} (tol 1e-10)")


def test_criterion_7_transcritical_inviscid_vs_analytic():
    q_in, h_out = 0.18, 0.33
    errors = {}
    for cells in (100, 200, 400):
        grid = Grid1D.uniform(0.0, 25.0, cells)
        z = bump_bed(grid.x)
        part = LayerPartition.uniform(1)
        model = Model(grid=grid, bathy=Bathymetry(z=z), part=part,
                      phys=PhysParams(),
                      bc=BoundarySpec(left=BoundaryKind.DISCHARGE,
                                      right=BoundaryKind.HEIGHT,
                                      left_value=q_in, right_value=h_out),
                      config=StepConfig(order=2))
        H0 = np.maximum(h_out - z, 0.05)
        state = SimState.from_velocity(H0, 0.0, part)
        result = advance(model, state, 600.0, steady_tol=1e-9)
        H_exact, _ = transcritical_shock_solution(grid.x, q_in, h_out, 9.81)
        errors[cells] = float(np.sum(np.abs(result.state.H - H_exact)
                                     * grid.dx)
                              / np.sum(H_exact * grid.dx))
    ok = (errors[400] <= 0.01
          and errors[400] < errors[200] < errors[100])
    report(7, "transcritical vs analytic", ok,
           f"L1 rel err: {errors[100]:.4f} / {errors[200]:.4f} / "
           f"{errors[400]:.4f} at 100/200/400 cells (tol 0.01, decreasing)")


def test_criterion_8_transcritical_with_friction():
    phys = PhysParams(viscosity=0.01, friction=FrictionLaw.STRICKLER,
                      strickler_k=30.0)
    details = []
    ok = True
    w_pattern = None
    for n_layers in (1, 5, 15):
        cells = 200
        grid = Grid1D.uniform(0.0, 25.0, cells)
        z = bump_bed(grid.x)
        part = LayerPartition.uniform(n_layers)
        model = Model(grid=grid, bathy=Bathymetry(z=z), part=part, phys=phys,
                      bc=BoundarySpec(left=BoundaryKind.DISCHARGE,
                                      right=BoundaryKind.HEIGHT,
                                      left_value=1.0, right_value=0.6),
                      config=StepConfig(order=1))
        state = SimState.from_velocity(np.maximum(0.6 - z, 0.2), 0.0, part)
        result = advance(model, state, 1500.0, steady_tol=1e-8)
        finite = bool(np.all(np.isfinite(result.state.H))
                      and np.all(np.isfinite(result.state.q)))
        positive = bool(np.all(result.state.H >= 0.0))
        # discharge through every cross-section: the interface mass flux
        terms = compute_step_terms(model, result.state)
        section_q = np.sum(terms.iface_flux_h, axis=0)
        spread = float((section_q.max() - section_q.min())
                       / abs(np.mean(section_q)))
        ok = ok and result.reached_steady and finite and positive
        ok = ok and spread <= 1e-3
        details.append(f"N={n_layers}: steady={result.reached_steady} "
                       f"dq/q={spread:.1e}")
        if n_layers == 15:
            w = vertical_velocity(result.state, model.bathy, grid, part)
            upslope = (grid.x > 8.3) & (grid.x < 9.7)
            downslope = (grid.x > 10.3) & (grid.x < 11.7)
            w_pattern = (float(np.mean(w[:, upslope])),
                         float(np.mean(w[:, downslope])))
            ok = ok and w_pattern[0] > 0.0 > w_pattern[1]
    report(8, "transcritical with friction", ok,
           "; ".join(details)
           + f"; w up/down slope = {w_pattern[0]:.3f}/{w_pattern[1]:.3f}"
           + " (steady tol 1e-8, uniform 0.1%)")


def test_criterion_9_wind_driven_recirculation():
    cells, n_layers = 80, 8
    grid = Grid1D.uniform(0.0, 20.0, cells)
    z = 0.75 * np.maximum(0.0, 1.0 - ((grid.x - 12.0) / 3.0) ** 2)
    part = LayerPartition.uniform(n_layers)
    phys = PhysParams(viscosity=0.01, friction=FrictionLaw.NAVIER,
                      k_l=0.01, wind_stress=5e-4)
    model = Model(grid=grid, bathy=Bathymetry(z=z), part=part, phys=phys,
                  config=StepConfig(order=1))
    state = SimState.from_velocity(lake_at_rest_heights(z, 2.0), 0.0, part)
    result = advance(model, state, 4000.0, steady_tol=1e-8)
    terms = compute_step_terms(model, result.state)
    section_q = np.abs(np.sum(terms.iface_flux_h, axis=0)).max()
    q_scale = float(np.abs(result.state.q).max())
    u = result.state.velocities(part)
    top_downwind = float(np.mean(u[-1] > 0.0))
    reversed_cols = int(np.sum(u[0] < 0.0))
    ok = (result.reached_steady
          and section_q <= 1e-6 * q_scale
          and top_downwind >= 0.9
          and reversed_cols >= 1)
    report(9, "wind-driven recirculation", ok,
           f"steady={result.reached_steady} |net q|={section_q:.1e} "
           f"(tol {1e-6 * q_scale:.1e}) top downwind {top_downwind:.0%} "
           f"(>=90%), {reversed_cols} reversed bottom columns (>=1)")


def test_criterion_10_energy_decay():
    grid = Grid1D.uniform(0.0, 10.0, 80)
    part = LayerPartition.uniform(3)
    phys = PhysParams(viscosity=0.005, friction=FrictionLaw.NAVIER, k_l=0.05)
    model = Model(grid=grid, bathy=Bathymetry(z=np.zeros(80)), part=part,
                  phys=phys, config=StepConfig(order=1))
    H0 = 1.0 + 0.1 * np.cos(np.pi * grid.x / 10.0)
    state = SimState.from_velocity(H0, 0.0, part)
    energies = []
    advance(model, state, 20.0, snapshot_interval=0.2,
            on_snapshot=lambda s: energies.append(s.energy))
    E = np.array(energies)
    # first snapshot interval covers well over 10 steps (dt ~ 0.02 s)
    increments = np.diff(E)[1:]
    worst = float(increments.max())
    ok = worst <= 1e-10 * E[0]
    report(10, "energy decay", ok,
           f"max energy increment {worst:.2e} over {increments.size} "
           f"snapshot gaps (tol {1e-10 * E[0]:.1e})")


def test_criterion_11_heun_order():
    cells = 64
    grid = Grid1D.uniform(0.0, 10.0, cells)
    part = LayerPartition.uniform(1)
    model = Model(grid=grid, bathy=Bathymetry(z=np.zeros(cells)), part=part,
                  phys=PhysParams(),
                  bc=BoundarySpec(left=BoundaryKind.PERIODIC,
                                  right=BoundaryKind.PERIODIC),
                  config=StepConfig(order=2))
    H0 = 1.0 + 0.1 * np.sin(2.0 * np.pi * grid.x / 10.0)
    u0 = 0.25 + 0.05 * np.cos(2.0 * np.pi * grid.x / 10.0)
    horizon = 0.32

    def run(dt):
        state = SimState.from_velocity(H0.copy(), u0.copy(), part)
        return advance(model, state, horizon, fixed_dt=dt).state

    reference = run(horizon / 2048)
    errors = []
    for k in (32, 64, 128):
        state = run(horizon / k)
        errors.append(float(np.sum(np.abs(state.H - reference.H) * grid.dx)
                            + np.sum(np.abs(state.q - reference.q)
                                     * grid.dx)))
    r1 = errors[0] / errors[1]
    r2 = errors[1] / errors[2]
    ok = 3.2 <= r1 <= 4.8 and 3.2 <= r2 <= 4.8
    report(11, "heun second order", ok,
           f"error ratios {r1:.2f}, {r2:.2f} under dt halving "
           f"(required within [3.2, 4.8])")
