"""Acceptance suite; each test records one PASS/FAIL line in the terminal summary."""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE, DIVERGENT_C2, KINK_C2
from nltachyon.diagnostics import QuadratureRule, arrow_identity_sides, energy
from nltachyon.grid import Grid, GridFunction, StepProfile
from nltachyon.heatkernel import KernelSpec, apply_heat, kernel_value, smooth_step
from nltachyon.model import LN2, ModelParams, degenerate_c2, vacua
from nltachyon.solver import CONVERGED, DIVERGED, reduced_kink, residual_norm, solve_kink, step_initial_data


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_01_vacua_exact():
    s10 = math.sqrt(10)
    want = {
        KINK_C2: [(0.0, 0.0), (5 / 12, psi := None), (5 / 6, -5 / 18)],
        DIVERGENT_C2: [(-s10 / 3, (5 + 2 * s10) / 18), (0.0, 0.0), (s10 / 3, (5 - 2 * s10) / 18)],
    }
    err = 0.0
    for c2, pts in want.items():
        got = vacua(c2).points
        assert len(got) == len(pts)
        for (phi, psi), g in zip(pts, got):
            err = max(err, abs(g.phi - phi))
            if psi is not None:
                err = max(err, abs(g.psi - psi))
    record(1, err <= 1e-12, f"max abs error {err:.2e} (tol 1e-12)")


def test_criterion_02_degenerate_couplings():
    s6 = math.sqrt(6)
    want = sorted([-2.0, 2.0, 13 / 6, 4 / 3, 12 - 4 * s6, 12 + 4 * s6])
    got = degenerate_c2()
    vals = sorted(d.c2 for d in got)
    err = max(abs(a - b) for a, b in zip(vals, want)) if len(vals) == len(want) else math.inf
    flagged = sorted(d.c2 for d in got if d.distinct)
    flags_ok = len(flagged) == 2 and abs(flagged[0] - 4 / 3) < 1e-10 and abs(flagged[1] - 13 / 6) < 1e-10
    record(2, err <= 1e-10 and flags_ok,
           f"set error {err:.2e} (tol 1e-10); distinct flagged {[round(f, 6) for f in flagged]}")


def test_criterion_03_kernel_suite():
    grid = Grid.from_range(-30.0, 30.0, 0.05)
    t = grid.t
    # normalisation of the sampled kernel
    norm = max(abs(np.sum(kernel_value(a, t)) * grid.dt - 1.0) for a in (0.1, 0.5, 2.0))
    # semigroup on smooth data with non-zero tails
    f = GridFunction(grid, np.tanh(t) + 0.3 * np.exp(-t**2), -1.0, 1.0)
    semi = 0.0
    for a, b in [(0.3, 0.4), (LN2, LN2), (0.05, 1.0)]:
        semi = max(semi, float(np.max(np.abs(
            apply_heat(apply_heat(f, a), b).values - apply_heat(f, a + b).values))))
    # sampled step -> erf, exact reference step
    sharp = KernelSpec(step_width=0.0, jump_at=0.0)
    step = StepProfile(0.7).sample(grid, base=0.2)
    erf_err = max(float(np.max(np.abs(apply_heat(step, a, sharp).values - (0.2 + 0.7 * smooth_step(a, t)))))
                  for a in (0.1, LN2, 2 * LN2))
    # Gaussian -> Gaussian
    gauss_err = 0.0
    for b, a in [(0.2, 0.3), (0.5, LN2), (1.0, 2.0)]:
        g = GridFunction(grid, kernel_value(b, t - 1.0), 0.0, 0.0)
        gauss_err = max(gauss_err, float(np.max(np.abs(apply_heat(g, a).values - kernel_value(a + b, t - 1.0)))))
    # series and convolution agree at the switch-over
    spec = KernelSpec()
    thr = spec.threshold(grid.dt)
    a = 0.999 * thr
    series = apply_heat(f, a, spec)
    conv = apply_heat(f, a, KernelSpec(small_a_threshold=0.0))
    switch = float(np.max(np.abs(series.values - conv.values)))
    ok = norm <= 1e-12 and semi <= 1e-7 and erf_err <= 1e-8 and gauss_err <= 1e-8 and switch <= 1e-6
    record(3, ok, f"norm {norm:.1e}, semigroup {semi:.1e} (1e-7), erf {erf_err:.1e} (1e-8), "
                  f"gauss {gauss_err:.1e} (1e-8), series/conv {switch:.1e} (1e-6)")


def test_criterion_04_rolling_solution(kink):
    sol, report = kink
    res = residual_norm(sol)
    ph, ps = sol.phi_tilde.values, sol.psi_tilde.values
    tails = max(abs(ph[0]), abs(ps[0]), abs(ph[-1] - 5 / 6), abs(ps[-1] + 5 / 18))
    # one crossing of the midpoint value, then settling at 5/6
    crossings = int(np.sum(np.diff(np.sign(ph - 5 / 12)) != 0))
    shape = crossings == 1 and ph.min() > -0.05 and ph.max() < 5 / 6 + 0.05
    ok = (report.status == CONVERGED and report.iterations <= 200 and report.diff_norms[-1] < 1e-8
          and res < 1e-6 and tails < 1e-6 and shape)
    record(4, ok, f"{report.status} in {report.iterations} its, diff {report.diff_norms[-1]:.1e}, "
                  f"residual {res:.1e}, tails {tails:.1e}, midpoint crossings {crossings}")


def test_criterion_05_divergence(default_grid):
    params = ModelParams(DIVERGENT_C2)
    init = step_initial_data(params, default_grid)
    _, report = solve_kink(params, default_grid, max_iters=50, initial=init)
    ok = report.status == DIVERGED and report.iterations <= 50
    record(5, ok, f"{report.status} after {report.iterations} iterations ({report.message})")


@pytest.fixture(scope="module")
def refinement_ladder():
    out = []
    for dt, nodes in [(0.1, 16), (0.05, 32), (0.025, 64), (0.0125, 128)]:
        sol, rep = solve_kink(ModelParams(KINK_C2), Grid.from_range(-50.0, 50.0, dt),
                              tol=1e-12, max_iters=2000)
        assert rep.status == CONVERGED
        out.append(energy(sol, QuadratureRule.gauss_legendre(nodes)).conservation_residual)
    return out


def test_criterion_06_energy_conservation(kink_diagnostics, refinement_ladder):
    en, _ = kink_diagnostics
    rel = en.conservation_residual / float(np.max(np.abs(en.e_phi)))
    monotone = all(b < a for a, b in zip(refinement_ladder, refinement_ladder[1:]))
    ladder = ", ".join(f"{r:.1e}" for r in refinement_ladder)
    record(6, rel <= 1e-3 and monotone, f"relative residual {rel:.1e} (1e-3); refinement {ladder}")


def test_criterion_07_energy_asymptotics(kink_diagnostics):
    en, _ = kink_diagnostics
    err = max(abs(en.e_phi[-1] + 25 / 162), abs(en.e_psi[-1] - 25 / 162))
    record(7, err <= 1e-4, f"E_phi(t_max) {en.e_phi[-1]:.8f}, E_psi(t_max) {en.e_psi[-1]:.8f}, "
                           f"error {err:.1e} (1e-4)")


def test_criterion_08_pressure(kink_diagnostics):
    _, pr = kink_diagnostics
    interior = pr.p[1:-1]
    bad = int(np.sum((interior >= 0) & (np.abs(interior) > 1e-6)))
    ends = max(abs(pr.p[0]), abs(pr.p[-1]))
    compensation = bool(np.any(pr.positive_part > np.abs(pr.p)))
    ok = bad == 0 and ends <= 1e-4 and compensation
    record(8, ok, f"non-negative samples above 1e-6: {bad}; max p {pr.p.max():.2e}; "
                  f"endpoint |p| {ends:.1e} (1e-4); compensation {compensation}")


def test_criterion_09_arrow_identity():
    grid = Grid.from_range(-25.0, 25.0, 0.05)
    t = grid.t
    rule = QuadratureRule.gauss_legendre(32)
    worst = 0.0
    for b1, c1, b2, c2 in [(0.3, -1.0, 0.8, 1.5), (0.5, 0.0, 0.5, 0.0), (1.2, 2.0, 0.25, -0.5)]:
        f = GridFunction(grid, kernel_value(b1, t - c1), 0.0, 0.0)
        g = GridFunction(grid, kernel_value(b2, t - c2), 0.0, 0.0)
        lhs, _ = arrow_identity_sides(f, g, LN2, rule)
        exact = (kernel_value(b1, t - c1) * kernel_value(b2 + LN2, t - c2)
                 - kernel_value(b2, t - c2) * kernel_value(b1 + LN2, t - c1))
        worst = max(worst, float(np.max(np.abs(lhs - exact))))
    record(9, worst <= 1e-6, f"max mismatch {worst:.1e} at 32 nodes (1e-6)")


def test_criterion_10_reduced_kink():
    params = ModelParams(KINK_C2)
    rk = reduced_kink(params, Grid.from_range(-30.0, 30.0, 0.05))
    ends = max(abs(rk.phi_tilde[0]), abs(rk.psi_tilde[0]),
               abs(rk.phi_tilde[-1] - 5 / 6), abs(rk.psi_tilde[-1] + 5 / 18))
    m1, m2 = params.effective_masses
    ok = rk.converged and rk.residual < 1e-8 and rk.connects and ends < 1e-12 and m1 > 0 and m2 > 0
    record(10, ok, f"Newton {rk.newton_steps} steps, residual {rk.residual:.1e} (1e-8), "
                   f"ripple {rk.tail_ripple:.4f}, masses {m1:.4f}, {m2:.4f}")
