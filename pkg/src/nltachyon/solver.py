"""Rolling (kink) solutions of the homogeneous nonlocal field equations.

The tilded fields solve

    P1 phi~ - phi~^2 + c2 psi~ - 2 phi~ psi~ = 0
    P4 psi~ + c2 phi~ - phi~^2               = 0

with ``P_r = (-d^2 + r) exp(2k d^2)`` (``2m`` in the second equation).
:func:`solve_kink` runs the fixed-point map obtained by solving the second
equation for ``phi~`` and the first for ``psi~``, starting from step data
between two degenerate vacua.  :func:`reduced_kink` solves the
two-derivative truncation as a boundary-value problem for comparison.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import spsolve

from .grid import Grid, GridFunction, StepProfile, sup_norm
from .heatkernel import DEFAULT_SPEC, KernelSpec, apply_heat, apply_P
from .model import ModelParams, VacuumPoint, degenerate_pair

log = logging.getLogger(__name__)

CONVERGED = "converged"
DIVERGED = "diverged"
MAX_ITERS = "max_iters"


@dataclass(frozen=True, eq=False)
class SolutionPair:
    """Tilded fields on a common grid; untilded fields are derived by smoothing."""

    phi_tilde: GridFunction
    psi_tilde: GridFunction
    params: ModelParams
    spec: KernelSpec = DEFAULT_SPEC

    def __post_init__(self):
        if self.phi_tilde.grid != self.psi_tilde.grid:
            raise ValueError("phi_tilde and psi_tilde must share a grid")

    @property
    def grid(self) -> Grid:
        return self.phi_tilde.grid

    @cached_property
    def phi(self) -> GridFunction:
        return apply_heat(self.phi_tilde, self.params.k, self.spec)

    @cached_property
    def psi(self) -> GridFunction:
        return apply_heat(self.psi_tilde, self.params.m, self.spec)

    def tail_mismatch(self) -> float:
        return max(self.phi_tilde.tail_mismatch(), self.psi_tilde.tail_mismatch())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.phi_tilde.values)) and np.all(np.isfinite(self.psi_tilde.values)))


@dataclass
class IterationReport:
    iterations: int = 0
    diff_norms: list[float] = field(default_factory=list)
    residual_norms: list[float] = field(default_factory=list)
    status: str = MAX_ITERS
    message: str = ""

    def as_dict(self):
        return {
            "status": self.status,
            "iterations": self.iterations,
            "diff_norms": self.diff_norms,
            "residual_norms": self.residual_norms,
            "message": self.message,
        }


def vacuum_pair(left: VacuumPoint, right: VacuumPoint, grid: Grid, params: ModelParams,
                jump_at: float = 0.0, spec: KernelSpec = DEFAULT_SPEC) -> SolutionPair:
    """Step data jumping from ``left`` to ``right`` at ``jump_at``."""
    phi = StepProfile(right.phi - left.phi, jump_at).sample(grid, base=left.phi, tail_tol=math.inf)
    psi = StepProfile(right.psi - left.psi, jump_at).sample(grid, base=left.psi, tail_tol=math.inf)
    return SolutionPair(phi, psi, params, spec)


def constant_pair(vac: VacuumPoint, grid: Grid, params: ModelParams,
                  spec: KernelSpec = DEFAULT_SPEC) -> SolutionPair:
    return SolutionPair(
        GridFunction.constant(grid, vac.phi, tail_tol=math.inf),
        GridFunction.constant(grid, vac.psi, tail_tol=math.inf),
        params,
        spec,
    )


def step_initial_data(params: ModelParams, grid: Grid, jump_at: float = 0.0,
                      spec: KernelSpec = DEFAULT_SPEC) -> SolutionPair:
    """Step between the two degenerate vacua, lower phi on the left."""
    left, right = degenerate_pair(params)
    return vacuum_pair(left, right, grid, params, jump_at, spec)


def eom_residual(s: SolutionPair) -> tuple[GridFunction, GridFunction]:
    """Left-hand sides of both homogeneous field equations."""
    p, c2 = s.params, s.params.c2
    ph, ps = s.phi_tilde, s.psi_tilde
    r1 = apply_P(ph, 1.0, 2 * p.k, s.spec) - ph * ph + c2 * ps - 2.0 * ph * ps
    r2 = apply_P(ps, 4.0, 2 * p.m, s.spec) + c2 * ph - ph * ph
    return r1, r2


def residual_norm(s: SolutionPair) -> float:
    r1, r2 = eom_residual(s)
    return max(sup_norm(r1), sup_norm(r2))


def iterate_step(current: SolutionPair, mixing: float = 1.0) -> SolutionPair:
    """One application of the fixed-point map (optionally mixed with the input).

    ``phi~ <- (phi~^2 - P4 psi~) / c2`` and
    ``psi~ <- (-P1 phi~ + phi~^2 + 2 phi~ psi~) / c2``, both from the
    current iterate.
    """
    p, c2 = current.params, current.params.c2
    ph, ps = current.phi_tilde, current.psi_tilde
    new_ph = (ph * ph - apply_P(ps, 4.0, 2 * p.m, current.spec)) / c2
    new_ps = (-apply_P(ph, 1.0, 2 * p.k, current.spec) + ph * ph + 2.0 * ph * ps) / c2
    if mixing != 1.0:
        new_ph = (1.0 - mixing) * ph + mixing * new_ph
        new_ps = (1.0 - mixing) * ps + mixing * new_ps
    return SolutionPair(new_ph, new_ps, p, current.spec)


def _diff(a: SolutionPair, b: SolutionPair) -> float:
    d = max(sup_norm(a.phi_tilde - b.phi_tilde), sup_norm(a.psi_tilde - b.psi_tilde))
    return d if math.isfinite(d) else math.inf


def solve_kink(params: ModelParams, grid: Grid, tol: float = 1e-8, residual_tol: float = 1e-6,
               max_iters: int = 200, mixing: float = 1.0, spec: KernelSpec = DEFAULT_SPEC,
               initial: SolutionPair | None = None, divergence_factor: float = 10.0,
               divergence_window: int = 5, blowup: float = 1e6):
    """Iterate the fixed-point map from step data until it settles or blows up.

    Returns ``(solution, report)``.  On divergence the solution is the last
    finite iterate.
    """
    if tol <= 0 or residual_tol <= 0:
        raise ValueError("tolerances must be positive")
    if not 0 < mixing <= 1:
        raise ValueError("mixing must lie in (0, 1]")
    current = initial if initial is not None else step_initial_data(params, grid, spec=spec)
    report = IterationReport()
    if max_iters == 0:
        report.message = "no iterations requested"
        return current, report

    for n in range(1, max_iters + 1):
        nxt = iterate_step(current, mixing)
        d = _diff(nxt, current)
        if not nxt.is_finite() or not math.isfinite(d):
            report.iterations = n
            report.status = DIVERGED
            report.message = f"non-finite iterate at step {n}"
            return current, report
        res = residual_norm(nxt)
        report.iterations = n
        report.diff_norms.append(d)
        report.residual_norms.append(res)
        log.debug("iter %d diff %.3e residual %.3e", n, d, res)

        w = divergence_window
        growing = len(report.diff_norms) > w and d > divergence_factor * report.diff_norms[-1 - w]
        if growing or max(sup_norm(nxt.phi_tilde), sup_norm(nxt.psi_tilde)) > blowup:
            report.status = DIVERGED
            report.message = f"diff-norm grew from {report.diff_norms[-1 - w]:.3e} to {d:.3e}" \
                if growing else f"sup-norm exceeded {blowup:g}"
            return nxt, report
        current = nxt
        if d < tol and res < residual_tol:
            report.status = CONVERGED
            report.message = f"converged after {n} iterations"
            return current, report

    report.status = MAX_ITERS
    report.message = f"no convergence in {max_iters} iterations"
    return current, report


# --- two-derivative truncation ----------------------------------------------

#: Default half-width of the window for the reduced boundary-value problem.
REDUCED_HALF_WIDTH = 30.0


@dataclass
class ReducedKink:
    grid: Grid
    phi_tilde: np.ndarray
    psi_tilde: np.ndarray
    residual: float
    newton_steps: int
    converged: bool
    center: float
    tail_ripple: float
    connects: bool
    message: str = ""

    @property
    def status(self) -> str:
        if not self.converged:
            return "newton_failed"
        return "kink" if self.connects else "no_kink"


def _second_difference(n, dt):
    off = np.ones(n - 1)
    return sparse.diags([off, -2.0 * np.ones(n), off], [-1, 0, 1], format="csc") / dt**2


def _newton_dirichlet(u, v, left, right, dt, mass, c2, tol, max_newton):
    n = len(u)
    D2 = _second_difference(n, dt)

    def residual(u, v):
        ub = D2 @ u
        vb = D2 @ v
        ub[0] += left.phi / dt**2
        ub[-1] += right.phi / dt**2
        vb[0] += left.psi / dt**2
        vb[-1] += right.psi / dt**2
        f1 = mass[0] * ub + u - u * u + c2 * v - 2 * u * v
        f2 = mass[1] * vb + 4 * v + c2 * u - u * u
        return np.concatenate([f1, f2])

    R = residual(u, v)
    for step_no in range(1, max_newton + 1):
        J = sparse.bmat(
            [[mass[0] * D2 + sparse.diags(1 - 2 * u - 2 * v), sparse.diags(c2 - 2 * u)],
             [sparse.diags(c2 - 2 * u), mass[1] * D2 + sparse.diags(np.full(n, 4.0))]],
            format="csc",
        )
        with np.errstate(all="ignore"):
            delta = spsolve(J, -R)
        if not np.all(np.isfinite(delta)):
            return u, v, R, step_no, "singular Newton system"
        norm0 = np.max(np.abs(R))
        lam = 1.0
        while True:
            un, vn = u + lam * delta[:n], v + lam * delta[n:]
            Rn = residual(un, vn)
            if np.max(np.abs(Rn)) < (1 - 1e-4 * lam) * norm0:
                break
            lam *= 0.5
            if lam < 1e-6:
                return u, v, R, step_no, "line search stalled"
        u, v, R = un, vn, Rn
        if np.max(np.abs(R)) < tol:
            return u, v, R, step_no, ""
    return u, v, R, max_newton, f"no convergence in {max_newton} Newton steps"


def reduced_kink(params: ModelParams, grid: Grid | None = None, tol: float = 1e-10,
                 residual_tol: float = 1e-8, max_newton: int = 60, widths=(2.0, 1.0, 4.0),
                 ripple_distance: float = 15.0, ripple_tol: float = 0.05,
                 endpoints=None) -> ReducedKink:
    """Kink of the two-derivative truncation by damped Newton relaxation.

    Solves ``(2k-1) phi~'' + phi~ - phi~^2 + c2 psi~ - 2 phi~ psi~ = 0`` and
    ``(8m-1) psi~'' + 4 psi~ + c2 phi~ - phi~^2 = 0`` with second-order
    differences and the degenerate vacua as Dirichlet data at the window
    ends.  Starting profiles are tanh ramps of the given ``widths``, tried in
    order until Newton converges.

    Both vacua are saddles of the effective potential, so finite-window
    solutions carry oscillatory tails.  ``tail_ripple`` is the largest
    deviation from the vacua farther than ``ripple_distance`` from the
    midpoint crossing, relative to the jump; ``connects`` requires it to be
    below ``ripple_tol``.
    """
    mass = params.effective_masses
    if min(mass) <= 0:
        raise ValueError("effective masses 2k-1 and 8m-1 must be positive")
    if grid is None:
        grid = Grid.from_range(-REDUCED_HALF_WIDTH, REDUCED_HALF_WIDTH, 0.05)
    left, right = endpoints if endpoints is not None else degenerate_pair(params)
    t = grid.t
    ti = t[1:-1]
    center0 = grid.midpoint
    messages = []
    for width in widths:
        prof = 0.5 * (1 + np.tanh((ti - center0) / width))
        u0 = left.phi + (right.phi - left.phi) * prof
        v0 = left.psi + (right.psi - left.psi) * prof
        u, v, R, steps, msg = _newton_dirichlet(u0, v0, left, right, grid.dt, mass, params.c2,
                                                tol, max_newton)
        residual = float(np.max(np.abs(R)))
        if not msg and residual < residual_tol:
            break
        messages.append(f"width {width:g}: {msg or f'residual {residual:.3e}'}")
    else:
        msg = "; ".join(messages)

    phi = np.concatenate([[left.phi], u, [right.phi]])
    psi = np.concatenate([[left.psi], v, [right.psi]])
    converged = not msg and residual < residual_tol
    mid = 0.5 * (left.phi + right.phi)
    crossings = np.nonzero(np.diff(np.sign(phi - mid)))[0]
    if len(crossings):
        center = float(t[crossings[np.argmin(np.abs(t[crossings] - center0))]])
    else:
        center = center0
    far = np.abs(t - center) > ripple_distance
    target_phi = np.where(t < center, left.phi, right.phi)
    target_psi = np.where(t < center, left.psi, right.psi)
    ripple = 0.0
    if far.any():
        ripple = max(
            np.max(np.abs(phi - target_phi)[far]) / abs(right.phi - left.phi),
            np.max(np.abs(psi - target_psi)[far]) / abs(right.psi - left.psi),
        )
    connects = converged and ripple < ripple_tol
    if converged:
        msg = f"converged in {steps} Newton steps; tail ripple {ripple:.3g} of the jump"
    return ReducedKink(grid, phi, psi, residual, steps, converged, center, float(ripple),
                       connects, msg)
