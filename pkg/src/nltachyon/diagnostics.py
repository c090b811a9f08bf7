"""Energy and pressure of homogeneous configurations.

For a configuration given by its tilded fields, with ``phi = exp(k d^2) phi~``
and ``psi = exp(m d^2) psi~``, the energy splits into an open-string part

    E_phi = -phi^2/2 + (phi')^2/2 + phi~^3/3
            + k int_0^1 drho  A_rho <-d-> B_rho,
    A_rho = exp((2-rho) k d^2) (-d^2 + 1) phi~,   B_rho = exp(k rho d^2) phi~'

and a closed-string part of the same shape (mass 4, scale m) plus the extra
term ``psi~ (-d^2 + 4) exp(2m d^2) psi~``.  ``A <-d-> B`` is ``A B' - B A'``.
The pressure is

    p = -E + (phi')^2 + (psi')^2 - 2k int A'_rho B_rho - 2m int (same for psi).

Every heat time that appears is non-negative, so all operators are
smoothing; nodes with ``k rho`` below the kernel threshold go through the
series path of :mod:`nltachyon.heatkernel`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, derivative, sup_norm
from .heatkernel import DEFAULT_SPEC, KernelSpec, apply_heat, apply_P
from .solver import SolutionPair


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights differ in length")
        if not np.all((self.nodes > 0) & (self.nodes < 1)):
            raise ValueError("quadrature nodes must lie strictly inside (0, 1)")
        if abs(np.sum(self.weights) - 1.0) > 1e-14:
            raise ValueError("quadrature weights must sum to 1")

    @classmethod
    def gauss_legendre(cls, n: int = 32) -> "QuadratureRule":
        """Gauss-Legendre rule mapped to (0, 1); exact to degree ``2n - 1``."""
        if n < 1:
            raise ValueError("need at least one node")
        x, w = np.polynomial.legendre.leggauss(n)
        return cls((x + 1.0) / 2.0, w / 2.0, 2 * n - 1)

    def __len__(self):
        return len(self.nodes)

    def integrate(self, func) -> float:
        return float(sum(w * func(x) for x, w in zip(self.nodes, self.weights)))


DEFAULT_RULE = QuadratureRule.gauss_legendre(32)


@dataclass
class EnergyBreakdown:
    grid: Grid
    e_phi: np.ndarray
    e_psi: np.ndarray
    e_total: np.ndarray
    conservation_residual: float
    rate_residual: float

    @property
    def t(self):
        return self.grid.t

    def summary(self) -> dict:
        return {
            "conservation_residual": self.conservation_residual,
            "rate_residual": self.rate_residual,
            "max_abs_E_phi": float(np.max(np.abs(self.e_phi))),
            "relative_residual": self.conservation_residual / max(np.max(np.abs(self.e_phi)), 1e-300),
            "E_phi_left": float(self.e_phi[0]),
            "E_phi_right": float(self.e_phi[-1]),
            "E_psi_left": float(self.e_psi[0]),
            "E_psi_right": float(self.e_psi[-1]),
        }


@dataclass
class PressureBreakdown:
    grid: Grid
    p: np.ndarray
    positive_part: np.ndarray
    negative_part: np.ndarray
    minus_energy_part: np.ndarray

    @property
    def t(self):
        return self.grid.t

    def summary(self) -> dict:
        i = int(np.argmin(self.p))
        return {
            "min_pressure": float(self.p[i]),
            "t_min_pressure": float(self.grid.t[i]),
            "max_pressure": float(np.max(self.p)),
            "p_left": float(self.p[0]),
            "p_right": float(self.p[-1]),
            "max_positive_part": float(np.max(self.positive_part)),
        }


def antisym(a: np.ndarray, da: np.ndarray, b: np.ndarray, db: np.ndarray) -> np.ndarray:
    """``A <-d-> B = A B' - B A'`` from values and derivatives."""
    return a * db - b * da


@dataclass
class _Sector:
    """Local pieces and rho-integrals of one field sector."""

    kinetic: np.ndarray  # (field')^2 of the untilded field
    bracket: np.ndarray  # scale * int A <-d-> B
    product: np.ndarray  # scale * int A' B


def _sector(tilde: GridFunction, mass: float, scale: float, rule: QuadratureRule,
            spec: KernelSpec) -> _Sector:
    d1 = derivative(tilde, 1, spec.fd_accuracy)
    d2 = derivative(tilde, 2, spec.fd_accuracy)
    bracket = np.zeros(tilde.grid.n)
    product = np.zeros(tilde.grid.n)
    for rho, w in zip(rule.nodes, rule.weights):
        a_outer = (2.0 - rho) * scale
        A = apply_P(tilde, mass, a_outer, spec).values
        dA = apply_P(d1, mass, a_outer, spec).values
        B = apply_heat(d1, rho * scale, spec).values
        dB = apply_heat(d2, rho * scale, spec).values
        bracket += w * antisym(A, dA, B, dB)
        product += w * dA * B
    untilded = apply_heat(tilde, scale, spec)
    kinetic = derivative(untilded, 1, spec.fd_accuracy).values ** 2
    return _Sector(kinetic, scale * bracket, scale * product)


def _energy_from(s: SolutionPair, sp: _Sector, ss: _Sector) -> EnergyBreakdown:
    p = s.params
    ph_t, ps_t = s.phi_tilde.values, s.psi_tilde.values
    e_phi = -0.5 * s.phi.values**2 + 0.5 * sp.kinetic + ph_t**3 / 3.0 + sp.bracket
    mixed = ps_t * apply_P(s.psi_tilde, 4.0, 2 * p.m, s.spec).values
    e_psi = -2.0 * s.psi.values**2 + 0.5 * ss.kinetic + mixed + ss.bracket
    total = e_phi + e_psi
    rate = derivative(GridFunction(s.grid, total, 0.0, 0.0, np.inf), 1, s.spec.fd_accuracy)
    return EnergyBreakdown(s.grid, e_phi, e_psi, total, float(np.max(np.abs(total))), sup_norm(rate))


def _sectors(s: SolutionPair, rule: QuadratureRule):
    p = s.params
    return (_sector(s.phi_tilde, 1.0, p.k, rule, s.spec),
            _sector(s.psi_tilde, 4.0, p.m, rule, s.spec))


def energy(s: SolutionPair, rule: QuadratureRule = DEFAULT_RULE) -> EnergyBreakdown:
    """Open-string, closed-string and total energy at every grid sample."""
    return _energy_from(s, *_sectors(s, rule))


def _pressure_from(en: EnergyBreakdown, sp: _Sector, ss: _Sector) -> PressureBreakdown:
    positive = sp.kinetic + ss.kinetic
    negative = -2.0 * (sp.product + ss.product)
    minus_e = -en.e_total
    return PressureBreakdown(en.grid, minus_e + positive + negative, positive, negative, minus_e)


def pressure(s: SolutionPair, rule: QuadratureRule = DEFAULT_RULE) -> PressureBreakdown:
    """Pressure and its three constituent terms."""
    sp, ss = _sectors(s, rule)
    return _pressure_from(_energy_from(s, sp, ss), sp, ss)


def energy_and_pressure(s: SolutionPair, rule: QuadratureRule = DEFAULT_RULE):
    """Both breakdowns from a single pass over the quadrature nodes."""
    sp, ss = _sectors(s, rule)
    en = _energy_from(s, sp, ss)
    return en, _pressure_from(en, sp, ss)


def conservation_residual(s: SolutionPair, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Sup-norm over time of the total energy (zero for an exact solution)."""
    return energy(s, rule).conservation_residual


def arrow_identity_sides(phi: GridFunction, psi: GridFunction, m: float,
                         rule: QuadratureRule = DEFAULT_RULE, spec: KernelSpec = DEFAULT_SPEC):
    """Both sides of ``m int_0^1 (e^{m rho d^2} phi) <-d^2-> (e^{m(1-rho) d^2} psi)
    = phi e^{m d^2} psi - psi e^{m d^2} phi``."""
    d2_phi = derivative(phi, 2, spec.fd_accuracy)
    d2_psi = derivative(psi, 2, spec.fd_accuracy)
    lhs = np.zeros(phi.grid.n)
    for rho, w in zip(rule.nodes, rule.weights):
        A = apply_heat(phi, m * rho, spec).values
        d2A = apply_heat(d2_phi, m * rho, spec).values
        B = apply_heat(psi, m * (1.0 - rho), spec).values
        d2B = apply_heat(d2_psi, m * (1.0 - rho), spec).values
        lhs += w * (A * d2B - B * d2A)
    lhs *= m
    rhs = phi.values * apply_heat(psi, m, spec).values - psi.values * apply_heat(phi, m, spec).values
    return lhs, rhs


def arrow_identity_check(phi: GridFunction, psi: GridFunction, m: float,
                         rule: QuadratureRule = DEFAULT_RULE, spec: KernelSpec = DEFAULT_SPEC) -> float:
    """Sup-norm mismatch between the two sides of the rho-integral identity."""
    lhs, rhs = arrow_identity_sides(phi, psi, m, rule, spec)
    return float(np.max(np.abs(lhs - rhs)))
