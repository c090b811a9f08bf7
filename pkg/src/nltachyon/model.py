"""Model constants, potentials and vacua of the two-field tachyon toy model.

Vacua follow from eliminating the closed-string field at constant
configurations, ``psi = (phi^2 - c2 phi) / 4``, which leaves

    phi * (2 phi^2 + (4 - 3 c2) phi + c2^2 - 4) = 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ModelParams:
    c2: float = 13 / 6
    k: float = LN2
    m: float = LN2

    def __post_init__(self):
        if not (self.k > 0 and self.m > 0):
            raise ValueError("nonlocality scales k and m must be positive")
        object.__setattr__(self, "c2", float(self.c2))

    @property
    def flip_applicable(self) -> bool:
        """Positive effective masses in the two-derivative truncation."""
        return self.k > 0.5 and self.m > 0.125

    @property
    def effective_masses(self) -> tuple[float, float]:
        return 2 * self.k - 1, 8 * self.m - 1


@dataclass(frozen=True)
class VacuumPoint:
    phi: float
    psi: float
    potential_value: float
    multiplicity: int = 1

    def as_dict(self):
        return {
            "phi": self.phi,
            "psi": self.psi,
            "potential": self.potential_value,
            "multiplicity": self.multiplicity,
        }


@dataclass
class VacuumSet:
    """Real vacua for one coupling, plus a note if complex roots were dropped."""

    c2: float
    points: list[VacuumPoint]
    note: str = ""

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def phis(self):
        return [p.phi for p in self.points]


def psi_of_phi(phi, c2):
    return (phi * phi - c2 * phi) / 4.0


def potential(phi, params_or_c2) -> float:
    """Potential after eliminating psi: ``phi^4/8 + (1/3 - c2/4) phi^3 + (c2^2/8 - 1/2) phi^2``."""
    c2 = getattr(params_or_c2, "c2", params_or_c2)
    return phi**4 / 8 + (1 / 3 - c2 / 4) * phi**3 + (c2 * c2 / 8 - 0.5) * phi**2


def effective_potential(phi, psi, params_or_c2):
    """Potential of the two-derivative (mechanical) truncation in tilded fields."""
    c2 = getattr(params_or_c2, "c2", params_or_c2)
    return 0.5 * phi**2 + 2 * psi**2 - phi**3 / 3 + c2 * phi * psi - phi**2 * psi


def effective_gradient(phi, psi, params_or_c2):
    c2 = getattr(params_or_c2, "c2", params_or_c2)
    d_phi = phi - phi**2 + c2 * psi - 2 * phi * psi
    d_psi = 4 * psi + c2 * phi - phi**2
    return d_phi, d_psi


def effective_potential_grid(params, phi_range=(-1.5, 1.5), psi_range=(-1.0, 1.0), shape=(121, 81)):
    """Sample the effective potential on a rectangle for contour plots.

    Returns ``(PHI, PSI, V)`` as 2-D arrays with ``indexing='ij'``.
    """
    phis = np.linspace(*phi_range, shape[0])
    psis = np.linspace(*psi_range, shape[1])
    PHI, PSI = np.meshgrid(phis, psis, indexing="ij")
    return PHI, PSI, effective_potential(PHI, PSI, params)


def constant_eom_residual(phi: float, psi: float, c2: float) -> tuple[float, float]:
    """Residuals of the local field equations at a constant configuration.

    With every derivative zero the heat operators act as the identity, so the
    equations reduce to ``phi - phi^2 + c2 psi - 2 phi psi`` and
    ``4 psi + c2 phi - phi^2``.
    """
    return (
        phi - phi * phi + c2 * psi - 2 * phi * psi,
        4 * psi + c2 * phi - phi * phi,
    )


def _quadratic_roots(c2):
    # 2 x^2 + (4 - 3 c2) x + c2^2 - 4
    b = 4 - 3 * c2
    disc = b * b - 8 * (c2 * c2 - 4)  # = c2^2 - 24 c2 + 48
    if abs(disc) <= 1e-12 * max(1.0, c2 * c2):
        disc = 0.0
    if disc < 0:
        return None, disc
    s = math.sqrt(disc)
    return ((-b - s) / 4, (-b + s) / 4), disc


def vacua(params) -> VacuumSet:
    """All real vacua ``(phi, psi)`` with their potential values.

    Coincident roots are merged and reported with their multiplicity.
    """
    c2 = getattr(params, "c2", params)
    roots, disc = _quadratic_roots(c2)
    note = ""
    phis = [0.0]
    if roots is None:
        note = f"quadratic factor has complex roots (discriminant {disc:.6g}); omitted"
    else:
        phis.extend(roots)
    merged: list[list] = []
    for x in sorted(phis):
        if merged and abs(merged[-1][0] - x) <= 1e-12 * max(1.0, abs(x)):
            merged[-1][1] += 1
        else:
            merged.append([x, 1])
    points = []
    for x, mult in merged:
        x = 0.0 if x == 0 else x
        points.append(VacuumPoint(x, psi_of_phi(x, c2), potential(x, c2), mult))
    return VacuumSet(c2, points, note)


def degenerate_pair(params, tol: float = 1e-9):
    """The two distinct vacua with equal potential, ordered by phi.

    Raises ``ValueError`` when the coupling has no such pair.
    """
    pts = vacua(params).points
    pairs = [
        (a, b)
        for a, b in itertools.combinations(pts, 2)
        if abs(a.potential_value - b.potential_value) <= tol
    ]
    if len(pairs) != 1:
        c2 = getattr(params, "c2", params)
        raise ValueError(f"c2={c2:g} has {len(pairs)} degenerate vacuum pairs, expected 1")
    return pairs[0]


@dataclass
class DegenerateCoupling:
    c2: float
    label: str
    distinct: bool
    vacua: list[VacuumPoint] = field(default_factory=list)

    def as_dict(self):
        return {
            "c2": self.c2,
            "label": self.label,
            "distinct_degenerate": self.distinct,
            "vacua": [v.as_dict() for v in self.vacua],
        }


def _exact_candidates():
    """Exact couplings where ``V(phi_i) = V(phi_j)`` for some pair of vacuum branches.

    A nonzero branch ``x`` is a root of ``q(x) = 2x^2 + (4 - 3c)x + c^2 - 4``.
    ``V(x_root) = V(0)`` is the vanishing of the resultant of V and q in x.
    For the two nonzero branches, ``V(x+) - V(x-)`` is ``alpha (x+ - x-)``
    where ``alpha x + beta`` is V reduced modulo q, so the condition is
    ``alpha = 0`` or a vanishing discriminant.
    """
    import sympy as sp

    c, x = sp.symbols("c x")
    q = 2 * x**2 + (4 - 3 * c) * x + c**2 - 4
    V = x**4 / 8 + (sp.Rational(1, 3) - c / 4) * x**3 + (c**2 / 8 - sp.Rational(1, 2)) * x**2
    alpha = sp.Poly(sp.rem(V, q, x), x).coeff_monomial(x)
    conditions = [sp.resultant(V, q, x), alpha, sp.discriminant(q, x)]
    roots = set()
    for cond in conditions:
        roots.update(sp.real_roots(sp.Poly(sp.expand(cond), c)))
    return sorted(roots, key=float), (c, x, q, V)


def _distinct_exact(c_val, c, x, q, V):
    import sympy as sp

    branches = {sp.Integer(0)} | set(sp.solve(q.subs(c, c_val), x))
    real = [sp.nsimplify(r) for r in branches if sp.im(r) == 0]
    for a, b in itertools.combinations(real, 2):
        if sp.simplify(a - b) != 0 and sp.simplify(V.subs({c: c_val, x: a}) - V.subs({c: c_val, x: b})) == 0:
            return True
    return False


def degenerate_c2() -> list[DegenerateCoupling]:
    """Couplings for which two vacuum branches have equal potential.

    Candidates come from exact polynomial conditions (sympy).  Each is
    flagged ``distinct`` when two *different* vacua share the potential
    value; couplings where branches merge into one vacuum are not.
    """
    import sympy as sp

    roots, (c, x, q, V) = _exact_candidates()
    out = []
    for r in roots:
        r = sp.nsimplify(sp.radsimp(r))
        distinct = _distinct_exact(r, c, x, q, V)
        val = float(r)
        out.append(DegenerateCoupling(val, str(r), distinct, vacua(val).points))
    return out
