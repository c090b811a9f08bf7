"""Uniform time grids and grid functions with constant asymptotic tails.

A :class:`GridFunction` stores samples on ``t_min + i*dt`` together with the
constant values it takes to the left and right of the sampled window.  The
kink solutions interpolate between different constants, so the tails are
carried explicitly instead of being assumed zero.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

#: Number of samples at each end compared against the tail constants.
TAIL_SAMPLES = 3
#: Default tolerance for the edge-vs-tail check.
DEFAULT_TAIL_TOL = 1e-3


class TailMismatchError(ValueError):
    """Edge samples of a grid function disagree with its declared tails."""


class GridFileError(ValueError):
    """A grid-function file could not be parsed."""


@dataclass(frozen=True)
class Grid:
    t_min: float
    dt: float
    n: int

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"grid step must be positive, got dt={self.dt}")
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 samples, got n={self.n}")

    @classmethod
    def from_range(cls, t_min: float, t_max: float, dt: float) -> "Grid":
        """Grid covering ``[t_min, t_max]``; ``t_max`` is rounded to the nearest sample."""
        if t_max <= t_min:
            raise ValueError("t_max must exceed t_min")
        n = int(round((t_max - t_min) / dt)) + 1
        return cls(float(t_min), float(dt), n)

    @property
    def t(self) -> np.ndarray:
        return self.t_min + self.dt * np.arange(self.n)

    @property
    def t_max(self) -> float:
        return self.t_min + (self.n - 1) * self.dt

    @property
    def midpoint(self) -> float:
        return self.t_min + 0.5 * (self.n - 1) * self.dt


def _as_values(values, n):
    arr = np.array(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"expected {n} samples, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real function of time sampled on a :class:`Grid`.

    Outside the sampled window the function equals ``tail_left`` (for
    ``t < t_min``) or ``tail_right`` (for ``t > t_max``).  On construction the
    first and last :data:`TAIL_SAMPLES` samples are compared with the tails and
    :class:`TailMismatchError` is raised if they differ by more than
    ``tail_tol``.  Pass ``tail_tol=math.inf`` for profiles that are only
    meaningful inside the window (test functions, intermediate iterates).
    """

    grid: Grid
    values: np.ndarray
    tail_left: float = 0.0
    tail_right: float = 0.0
    tail_tol: float = field(default=DEFAULT_TAIL_TOL)

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.values, self.grid.n))
        object.__setattr__(self, "tail_left", float(self.tail_left))
        object.__setattr__(self, "tail_right", float(self.tail_right))
        if math.isfinite(self.tail_tol):
            mismatch = self.tail_mismatch()
            if mismatch > self.tail_tol:
                raise TailMismatchError(
                    f"edge samples differ from tails by {mismatch:.3e} > {self.tail_tol:.3e}"
                )

    @classmethod
    def constant(cls, grid: Grid, c: float, **kw) -> "GridFunction":
        return cls(grid, np.full(grid.n, float(c)), c, c, **kw)

    @classmethod
    def from_callable(cls, grid: Grid, func, tail_left=None, tail_right=None, **kw):
        """Sample ``func`` on the grid; tails default to the end samples."""
        vals = np.asarray(func(grid.t), dtype=float) * np.ones(grid.n)
        tl = vals[0] if tail_left is None else tail_left
        tr = vals[-1] if tail_right is None else tail_right
        return cls(grid, vals, tl, tr, **kw)

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    @property
    def jump(self) -> float:
        return self.tail_right - self.tail_left

    def tail_mismatch(self, samples: int = TAIL_SAMPLES) -> float:
        v = self.values
        left = np.max(np.abs(v[:samples] - self.tail_left))
        right = np.max(np.abs(v[-samples:] - self.tail_right))
        return float(max(left, right))

    def replace(self, values=None, tail_left=None, tail_right=None, tail_tol=None):
        return GridFunction(
            self.grid,
            self.values if values is None else values,
            self.tail_left if tail_left is None else tail_left,
            self.tail_right if tail_right is None else tail_right,
            self.tail_tol if tail_tol is None else tail_tol,
        )

    def __call__(self, t):
        """Evaluate by linear interpolation inside the window, tails outside."""
        return np.interp(t, self.grid.t, self.values, left=self.tail_left, right=self.tail_right)

    # Arithmetic acts on samples and tails alike.  The result never re-checks
    # tails (tolerance is the looser of the two operands).

    def _binary(self, other, op):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise ValueError("grid functions live on different grids")
            return GridFunction(
                self.grid,
                op(self.values, other.values),
                op(self.tail_left, other.tail_left),
                op(self.tail_right, other.tail_right),
                max(self.tail_tol, other.tail_tol),
            )
        c = float(other)
        return GridFunction(
            self.grid,
            op(self.values, c),
            op(self.tail_left, c),
            op(self.tail_right, c),
            self.tail_tol,
        )

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFunction):
            raise TypeError("division by a grid function is not supported")
        return self._binary(other, lambda a, b: a / b)

    def __neg__(self):
        return self * -1.0

    def __pow__(self, p):
        return GridFunction(
            self.grid, self.values**p, self.tail_left**p, self.tail_right**p, self.tail_tol
        )


@dataclass(frozen=True)
class StepProfile:
    """``amplitude * theta(t - at)``; the value exactly at the jump is the midpoint."""

    amplitude: float
    at: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.where(t > self.at, 1.0, np.where(t < self.at, 0.0, 0.5))

    def sample(self, grid: Grid, base: float = 0.0, tail_tol: float = DEFAULT_TAIL_TOL):
        return GridFunction(grid, base + self(grid.t), base, base + self.amplitude, tail_tol)


# --- finite differences -------------------------------------------------------


def fd_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights (unit spacing) for the ``order``-th derivative."""
    s = np.asarray(offsets, dtype=float)
    p = np.arange(len(s))
    A = s[None, :] ** p[:, None]
    rhs = np.zeros(len(s))
    rhs[order] = math.factorial(order)
    return np.linalg.solve(A, rhs)


def _central_halfwidth(order, accuracy):
    return accuracy // 2 + (order - 1) // 2


def derivative_array(values: np.ndarray, dt: float, order: int = 1, accuracy: int = 4) -> np.ndarray:
    """Derivative of uniformly spaced samples.

    Central differences of the given (even) accuracy on the interior, one-sided
    stencils of the same accuracy near the edges.
    """
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    if accuracy < 2 or accuracy % 2:
        raise ValueError("accuracy must be a positive even integer")
    v = np.asarray(values, dtype=float)
    n = len(v)
    h = _central_halfwidth(order, accuracy)
    width = order + accuracy
    if n < width:
        raise ValueError(f"need at least {width} samples for this stencil")
    out = np.empty(n)
    offsets = np.arange(-h, h + 1)
    w = fd_weights(offsets, order)
    acc = np.zeros(n - 2 * h)
    for wj, sj in zip(w, offsets):
        acc += wj * v[h + sj : n - h + sj]
    out[h : n - h] = acc
    for i in range(h):
        off = np.arange(-i, -i + width)
        out[i] = fd_weights(off, order) @ v[i + off]
        j = n - 1 - i
        off = -off
        out[j] = fd_weights(off, order) @ v[j + off]
    return out / dt**order


def derivative(f: GridFunction, order: int = 1, accuracy: int = 4) -> GridFunction:
    """Time derivative of ``f``; tails of the result are zero."""
    d = derivative_array(f.values, f.grid.dt, order, accuracy)
    return GridFunction(f.grid, d, 0.0, 0.0, math.inf)


def sup_norm(f: GridFunction) -> float:
    return float(max(np.max(np.abs(f.values)), abs(f.tail_left), abs(f.tail_right)))


# --- files -------------------------------------------------------------------


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_csv(f: GridFunction, path) -> None:
    """Write ``t,value`` rows plus a JSON sidecar with tails and grid geometry."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for ti, vi in zip(f.grid.t, f.values):
            w.writerow([repr(float(ti)), repr(float(vi))])
    meta = {
        "tail_left": f.tail_left,
        "tail_right": f.tail_right,
        "dt": f.grid.dt,
        "t_min": f.grid.t_min,
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_csv(path, tail_tol: float = DEFAULT_TAIL_TOL) -> GridFunction:
    path = Path(path)
    try:
        meta = json.loads(sidecar_path(path).read_text())
        dt, t_min = float(meta["dt"]), float(meta["t_min"])
        tl, tr = float(meta["tail_left"]), float(meta["tail_right"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise GridFileError(f"{sidecar_path(path)}: bad sidecar ({exc})") from exc
    vals = []
    with path.open(newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != ["t", "value"]:
            raise GridFileError(f"{path}: expected header 't,value', got {header}")
        for lineno, row in enumerate(rows, start=2):
            try:
                t_i, v_i = (float(x) for x in row)
            except ValueError as exc:
                raise GridFileError(f"{path}:{lineno}: malformed row {row!r}") from exc
            expected = t_min + (lineno - 2) * dt
            if abs(t_i - expected) > 1e-9 * max(1.0, abs(expected)):
                raise GridFileError(f"{path}:{lineno}: t={t_i} off the uniform grid")
            vals.append(v_i)
    return GridFunction(Grid(t_min, dt, len(vals)), vals, tl, tr, tail_tol)
