"""Nonlocal operators ``exp(a d^2/dt^2)`` and ``(-d^2 + r) exp(a d^2/dt^2)``.

Both act by convolution with the Gaussian heat kernel.  A grid function is
split as

    f = tail_left + jump * S_b(t - t_jump) + g,

where ``S_b`` is a reference step (a sharp Heaviside step for ``b = 0``, an
error-function ramp of heat time ``b`` otherwise) whose image under the
operator is known in closed form, and ``g`` decays at both ends of the
window.  Only ``g`` is convolved numerically (trapezoidal sums, which are
spectrally accurate for the Gaussian).  Constants are therefore reproduced
exactly, and distinct left/right limits never meet an artificial boundary.

Below ``small_a_threshold`` the kernel is not resolved by the grid and the
truncated Taylor series ``sum a^n f^(2n) / n!`` is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .grid import GridFunction, derivative


@dataclass(frozen=True)
class KernelSpec:
    """Numerical settings shared by the heat-type operators.

    truncation_radius
        Kernel support, in units of ``sqrt(a)``.
    small_a_threshold
        Heat times below this use the series path.  ``None`` means ``dt**2``,
        i.e. the kernel width ``2 sqrt(a)`` is below ``2 dt``.
    series_order
        Highest power of ``a`` kept in the series path.
    step_width
        Heat time ``b`` of the reference step used for the tail split.  ``0``
        is exact for sampled Heaviside data, a positive value keeps the
        remainder smooth for smooth data.
    jump_at
        Location of the reference step; ``None`` means the grid midpoint.
    fd_accuracy
        Accuracy order of the finite differences used by the series path.
    """

    truncation_radius: float = 10.0
    small_a_threshold: float | None = None
    series_order: int = 4
    step_width: float = 1.0
    jump_at: float | None = None
    fd_accuracy: int = 4

    def __post_init__(self):
        if self.truncation_radius < 6:
            raise ValueError("truncation_radius must be >= 6")
        if self.series_order < 2:
            raise ValueError("series_order must be >= 2")
        if self.step_width < 0:
            raise ValueError("step_width must be >= 0")
        if self.small_a_threshold is not None and self.small_a_threshold < 0:
            raise ValueError("small_a_threshold must be >= 0")

    def threshold(self, dt: float) -> float:
        return dt * dt if self.small_a_threshold is None else self.small_a_threshold


DEFAULT_SPEC = KernelSpec()


def kernel_value(a, x):
    """Gaussian heat kernel ``exp(-x^2/4a) / sqrt(4 pi a)``."""
    if not np.all(np.asarray(a) > 0):
        raise ValueError("kernel undefined for non-positive a")
    x = np.asarray(x, dtype=float)
    return np.exp(-x * x / (4.0 * a)) / np.sqrt(4.0 * math.pi * a)


def kernel_d1(a, x):
    """First derivative of the heat kernel in ``x``."""
    x = np.asarray(x, dtype=float)
    return -x / (2.0 * a) * kernel_value(a, x)


def kernel_d2(a, x):
    """Second derivative of the heat kernel in ``x``."""
    x = np.asarray(x, dtype=float)
    return (x * x / (4.0 * a * a) - 1.0 / (2.0 * a)) * kernel_value(a, x)


def smooth_step(c, x):
    """``exp(c d^2) theta`` evaluated at ``x``: ``(1 + erf(x / 2 sqrt(c))) / 2``."""
    x = np.asarray(x, dtype=float)
    if c == 0:
        return np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))
    return 0.5 * (1.0 + erf(x / (2.0 * math.sqrt(c))))


def _split(f: GridFunction, spec: KernelSpec):
    t_jump = f.grid.midpoint if spec.jump_at is None else spec.jump_at
    x = f.grid.t - t_jump
    g = f.values - f.tail_left - f.jump * smooth_step(spec.step_width, x)
    return x, g


def _convolve(g: np.ndarray, kern, a: float, dt: float, radius: float) -> np.ndarray:
    # g is zero outside the window; trapezoid weights are uniform there.
    half = int(math.ceil(radius * math.sqrt(a) / dt))
    taps = kern(a, dt * np.arange(-half, half + 1))
    full = np.convolve(g, taps) * dt
    return full[half : half + len(g)]


def _series(f: GridFunction, a: float, spec: KernelSpec) -> GridFunction:
    out = f.values.copy()
    # shifting by the left tail makes constants exact (stencil sums are only ~0)
    term = f - f.tail_left
    for j in range(1, spec.series_order + 1):
        term = derivative(term, 2, spec.fd_accuracy) * (a / j)
        out = out + term.values
    return f.replace(values=out)


def apply_heat(f: GridFunction, a: float, spec: KernelSpec = DEFAULT_SPEC) -> GridFunction:
    """``exp(a d^2/dt^2) f`` for ``a >= 0``."""
    if a < 0:
        raise ValueError("heat operator requires a >= 0 (anti-diffusion is ill-posed)")
    if a == 0:
        return f
    if a < spec.threshold(f.grid.dt):
        return _series(f, a, spec)
    x, g = _split(f, spec)
    c = a + spec.step_width
    smooth = _convolve(g, kernel_value, a, f.grid.dt, spec.truncation_radius)
    vals = f.tail_left + f.jump * smooth_step(c, x) + smooth
    return f.replace(values=vals)


def apply_P(f: GridFunction, r: float, a: float, spec: KernelSpec = DEFAULT_SPEC) -> GridFunction:
    """``(-d^2/dt^2 + r) exp(a d^2/dt^2) f`` for ``a > 0``.

    The remainder is convolved with ``-K_a'' + r K_a``; the reference step
    goes through analytically and constant tails map to ``r * tail``.
    """
    if not a > 0:
        raise ValueError("P operator requires a > 0")
    if a < spec.threshold(f.grid.dt):
        h = _series(f, a, spec)
        vals = r * h.values - derivative(h - h.tail_left, 2, spec.fd_accuracy).values
        return h.replace(values=vals, tail_left=r * h.tail_left, tail_right=r * h.tail_right)
    x, g = _split(f, spec)
    c = a + spec.step_width

    def taps(a_, s):
        return r * kernel_value(a_, s) - kernel_d2(a_, s)

    smooth = _convolve(g, taps, a, f.grid.dt, spec.truncation_radius)
    step = -kernel_d1(c, x) + r * smooth_step(c, x)
    vals = r * f.tail_left + f.jump * step + smooth
    return GridFunction(f.grid, vals, r * f.tail_left, r * f.tail_right, f.tail_tol)
