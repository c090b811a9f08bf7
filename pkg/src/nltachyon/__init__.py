"""Rolling solutions and energy/pressure diagnostics for a two-field nonlocal tachyon model."""

__version__ = "0.1.0"

from .grid import Grid, GridFunction, StepProfile, derivative, sup_norm
from .heatkernel import KernelSpec, apply_heat, apply_P, kernel_value
from .model import ModelParams, VacuumPoint, degenerate_c2, effective_potential, potential, vacua
from .solver import SolutionPair, IterationReport, eom_residual, iterate_step, reduced_kink, solve_kink
from .diagnostics import (
    QuadratureRule,
    EnergyBreakdown,
    PressureBreakdown,
    arrow_identity_check,
    conservation_residual,
    energy,
    pressure,
)

__all__ = [
    "Grid", "GridFunction", "StepProfile", "derivative", "sup_norm",
    "KernelSpec", "apply_heat", "apply_P", "kernel_value",
    "ModelParams", "VacuumPoint", "degenerate_c2", "effective_potential", "potential", "vacua",
    "SolutionPair", "IterationReport", "eom_residual", "iterate_step", "reduced_kink", "solve_kink",
    "QuadratureRule", "EnergyBreakdown", "PressureBreakdown", "arrow_identity_check",
    "conservation_residual", "energy", "pressure",
]
