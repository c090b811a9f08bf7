"""Command-line entry point: ``nltachyon <subcommand> [flags]``.

Exit codes: 0 success, 2 bad flags, 3 solver did not converge, 4 I/O or
malformed input file.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import QuadratureRule, arrow_identity_sides, energy_and_pressure
from .files import read_solution, write_json, write_solution, write_table
from .grid import Grid, GridFileError, GridFunction
from .heatkernel import KernelSpec, kernel_value
from .model import LN2, ModelParams, degenerate_c2, effective_potential_grid, vacua
from .solver import CONVERGED, REDUCED_HALF_WIDTH, reduced_kink, solve_kink
from .svgplot import Series, line_chart

log = logging.getLogger("nltachyon")

OUTPUT_ENV = "NLTACHYON_OUTPUT_DIR"
EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_IO = 2, 3, 4


def parse_number(text: str) -> float:
    """Parse ``13/6``, ``0.5``, ``1e-8`` exactly, or ``ln2``."""
    t = text.strip().lower()
    if t in ("ln2", "log2", "ln(2)", "log(2)"):
        return LN2
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from None


@dataclass
class RunConfig:
    c2: float = 13 / 6
    c2_text: str = "13/6"
    k: float = LN2
    m: float = LN2
    t_min: float = -50.0
    t_max: float = 50.0
    dt: float = 0.05
    quad_nodes: int = 32
    tol: float = 1e-8
    residual_tol: float = 1e-6
    max_iters: int = 200
    mixing: float = 1.0
    step_width: float = 1.0
    series_order: int = 4
    truncation_radius: float = 10.0
    output_dir: str = "nltachyon-out"
    svg: bool = False

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.c2, self.k, self.m)

    @property
    def grid(self) -> Grid:
        return Grid.from_range(self.t_min, self.t_max, self.dt)

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(truncation_radius=self.truncation_radius, series_order=self.series_order,
                          step_width=self.step_width)

    @property
    def out(self) -> Path:
        return Path(self.output_dir)


def _config(args, parser) -> RunConfig:
    cfg = RunConfig()
    for name in ("k", "m", "t_min", "t_max", "dt", "quad_nodes", "tol", "residual_tol",
                 "max_iters", "mixing", "step_width", "series_order", "truncation_radius", "svg"):
        if getattr(args, name, None) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "c2", None) is not None:
        cfg.c2, cfg.c2_text = parse_number(args.c2), args.c2
    cfg.output_dir = args.output_dir or os.environ.get(OUTPUT_ENV) or cfg.output_dir
    problems = []
    if not (cfg.k > 0 and cfg.m > 0):
        problems.append("--k and --m must be positive")
    if not cfg.dt > 0:
        problems.append("--dt must be positive")
    if not cfg.t_max > cfg.t_min:
        problems.append("--t-max must exceed --t-min")
    elif (cfg.t_max - cfg.t_min) / cfg.dt < 2:
        problems.append("grid needs at least 3 samples")
    if cfg.quad_nodes < 1:
        problems.append("--quad-nodes must be >= 1")
    if not (cfg.tol > 0 and cfg.residual_tol > 0):
        problems.append("tolerances must be positive")
    if cfg.max_iters < 0:
        problems.append("--max-iters must be >= 0")
    if not 0 < cfg.mixing <= 1:
        problems.append("--mixing must lie in (0, 1]")
    if cfg.step_width < 0:
        problems.append("--step-width must be >= 0")
    if cfg.series_order < 2:
        problems.append("--series-order must be >= 2")
    if cfg.truncation_radius < 6:
        problems.append("--truncation-radius must be >= 6")
    if problems:
        parser.error("; ".join(problems))
    return cfg


def _manifest(cfg: RunConfig, command: str, outputs: list[str], extra=None) -> dict:
    doc = {
        "command": command,
        "version": __version__,
        "config": asdict(cfg),
        "outputs": sorted(outputs),
    }
    if extra:
        doc.update(extra)
    return doc


def _prepare_out(cfg: RunConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


def _emit(payload, args):
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if getattr(args, "json", None):
        Path(args.json).write_text(text + "\n")


# --- subcommands --------------------------------------------------------------


def cmd_vacua(cfg: RunConfig, args) -> int:
    vs = vacua(cfg.params)
    pts = vs.points
    payload = {
        "c2": cfg.c2,
        "c2_text": cfg.c2_text,
        "vacua": [p.as_dict() for p in pts],
        "degenerate_pairs": [
            [a.as_dict(), b.as_dict()]
            for i, a in enumerate(pts)
            for b in pts[i + 1:]
            if abs(a.potential_value - b.potential_value) <= 1e-9
        ],
        "note": vs.note,
    }
    _emit(payload, args)
    return 0


def cmd_degenerate(cfg: RunConfig, args) -> int:
    items = degenerate_c2()
    _emit({"candidates": [d.as_dict() for d in items],
           "distinct": [d.label for d in items if d.distinct]}, args)
    return 0


def cmd_solve(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    sol, report = solve_kink(cfg.params, cfg.grid, tol=cfg.tol, residual_tol=cfg.residual_tol,
                             max_iters=cfg.max_iters, mixing=cfg.mixing, spec=cfg.kernel)
    outputs = ["solution.csv", "solution.json", "report.json", "manifest.json"]
    write_solution(sol, out / "solution.csv", cfg.c2_text)
    rep = report.as_dict()
    rep["tail_mismatch"] = sol.tail_mismatch() if sol.is_finite() else None
    write_json(out / "report.json", rep)
    if cfg.svg and sol.is_finite():
        t = sol.grid.t
        line_chart(out / "solution.svg", [
            Series(t, sol.phi_tilde.values, "phi~", "solid"),
            Series(t, sol.psi_tilde.values, "psi~", "dashed"),
        ], title=f"Rolling solution, c2 = {cfg.c2_text}", ylabel="field")
        outputs.append("solution.svg")
    write_json(out / "manifest.json", _manifest(cfg, "solve", outputs, {"status": report.status}))
    print(f"{report.status}: {report.message}")
    return 0 if report.status == CONVERGED else EXIT_NOT_CONVERGED


def _diagnostics(cfg: RunConfig, args, which: str) -> int:
    out = _prepare_out(cfg)
    sol = read_solution(args.solution)
    rule = QuadratureRule.gauss_legendre(cfg.quad_nodes)
    en, pr = energy_and_pressure(sol, rule)
    t = sol.grid.t
    outputs = []
    if which == "energy":
        write_table(out / "energy.csv", ["t", "E_phi", "E_psi", "E_total"],
                    zip(t, en.e_phi, en.e_psi, en.e_total))
        summary = en.summary()
        write_json(out / "energy_summary.json", summary)
        outputs += ["energy.csv", "energy_summary.json"]
        if cfg.svg:
            line_chart(out / "energy.svg", [
                Series(t, en.e_phi, "E_phi (open)", "solid"),
                Series(t, en.e_psi, "E_psi (closed)", "dashed"),
            ], title="Open and closed string energy", ylabel="energy")
            outputs.append("energy.svg")
        print(f"conservation_residual {summary['conservation_residual']:.6e} "
              f"(relative {summary['relative_residual']:.3e})")
    else:
        write_table(out / "pressure.csv",
                    ["t", "p", "positive_part", "negative_part", "minus_energy_part"],
                    zip(t, pr.p, pr.positive_part, pr.negative_part, pr.minus_energy_part))
        summary = pr.summary()
        write_json(out / "pressure_summary.json", summary)
        outputs += ["pressure.csv", "pressure_summary.json"]
        if cfg.svg:
            line_chart(out / "pressure.svg", [Series(t, pr.p, "p", "solid")],
                       title="Pressure", ylabel="p")
            line_chart(out / "pressure_parts.svg", [
                Series(t, pr.p, "total p", "solid"),
                Series(t, pr.positive_part, "(phi')^2 + (psi')^2", "dashed"),
                Series(t, pr.negative_part, "rho-integral terms", "dashdot"),
            ], title="Pressure constituents", ylabel="p")
            outputs += ["pressure.svg", "pressure_parts.svg"]
        print(f"min_pressure {summary['min_pressure']:.6e} at t={summary['t_min_pressure']:.4g}")
    write_json(out / f"manifest_{which}.json",
               _manifest(cfg, which, outputs + [f"manifest_{which}.json"],
                         {"solution": str(args.solution)}))
    return 0


def cmd_energy(cfg, args):
    return _diagnostics(cfg, args, "energy")


def cmd_pressure(cfg, args):
    return _diagnostics(cfg, args, "pressure")


def cmd_effective(cfg: RunConfig, args) -> int:
    out = _prepare_out(cfg)
    params = cfg.params
    PHI, PSI, V = effective_potential_grid(params)
    write_table(out / "contour.csv", ["phi", "psi", "V_eff"],
                zip(PHI.ravel(), PSI.ravel(), V.ravel()))
    half = args.reduced_half_width
    rk = reduced_kink(params, Grid.from_range(-half, half, cfg.dt))
    write_table(out / "reduced_kink.csv", ["t", "phi_tilde", "psi_tilde"],
                zip(rk.grid.t, rk.phi_tilde, rk.psi_tilde))
    masses = params.effective_masses
    summary = {
        "effective_masses": {"phi": masses[0], "psi": masses[1]},
        "flip_applicable": params.flip_applicable,
        "status": rk.status,
        "residual": rk.residual,
        "newton_steps": rk.newton_steps,
        "tail_ripple": rk.tail_ripple,
        "center": rk.center,
        "message": rk.message,
    }
    write_json(out / "effective.json", summary)
    outputs = ["contour.csv", "reduced_kink.csv", "effective.json", "manifest_effective.json"]
    write_json(out / "manifest_effective.json",
               _manifest(cfg, "effective", outputs, {"reduced_half_width": half}))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_identity(cfg: RunConfig, args) -> int:
    grid = Grid.from_range(-args.half_width, args.half_width, cfg.dt)
    b1, c1, b2, c2 = args.gaussians

    def gauss(b, c):
        return GridFunction(grid, kernel_value(b, grid.t - c), 0.0, 0.0, math.inf)

    rule = QuadratureRule.gauss_legendre(cfg.quad_nodes)
    lhs, rhs = arrow_identity_sides(gauss(b1, c1), gauss(b2, c2), cfg.m, rule, cfg.kernel)
    exact = (kernel_value(b1, grid.t - c1) * kernel_value(b2 + cfg.m, grid.t - c2)
             - kernel_value(b2, grid.t - c2) * kernel_value(b1 + cfg.m, grid.t - c1))
    payload = {
        "m": cfg.m,
        "quad_nodes": cfg.quad_nodes,
        "gaussians": {"b1": b1, "c1": c1, "b2": b2, "c2": c2},
        "lhs_vs_rhs": float(np.max(np.abs(lhs - rhs))),
        "lhs_vs_closed_form": float(np.max(np.abs(lhs - exact))),
    }
    _emit(payload, args)
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nltachyon", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=True, solver=False, quad=False):
        sp.add_argument("--c2", help="coupling, fractions allowed (default 13/6)")
        sp.add_argument("--k", type=parse_number, help="open-string nonlocality (default ln2)")
        sp.add_argument("--m", type=parse_number, help="closed-string nonlocality (default ln2)")
        sp.add_argument("--output-dir", help=f"output directory (env {OUTPUT_ENV})")
        if grid:
            sp.add_argument("--t-min", type=parse_number)
            sp.add_argument("--t-max", type=parse_number)
            sp.add_argument("--dt", type=parse_number)
            sp.add_argument("--step-width", type=parse_number, help="reference-step heat time")
            sp.add_argument("--series-order", type=int)
            sp.add_argument("--truncation-radius", type=parse_number)
        if solver:
            sp.add_argument("--tol", type=parse_number)
            sp.add_argument("--residual-tol", type=parse_number)
            sp.add_argument("--max-iters", type=int)
            sp.add_argument("--mixing", type=parse_number)
        if quad:
            sp.add_argument("--quad-nodes", type=int)
        sp.add_argument("--svg", action="store_true", default=None, help="also write SVG charts")

    sp = sub.add_parser("vacua", help="vacua and potential values for one coupling")
    common(sp, grid=False)
    sp.add_argument("--json", help="also write the JSON document here")
    sp.set_defaults(func=cmd_vacua)

    sp = sub.add_parser("degenerate-c2", help="couplings with equal-energy vacua")
    sp.add_argument("--output-dir")
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_degenerate)

    sp = sub.add_parser("solve", help="rolling solution by fixed-point iteration")
    common(sp, solver=True)
    sp.set_defaults(func=cmd_solve)

    for name, func in (("energy", cmd_energy), ("pressure", cmd_pressure)):
        sp = sub.add_parser(name, help=f"{name} diagnostics of a solution file")
        sp.add_argument("solution", help="solution.csv written by 'solve'")
        common(sp, grid=False, quad=True)
        sp.set_defaults(func=func)

    sp = sub.add_parser("effective", help="effective potential contours and reduced-ODE kink")
    common(sp, grid=False)
    sp.add_argument("--dt", type=parse_number)
    sp.add_argument("--reduced-half-width", type=parse_number, default=REDUCED_HALF_WIDTH)
    sp.set_defaults(func=cmd_effective)

    sp = sub.add_parser("identity-check", help="rho-integral identity on two Gaussians")
    common(sp, quad=True)
    sp.add_argument("--half-width", type=parse_number, default=20.0)
    sp.add_argument("--gaussians", type=parse_number, nargs=4, default=[0.3, -1.0, 0.8, 1.5],
                    metavar=("B1", "C1", "B2", "C2"), help="heat times and centres")
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_identity)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config(args, parser)
    try:
        return args.func(cfg, args)
    except GridFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
