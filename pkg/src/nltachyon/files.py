"""Reading and writing solutions, breakdown tables and JSON documents."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .grid import Grid, GridFileError, GridFunction
from .heatkernel import KernelSpec
from .model import ModelParams
from .solver import SolutionPair

SOLUTION_COLUMNS = ["t", "phi_tilde", "psi_tilde", "phi", "psi"]


def _fmt(x) -> str:
    return repr(float(x))


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_table(path, columns: list[str], rows) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_solution(s: SolutionPair, path, c2_text: str | None = None) -> Path:
    """CSV with the tilded and untilded fields plus a JSON sidecar.

    The sidecar holds everything needed to rebuild the :class:`SolutionPair`:
    grid geometry, tails of the tilded fields, model constants and kernel
    settings.
    """
    path = Path(path)
    g = s.grid
    write_table(path, SOLUTION_COLUMNS,
                zip(g.t, s.phi_tilde.values, s.psi_tilde.values, s.phi.values, s.psi.values))
    meta = {
        "t_min": g.t_min,
        "dt": g.dt,
        "n": g.n,
        "params": {"c2": s.params.c2, "c2_text": c2_text or _fmt(s.params.c2),
                   "k": s.params.k, "m": s.params.m},
        "tails": {
            "phi_tilde": [s.phi_tilde.tail_left, s.phi_tilde.tail_right],
            "psi_tilde": [s.psi_tilde.tail_left, s.psi_tilde.tail_right],
        },
        "kernel": asdict(s.spec),
    }
    write_json(path.with_suffix(".json"), meta)
    return path


def read_solution(path, tail_tol: float = 1e-3) -> SolutionPair:
    """Inverse of :func:`write_solution`; raises :class:`GridFileError` on bad input."""
    path = Path(path)
    side = path.with_suffix(".json")
    try:
        meta = json.loads(side.read_text())
        grid = Grid(float(meta["t_min"]), float(meta["dt"]), int(meta["n"]))
        params = ModelParams(float(meta["params"]["c2"]), float(meta["params"]["k"]),
                             float(meta["params"]["m"]))
        tails = meta["tails"]
        spec = KernelSpec(**meta.get("kernel", {}))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise GridFileError(f"{side}: bad solution sidecar ({exc})") from exc

    ph, ps = [], []
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise GridFileError(f"{path}: {exc}") from exc
    with fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != SOLUTION_COLUMNS:
            raise GridFileError(f"{path}:1: expected header {','.join(SOLUTION_COLUMNS)}, got {header}")
        for lineno, row in enumerate(rows, start=2):
            try:
                if len(row) != len(SOLUTION_COLUMNS):
                    raise ValueError("wrong column count")
                t_i, a, b = float(row[0]), float(row[1]), float(row[2])
                if not (math.isfinite(a) and math.isfinite(b)):
                    raise ValueError("non-finite value")
            except ValueError as exc:
                raise GridFileError(f"{path}:{lineno}: malformed row {row!r} ({exc})") from exc
            expected = grid.t_min + (lineno - 2) * grid.dt
            if abs(t_i - expected) > 1e-9 * max(1.0, abs(expected)):
                raise GridFileError(f"{path}:{lineno}: t={t_i} is off the uniform grid")
            ph.append(a)
            ps.append(b)
    if len(ph) != grid.n:
        raise GridFileError(f"{path}: {len(ph)} rows but sidecar declares n={grid.n}")
    try:
        phi_t = GridFunction(grid, np.array(ph), *tails["phi_tilde"], tail_tol=tail_tol)
        psi_t = GridFunction(grid, np.array(ps), *tails["psi_tilde"], tail_tol=tail_tol)
    except ValueError as exc:
        raise GridFileError(f"{path}: {exc}") from exc
    return SolutionPair(phi_t, psi_t, params, spec)
