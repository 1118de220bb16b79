"""Grid evaluation of observables over one or two parameter axes."""

from __future__ import annotations

import csv
import io
import itertools
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import SystemParams
from .scattering import Direction, scatter_channels, scatter_markovian
from .spectral import edge_decay_rate, spectrum

AXIS_NAMES = ("Gamma_f", "phi", "J0", "delta")
SPACINGS = ("linear", "log", "signed-log")
OBSERVABLES = (
    "T", "R", "eta", "TR", "lnT", "lnR", "lnTR", "cond", "chi", "delta_chi", "Gamma_edge",
    "Im_xi_edge_r", "Im_xi_bulk_r", "Im_xi_edge_t", "Im_xi_bulk_t",
    "Re_xi_edge_r", "Re_xi_bulk_r", "Re_xi_edge_t", "Re_xi_bulk_t",
)


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.min, self.max, self.count)
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        # mirror a log grid on [min, max] to negative values; odd counts add 0
        half = self.count // 2
        pos = np.geomspace(self.min, self.max, half)
        mid = [0.0] if self.count % 2 else []
        return np.concatenate([-pos[::-1], mid, pos])


@dataclass
class SweepSpec:
    axes: list[Axis]
    params: SystemParams = field(default_factory=SystemParams)
    observables: list[str] = field(default_factory=lambda: ["T", "R", "eta"])
    direction: Direction = Direction.LEFT
    delta: float = 0.0

    def violations(self) -> list[str]:
        out = []
        if not 1 <= len(self.axes) <= 2:
            out.append(f"a sweep needs 1 or 2 axes, got {len(self.axes)}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            out.append(f"axis names must be distinct, got {names}")
        for a in self.axes:
            if a.name not in AXIS_NAMES:
                out.append(f"unknown axis {a.name!r}; choose from {AXIS_NAMES}")
            if a.spacing not in SPACINGS:
                out.append(f"axis {a.name}: unknown spacing {a.spacing!r}")
            if a.count < 2:
                out.append(f"axis {a.name}: count must be >= 2, got {a.count}")
            if a.spacing in ("log", "signed-log") and not (0 < a.min < a.max):
                out.append(f"axis {a.name}: {a.spacing} spacing needs 0 < min < max")
        for o in self.observables:
            if o not in OBSERVABLES:
                out.append(f"unknown observable {o!r}")
        return out

    def validate(self) -> None:
        problems = self.violations()
        if problems:
            raise ValueError("; ".join(problems))


@dataclass
class Table:
    columns: list[str]
    rows: list[list]

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)

    def to_csv(self, fh=None) -> str | None:
        own = fh is None
        fh = io.StringIO() if own else fh
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return fh.getvalue() if own else None


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _evaluate_cell(args):
    params, delta, direction, observables = args
    vals = {}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            vals = evaluate_observables(params, delta, direction, observables)
        err = ""
    except Exception as exc:  # recorded per cell, never aborts the sweep
        err = f"{type(exc).__name__}: {exc}"
    return [vals.get(o, math.nan) for o in observables] + [err]


def evaluate_observables(params: SystemParams, delta: float, direction, observables) -> dict:
    out = {}
    need_scatter = {"T", "R", "eta", "TR", "lnT", "lnR", "lnTR", "cond", "chi"} & set(observables)
    if need_scatter:
        res = scatter_markovian(params, delta, direction, allow_singular=True)
        T, R = res.T, res.R
        out.update(T=T, R=R, eta=res.eta, TR=T + R, lnT=_log(T), lnR=_log(R), lnTR=_log(T + R),
                   cond=res.cond, chi=_log(R))
    if "delta_chi" in observables:
        from .analysis import delta_chi

        out["delta_chi"] = delta_chi(params, params.Gamma_f, direction, override=True) \
            if delta == 0.0 else math.nan
    if "Gamma_edge" in observables:
        out["Gamma_edge"] = edge_decay_rate(params)
    if any("xi" in o for o in observables):
        ch = scatter_channels(params, delta, direction, modes=spectrum(params.replace(Gamma_f=0.0)))
        for part, z in (("xi_edge_r", ch.xi_edge_r), ("xi_bulk_r", ch.xi_bulk_r),
                        ("xi_edge_t", ch.xi_edge_t), ("xi_bulk_t", ch.xi_bulk_t)):
            out["Im_" + part] = z.imag
            out["Re_" + part] = z.real
    return out


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _cell_params(spec: SweepSpec, point: dict) -> tuple[SystemParams, float]:
    changes = {k: float(v) for k, v in point.items() if k != "delta"}
    p = spec.params.replace(**changes) if changes else spec.params
    return p, float(point.get("delta", spec.delta))


def sweep(spec: SweepSpec, workers: int = 1, chunksize: int = 64) -> Table:
    """Evaluate ``spec.observables`` on the axis grid.

    Rows follow ``itertools.product`` order of the axes (last axis fastest)
    regardless of ``workers``; failures go to the ``error`` column.
    """
    spec.validate()
    grids = [a.values() for a in spec.axes]
    names = [a.name for a in spec.axes]
    columns = names + list(spec.observables) + ["error"]
    if not spec.observables:
        return Table(columns=names, rows=[])
    points = [dict(zip(names, combo)) for combo in itertools.product(*grids)]
    tasks = []
    for pt in points:
        try:
            p, delta = _cell_params(spec, pt)
            tasks.append((p, delta, spec.direction, tuple(spec.observables)))
        except ValueError as exc:
            tasks.append(exc)

    results: list = [None] * len(tasks)
    good = [i for i, t in enumerate(tasks) if not isinstance(t, Exception)]
    for i, t in enumerate(tasks):
        if isinstance(t, Exception):
            results[i] = [math.nan] * len(spec.observables) + [f"ValueError: {t}"]
    if workers > 1 and len(good) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, row in zip(good, pool.map(_evaluate_cell, [tasks[i] for i in good],
                                             chunksize=chunksize)):
                results[i] = row
    else:
        for i in good:
            results[i] = _evaluate_cell(tasks[i])
    rows = [[float(pt[n]) for n in names] + res for pt, res in zip(points, results)]
    return Table(columns=columns, rows=rows)
