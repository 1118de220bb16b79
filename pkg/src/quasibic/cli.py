"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 singularity (lasing threshold) without ``--allow-singular``.
Errors are reported on stderr as a single JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, build_config, load_file
from .scattering import Direction, SingularityError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SINGULAR = 0, 2, 3, 4

COMMANDS = ("spectrum", "scatter", "dynamics", "sweep", "critical", "figures", "selftest")

# flag dest -> (section, key)
FLAG_MAP = {
    "N": ("system", "N"), "J0": ("system", "J0"), "phi": ("system", "phi"),
    "gamma": ("system", "Gamma"), "gamma_f": ("system", "Gamma_f"),
    "theta": ("system", "theta"), "omega0": ("system", "omega0"),
    "epsilon": ("system", "epsilon"),
    "out": ("run", "out"), "workers": ("run", "workers"), "seed": ("run", "seed"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError([message])


def _system_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("system (units of Gamma)")
    g.add_argument("--config", help="INI config file or JSON run manifest")
    g.add_argument("--N", help="number of atoms (odd)")
    g.add_argument("--J0", help="coupling scale")
    g.add_argument("--phi", help="dimerization angle, radians or e.g. 0.2pi")
    g.add_argument("--gamma", help="waveguide decay rate (unit, default 1)")
    g.add_argument("--gamma-f", dest="gamma_f", help="free-space loss (>0) or gain (<0)")
    g.add_argument("--theta", help="propagation phase k0 d, radians or e.g. 1.5pi")
    g.add_argument("--omega0", help="atomic frequency (exact solver only)")
    g.add_argument("--epsilon", help="drive amplitude")
    r = p.add_argument_group("run")
    r.add_argument("--out", help="output directory (default $QUASIBIC_OUT or ./quasibic_out)")
    r.add_argument("--workers", help="worker processes for sweeps")
    r.add_argument("--seed", help="reserved; solvers are deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasibic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", help="eigenmodes of the effective Hamiltonian")
    _system_flags(p)

    p = sub.add_parser("scatter", help="steady-state transmission and reflection")
    _system_flags(p)
    p.add_argument("--delta", help="single detuning")
    p.add_argument("--delta-range", nargs=3, metavar=("MIN", "MAX", "COUNT"))
    p.add_argument("--direction", help="left | right")
    p.add_argument("--solver", help="markovian | exact")
    p.add_argument("--allow-singular", action="store_const", const="true", default=None)

    p = sub.add_parser("dynamics", help="Gaussian single-photon pulse in the time domain")
    _system_flags(p)
    for flag in ("sigma-t", "t-center", "delta-c", "plateau", "t-max", "dt-out",
                 "x-min", "x-max", "nx", "direction"):
        p.add_argument(f"--{flag}")

    p = sub.add_parser("sweep", help="grid evaluation of observables")
    _system_flags(p)
    p.add_argument("--axis", action="append", help="name:min:max:count[:spacing] (repeatable)")
    p.add_argument("--observables", help="comma-separated, e.g. T,R,eta")
    p.add_argument("--direction")
    p.add_argument("--delta")

    p = sub.add_parser("critical", help="critical-coupling and time-reversal summary")
    _system_flags(p)

    p = sub.add_parser("figures", help="plot-ready datasets (fig1b ... fig4d, or all)")
    _system_flags(p)
    p.add_argument("names", nargs="*", help="figure ids or 'all'")

    p = sub.add_parser("selftest", help="run the invariant checks")
    _system_flags(p)
    return parser


def _flag_values(args: argparse.Namespace) -> dict[str, dict]:
    vals: dict[str, dict] = {}
    for dest, (sec, key) in FLAG_MAP.items():
        v = getattr(args, dest, None)
        if v is not None:
            vals.setdefault(sec, {})[key] = v
    cmd = args.command
    if cmd == "scatter":
        s = vals.setdefault("scatter", {})
        s["delta"] = args.delta
        if args.delta_range:
            s["delta_min"], s["delta_max"], s["delta_count"] = args.delta_range
        s["direction"] = args.direction
        s["solver"] = args.solver
        s["allow_singular"] = args.allow_singular
    elif cmd == "dynamics":
        d = vals.setdefault("dynamics", {})
        for key in ("sigma_t", "t_center", "delta_c", "plateau", "t_max", "dt_out",
                    "x_min", "x_max", "nx", "direction"):
            d[key] = getattr(args, key)
    elif cmd == "sweep":
        s = vals.setdefault("sweep", {})
        s["axes"] = ";".join(args.axis) if args.axis else None
        s["observables"] = args.observables
        s["direction"] = args.direction
        s["delta"] = args.delta
    elif cmd == "figures":
        vals.setdefault("figures", {})["names"] = ",".join(args.names) if args.names else None
    return vals


def _write_csv(path: Path, columns, rows) -> None:
    from .sweep import Table

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        Table(list(columns), [list(r) for r in rows]).to_csv(fh)


def _echo_csv(columns, rows, stream) -> None:
    from .sweep import Table

    Table(list(columns), [list(r) for r in rows]).to_csv(stream)


# --- subcommands -----------------------------------------------------------

def cmd_spectrum(cfg: RunConfig, stdout) -> list[Path]:
    from .spectral import spectrum

    p = cfg.system_params()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = spectrum(p)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    cols = ["j", "Delta", "Gamma_j", "edge_flag"] + [f"psiR2_{i + 1}" for i in range(p.N)]
    order = np.argsort(m.Delta)
    rows = [[int(j), float(m.Delta[j]), float(m.GammaJ[j]), int(j == m.edge_index)]
            + [float(v) for v in np.abs(m.psiR[:, j]) ** 2] for j in order]
    path = cfg.out / "spectrum.csv"
    _write_csv(path, cols, rows)
    _echo_csv(cols, rows, stdout)
    return [path]


def cmd_scatter(cfg: RunConfig, stdout) -> list[Path]:
    from .scattering import scatter_exact, scatter_markovian

    p = cfg.system_params()
    s = cfg.scatter
    solver = s.get("solver", "markovian")
    if solver not in ("markovian", "exact"):
        raise ConfigError([f"[scatter] solver must be markovian or exact, got {solver!r}"])
    try:
        direction = Direction.parse(s.get("direction", "left"))
    except ValueError as exc:
        raise ConfigError([str(exc)]) from None
    if "delta_count" in s:
        missing = [k for k in ("delta_min", "delta_max") if k not in s]
        if missing:
            raise ConfigError([f"[scatter] delta range needs {k}" for k in missing])
        deltas = np.linspace(s["delta_min"], s["delta_max"], s["delta_count"])
    else:
        deltas = [s.get("delta", 0.0)]
    allow = s.get("allow_singular", False)
    rows = []
    for d in deltas:
        if solver == "exact":
            res, _ = scatter_exact(p, float(d), direction, allow_singular=allow)
        else:
            res = scatter_markovian(p, float(d), direction, allow_singular=allow)
        rows.append([float(d), res.t.real, res.t.imag, res.r.real, res.r.imag,
                     res.T, res.R, res.eta, res.cond])
    cols = ["delta", "ReT", "ImT", "ReR", "ImR", "T", "R", "eta", "cond"]
    path = cfg.out / "scatter.csv"
    _write_csv(path, cols, rows)
    _echo_csv(cols, rows, stdout)
    return [path]


def cmd_dynamics(cfg: RunConfig, stdout) -> list[Path]:
    from .dynamics import PulseSpec, evolve, reconstruct_field

    p = cfg.system_params()
    d = cfg.dynamics
    try:
        pulse = PulseSpec(sigma_t=d.get("sigma_t", 2.0), t_center=d.get("t_center"),
                          delta_c=d.get("delta_c", 0.0), plateau=d.get("plateau", 0.0),
                          direction=d.get("direction", "left"))
    except ValueError as exc:
        raise ConfigError([str(exc)]) from None
    t_max = d.get("t_max", pulse.t_end + 200.0)
    dt_out = d.get("dt_out", 0.5)
    traj = evolve(p, pulse, t_max, dt_out)
    x = np.linspace(d.get("x_min", -2.0), d.get("x_max", p.N + 3.0), d.get("nx", 121))
    I = reconstruct_field(traj, x)
    f_path = cfg.out / "dynamics_field.csv"
    a_path = cfg.out / "dynamics_atoms.csv"
    _write_csv(f_path, ["t", "x", "intensity"],
               ([float(t), float(xx), float(I[k, j])] for k, t in enumerate(traj.times)
                for j, xx in enumerate(x)))
    pops = traj.populations()
    _write_csv(a_path, ["t", "i", "lambda2"],
               ([float(t), i + 1, float(pops[k, i])] for k, t in enumerate(traj.times)
                for i in range(p.N)))
    print(json.dumps({"energy_in": traj.energy_in, "energy_out": traj.energy_out,
                      "final_excitation": float(traj.excitation[-1])}), file=stdout)
    return [f_path, a_path]


def _parse_axes(text: str):
    from .sweep import Axis

    axes, problems = [], []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        parts = chunk.split(":")
        if len(parts) not in (4, 5):
            problems.append(f"[sweep] axis {chunk!r}: expected name:min:max:count[:spacing]")
            continue
        name = parts[0]
        try:
            from .model import parse_angle

            conv = parse_angle if name == "phi" else float
            axes.append(Axis(name, conv(parts[1]), conv(parts[2]), int(parts[3]),
                             parts[4] if len(parts) == 5 else "linear"))
        except ValueError as exc:
            problems.append(f"[sweep] axis {chunk!r}: {exc}")
    return axes, problems


def cmd_sweep(cfg: RunConfig, stdout) -> list[Path]:
    from .sweep import SweepSpec, sweep

    s = cfg.sweep
    axes, problems = _parse_axes(s.get("axes", ""))
    obs = [o.strip() for o in s.get("observables", "T,R,eta").split(",") if o.strip()]
    try:
        direction = Direction.parse(s.get("direction", "left"))
    except ValueError as exc:
        problems.append(str(exc))
        direction = Direction.LEFT
    spec = SweepSpec(axes=axes, params=cfg.system_params(), observables=obs,
                     direction=direction, delta=s.get("delta", 0.0))
    problems += spec.violations()
    if problems:
        raise ConfigError(problems)
    table = sweep(spec, workers=cfg.workers)
    path = cfg.out / "sweep.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        table.to_csv(fh)
    return [path]


def cmd_critical(cfg: RunConfig, stdout) -> list[Path]:
    from .analysis import (find_absorption_maximum, find_gain_reflection_minimum,
                           find_gamma_r0, resonant_amplitudes)
    from .spectral import edge_decay_rate

    p = cfg.system_params()
    ge = edge_decay_rate(p)
    report = {"Gamma_edge": ge}
    for key, fn in (("Gamma_r0", lambda: find_gamma_r0(p)),
                    ("absorption_max_at", lambda: find_absorption_maximum(p)),
                    ("gain_reflection_min_right", lambda: find_gain_reflection_minimum(p))):
        try:
            report[key] = fn()
        except RuntimeError as exc:
            report[key] = None
            report[key + "_error"] = str(exc)
    t, r = resonant_amplitudes(p, ge)
    report["eta_at_critical"] = float(1 - abs(t[0]) ** 2 - abs(r[0]) ** 2)
    path = cfg.out / "critical.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2))
    print(json.dumps(report, indent=2), file=stdout)
    return [path]


def cmd_figures(cfg: RunConfig, stdout) -> list[Path]:
    from . import figures

    names = [n.strip() for n in cfg.figures.get("names", "all").split(",") if n.strip()]
    if not names or names == ["all"]:
        names = list(figures.FIGURES)
    bad = [n for n in names if n not in figures.FIGURES]
    if bad:
        raise ConfigError([f"unknown figure {n!r}" for n in bad])
    base = cfg.system_params()
    paths = []
    for n in names:
        paths.extend(figures.write(n, cfg.out, base))
        print(f"wrote {n}", file=stdout)
    return paths


def cmd_selftest(cfg: RunConfig, stdout) -> list[Path]:
    from .checks import run_all

    if not run_all(lambda line: print(line, file=stdout)):
        raise RuntimeError("selftest failures")
    return []


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def _error(code: int, kind: str, problems, stderr) -> int:
    print(json.dumps({"error": kind, "exit_code": code, "problems": list(problems)}), file=stderr)
    return code


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    start = time.time()
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ConfigError([f"a subcommand is required: {', '.join(COMMANDS)}"])
        problems: list[str] = []
        file_values = load_file(args.config, problems) if args.config else {}
        if problems:
            raise ConfigError(problems)
        cfg = build_config(file_values, _flag_values(args))
        outputs = HANDLERS[args.command](cfg, stdout)
    except ConfigError as exc:
        return _error(EXIT_CONFIG, "config", exc.problems, stderr)
    except SingularityError as exc:
        return _error(EXIT_SINGULAR, "singularity", [str(exc)], stderr)
    except ValueError as exc:  # parameter validation raised below the config layer
        return _error(EXIT_CONFIG, "config", [str(exc)], stderr)
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        return _error(EXIT_NUMERIC, "numerical", [f"{type(exc).__name__}: {exc}"], stderr)

    if args.command != "selftest":
        manifest = {"command": args.command, "argv": list(argv if argv is not None else sys.argv[1:]),
                    "engine_version": __version__, "wall_time_s": time.time() - start,
                    "config": cfg.to_dict(), "outputs": [str(p) for p in outputs]}
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / f"manifest_{args.command}.json").write_text(
            json.dumps(manifest, indent=2, default=_json_default))
    return EXIT_OK


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return str(v)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
