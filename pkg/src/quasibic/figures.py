"""Plot-ready datasets, one per id in FIGURES, written as CSV plus JSON metadata."""

from __future__ import annotations

import json
import math
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    absorption_map,
    amplification_scan,
    find_gain_reflection_minimum,
    find_gamma_r0,
    find_time_reversal_phi,
    resonant_amplitudes,
)
from .model import SystemParams
from .scattering import Direction, field_profile, scatter_exact, scatter_markovian_many
from .spectral import edge_decay_rate, hermitian_spectrum, spectrum
from .sweep import Table

FIGURES = ("fig1b", "fig1d", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d",
           "fig4a", "fig4b", "fig4c", "fig4d")

REFERENCE_PARAMS = SystemParams(N=7, J0=2.2, phi=0.2 * math.pi)


def _signed_gf(ge: float, n: int, span: float = 3.0, margin: float = 1e-3) -> np.ndarray:
    # symmetric Gamma_f grid that stays `margin * ge` away from -ge
    g = np.linspace(-span * ge, span * ge, n)
    return g[np.abs(g + ge) >= margin * ge]


def fig1b(base: SystemParams = REFERENCE_PARAMS, **_) -> tuple[Table, dict]:
    """Bare SSH spectrum and site-resolved mode weights."""
    w, v = hermitian_spectrum(base)
    cols = ["j", "energy"] + [f"w{i + 1}" for i in range(base.N)]
    rows = [[j, float(w[j])] + list(np.abs(v[:, j]) ** 2) for j in range(base.N)]
    return Table(cols, rows), {"description": "coherent SSH chain energies (units Gamma) and |psi_i|^2"}


def fig1d(base: SystemParams = REFERENCE_PARAMS, n_x: int = 801, **_) -> tuple[Table, dict]:
    """Steady-state field intensity and atomic excitation at resonance, Gamma_f = 0."""
    p = base.replace(Gamma_f=0.0)
    res, pw = scatter_exact(p, 0.0)
    x = np.linspace(-1.0, p.N + 2.0, n_x)
    I = field_profile(pw, x) * p.epsilon ** 2
    rows = [["field", float(xi), float(v)] for xi, v in zip(x, I)]
    pops = np.abs(res.Lambda * p.epsilon) ** 2
    rows += [["atom", float(i + 1), float(v)] for i, v in enumerate(pops)]
    return Table(["kind", "x", "value"], rows), {
        "description": "|phi(x)|^2 (x in units of d) and |lambda_i|^2, drive amplitude epsilon",
        "epsilon": p.epsilon}


def fig2c(base: SystemParams = REFERENCE_PARAMS, J0_grid=None, **_) -> tuple[Table, dict]:
    """Collective frequencies and decay rates versus J0."""
    J0_grid = np.round(np.linspace(0.1, 5.0, 50), 10) if J0_grid is None else np.asarray(J0_grid)
    rows = []
    for J0 in J0_grid:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = spectrum(base.replace(J0=float(J0), Gamma_f=0.0))
        for j in np.argsort(m.Delta):
            rows.append([float(J0), int(j), float(m.Delta[j]), float(m.GammaJ[j]),
                         int(j == m.edge_index)])
    return Table(["J0", "j", "Delta", "Gamma_j", "edge"], rows), {
        "description": "Delta_j = Re E_j, Gamma_j = -Im E_j (Gamma_f excluded)"}


def fig2d(base: SystemParams = REFERENCE_PARAMS, n: int = 60, Gamma_f: float = 0.013, **_):
    """Resonant absorption over (J0, phi) and the Gamma_edge = Gamma_f contour."""
    J0 = np.linspace(0.2, 4.0, n)
    phi = np.linspace(0.02 * math.pi, 0.98 * math.pi, n)
    amap = absorption_map(J0, phi, Gamma_f, N=base.N)
    rows = [["map", float(a), float(b), float(amap.eta[i, k])]
            for i, a in enumerate(J0) for k, b in enumerate(phi)]
    rows += [["contour", a, b, math.nan] for a, b in amap.contour]
    return Table(["kind", "J0", "phi", "eta"], rows), {"Gamma_f": Gamma_f}


def fig3a(base: SystemParams = REFERENCE_PARAMS, n: int = 601, **_):
    """ln T, ln R over loss and gain; inset: absorption vs detuning at critical coupling."""
    ge = edge_decay_rate(base)
    g = _signed_gf(ge, n)
    t, r = resonant_amplitudes(base, g)
    rows = [["gamma_scan", float(x), float(np.log(abs(a) ** 2)), float(np.log(abs(b) ** 2))]
            for x, a, b in zip(g, t, r)]
    d = np.linspace(-6.0, 6.0, 2401)
    tt, rr = scatter_markovian_many(base.replace(Gamma_f=ge), d)
    eta = 1 - np.abs(tt) ** 2 - np.abs(rr) ** 2
    rows += [["inset_eta", float(x), float(e), math.nan] for x, e in zip(d, eta)]
    return Table(["kind", "x", "y1", "y2"], rows), {
        "Gamma_edge": ge, "columns": "gamma_scan: x=Gamma_f, y1=lnT, y2=lnR; inset_eta: x=delta, y1=eta"}


def fig3b(base: SystemParams = REFERENCE_PARAMS, n: int = 400, **_):
    ge = edge_decay_rate(base)
    g = np.geomspace(0.1 * ge, 10 * ge, n)
    t, r = resonant_amplitudes(base, g)
    T, R = np.abs(t) ** 2, np.abs(r) ** 2
    rows = [[float(x), float(np.log(b)), float(np.log(a + b))] for x, a, b in zip(g, T, R)]
    return Table(["Gamma_f", "lnR", "lnTR"], rows), {
        "Gamma_edge": ge, "Gamma_r0": find_gamma_r0(base)}


def _channel_rows(base, g, direction):
    from .scattering import scatter_channels

    m = spectrum(base.replace(Gamma_f=0.0))
    rows = []
    for x in g:
        ch = scatter_channels(base.replace(Gamma_f=float(x)), 0.0, direction, modes=m)
        rows.append([float(x), ch.xi_edge_r.imag, ch.xi_bulk_r.imag,
                     ch.xi_edge_t.imag, ch.xi_bulk_t.imag])
    return rows


def fig3c(base: SystemParams = REFERENCE_PARAMS, n: int = 401, **_):
    ge = edge_decay_rate(base)
    rows = _channel_rows(base, np.linspace(0.0, 3 * ge, n), Direction.LEFT)
    return Table(["Gamma_f", "Im_xi_edge_r", "Im_xi_bulk_r", "Im_xi_edge_t", "Im_xi_bulk_t"], rows), {
        "Gamma_edge": ge, "Gamma_r0": find_gamma_r0(base), "direction": "left"}


def fig3d(base: SystemParams = REFERENCE_PARAMS, n: int = 2400, **_):
    """T and R versus detuning just below the lasing threshold."""
    ge = edge_decay_rate(base)
    gf = -(1 - 1e-3) * ge
    d = np.linspace(-6.0, 6.0, n)
    t, r = scatter_markovian_many(base.replace(Gamma_f=gf), d)
    rows = [[float(x), float(abs(a) ** 2), float(abs(b) ** 2)] for x, a, b in zip(d, t, r)]
    return Table(["delta", "T", "R"], rows), {"Gamma_f": gf, "Gamma_edge": ge}


def fig4a(base: SystemParams = REFERENCE_PARAMS, n_phi: int = 200, n_gf: int = 200, **_):
    """delta-chi over (phi, Gamma_f / Gamma_edge-scale) plus the reference curves."""
    phis = np.linspace(0.15 * math.pi, 0.35 * math.pi, n_phi)
    gmax = 0.03
    gf = np.linspace(gmax / n_gf, gmax, n_gf)
    rows = []
    for phi in phis:
        p = base.replace(phi=float(phi))
        ge = edge_decay_rate(p)
        ok = np.abs(gf - ge) >= 1e-3 * ge
        _, rp = resonant_amplitudes(p, gf)
        _, rm = resonant_amplitudes(p, -gf)
        dchi = np.abs(np.log(np.abs(rp) ** 2) + np.log(np.abs(rm) ** 2))
        dchi[~ok] = np.nan
        rows += [["map", float(phi), float(x), float(v)] for x, v in zip(gf, dchi)]
        rows.append(["Gamma_edge", float(phi), ge, math.nan])
    phi_star = find_time_reversal_phi(base.J0, base.N)
    return Table(["kind", "phi", "Gamma_f", "delta_chi"], rows), {
        "phi_time_reversed": phi_star, "phi_time_reversed_over_pi": phi_star / math.pi}


def fig4b(base: SystemParams = REFERENCE_PARAMS, n: int = 601, **_):
    """Left- and right-incident T, R at the time-reversal angle."""
    p = base.replace(phi=find_time_reversal_phi(base.J0, base.N))
    ge = edge_decay_rate(p)
    g = _signed_gf(ge, n)
    t, r = resonant_amplitudes(p, g, Direction.LEFT)
    t2, r2 = resonant_amplitudes(p, g, Direction.RIGHT)
    rows = [[float(x), abs(a) ** 2, abs(b) ** 2, abs(c) ** 2, abs(d) ** 2]
            for x, a, b, c, d in zip(g, t, r, t2, r2)]
    return Table(["Gamma_f", "T", "R", "T_prime", "R_prime"], rows), {"phi": p.phi, "Gamma_edge": ge}


def fig4c(base: SystemParams = REFERENCE_PARAMS, n: int = 801, **_):
    """Right-incident transport in the gain regime."""
    ge = edge_decay_rate(base)
    g = -np.linspace(0.5 * ge, 2.0 * ge, n)
    g = g[np.abs(g + ge) >= 1e-3 * ge]
    scan = amplification_scan(base, g, Direction.RIGHT)
    rows = [[float(x), float(a), float(b)] for x, a, b in zip(scan.Gamma_f, scan.T, scan.R)]
    return Table(["Gamma_f", "T_prime", "R_prime"], rows), {
        "Gamma_edge": ge, "Gamma_r0": find_gamma_r0(base),
        "R_prime_minimum_at": find_gain_reflection_minimum(base)}


def fig4d(base: SystemParams = REFERENCE_PARAMS, n: int = 401, **_):
    ge = edge_decay_rate(base)
    g = -np.linspace(0.0, 2.0 * ge, n)
    g = g[np.abs(g + ge) >= 1e-3 * ge]
    rows = _channel_rows(base, g, Direction.RIGHT)
    return Table(["Gamma_f", "Im_xi_edge_r", "Im_xi_bulk_r", "Im_xi_edge_t", "Im_xi_bulk_t"], rows), {
        "Gamma_edge": ge, "direction": "right"}


def build(name: str, base: SystemParams = REFERENCE_PARAMS, **kw) -> tuple[Table, dict]:
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from {FIGURES}")
    table, meta = globals()[name](base, **kw)
    meta = {"figure": name, "params": base.to_dict(), "units": "all rates and frequencies in Gamma",
            "engine_version": __version__, **meta}
    return table, meta


def write(name: str, outdir: Path, base: SystemParams = REFERENCE_PARAMS, **kw) -> tuple[Path, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    table, meta = build(name, base, **kw)
    csv_path = outdir / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        table.to_csv(fh)
    meta_path = outdir / f"{name}.json"
    meta_path.write_text(json.dumps(meta, indent=2, default=float))
    return csv_path, meta_path
