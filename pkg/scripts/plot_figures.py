"""Render the CSV datasets from reproduce_figures.py as PNGs (needs matplotlib).

    python3 scripts/plot_figures.py [datadir]
"""

import csv
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # plotting is optional
    sys.exit("matplotlib is not installed: pip install '.[plot]'")


def load(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    cols = defaultdict(list)
    for r in rows:
        for k, v in r.items():
            cols[k].append(v)
    return cols


def num(values):
    return np.array([float(v) if v not in ("", "nan") else np.nan for v in values])


def by_kind(cols, kind):
    mask = np.array([k == kind for k in cols["kind"]])
    return {k: np.asarray(v)[mask] for k, v in cols.items()}


def plot_lines(ax, x, ys, labels, logy=False):
    for y, lab in zip(ys, labels):
        ax.plot(x, y, label=lab)
    if logy:
        ax.set_yscale("log")
    ax.legend()


def main():
    data = Path(sys.argv[1] if len(sys.argv) > 1 else "figure_data")
    out = data / "png"
    out.mkdir(exist_ok=True)

    c = load(data / "fig2c.csv")
    fig, (a, b) = plt.subplots(1, 2, figsize=(9, 3.5))
    J, D, G, e = num(c["J0"]), num(c["Delta"]), num(c["Gamma_j"]), num(c["edge"])
    a.scatter(J, D, s=3, c=np.where(e == 1, "r", "k"))
    b.scatter(J, G, s=3, c=np.where(e == 1, "r", "k"))
    b.set_yscale("log")
    a.set_xlabel("J0"), a.set_ylabel("Delta_j"), b.set_xlabel("J0"), b.set_ylabel("Gamma_j")
    fig.tight_layout(), fig.savefig(out / "fig2c.png", dpi=150)

    c = by_kind(load(data / "fig1d.csv"), "field")
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.plot(num(c["x"]), num(c["value"]))
    ax.set_xlabel("x / d"), ax.set_ylabel("|phi|^2")
    fig.tight_layout(), fig.savefig(out / "fig1d.png", dpi=150)

    c = load(data / "fig3b.csv")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    plot_lines(ax, num(c["Gamma_f"]), [num(c["lnR"]), num(c["lnTR"])], ["ln R", "ln(T+R)"])
    ax.set_xscale("log"), ax.set_xlabel("Gamma_f")
    fig.tight_layout(), fig.savefig(out / "fig3b.png", dpi=150)

    for name in ("fig3c", "fig4d"):
        c = load(data / f"{name}.csv")
        fig, ax = plt.subplots(figsize=(5, 3.5))
        keys = ["Im_xi_edge_r", "Im_xi_bulk_r", "Im_xi_edge_t", "Im_xi_bulk_t"]
        plot_lines(ax, num(c["Gamma_f"]), [num(c[k]) for k in keys], keys)
        ax.set_xlabel("Gamma_f")
        fig.tight_layout(), fig.savefig(out / f"{name}.png", dpi=150)

    c = load(data / "fig4b.csv")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    plot_lines(ax, num(c["Gamma_f"]), [num(c[k]) for k in ("T", "R", "R_prime")], ["T", "R", "R'"],
               logy=True)
    ax.set_xlabel("Gamma_f")
    fig.tight_layout(), fig.savefig(out / "fig4b.png", dpi=150)

    c = by_kind(load(data / "fig4a.csv"), "map")
    phi, g, d = num(c["phi"]), num(c["Gamma_f"]), num(c["delta_chi"])
    nphi = len(np.unique(phi))
    fig, ax = plt.subplots(figsize=(5, 4))
    m = ax.pcolormesh(np.unique(g), np.unique(phi) / np.pi, d.reshape(nphi, -1), vmin=0, vmax=0.1,
                      shading="auto")
    fig.colorbar(m, label="delta chi")
    ax.set_xlabel("|Gamma_f|"), ax.set_ylabel("phi / pi")
    fig.tight_layout(), fig.savefig(out / "fig4a.png", dpi=150)
    print(f"wrote PNGs to {out}")


if __name__ == "__main__":
    main()
