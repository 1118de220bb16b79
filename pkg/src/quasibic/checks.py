"""Fast invariant checks run by ``quasibic selftest``."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .model import SystemParams, build_effective_hamiltonian, sublattice_operator
from .scattering import Direction, scatter_channels, scatter_exact, scatter_markovian
from .spectral import edge_decay_rate, spectrum


def _draws(n: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield SystemParams(N=int(rng.choice([1, 3, 5, 7, 9])), J0=float(rng.uniform(0.3, 4.0)),
                           phi=float(rng.uniform(0.05, 0.95) * math.pi),
                           Gamma_f=float(rng.uniform(0.0, 0.5)))


def check_symmetric(n=50, seed=0):
    return max(np.abs(build_effective_hamiltonian(p) - build_effective_hamiltonian(p).T).max()
               for p in _draws(n, seed)) == 0.0


def check_chiral(n=50, seed=1):
    worst = 0.0
    for p in _draws(n, seed):
        H = build_effective_hamiltonian(p.replace(Gamma_f=0.0))
        S = sublattice_operator(p.N)
        worst = max(worst, np.abs(S @ H @ S + H.conj().T).max())
    return worst < 1e-12


def check_biorthogonal(n=50, seed=2):
    worst = 0.0
    for p in _draws(n, seed):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = spectrum(p)
        worst = max(worst, np.abs(m.psiL.T @ m.psiR - np.eye(p.N)).max())
    return worst < 1e-10


def check_unitarity(n=50, seed=3):
    worst = 0.0
    for p in _draws(n, seed):
        for d in (-2.0, 0.0, 0.7):
            res = scatter_markovian(p.replace(Gamma_f=0.0), d)
            worst = max(worst, abs(res.T + res.R - 1))
    return worst < 1e-10


def check_reciprocity(n=50, seed=4):
    worst = 0.0
    for p in _draws(n, seed):
        a = scatter_markovian(p, 0.3, Direction.LEFT)
        b = scatter_markovian(p, 0.3, Direction.RIGHT)
        worst = max(worst, abs(a.t - b.t))
    return worst < 1e-10


def check_channels(n=50, seed=5):
    worst = 0.0
    for p in _draws(n, seed):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ch = scatter_channels(p, 0.2)
        res = scatter_markovian(p, 0.2)
        worst = max(worst, abs(ch.r - res.r), abs(ch.t - res.t))
    return worst < 1e-10


def check_solvers():
    p = SystemParams()
    worst = max(abs(scatter_exact(p, d)[0].T - scatter_markovian(p, d).T) for d in (-1.0, 0.0, 1.5))
    return worst < 1e-2


def check_edge_rate():
    return abs(edge_decay_rate(SystemParams()) - 0.013) <= 0.001


CHECKS = {
    "H complex symmetric": check_symmetric,
    "chiral symmetry at theta=3pi/2": check_chiral,
    "biorthonormal modes": check_biorthogonal,
    "unitarity without loss": check_unitarity,
    "transmission reciprocity": check_reciprocity,
    "channel resummation": check_channels,
    "exact vs Markovian solver": check_solvers,
    "edge decay rate 0.013": check_edge_rate,
}


def run_all(out=print) -> bool:
    ok_all = True
    for name, fn in CHECKS.items():
        try:
            ok = bool(fn())
        except Exception as exc:  # report, keep going
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok_all &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}")
    out(f"{sum(1 for _ in CHECKS)} checks, {'all passed' if ok_all else 'failures present'}")
    return ok_all
