"""Biorthogonal eigendecomposition of the effective Hamiltonian."""

from __future__ import annotations

import functools
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import SystemParams, build_effective_hamiltonian

log = logging.getLogger(__name__)

COMPLETENESS_TOL = 1e-6


class ExceptionalPointError(RuntimeError):
    """Eigenvectors (nearly) coalesce; the biorthogonal expansion is unusable."""

    def __init__(self, residual: float):
        super().__init__(f"completeness residual {residual:.3e} exceeds {COMPLETENESS_TOL:g}; "
                         "parameters are at or near an exceptional point")
        self.residual = residual


class ClassificationWarning(UserWarning):
    pass


@dataclass
class ModeSet:
    """Eigenmodes of ``H_eff`` with edge/bulk labels.

    ``psiR[:, j]`` and ``psiL[:, j]`` are the right and left eigenvectors,
    normalized so that ``psiL[:, j] @ psiR[:, k] == delta_jk`` (no complex
    conjugation).  ``GammaJ`` excludes the uniform free-space rate.
    """

    E: np.ndarray
    psiR: np.ndarray
    psiL: np.ndarray
    Gamma_f: float = 0.0
    edge_index: int = 0
    bulk_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    boundary_weight: float = 1.0
    edge_side: str = "none"
    residual: float = 0.0

    @property
    def N(self) -> int:
        return len(self.E)

    @property
    def Delta(self) -> np.ndarray:
        return self.E.real

    @property
    def GammaJ(self) -> np.ndarray:
        return -self.E.imag - self.Gamma_f

    @property
    def Gamma_edge(self) -> float:
        return float(self.GammaJ[self.edge_index])

    def projector(self, j: int) -> np.ndarray:
        return np.outer(self.psiR[:, j], self.psiL[:, j])

    def reconstruct(self) -> np.ndarray:
        return (self.psiR * self.E) @ self.psiL.T


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude entry made real positive
    idx = np.argmax(np.abs(vecs), axis=0)
    peak = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(peak) / peak)


def completeness_residual(modes: ModeSet) -> float:
    n = modes.N
    return float(np.linalg.norm(modes.psiR @ modes.psiL.T - np.eye(n), ord=2))


def eigendecompose(H: np.ndarray, Gamma_f: float = 0.0, verify: bool = False) -> ModeSet:
    """Diagonalize a complex-symmetric ``H``.

    Left eigenvectors are the transposes of the right ones; each pair is
    scaled so ``psi.T @ psi == 1`` and the right vector's dominant entry is
    real positive.  With ``verify=True`` the left vectors are cross-checked
    against an independent left-eigenvector solve.
    Raises :class:`ExceptionalPointError` when the expansion is incomplete.
    """
    H = np.asarray(H, dtype=complex)
    E, R = scipy.linalg.eig(H)
    R = _fix_phase(R)
    norm = np.sum(R * R, axis=0)
    if np.any(np.abs(norm) < 1e-14):
        raise ExceptionalPointError(float("inf"))
    # psiL.T @ psiR = 1 with psiL = psiR / norm
    L = R / norm
    modes = ModeSet(E=E, psiR=R, psiL=L, Gamma_f=Gamma_f)
    modes.residual = completeness_residual(modes)
    if not np.isfinite(modes.residual) or modes.residual > COMPLETENESS_TOL:
        raise ExceptionalPointError(modes.residual)
    if verify:
        _verify_left(H, modes)
    classify_modes(modes)
    return modes


def _verify_left(H: np.ndarray, modes: ModeSet, tol: float = 1e-8) -> None:
    E2, VL = scipy.linalg.eig(H, left=True, right=False)
    for j, e in enumerate(modes.E):
        k = int(np.argmin(np.abs(E2 - e)))
        # scipy returns vl with vl^H H = e vl^H, i.e. conj(vl) is our unconjugated left row
        ref = np.conj(VL[:, k])
        ours = modes.psiL[:, j]
        c = np.vdot(ref, ours) / np.vdot(ref, ref)
        err = np.linalg.norm(ours - c * ref) / np.linalg.norm(ours)
        if err > tol:
            raise AssertionError(f"left eigenvector {j} disagrees with direct solve (err={err:.2e})")


def classify_modes(modes: ModeSet, delta_tol: float = 1e-9) -> tuple[int, np.ndarray]:
    """Label the edge mode: smallest ``|Delta|``, ties broken by smallest
    decay rate.  Also records the edge mode's end-site weight."""
    absd = np.abs(modes.Delta)
    near = np.flatnonzero(absd <= absd.min() + delta_tol)
    edge = int(near[np.argmin(modes.GammaJ[near])])
    modes.edge_index = edge
    modes.bulk_indices = np.array([j for j in range(modes.N) if j != edge], dtype=int)

    w = np.abs(modes.psiR[:, edge]) ** 2
    w = w / w.sum()
    left, right = float(w[0]), float(w[-1])
    modes.boundary_weight = max(left, right)
    if modes.N == 1:
        modes.edge_side = "none"
    else:
        modes.edge_side = "right" if right >= left else "left"

    if absd[edge] > 1e-6:
        warnings.warn(f"edge mode frequency shift {modes.Delta[edge]:.3e} is not zero; "
                      "frame misaligned or theta != 3pi/2", ClassificationWarning, stacklevel=2)
    if modes.N > 1 and modes.boundary_weight < 2.0 / modes.N:
        log.info("near-zero mode %d is not boundary localized (end weight %.3f)",
                 edge, modes.boundary_weight)
    return edge, modes.bulk_indices


def bandgap(params: SystemParams) -> float:
    """Bulk gap ``2 |J_strong - J_weak|`` of the infinite coherent chain."""
    return 4.0 * params.J0 * abs(math.cos(params.phi))


def spectrum(params: SystemParams, verify: bool = False) -> ModeSet:
    """Decompose ``H_eff`` for ``params``, flagging a closed bandgap."""
    if params.N > 1 and bandgap(params) < 1e-6 * params.Gamma:
        warnings.warn(f"no bandgap at phi={params.phi:.6f} (gap metric {bandgap(params):.2e}); "
                      "edge/bulk labels are not meaningful", ClassificationWarning, stacklevel=2)
    return eigendecompose(build_effective_hamiltonian(params), params.Gamma_f, verify=verify)


@functools.lru_cache(maxsize=4096)
def _edge_rate_cached(params: SystemParams) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClassificationWarning)
        return spectrum(params).Gamma_edge


def edge_decay_rate(params: SystemParams) -> float:
    """Waveguide-induced decay rate of the edge mode (independent of Gamma_f)."""
    if params.N > 1 and bandgap(params) < 1e-6 * params.Gamma:
        warnings.warn("no bandgap; reported edge decay rate is not topologically meaningful",
                      ClassificationWarning, stacklevel=2)
    return _edge_rate_cached(params.replace(Gamma_f=0.0, epsilon=0.1))


def hermitian_spectrum(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of the bare coherent chain (no waveguide, no loss)."""
    from .model import coherent_hamiltonian

    return np.linalg.eigh(coherent_hamiltonian(params))
