"""Steady-state single-photon scattering off the atom array.

Two independent solvers are provided:

* :func:`scatter_markovian` solves the driven effective-Hamiltonian problem
  ``(delta - H_eff) Lambda = u`` and reads ``t, r`` from the input-output
  relations.
* :func:`scatter_exact` solves the real-space piecewise plane-wave problem
  (jump conditions at every atom plus the atomic equations of motion) with
  the true wavenumber ``k = (omega0 + delta) / v_g``.

Amplitudes are per unit incident amplitude, referenced to ``x = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import SystemParams, build_couplings, build_effective_hamiltonian, drive_vector
from .spectral import ModeSet, spectrum

COND_LIMIT = 1e12
MARKOV_GUARD = 1e3


class Direction(enum.IntEnum):
    LEFT = 1  # incident from the left, travelling right
    RIGHT = -1

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, Direction):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        text = str(value).strip().lower()
        if text in ("left", "l", "+1", "1", "left-incident"):
            return cls.LEFT
        if text in ("right", "r", "-1", "right-incident"):
            return cls.RIGHT
        raise ValueError(f"unknown direction {value!r}")


class SingularityError(ArithmeticError):
    """Linear response diverges (lasing threshold of a collective mode)."""

    def __init__(self, cond: float, eps_j: complex | None = None, message: str | None = None):
        msg = message or f"scattering system is singular (condition number {cond:.3e})"
        if eps_j is not None:
            msg += f"; closest mode denominator eps_j = {eps_j:.3e}"
        super().__init__(msg)
        self.cond = cond
        self.eps_j = eps_j


@dataclass
class ScatterResult:
    delta: float
    t: complex
    r: complex
    Lambda: np.ndarray
    direction: Direction
    solver: str
    cond: float = 1.0

    @property
    def T(self) -> float:
        return abs(self.t) ** 2

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def eta(self) -> float:
        return 1.0 - self.T - self.R


@dataclass
class PiecewiseField:
    """Plane-wave amplitudes in the ``N + 1`` waveguide segments.

    Segment ``i`` lies between atoms ``i`` and ``i + 1`` (segment 0 is left of
    the array).  In it the field is ``right[i] e^{ikx} + left[i] e^{-ikx}``,
    with ``x`` in units of the spacing ``d`` and ``k`` the phase per ``d``.
    """

    right: np.ndarray  # t_0 .. t_N
    left: np.ndarray  # r_1 .. r_{N+1}
    k: float
    positions: np.ndarray


@dataclass
class ChannelDecomposition:
    eps: np.ndarray
    Xi: np.ndarray
    Xi_t: np.ndarray
    edge_index: int
    direction: Direction

    @property
    def xi_r(self) -> np.ndarray:
        return self.Xi / self.eps

    @property
    def xi_t(self) -> np.ndarray:
        return self.Xi_t / self.eps

    def _bulk(self, x):
        mask = np.ones(len(x), dtype=bool)
        mask[self.edge_index] = False
        return complex(np.sum(x[mask]))

    @property
    def xi_edge_r(self) -> complex:
        return complex(self.xi_r[self.edge_index])

    @property
    def xi_bulk_r(self) -> complex:
        return self._bulk(self.xi_r)

    @property
    def xi_edge_t(self) -> complex:
        return complex(self.xi_t[self.edge_index])

    @property
    def xi_bulk_t(self) -> complex:
        return self._bulk(self.xi_t)

    @property
    def r(self) -> complex:
        return complex(-1j * np.sum(self.xi_r))

    @property
    def t(self) -> complex:
        return complex(1.0 - 1j * np.sum(self.xi_t))


def _check_delta(delta: float) -> None:
    if not np.isfinite(delta):
        raise ValueError(f"detuning must be finite, got {delta}")


def _nearest_eps(params: SystemParams, delta: float) -> complex | None:
    try:
        modes = spectrum(params)
    except Exception:
        return None
    eps = delta - modes.E
    return complex(eps[np.argmin(np.abs(eps))])


def scatter_markovian(params: SystemParams, delta: float = 0.0, direction=Direction.LEFT,
                      allow_singular: bool = False) -> ScatterResult:
    """Input-output solution of the driven array.

    Solves ``(delta - H_eff) Lambda = u`` with ``u_i = exp(i s theta i)``, then
    ``t = 1 - i Gamma u^* . Lambda`` and ``r = -i Gamma u . Lambda``.
    """
    _check_delta(delta)
    s = int(Direction.parse(direction))
    H = build_effective_hamiltonian(params)
    A = delta * np.eye(params.N) - H
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        if not allow_singular:
            raise SingularityError(cond, _nearest_eps(params, delta))
    u = drive_vector(params, s)
    Lam = np.linalg.solve(A, u)
    G = params.Gamma
    t = 1.0 - 1j * G * np.dot(np.conj(u), Lam)
    r = -1j * G * np.dot(u, Lam)
    return ScatterResult(delta=float(delta), t=complex(t), r=complex(r), Lambda=Lam,
                         direction=Direction(s), solver="markovian", cond=cond)


def scatter_markovian_many(params: SystemParams, deltas, direction=Direction.LEFT) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(t, r)`` over a detuning grid (no singularity checks)."""
    s = int(Direction.parse(direction))
    deltas = np.asarray(deltas, dtype=float)
    H = build_effective_hamiltonian(params)
    A = deltas[:, None, None] * np.eye(params.N)[None] - H[None]
    u = drive_vector(params, s)
    Lam = np.linalg.solve(A, np.broadcast_to(u, (len(deltas), params.N))[..., None])[..., 0]
    G = params.Gamma
    return 1.0 - 1j * G * Lam @ np.conj(u), -1j * G * Lam @ u


def _exact_system(J: np.ndarray, params: SystemParams, delta: float, s: int):
    """Assemble the ``3N x 3N`` real-space problem.

    Unknown ordering: ``t_1..t_N, r_1..r_N, Lambda_1..Lambda_N``.  Known
    boundary values: ``t_0`` and ``r_{N+1}`` (unit amplitude on the
    incidence side, zero on the other).
    """
    N = params.N
    g = math.sqrt(params.Gamma)  # v_g = 1
    kd = params.theta * (params.omega0 + delta) / params.omega0
    ph = np.exp(1j * kd * np.arange(1, N + 1))  # e^{i k x_i}
    t0, rN1 = (1.0, 0.0) if s == 1 else (0.0, 1.0)

    A = np.zeros((3 * N, 3 * N), dtype=complex)
    b = np.zeros(3 * N, dtype=complex)
    T = lambda i: i - 1  # t_i, i = 1..N
    Rr = lambda i: N + i - 1  # r_i, i = 1..N
    L = lambda i: 2 * N + i - 1

    for i in range(1, N + 1):
        row = i - 1
        # e^{ikx_i}(t_i - t_{i-1}) = -i g Lambda_i
        A[row, T(i)] += ph[i - 1]
        if i > 1:
            A[row, T(i - 1)] -= ph[i - 1]
        else:
            b[row] += ph[i - 1] * t0
        A[row, L(i)] += 1j * g

        row = N + i - 1
        # e^{-ikx_i}(r_{i+1} - r_i) = i g Lambda_i
        A[row, Rr(i)] -= np.conj(ph[i - 1])
        if i < N:
            A[row, Rr(i + 1)] += np.conj(ph[i - 1])
        else:
            b[row] -= np.conj(ph[i - 1]) * rN1
        A[row, L(i)] -= 1j * g

        row = 2 * N + i - 1
        # (delta + i Gamma_f) Lambda_i - sum_j J Lambda_j = g * (mean field at x_i)
        A[row, L(i)] += delta + 1j * params.Gamma_f
        if i > 1:
            A[row, L(i - 1)] -= J[i - 2]
        if i < N:
            A[row, L(i + 1)] -= J[i - 1]
        half_r = 0.5 * g * ph[i - 1]
        half_l = 0.5 * g * np.conj(ph[i - 1])
        A[row, T(i)] -= half_r
        if i > 1:
            A[row, T(i - 1)] -= half_r
        else:
            b[row] += half_r * t0
        A[row, Rr(i)] -= half_l
        if i < N:
            A[row, Rr(i + 1)] -= half_l
        else:
            b[row] += half_l * rN1
    return A, b, kd, (t0, rN1)


def _solve_exact(J: np.ndarray, params: SystemParams, delta: float, s: int, allow_singular: bool):
    A, b, kd, (t0, rN1) = _exact_system(J, params, delta, s)
    cond = float(np.linalg.cond(A))
    if (not np.isfinite(cond) or cond > COND_LIMIT) and not allow_singular:
        raise SingularityError(cond, _nearest_eps(params, delta))
    x = np.linalg.solve(A, b)
    N = params.N
    tt = np.concatenate([[t0], x[:N]])
    rr = np.concatenate([x[N:2 * N], [rN1]])
    Lam = x[2 * N:]
    pw = PiecewiseField(right=tt, left=rr, k=kd, positions=params.positions)
    if s == 1:
        t, r = tt[-1], rr[0]
    else:
        t, r = rr[0], tt[-1]
    res = ScatterResult(delta=float(delta), t=complex(t), r=complex(r), Lambda=Lam,
                        direction=Direction(s), solver="exact", cond=cond)
    return res, pw


def scatter_exact(params: SystemParams, delta: float = 0.0, direction=Direction.LEFT,
                  allow_singular: bool = False) -> tuple[ScatterResult, PiecewiseField]:
    """Real-space (Bethe-ansatz) solution with the true photon wavenumber.

    The field at each atom is the mean of the two adjacent segment values.
    ``Lambda`` is per unit incident amplitude in units where ``v_g = 1``.
    """
    _check_delta(delta)
    if params.omega0 / params.Gamma < MARKOV_GUARD:
        raise ValueError(f"omega0/Gamma = {params.omega0 / params.Gamma:g} is below the "
                         f"Markovian-regime guard {MARKOV_GUARD:g}")
    s = int(Direction.parse(direction))
    J = build_couplings(params.J0, params.phi, params.N)
    return _solve_exact(J, params, delta, s, allow_singular)


def field_profile(pw: PiecewiseField, x_grid, interference: bool = False) -> np.ndarray:
    """Photon intensity per unit incident intensity; ``x`` in units of ``d``.

    By default this is the density ``|phi_r|^2 + |phi_l|^2`` of the two
    counter-propagating modes, which is piecewise constant between atoms.
    ``interference=True`` instead returns ``|phi_r + phi_l|^2``, the
    standing-wave pattern of a single scalar field.  A point exactly on atom
    ``i`` belongs to the segment on its right.
    """
    x = np.asarray(x_grid, dtype=float)
    seg = np.searchsorted(pw.positions, x, side="right")
    fwd = pw.right[seg] * np.exp(1j * pw.k * x)
    back = pw.left[seg] * np.exp(-1j * pw.k * x)
    if interference:
        return np.abs(fwd + back) ** 2
    return np.abs(fwd) ** 2 + np.abs(back) ** 2


def scatter_channels(params: SystemParams, delta: float = 0.0, direction=Direction.LEFT,
                     modes: ModeSet | None = None) -> ChannelDecomposition:
    """Split ``r`` and ``t`` into per-eigenmode contributions.

    ``Xi_j = Gamma (V^T psiR_j)(psiL_j^T V)`` and
    ``Xi~_j = Gamma (V^dag psiR_j)(psiL_j^T V)`` with ``eps_j = delta - E_j``;
    then ``r = -i sum Xi_j/eps_j`` and ``t = 1 - i sum Xi~_j/eps_j``.
    """
    _check_delta(delta)
    s = int(Direction.parse(direction))
    if modes is None:
        modes = spectrum(params.replace(Gamma_f=0.0))
    V = drive_vector(params, s)
    right = V @ modes.psiR
    right_c = np.conj(V) @ modes.psiR
    left = V @ modes.psiL
    G = params.Gamma
    E = modes.E + 1j * modes.Gamma_f - 1j * params.Gamma_f
    eps = delta - E
    return ChannelDecomposition(eps=eps, Xi=G * right * left, Xi_t=G * right_c * left,
                                edge_index=modes.edge_index, direction=Direction(s))


def single_atom_amplitudes(delta: float, Gamma: float, Gamma_f: float, phase: complex = 1.0):
    """Closed-form ``(t, r)`` for one atom; ``phase = e^{2 i k x_1}``."""
    den = delta + 1j * (Gamma + Gamma_f)
    return (delta + 1j * Gamma_f) / den, -1j * Gamma * phase / den
