"""Physical configuration and matrix construction.

Everything is expressed in units of the single-atom waveguide decay rate
``Gamma`` and in the frame rotating at the bare atomic frequency ``omega0``.
Atoms sit at ``x_i = i * d`` (``i = 1..N``), so the propagation phase
between the origin and atom ``i`` is ``i * theta`` with ``theta = k0 * d``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_QUARTER_TURNS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def parse_angle(value) -> float:
    """Parse an angle in radians; strings like ``"0.241pi"`` or ``"3/2 pi"``
    are read as exact multiples of pi."""
    return float(parse_pi_multiple(value) * math.pi) if _is_pi_string(value) else float(value)


def parse_pi_multiple(value) -> Fraction:
    """Return ``value / pi`` as an exact fraction.

    Accepts ``"0.241pi"``, ``"3/2pi"``, ``"pi"`` or a bare number already
    expressed in units of pi.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    text = str(value).strip().lower().replace(" ", "")
    if text.endswith("pi"):
        head = text[:-2].rstrip("*")
        if head in ("", "+"):
            return Fraction(1)
        if head == "-":
            return Fraction(-1)
        return Fraction(head)
    return Fraction(text)


def _is_pi_string(value) -> bool:
    return isinstance(value, str) and value.strip().lower().endswith("pi")


@dataclass(frozen=True)
class SystemParams:
    """Full physical configuration of the array-waveguide system.

    ``theta_pi`` is the inter-atom propagation phase ``k0 d`` in units of
    pi.  When given as a :class:`~fractions.Fraction` the phase factors
    ``exp(i theta m)`` are evaluated exactly for integer ``m``.
    """

    N: int = 7
    J0: float = 2.2
    phi: float = 0.2 * math.pi
    Gamma: float = 1.0
    Gamma_f: float = 0.0
    theta_pi: Fraction | float = Fraction(3, 2)
    omega0: float = 1.0e4
    epsilon: float = 0.1

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValueError("invalid SystemParams: " + "; ".join(problems))

    def violations(self) -> list[str]:
        out = []
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            out.append(f"N must be an integer, got {self.N!r}")
        elif self.N < 1 or self.N % 2 == 0:
            out.append(f"N must be odd and >= 1, got {self.N}")
        if not (np.isfinite(self.J0) and self.J0 > 0):
            out.append(f"J0 must be > 0, got {self.J0}")
        if not (np.isfinite(self.phi) and 0.0 <= self.phi <= math.pi + 1e-12):
            out.append(f"phi must lie in [0, pi], got {self.phi}")
        if not (np.isfinite(self.Gamma) and self.Gamma > 0):
            out.append(f"Gamma must be > 0, got {self.Gamma}")
        if not np.isfinite(self.Gamma_f):
            out.append(f"Gamma_f must be finite, got {self.Gamma_f}")
        if not np.isfinite(float(self.theta_pi)):
            out.append(f"theta_pi must be finite, got {self.theta_pi}")
        if not (np.isfinite(self.omega0) and self.omega0 > 0):
            out.append(f"omega0 must be > 0, got {self.omega0}")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            out.append(f"epsilon must be > 0, got {self.epsilon}")
        return out

    @property
    def theta(self) -> float:
        return float(self.theta_pi) * math.pi

    @property
    def positions(self) -> np.ndarray:
        """Atomic positions in units of the spacing ``d``."""
        return np.arange(1, self.N + 1, dtype=float)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["theta_pi"] = str(self.theta_pi) if isinstance(self.theta_pi, Fraction) else self.theta_pi
        return d


def phase_powers(theta_pi: Fraction | float, m) -> np.ndarray:
    """``exp(i * pi * theta_pi * m)`` for integer array ``m``.

    Rational ``theta_pi`` is reduced modulo 2 before exponentiation, and
    quarter-turn multiples come from a lookup table, so e.g. ``theta = 3 pi/2``
    produces exact powers of ``-i``.
    """
    m = np.asarray(m)
    if not isinstance(theta_pi, Fraction):
        return np.exp(1j * math.pi * float(theta_pi) * m)
    p, q = theta_pi.numerator, theta_pi.denominator
    n = np.mod(p * m.astype(np.int64), 2 * q)
    out = np.exp(1j * math.pi * n / q)
    quarter = (2 * n) % q == 0
    if np.any(quarter):
        idx = ((2 * n[quarter]) // q) % 4
        out[quarter] = np.take(_QUARTER_TURNS, idx)
    return out


def build_couplings(J0: float, phi: float, N: int) -> np.ndarray:
    """Dimerized nearest-neighbour couplings ``J_i = J0 [1 - (-1)^i cos(phi)]``.

    Bond ``i`` joins atoms ``i`` and ``i+1``; bond 1 is the strong bond for
    ``phi < pi/2``, which puts the edge state on the right end.
    """
    if isinstance(N, bool) or int(N) != N or N < 1 or N % 2 == 0:
        raise ValueError(f"N must be a positive odd integer, got {N!r}")
    i = np.arange(1, int(N))
    sign = np.where(i % 2 == 0, 1.0, -1.0)
    return J0 * (1.0 - sign * math.cos(phi))


def coherent_hamiltonian(params: SystemParams) -> np.ndarray:
    """Real symmetric tridiagonal SSH block (no dissipation)."""
    J = build_couplings(params.J0, params.phi, params.N)
    return np.diag(J, 1) + np.diag(J, -1)


def dissipative_kernel(params: SystemParams) -> np.ndarray:
    """``exp(i theta |i - j|)``, the waveguide-mediated coupling pattern."""
    idx = np.arange(params.N)
    dist = np.abs(idx[:, None] - idx[None, :])
    return phase_powers(params.theta_pi, dist)


def build_effective_hamiltonian(params: SystemParams) -> np.ndarray:
    """Effective non-Hermitian Hamiltonian in the rotating frame.

    ``H = H_SSH - i Gamma exp(i theta |i-j|) - i Gamma_f 1``.  The result is
    complex symmetric.
    """
    H = coherent_hamiltonian(params).astype(complex)
    H -= 1j * params.Gamma * dissipative_kernel(params)
    H[np.diag_indices(params.N)] = -1j * (params.Gamma + params.Gamma_f)
    return H


def drive_vector(params: SystemParams, s: int) -> np.ndarray:
    """Plane-wave phases ``exp(i s k0 x_i)`` at the atoms, ``s = +1`` for a
    right-moving wave."""
    return phase_powers(params.theta_pi, s * np.arange(1, params.N + 1))


def sublattice_operator(N: int) -> np.ndarray:
    return np.diag(np.where(np.arange(N) % 2 == 0, 1.0, -1.0))
