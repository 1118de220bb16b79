"""Time-domain response to a single-photon wave packet.

Markovian amplitude equations in the rotating frame::

    d lambda / dt = -i H_eff lambda - i sqrt(Gamma) f(t) u

with ``u_i = exp(i s theta i)`` and ``f`` the incident envelope (unit peak
amplitude).  Output fields follow from the input-output relations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .model import SystemParams, build_effective_hamiltonian, drive_vector
from .scattering import Direction
from .spectral import edge_decay_rate


class GrowthWarning(RuntimeWarning):
    """Net gain exceeds the edge-mode loss; amplitudes grow without bound."""


class DecayFitError(RuntimeError):
    pass


@dataclass(frozen=True)
class PulseSpec:
    """Incident wave packet.

    Gaussian envelope of standard deviation ``sigma_t`` centred at
    ``t_center``; a positive ``plateau`` inserts a flat top of that duration
    (Gaussian ramps on both sides), used for the steady-state limit.
    """

    sigma_t: float = 2.0
    t_center: float | None = None
    delta_c: float = 0.0
    direction: Direction = Direction.LEFT
    plateau: float = 0.0

    def __post_init__(self):
        if not self.sigma_t > 0:
            raise ValueError(f"sigma_t must be > 0, got {self.sigma_t}")
        if self.plateau < 0:
            raise ValueError(f"plateau must be >= 0, got {self.plateau}")
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        if self.t_center is None:
            object.__setattr__(self, "t_center", 6.0 * self.sigma_t)

    @property
    def t_end(self) -> float:
        """Time after which the envelope is below ``exp(-18)``."""
        return self.t_center + self.plateau + 6.0 * self.sigma_t

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        lead = t - self.t_center
        tail = t - (self.t_center + self.plateau)
        x = np.where(lead < 0, lead, np.where(tail > 0, tail, 0.0))
        return np.exp(-0.5 * (x / self.sigma_t) ** 2 - 1j * self.delta_c * t)

    def energy(self) -> float:
        """``integral |f|^2 dt`` over the whole real line."""
        return self.sigma_t * math.sqrt(math.pi) + self.plateau


@dataclass
class Trajectory:
    times: np.ndarray
    lam: np.ndarray  # shape (len(times), N)
    params: SystemParams
    pulse: PulseSpec
    energy_in: float = 0.0
    energy_out: float = 0.0
    field: np.ndarray | None = None
    x_grid: np.ndarray | None = None

    @property
    def excitation(self) -> np.ndarray:
        return np.sum(np.abs(self.lam) ** 2, axis=1)

    def populations(self) -> np.ndarray:
        return np.abs(self.lam) ** 2

    def outputs(self) -> tuple[np.ndarray, np.ndarray]:
        """Forward (transmitted) and backward (reflected) output envelopes."""
        return output_fields(self.params, self.pulse, self.times, self.lam)


def output_fields(params: SystemParams, pulse: PulseSpec, times, lam):
    s = int(pulse.direction)
    u = drive_vector(params, s)
    sg = math.sqrt(params.Gamma)
    fwd = pulse.envelope(times) - 1j * sg * lam @ np.conj(u)
    back = -1j * sg * lam @ u
    return fwd, back


def growth_rate(params: SystemParams) -> float:
    """Asymptotic amplitude growth rate of the edge mode (positive above threshold)."""
    return -(edge_decay_rate(params) + params.Gamma_f)


def evolve(params: SystemParams, pulse: PulseSpec, t_max: float, dt_out: float,
           rtol: float = 1e-10, atol: float = 1e-14, method: str = "DOP853",
           amplitude: float = 1.0) -> Trajectory:
    """Integrate the driven amplitude equations from ``t = 0`` to ``t_max``.

    The running input and output photon fluxes are integrated alongside the
    amplitudes, so ``Trajectory.energy_out`` is exact to solver tolerance.
    """
    if not (t_max > 0 and dt_out > 0):
        raise ValueError("t_max and dt_out must be positive")
    if params.Gamma_f < 0:
        rate = growth_rate(params)
        if rate > 0:
            warnings.warn(f"gain above threshold: edge amplitude grows as exp({rate:.4g} t)",
                          GrowthWarning, stacklevel=2)
    N = params.N
    H = build_effective_hamiltonian(params)
    s = int(pulse.direction)
    u = drive_vector(params, s)
    sg = math.sqrt(params.Gamma)
    M = -1j * H
    drive = -1j * sg * amplitude * u

    def rhs(t, y):
        lam = y[:N]
        f = pulse.envelope(t)
        dy = np.empty(N + 2, dtype=complex)
        dy[:N] = M @ lam + drive * f
        fwd = amplitude * f - 1j * sg * np.dot(np.conj(u), lam)
        back = -1j * sg * np.dot(u, lam)
        dy[N] = abs(amplitude * f) ** 2
        dy[N + 1] = abs(fwd) ** 2 + abs(back) ** 2
        return dy

    times = np.arange(0.0, t_max + 0.5 * dt_out, dt_out)
    times = times[times <= t_max]
    y0 = np.zeros(N + 2, dtype=complex)
    sol = solve_ivp(rhs, (0.0, float(times[-1])), y0, method=method, t_eval=times,
                    rtol=rtol, atol=atol, max_step=max(pulse.sigma_t / 4, dt_out))
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    Y = sol.y.T
    return Trajectory(times=sol.t, lam=Y[:, :N], params=params, pulse=pulse,
                      energy_in=float(Y[-1, N].real), energy_out=float(Y[-1, N + 1].real))


def reconstruct_field(traj: Trajectory, x_grid, delay_per_site: float | None = None) -> np.ndarray:
    """Space-time intensity ``|phi_r|^2 + |phi_l|^2`` on ``x_grid`` (units of d).

    Each atom radiates into both directions with the static phase
    ``exp(i theta |x - x_i|)``; propagation delay ``(x - x_i) d / v_g`` is
    applied by interpolating the stored amplitudes.  The default delay per
    spacing is ``theta / omega0``.
    """
    params, pulse = traj.params, traj.pulse
    if delay_per_site is None:
        delay_per_site = params.theta / params.omega0
    x = np.asarray(x_grid, dtype=float)
    t = traj.times
    s = int(pulse.direction)
    xa = params.positions
    sg = math.sqrt(params.Gamma)
    theta = params.theta

    # incident packet enters from x = 0 (left incidence) or x = N + 1 (right)
    x_ref = 0.0 if s == 1 else float(params.N + 1)
    tau = t[:, None] - s * (x[None, :] - x_ref) * delay_per_site
    inc = pulse.envelope(tau) * np.exp(1j * s * theta * x[None, :])
    inc = np.where(tau >= 0, inc, 0.0)

    phi_r = np.zeros((len(t), len(x)), dtype=complex)
    phi_l = np.zeros_like(phi_r)
    if s == 1:
        phi_r += inc
    else:
        phi_l += inc
    for i, xi in enumerate(xa):
        lam_i = traj.lam[:, i]
        dist = np.abs(x - xi)
        tr = t[:, None] - dist[None, :] * delay_per_site
        re = np.interp(tr, t, lam_i.real, left=0.0)
        im = np.interp(tr, t, lam_i.imag, left=0.0)
        emitted = -1j * sg * (re + 1j * im) * np.exp(1j * theta * dist)[None, :]
        # a point on atom i counts as the segment to its right
        phi_r += emitted * (x >= xi)[None, :]
        phi_l += emitted * (x < xi)[None, :]
    return np.abs(phi_r) ** 2 + np.abs(phi_l) ** 2


def fit_decay_rate(traj: Trajectory, window: tuple[float, float], floor: float = 1e-28,
                   monotone_tol: float = 1e-6) -> float:
    """Energy decay rate from a least-squares fit of ``log sum |lambda|^2``.

    Raises :class:`DecayFitError` when the window holds too few points, the
    signal is below ``floor``, or the excitation is not monotone (beating).
    """
    t0, t1 = window
    mask = (traj.times >= t0) & (traj.times <= t1)
    if mask.sum() < 3:
        raise DecayFitError(f"window {window} contains fewer than 3 samples")
    tt = traj.times[mask]
    P = traj.excitation[mask]
    if np.any(P <= floor):
        raise DecayFitError("excitation falls below the numerical floor inside the window")
    logP = np.log(P)
    steps = np.diff(logP)
    if np.any(steps > monotone_tol * np.abs(logP[:-1]).max()) and np.any(steps < 0):
        raise DecayFitError("excitation is not monotone in the window (beating); widen or "
                            "move the window later")
    slope = np.polyfit(tt, logP, 1)[0]
    return float(-slope)
