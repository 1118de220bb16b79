"""Derived quantities: critical coupling, time-reversal metrics, scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SystemParams
from .scattering import Direction, SingularityError, scatter_channels, scatter_markovian
from .spectral import ExceptionalPointError, edge_decay_rate, spectrum

SINGULAR_MARGIN = 1e-3


class NoInteriorMinimum(RuntimeError):
    pass


def resonant_reflection(params: SystemParams, Gamma_f: float, direction=Direction.LEFT) -> float:
    return scatter_markovian(params.replace(Gamma_f=Gamma_f), 0.0, direction).R


def resonant_amplitudes(params: SystemParams, Gamma_f, direction=Direction.LEFT):
    """``(t, r)`` at ``delta = 0`` for an array of ``Gamma_f`` values.

    Uses one eigendecomposition and the uniform-shift property of ``Gamma_f``;
    falls back to direct solves if the expansion is unavailable.
    """
    g = np.atleast_1d(np.asarray(Gamma_f, dtype=float))
    try:
        base = spectrum(params.replace(Gamma_f=0.0))
    except ExceptionalPointError:
        out = [scatter_markovian(params.replace(Gamma_f=x), 0.0, direction, allow_singular=True)
               for x in g]
        return np.array([o.t for o in out]), np.array([o.r for o in out])
    ch = scatter_channels(params.replace(Gamma_f=0.0), 0.0, direction, modes=base)
    eps = ch.eps[None, :] + 1j * g[:, None]
    r = -1j * np.sum(ch.Xi[None, :] / eps, axis=1)
    t = 1.0 - 1j * np.sum(ch.Xi_t[None, :] / eps, axis=1)
    return t, r


def _golden_section(f, a: float, b: float, tol: float) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _bracketed_minimum(f, lo: float, hi: float, tol: float, n: int = 241, log: bool = True,
                       expand: int = 3) -> float:
    """Locate an interior minimum of ``f`` on ``[lo, hi]`` (grid scan, then
    golden section on the neighbouring cells); expand the bracket if the
    scan minimum sits on an edge."""
    for _ in range(expand + 1):
        grid = np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)
        vals = np.array([f(x) for x in grid])
        k = int(np.argmin(vals))
        if 0 < k < n - 1:
            return _golden_section(f, grid[k - 1], grid[k + 1], tol)
        if k == 0:
            lo = lo / 10.0 if log else lo - (hi - lo)
        else:
            hi = hi * 10.0 if log else hi + (hi - lo)
    raise NoInteriorMinimum(f"no interior minimum found in [{lo:g}, {hi:g}]")


def find_gamma_r0(params: SystemParams, direction=Direction.LEFT, tol: float = 1e-6) -> float:
    """Loss rate minimizing resonant reflection ``R(delta=0)``.

    Searches ``Gamma_f`` in ``[0.1, 10] * Gamma_edge`` (log-bracketed); raises
    :class:`NoInteriorMinimum` if ``R`` is monotone there.
    """
    ge = edge_decay_rate(params)
    f = lambda g: abs(resonant_amplitudes(params, g, direction)[1][0]) ** 2
    return _bracketed_minimum(f, 0.1 * ge, 10.0 * ge, tol * params.Gamma, expand=0)


def find_gain_reflection_minimum(params: SystemParams, direction=Direction.RIGHT,
                                 tol: float = 1e-9) -> float:
    """Gain value (``Gamma_f < -Gamma_edge``) where resonant reflection dips."""
    ge = edge_decay_rate(params)
    f = lambda x: abs(resonant_amplitudes(params, -x, direction)[1][0]) ** 2
    return -_bracketed_minimum(f, (1 + SINGULAR_MARGIN) * ge, 10.0 * ge, tol * params.Gamma,
                               n=2001, expand=0)


def find_absorption_maximum(params: SystemParams, tol: float = 1e-9) -> float:
    ge = edge_decay_rate(params)

    def f(g):
        t, r = resonant_amplitudes(params, g)
        return -(1.0 - abs(t[0]) ** 2 - abs(r[0]) ** 2)

    return _bracketed_minimum(f, 0.05 * ge, 20.0 * ge, tol * params.Gamma)


def chi(params: SystemParams, Gamma_f, direction=Direction.LEFT):
    """``ln R0`` with ``R0 = |r(delta=0)|^2``."""
    _, r = resonant_amplitudes(params, Gamma_f, direction)
    out = np.log(np.abs(r) ** 2)
    return float(out[0]) if np.ndim(Gamma_f) == 0 else out


def _check_not_singular(params: SystemParams, Gamma_f, override: bool) -> None:
    if override:
        return
    ge = edge_decay_rate(params)
    g = np.abs(np.atleast_1d(Gamma_f))
    if np.any(np.abs(g - ge) < SINGULAR_MARGIN * ge):
        raise SingularityError(float("inf"), message=(
            f"|Gamma_f| within {SINGULAR_MARGIN:g} Gamma_edge of the lasing threshold "
            f"Gamma_edge={ge:.6g}; pass override=True to evaluate anyway"))


def delta_chi(params: SystemParams, Gamma_f, direction=Direction.LEFT, override: bool = False):
    """Time-reversal asymmetry ``|chi(Gamma_f) + chi(-Gamma_f)|``."""
    _check_not_singular(params, Gamma_f, override)
    g = np.abs(np.atleast_1d(np.asarray(Gamma_f, dtype=float)))
    out = np.abs(chi(params, g, direction) + chi(params, -g, direction))
    return float(out[0]) if np.ndim(Gamma_f) == 0 else out


@dataclass
class TimeReversalReport:
    Gamma_f: np.ndarray
    chi_plus: np.ndarray
    chi_minus: np.ndarray
    Gamma_edge: float
    Gamma_r0: float

    @property
    def delta_chi(self) -> np.ndarray:
        return np.abs(self.chi_plus + self.chi_minus)


def time_reversal_report(params: SystemParams, Gamma_f_grid, direction=Direction.LEFT,
                         override: bool = False) -> TimeReversalReport:
    g = np.abs(np.asarray(Gamma_f_grid, dtype=float))
    _check_not_singular(params, g, override)
    return TimeReversalReport(Gamma_f=g, chi_plus=chi(params, g, direction),
                              chi_minus=chi(params, -g, direction),
                              Gamma_edge=edge_decay_rate(params), Gamma_r0=find_gamma_r0(params))


def find_time_reversal_phi(J0: float = 2.2, N: int = 7, lo: float = 0.2 * math.pi,
                           hi: float = 0.3 * math.pi, tol: float = 1e-7, **kw) -> float:
    """Dimerization angle where ``Gamma_r0`` touches ``Gamma_edge``."""
    base = SystemParams(N=N, J0=J0, **kw)

    def mismatch(phi):
        p = base.replace(phi=phi)
        return abs(find_gamma_r0(p, tol=1e-12) / edge_decay_rate(p) - 1.0)

    return _bracketed_minimum(mismatch, lo, hi, tol, n=21, log=False, expand=0)


@dataclass
class AbsorptionMap:
    J0: np.ndarray
    phi: np.ndarray
    eta: np.ndarray  # shape (len(J0), len(phi)); NaN where undefined
    Gamma_edge: np.ndarray
    contour: list[tuple[float, float]] = field(default_factory=list)


def absorption_map(J0_grid, phi_grid, Gamma_f: float, N: int = 7, **kw) -> AbsorptionMap:
    """Resonant absorption over ``(J0, phi)`` and the ``Gamma_edge = Gamma_f`` contour."""
    J0_grid = np.asarray(J0_grid, dtype=float)
    phi_grid = np.asarray(phi_grid, dtype=float)
    eta = np.full((len(J0_grid), len(phi_grid)), np.nan)
    ge = np.full_like(eta, np.nan)
    for a, J0 in enumerate(J0_grid):
        for b, phi in enumerate(phi_grid):
            p = SystemParams(N=N, J0=J0, phi=phi, Gamma_f=Gamma_f, **kw)
            try:
                res = scatter_markovian(p, 0.0)
                eta[a, b] = res.eta
                ge[a, b] = _quiet_edge_rate(p)
            except (SingularityError, ExceptionalPointError):
                pass
    contour = []
    for a, J0 in enumerate(J0_grid):
        diff = ge[a] - Gamma_f
        for b in range(len(phi_grid) - 1):
            if np.isfinite(diff[b]) and np.isfinite(diff[b + 1]) and diff[b] * diff[b + 1] < 0:
                contour.append((float(J0), _bisect_phi(J0, phi_grid[b], phi_grid[b + 1],
                                                       Gamma_f, N, kw)))
    return AbsorptionMap(J0=J0_grid, phi=phi_grid, eta=eta, Gamma_edge=ge, contour=contour)


def _quiet_edge_rate(p: SystemParams) -> float:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return edge_decay_rate(p)


def _bisect_phi(J0, a, b, Gamma_f, N, kw, tol=1e-10):
    from scipy.optimize import brentq

    f = lambda phi: _quiet_edge_rate(SystemParams(N=N, J0=J0, phi=phi, **kw)) - Gamma_f
    return float(brentq(f, a, b, xtol=tol))


@dataclass
class AmplificationScan:
    Gamma_f: np.ndarray
    T: np.ndarray
    R: np.ndarray
    cond: np.ndarray
    direction: Direction
    transition: float | None = None  # Gamma_f of the gain-side reflection minimum

    @property
    def TR(self) -> np.ndarray:
        return self.T + self.R


def amplification_scan(params: SystemParams, Gamma_f_grid, direction=Direction.LEFT,
                       override: bool = False) -> AmplificationScan:
    """Resonant ``T``, ``R`` over loss and gain; flags the gain-side reflection
    minimum (sign change of ``d ln R / d Gamma_f`` beyond threshold)."""
    g = np.asarray(Gamma_f_grid, dtype=float)
    ge = edge_decay_rate(params)
    if not override and np.any(np.abs(g + ge) < SINGULAR_MARGIN * ge):
        raise SingularityError(float("inf"), message="grid touches the lasing threshold "
                               "Gamma_f = -Gamma_edge; pass override=True")
    T = np.empty(len(g))
    R = np.empty(len(g))
    cond = np.empty(len(g))
    for k, x in enumerate(g):
        res = scatter_markovian(params.replace(Gamma_f=x), 0.0, direction, allow_singular=True)
        T[k], R[k], cond[k] = res.T, res.R, res.cond
    transition = None
    gain = np.flatnonzero(g < -ge)
    if len(gain) >= 3:
        order = gain[np.argsort(g[gain])]
        lnR = np.log(R[order])
        k = int(np.argmin(lnR))
        if 0 < k < len(order) - 1:
            transition = float(g[order][k])
    return AmplificationScan(Gamma_f=g, T=T, R=R, cond=cond,
                             direction=Direction.parse(direction), transition=transition)
