import math
import warnings

import numpy as np
import pytest
from hypothesis import given, reject, settings, strategies as st

from conftest import system_params
from oracles import transfer_matrix_chain
from quasibic.model import SystemParams, build_effective_hamiltonian, coherent_hamiltonian, drive_vector
from quasibic.scattering import (
    Direction,
    SingularityError,
    _solve_exact,
    field_profile,
    scatter_channels,
    scatter_exact,
    scatter_markovian,
    scatter_markovian_many,
    single_atom_amplitudes,
)
from quasibic.spectral import ClassificationWarning, edge_decay_rate

pytestmark = pytest.mark.filterwarnings("ignore::quasibic.spectral.ClassificationWarning")

deltas = st.floats(-8.0, 8.0)
directions = st.sampled_from([Direction.LEFT, Direction.RIGHT])


def _solve(p, delta, d=Direction.LEFT):
    """Markovian solve that discards draws sitting on a dark (singular) mode."""
    try:
        return scatter_markovian(p, delta, d)
    except SingularityError:
        reject()


def _tol(*results):
    # backward-stable solves: rounding error grows with the condition number
    return max(1e-10, 1e-14 * max(r.cond for r in results))


@pytest.mark.parametrize("delta,Gf", [(0.0, 0.0), (0.3, 0.0), (-1.1, 0.4), (0.0, 1.0), (2.0, -0.3)])
def test_single_atom_closed_form(delta, Gf):
    p = SystemParams(N=1, Gamma_f=Gf)
    res = scatter_markovian(p, delta)
    t, r = single_atom_amplitudes(delta, 1.0, Gf, phase=np.exp(2j * p.theta))
    assert res.t == pytest.approx(t, abs=1e-14)
    assert res.r == pytest.approx(r, abs=1e-14)


def test_single_atom_resonance_reflects_fully():
    res = scatter_markovian(SystemParams(N=1), 0.0)
    assert res.R == pytest.approx(1.0, abs=1e-15)
    assert res.T == pytest.approx(0.0, abs=1e-15)


def _markovian_without_coupling(p, delta):
    H = build_effective_hamiltonian(p) - coherent_hamiltonian(p)
    u = drive_vector(p, 1)
    lam = np.linalg.solve(delta * np.eye(p.N) - H, u)
    return 1 - 1j * p.Gamma * np.conj(u) @ lam, -1j * p.Gamma * u @ lam


@settings(max_examples=60)
# tau = 0 for a lossless atom on resonance makes the transfer matrix singular
@given(st.sampled_from([1, 3, 5, 9]), deltas, st.floats(0.01, 1.0))
def test_uncoupled_chain_matches_transfer_matrix(N, delta, Gf):
    p = SystemParams(N=N, Gamma_f=Gf)
    t_ref, r_ref = transfer_matrix_chain(delta, 1.0, Gf, p.theta, N)
    t, r = _markovian_without_coupling(p, delta)
    assert abs(t - t_ref) < 1e-10 and abs(r - r_ref) < 1e-10


@settings(max_examples=60)
@given(st.sampled_from([1, 3, 5, 9]), deltas, st.floats(0.01, 1.0), st.sampled_from([1e3, 1e4, 1e6]))
def test_exact_solver_uncoupled_matches_transfer_matrix(N, delta, Gf, w0):
    p = SystemParams(N=N, Gamma_f=Gf, omega0=w0)
    kd = p.theta * (1 + delta / w0)
    t_ref, r_ref = transfer_matrix_chain(delta, 1.0, Gf, kd, N)
    res, _ = _solve_exact(np.zeros(N - 1), p, delta, 1, allow_singular=False)
    assert abs(res.t - t_ref) < 1e-10 and abs(res.r - r_ref) < 1e-10


@settings(max_examples=150)
@given(system_params(loss=st.just(0.0)), deltas, directions)
def test_lossless_unitarity(p, delta, d):
    res = _solve(p, delta, d)
    assert abs(res.T + res.R - 1) < _tol(res)


@settings(max_examples=150)
@given(system_params(), deltas)
def test_transmission_is_reciprocal(p, delta):
    a = _solve(p, delta, Direction.LEFT)
    b = _solve(p, delta, Direction.RIGHT)
    assert abs(a.t - b.t) < _tol(a, b)


@settings(max_examples=150)
@given(system_params(), deltas, st.sampled_from(["3/2", "1/2", "1/3", "0.27"]))
def test_mirror_law(p, delta, theta):
    from quasibic.model import parse_pi_multiple

    tp = parse_pi_multiple(theta) if "/" in theta else float(theta)
    p = p.replace(theta_pi=tp)
    a = _solve(p, delta, Direction.LEFT)
    b = _solve(p.replace(phi=math.pi - p.phi), delta, Direction.RIGHT)
    assert abs(a.t - b.t) < _tol(a, b)
    phase = np.exp(-2j * p.theta * (p.N + 1))
    assert abs(b.r - phase * a.r) < _tol(a, b)


def test_mirror_law_is_exact_for_quarter_turn(ref_array):
    a = scatter_markovian(ref_array, 0.4, Direction.LEFT)
    b = scatter_markovian(ref_array.replace(phi=0.8 * math.pi), 0.4, Direction.RIGHT)
    assert abs(a.r - b.r) < 1e-15 and abs(a.t - b.t) < 1e-15


@settings(max_examples=150)
@given(system_params(), deltas, directions)
def test_channel_resummation_matches_direct_solve(p, delta, d):
    direct = _solve(p, delta, d)
    ch = scatter_channels(p, delta, d)
    tol = _tol(direct)
    assert abs(ch.r - direct.r) < tol * max(1.0, abs(direct.r))
    assert abs(ch.t - direct.t) < tol * max(1.0, abs(direct.t))


def test_vectorized_matches_loop(ref_array):
    grid = np.linspace(-5, 5, 31)
    t, r = scatter_markovian_many(ref_array.replace(Gamma_f=0.1), grid, Direction.RIGHT)
    for k, x in enumerate(grid):
        res = scatter_markovian(ref_array.replace(Gamma_f=0.1), x, Direction.RIGHT)
        assert t[k] == pytest.approx(res.t, abs=1e-12) and r[k] == pytest.approx(res.r, abs=1e-12)


def test_resonant_transmission_cancels_between_edge_and_bulk(ref_array):
    ch = scatter_channels(ref_array, 0.0)
    assert abs(ch.t) ** 2 < 1e-6
    # forward cancellation: the edge and bulk terms sum to -i
    assert abs(ch.xi_edge_t + ch.xi_bulk_t + 1j) < 1e-3


@settings(max_examples=100)
@given(system_params(loss=st.floats(0.01, 1.0)), st.floats(-6.0, 6.0), directions)
def test_exact_solver_converges_to_markovian(p, delta, d):
    # a little loss keeps dark modes off the singular point of both solvers
    m = scatter_markovian(p, delta, d)
    e, _ = scatter_exact(p.replace(omega0=1e9), delta, d)
    assert abs(e.T - m.T) < 1e-4 and abs(e.R - m.R) < 1e-4


def test_exact_minus_markovian_scales_as_inverse_carrier(ref_array):
    grid = np.linspace(-10, 10, 401)
    worst = []
    for w0 in (1e4, 1e5, 1e6):
        p = ref_array.replace(omega0=w0)
        tm, rm = scatter_markovian_many(p, grid)
        d = 0.0
        for k, x in enumerate(grid):
            e, _ = scatter_exact(p, x)
            d = max(d, abs(e.T - abs(tm[k]) ** 2), abs(e.R - abs(rm[k]) ** 2))
        worst.append(d)
    assert worst[1] < worst[0] / 5 and worst[2] < worst[1] / 5


def test_exact_agrees_away_from_narrow_bulk_resonances(ref_array):
    # the narrowest bulk modes sit near |delta| = 3.3; elsewhere agreement is tight
    grid = np.concatenate([np.linspace(-10, -4, 61), np.linspace(-2.5, 2.5, 101), np.linspace(4, 10, 61)])
    tm, rm = scatter_markovian_many(ref_array, grid)
    for k, x in enumerate(grid):
        e, _ = scatter_exact(ref_array, x)
        assert abs(e.T - abs(tm[k]) ** 2) < 1e-2 and abs(e.R - abs(rm[k]) ** 2) < 1e-2


def test_exact_solver_is_reciprocal_and_unitary(ref_array):
    for x in (-1.0, 0.0, 0.7):
        a, _ = scatter_exact(ref_array, x, Direction.LEFT)
        b, _ = scatter_exact(ref_array, x, Direction.RIGHT)
        assert abs(a.t - b.t) < 1e-10
        assert abs(a.T + a.R - 1) < 1e-10 and abs(b.T + b.R - 1) < 1e-10


def test_exact_solver_guards_markovian_regime(ref_array):
    with pytest.raises(ValueError):
        scatter_exact(ref_array.replace(omega0=100.0), 0.0)


def test_field_profile_outer_segments(ref_array):
    p = ref_array.replace(Gamma_f=0.05)
    res, pw = scatter_exact(p, 0.3)
    x = np.array([-3.0, 0.5, 7.5, 12.0])
    I = field_profile(pw, x)
    assert I[0] == pytest.approx(1 + res.R, rel=1e-12)
    assert I[1] == pytest.approx(1 + res.R, rel=1e-12)
    assert I[2] == pytest.approx(res.T, rel=1e-12)
    assert I[3] == pytest.approx(res.T, rel=1e-12)


def test_field_profile_interference_option(ref_array):
    res, pw = scatter_exact(ref_array, 0.3)
    x = np.linspace(-2, 0.9, 7)
    I = field_profile(pw, x, interference=True)
    ref = np.abs(np.exp(1j * pw.k * x) + pw.left[0] * np.exp(-1j * pw.k * x)) ** 2
    np.testing.assert_allclose(I, ref, rtol=1e-12)


def test_point_on_atom_belongs_to_right_segment(ref_array):
    _, pw = scatter_exact(ref_array, 0.0)
    I_on = field_profile(pw, [3.0])
    I_right = field_profile(pw, [3.5])
    assert I_on[0] == pytest.approx(I_right[0], rel=1e-12)


def test_singularity_at_lasing_threshold(ref_array):
    ge = edge_decay_rate(ref_array)
    with pytest.raises(SingularityError) as exc:
        scatter_markovian(ref_array.replace(Gamma_f=-ge), 0.0)
    assert exc.value.cond > 1e12
    assert exc.value.eps_j is not None and abs(exc.value.eps_j) < 1e-10
    res = scatter_markovian(ref_array.replace(Gamma_f=-ge), 0.0, allow_singular=True)
    assert res.solver == "markovian"


def test_non_finite_detuning_rejected(ref_array):
    with pytest.raises(ValueError):
        scatter_markovian(ref_array, float("nan"))


def test_direction_parsing():
    assert Direction.parse("left") is Direction.LEFT
    assert Direction.parse("R") is Direction.RIGHT
    assert Direction.parse(-1) is Direction.RIGHT
    with pytest.raises(ValueError):
        Direction.parse("up")


def test_warnings_are_silent_for_reference_point(ref_array):
    with warnings.catch_warnings():
        warnings.simplefilter("error", ClassificationWarning)
        scatter_channels(ref_array, 0.0)
