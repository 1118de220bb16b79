import math

import numpy as np
import pytest

from oracles import modal_trajectory
from quasibic.dynamics import (
    DecayFitError,
    GrowthWarning,
    PulseSpec,
    evolve,
    fit_decay_rate,
    growth_rate,
    reconstruct_field,
)
from quasibic.model import build_effective_hamiltonian, drive_vector
from quasibic.scattering import Direction, field_profile, scatter_exact, scatter_markovian
from quasibic.spectral import edge_decay_rate


@pytest.mark.parametrize("Gf,delta_c,direction", [(0.0, 0.0, Direction.LEFT), (0.1, 0.5, Direction.RIGHT),
                                                  (0.013, -1.2, Direction.LEFT)])
def test_trajectory_matches_modal_closed_form(ref_array, Gf, delta_c, direction):
    p = ref_array.replace(Gamma_f=Gf)
    pulse = PulseSpec(sigma_t=2.0, delta_c=delta_c, direction=direction)
    traj = evolve(p, pulse, t_max=60.0, dt_out=0.25)
    ref = modal_trajectory(build_effective_hamiltonian(p), drive_vector(p, int(direction)), p.Gamma,
                           pulse.sigma_t, pulse.t_center, delta_c, traj.times)
    scale = np.abs(ref).max()
    assert np.abs(traj.lam - ref).max() < 1e-7 * scale


def test_pulse_defaults_and_energy():
    pulse = PulseSpec(sigma_t=3.0)
    assert pulse.t_center == 18.0
    t = np.linspace(-100, 200, 300001)
    assert np.trapezoid(np.abs(pulse.envelope(t)) ** 2, t) == pytest.approx(pulse.energy(), rel=1e-8)
    flat = PulseSpec(sigma_t=1.0, plateau=10.0)
    assert np.trapezoid(np.abs(flat.envelope(t)) ** 2, t) == pytest.approx(flat.energy(), rel=1e-8)


def test_pulse_rejects_bad_width():
    with pytest.raises(ValueError):
        PulseSpec(sigma_t=0.0)


def _post_pulse_rate(p, span=150.0):
    pulse = PulseSpec()
    t0 = pulse.t_end + 30.0
    traj = evolve(p, pulse, t_max=t0 + span, dt_out=0.5)
    return fit_decay_rate(traj, (t0, t0 + span))


def test_lossless_decay_is_twice_edge_rate(ref_array):
    ge = edge_decay_rate(ref_array)
    assert _post_pulse_rate(ref_array) == pytest.approx(2 * ge, rel=0.02)


def test_critical_coupling_decay_rate(ref_array):
    ge = edge_decay_rate(ref_array)
    rate = _post_pulse_rate(ref_array.replace(Gamma_f=ge))
    assert rate == pytest.approx(2 * (ge + ge), rel=0.02)


def test_flux_balance_without_loss(ref_array):
    traj = evolve(ref_array, PulseSpec(), t_max=120.0, dt_out=0.5)
    assert traj.energy_in == pytest.approx(PulseSpec().energy(), rel=1e-6)
    stored = traj.excitation[-1]
    assert abs(traj.energy_in - traj.energy_out - stored) < 1e-6 * traj.energy_in


def test_flux_balance_with_loss(ref_array):
    p = ref_array.replace(Gamma_f=0.05)
    traj = evolve(p, PulseSpec(), t_max=120.0, dt_out=0.05)
    absorbed = 2 * p.Gamma_f * np.trapezoid(traj.excitation, traj.times)
    balance = traj.energy_in - traj.energy_out - traj.excitation[-1] - absorbed
    assert abs(balance) < 1e-4 * traj.energy_in


def test_response_is_linear_in_amplitude(ref_array):
    a = evolve(ref_array, PulseSpec(), t_max=40.0, dt_out=1.0)
    b = evolve(ref_array, PulseSpec(), t_max=40.0, dt_out=1.0, amplitude=2.0)
    np.testing.assert_allclose(b.lam, 2 * a.lam, atol=1e-9 * np.abs(a.lam).max())


def test_long_flat_pulse_reaches_steady_state(ref_array):
    pulse = PulseSpec(sigma_t=50.0, plateau=1500.0)
    t_mid = pulse.t_center + 0.9 * pulse.plateau
    traj = evolve(ref_array, pulse, t_max=t_mid, dt_out=t_mid / 50)
    ss = scatter_markovian(ref_array, 0.0)
    lam = traj.lam[-1] * np.exp(1j * pulse.delta_c * traj.times[-1])
    np.testing.assert_allclose(lam, math.sqrt(ref_array.Gamma) * ss.Lambda, atol=1e-2 * np.abs(ss.Lambda).max())
    fwd, back = traj.outputs()
    assert abs(fwd[-1]) ** 2 == pytest.approx(ss.T, abs=1e-2)
    assert abs(back[-1]) ** 2 == pytest.approx(ss.R, rel=1e-2)


def test_flat_pulse_field_matches_stationary_profile(ref_array):
    pulse = PulseSpec(sigma_t=50.0, plateau=1500.0)
    t_mid = pulse.t_center + 0.9 * pulse.plateau
    traj = evolve(ref_array, pulse, t_max=t_mid, dt_out=t_mid / 50)
    x = np.linspace(-2.0, 10.0, 97)
    field = reconstruct_field(traj, x)[-1]
    _, pw = scatter_exact(ref_array, 0.0)
    ref = field_profile(pw, x)
    assert np.abs(field - ref).max() < 1e-2 * ref.max()


def test_gain_above_threshold_warns(ref_array):
    ge = edge_decay_rate(ref_array)
    p = ref_array.replace(Gamma_f=-2 * ge)
    assert growth_rate(p) == pytest.approx(ge)
    with pytest.warns(GrowthWarning):
        evolve(p, PulseSpec(), t_max=5.0, dt_out=1.0)


def test_fit_rejects_short_window(ref_array):
    traj = evolve(ref_array, PulseSpec(), t_max=10.0, dt_out=1.0)
    with pytest.raises(DecayFitError):
        fit_decay_rate(traj, (3.0, 4.0))


def test_fit_rejects_beating_window(ref_array):
    # during the pulse the excitation rises then falls
    traj = evolve(ref_array, PulseSpec(), t_max=30.0, dt_out=0.25)
    with pytest.raises(DecayFitError):
        fit_decay_rate(traj, (0.5, 30.0))


def test_evolve_rejects_nonpositive_times(ref_array):
    with pytest.raises(ValueError):
        evolve(ref_array, PulseSpec(), t_max=0.0, dt_out=1.0)
