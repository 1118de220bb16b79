import math

import numpy as np
import pytest

from oracles import grid_argmin
from quasibic.analysis import (
    NoInteriorMinimum,
    _bracketed_minimum,
    _golden_section,
    absorption_map,
    amplification_scan,
    chi,
    delta_chi,
    find_absorption_maximum,
    find_gain_reflection_minimum,
    find_gamma_r0,
    find_time_reversal_phi,
    resonant_amplitudes,
    time_reversal_report,
)
from quasibic.model import SystemParams
from quasibic.scattering import Direction, SingularityError, scatter_markovian
from quasibic.spectral import edge_decay_rate


def _R0(p, g, d=Direction.LEFT):
    return scatter_markovian(p.replace(Gamma_f=g), 0.0, d, allow_singular=True).R


def test_golden_section_on_parabola():
    assert _golden_section(lambda x: (x - 0.3) ** 2, -1.0, 2.0, 1e-10) == pytest.approx(0.3, abs=1e-9)


def test_bracket_reports_monotone_function():
    with pytest.raises(NoInteriorMinimum):
        _bracketed_minimum(lambda x: x, 1.0, 2.0, 1e-8, expand=0)


def test_shifted_amplitudes_match_direct_solves(ref_array):
    g = np.array([-0.5, -0.02, 0.0, 0.013, 0.4])
    for d in Direction:
        t, r = resonant_amplitudes(ref_array, g, d)
        for k, x in enumerate(g):
            res = scatter_markovian(ref_array.replace(Gamma_f=x), 0.0, d)
            assert abs(t[k] - res.t) < 1e-10 and abs(r[k] - res.r) < 1e-10


def test_gamma_r0_matches_brute_force(ref_array):
    ge = edge_decay_rate(ref_array)
    x, _, step = grid_argmin(lambda g: _R0(ref_array, g), 0.1 * ge, 10 * ge, n=4001, log=True)
    assert find_gamma_r0(ref_array) == pytest.approx(x, abs=2 * step)


def test_absorption_peak_matches_brute_force(ref_array):
    ge = edge_decay_rate(ref_array)

    def neg_eta(g):
        return -scatter_markovian(ref_array.replace(Gamma_f=g), 0.0).eta

    x, _, step = grid_argmin(neg_eta, 0.05 * ge, 20 * ge, n=4001, log=True)
    assert find_absorption_maximum(ref_array) == pytest.approx(x, abs=2 * step)


def test_gain_reflection_minimum_matches_brute_force(ref_array):
    ge = edge_decay_rate(ref_array)
    x, _, step = grid_argmin(lambda g: _R0(ref_array, -g, Direction.RIGHT), 1.001 * ge, 10 * ge, n=8001, log=True)
    assert find_gain_reflection_minimum(ref_array) == pytest.approx(-x, abs=2 * step)


def test_chi_is_log_reflectance(ref_array):
    assert chi(ref_array, 0.02) == pytest.approx(math.log(_R0(ref_array, 0.02)), rel=1e-12)
    np.testing.assert_allclose(chi(ref_array, np.array([0.0, 0.02])), [math.log(_R0(ref_array, 0.0)),
                                                                    math.log(_R0(ref_array, 0.02))], atol=1e-12)


def test_delta_chi_definition(ref_array):
    g = 0.004
    ref = abs(math.log(_R0(ref_array, g)) + math.log(_R0(ref_array, -g)))
    assert delta_chi(ref_array, g) == pytest.approx(ref, rel=1e-10)
    assert delta_chi(ref_array, -g) == pytest.approx(ref, rel=1e-10)


def test_delta_chi_guards_threshold(ref_array):
    ge = edge_decay_rate(ref_array)
    with pytest.raises(SingularityError):
        delta_chi(ref_array, ge * (1 + 1e-4))
    assert np.isfinite(delta_chi(ref_array, ge * (1 + 1e-4), override=True))


def test_time_reversal_report(ref_array):
    ge = edge_decay_rate(ref_array)
    rep = time_reversal_report(ref_array, np.linspace(0, 0.9 * ge, 10))
    np.testing.assert_allclose(rep.delta_chi, delta_chi(ref_array, rep.Gamma_f), rtol=1e-12)
    assert rep.Gamma_r0 == pytest.approx(find_gamma_r0(ref_array))


def test_time_reversal_phi_equalizes_rates():
    phi = find_time_reversal_phi()
    p = SystemParams(phi=phi)
    assert phi / math.pi == pytest.approx(0.241, abs=2e-3)
    assert find_gamma_r0(p, tol=1e-12) / edge_decay_rate(p) == pytest.approx(1.0, abs=1e-3)


def test_absorption_map_contour_lies_on_critical_coupling():
    J0 = np.linspace(1.0, 4.0, 7)
    phi = np.linspace(0.05, 0.45, 21) * math.pi
    amap = absorption_map(J0, phi, Gamma_f=0.013)
    assert amap.eta.shape == (7, 21)
    assert len(amap.contour) >= 3
    for J, ph in amap.contour:
        assert edge_decay_rate(SystemParams(J0=J, phi=ph)) == pytest.approx(0.013, rel=1e-6)
        # deep in the gapped regime the critically coupled array absorbs almost fully
        if ph < 0.3 * math.pi:
            assert scatter_markovian(SystemParams(J0=J, phi=ph, Gamma_f=0.013), 0.0).eta > 0.9


def test_amplification_scan_flags_transition(ref_array):
    ge = edge_decay_rate(ref_array)
    # the dip sits just beyond threshold, near -1.0035 Gamma_edge
    grid = -np.geomspace(1.0015 * ge, 10 * ge, 2000)
    scan = amplification_scan(ref_array, grid, Direction.RIGHT)
    assert scan.transition is not None
    assert scan.transition == pytest.approx(find_gain_reflection_minimum(ref_array), rel=0.02)
    np.testing.assert_allclose(scan.TR, scan.T + scan.R)


def test_amplification_scan_guards_threshold(ref_array):
    ge = edge_decay_rate(ref_array)
    with pytest.raises(SingularityError):
        amplification_scan(ref_array, [-ge])
    scan = amplification_scan(ref_array, [-ge], override=True)
    assert scan.cond[0] > 1e10


def test_log_total_minimizer_is_absorption_peak(ref_array):
    ge = edge_decay_rate(ref_array)
    grid = np.geomspace(0.05 * ge, 20 * ge, 3001)
    t, r = resonant_amplitudes(ref_array, grid)
    k = int(np.argmin(np.log(np.abs(t) ** 2 + np.abs(r) ** 2)))
    step = grid[k] * (grid[1] / grid[0] - 1)
    assert find_absorption_maximum(ref_array) == pytest.approx(grid[k], abs=step)


def test_delta_chi_is_even(ref_array):
    g = np.array([0.001, 0.004, 0.009])
    np.testing.assert_array_equal(delta_chi(ref_array, g), delta_chi(ref_array, -g))
