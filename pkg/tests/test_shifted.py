import math

import numpy as np
import pytest

from xlink.config import ScenarioConfig
from xlink.experiments import count_bursts
from xlink.geometry import EARTH, OrbitSpec, orbit_normal, orbital_period
from xlink.link import RadioParams, cone_gain, friis_rx_power, to_db
from xlink.oracle import simulate
from xlink.shifted import (
    ShiftedGeometry,
    serving_signal_w,
    shifted,
    shifted_interferer_set,
    shifted_states,
    shifted_trace,
    time_averaged_shifted,
    time_grid,
    wrap_pm_pi,
)
from xlink.single import num_interferers

DEG = math.pi / 180
A500 = EARTH.radius_km + 500


def test_wrap():
    assert wrap_pm_pi(math.pi) == pytest.approx(math.pi)
    assert wrap_pm_pi(-math.pi) == pytest.approx(math.pi)
    assert wrap_pm_pi(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert ShiftedGeometry(500, 0.1, 2 * math.pi, 10, 10).delta_omega == pytest.approx(0.0, abs=1e-15)


def test_states_coincide_without_shift():
    states = shifted_states(ShiftedGeometry(500, 0.4, 0.0, 24, 24), 321.0)
    first = {s.sat_index: s.position for s in states if s.orbit_index == 0}
    for s in states:
        assert np.linalg.norm(s.position) == pytest.approx(A500, rel=1e-9)
        assert np.linalg.norm(s.tx_pointing) == pytest.approx(1.0, abs=1e-12)
        if s.orbit_index == 1:
            np.testing.assert_allclose(s.position, first[s.sat_index], atol=1e-8)


def test_equatorial_orbits_share_a_plane():
    states = shifted_states(ShiftedGeometry(500, 0.0, 1.234, 12, 17), 50.0)
    z = np.array([s.position[2] for s in states])
    np.testing.assert_allclose(z, 0.0, atol=1e-9)


def test_pointing_targets_previous_neighbor():
    states = shifted_states(ShiftedGeometry(500, 0.2, 0.5, 10, 10))
    orbit1 = [s for s in states if s.orbit_index == 1]
    for s in orbit1:
        prev = orbit1[(s.sat_index - 1) % 10].position
        d = prev - s.position
        np.testing.assert_allclose(s.tx_pointing, d / np.linalg.norm(d), atol=1e-12)


def test_coincident_orbits_reduce_to_single_orbit():
    for n, alpha in ((60, 30 * DEG), (100, 30 * DEG), (40, 20 * DEG)):
        got = shifted_interferer_set(ShiftedGeometry(500, 0.3, 0.0, n, n), alpha, 0.0)
        n_i = num_interferers(n, 500, alpha)
        assert got == frozenset(range(2, n_i + 2))


def test_narrow_beam_never_interferes():
    geom = ShiftedGeometry(500, 3 * DEG, math.pi, 60, 60)
    ei, s, _ = shifted_trace(geom, RadioParams(beamwidth=5 * DEG), time_grid(500, 1, 2000))
    assert not ei.any()
    assert np.isinf(s).all()


def _oracle_config(geom, alpha):
    return ScenarioConfig(
        "shifted",
        (
            OrbitSpec(geom.h, geom.gamma, geom.raan0, geom.n),
            OrbitSpec(geom.h, geom.gamma, geom.raan0 + geom.delta_omega, geom.n_s, geom.delta_beta),
        ),
        RadioParams(beamwidth=alpha),
    )


@pytest.mark.parametrize("delta_omega_deg,delta_beta", [(180, 0.0), (60, 0.05), (-110, 0.3)])
def test_sets_match_oracle_on_grid(delta_omega_deg, delta_beta):
    geom = ShiftedGeometry(500, 3 * DEG, delta_omega_deg * DEG, 60, 60, delta_beta)
    times = time_grid(500, 1, 2000)
    trace = simulate(_oracle_config(geom, 30 * DEG), times)
    ei, _, count = shifted_trace(geom, RadioParams(beamwidth=30 * DEG), times)
    np.testing.assert_array_equal(trace.count((1,)), count)
    np.testing.assert_allclose(trace.interference((1,)), ei, rtol=1e-9, atol=0)
    samples = trace.samples()
    for k in range(0, 2000, 97):
        expected = frozenset(j for o, j in samples[k].interferer_ids if o == 1)
        assert shifted_interferer_set(geom, 30 * DEG, times[k]) == expected


def test_terms_equal_friis():
    radio = RadioParams(beamwidth=30 * DEG)
    geom = ShiftedGeometry(500, 3 * DEG, math.pi, 60, 60)
    t = 5.0
    members = shifted_interferer_set(geom, radio.beamwidth, t)
    assert members
    pos = {(s.orbit_index, s.sat_index): s.position for s in shifted_states(geom, t)}
    g = cone_gain(radio.beamwidth)
    total = sum(friis_rx_power(radio, g, g, np.linalg.norm(pos[(1, j)] - pos[(0, 0)]) * 1e3) for j in members)
    assert shifted(geom, radio, t).mean_interference_w == pytest.approx(total, rel=1e-12)


def test_four_bursts_in_two_periods():
    geom = ShiftedGeometry(500, 3 * DEG, math.pi, 60, 60)
    ei, _, _ = shifted_trace(geom, RadioParams(beamwidth=30 * DEG), time_grid(500, 2, 2000))
    assert count_bursts(ei, circular=True) == 4


def test_trace_periodic_with_orbital_period():
    geom = ShiftedGeometry(500, 5 * DEG, 70 * DEG, 40, 40, 0.02)
    t = time_grid(500, 1, 1000)
    radio = RadioParams(beamwidth=40 * DEG)
    a, _, _ = shifted_trace(geom, radio, t)
    b, _, _ = shifted_trace(geom, radio, t + orbital_period(500))
    np.testing.assert_allclose(a, b, rtol=1e-6)


def test_invariant_under_common_raan_rotation():
    radio = RadioParams(beamwidth=30 * DEG)
    t = time_grid(500, 1, 500)
    base, _, _ = shifted_trace(ShiftedGeometry(500, 4 * DEG, 1.0, 50, 50, 0.1), radio, t)
    for raan0 in (0.3, 2.0, 5.5):
        moved, _, _ = shifted_trace(ShiftedGeometry(500, 4 * DEG, 1.0, 50, 50, 0.1, raan0), radio, t)
        np.testing.assert_allclose(moved, base, rtol=1e-9, atol=1e-30)


@pytest.mark.parametrize("gamma_deg,delta_omega_deg", [(3, 180), (10, 180), (10, 90), (10, 40), (20, 60)])
def test_bursts_stay_near_plane_intersection(gamma_deg, delta_omega_deg):
    alpha = 30 * DEG
    geom = ShiftedGeometry(500, gamma_deg * DEG, delta_omega_deg * DEG, 60, 60)
    times = time_grid(500, 1, 2000)
    _, _, count = shifted_trace(geom, RadioParams(beamwidth=alpha), times)
    node = np.cross(orbit_normal(0.0, geom.gamma), orbit_normal(geom.delta_omega, geom.gamma))
    node /= np.linalg.norm(node)
    positions = [shifted_states(geom, t)[0].position for t in times[count > 0]]
    assert positions
    for r in positions:
        off = math.acos(abs(float(r @ node)) / np.linalg.norm(r))
        assert off <= 2 * alpha


def test_nearly_coplanar_planes_interfere_continuously():
    # planes only ~4 degrees apart: the window around the nodes covers the whole orbit
    geom = ShiftedGeometry(500, 3 * DEG, 90 * DEG, 60, 60)
    _, _, count = shifted_trace(geom, RadioParams(beamwidth=30 * DEG), time_grid(500, 1, 2000))
    assert (count > 0).all()


def test_single_interferer_at_neighbor_distance_is_zero_db():
    radio = RadioParams()
    geom = ShiftedGeometry(500, 0.1, 0.2, 30, 30)
    g = cone_gain(radio.beamwidth)
    d1 = 2 * A500 * math.sin(math.pi / 30) * 1e3
    assert to_db(serving_signal_w(geom, radio) / friis_rx_power(radio, g, g, d1)) == pytest.approx(0.0, abs=1e-12)


def test_time_average_convention():
    geom = ShiftedGeometry(500, 3 * DEG, math.pi, 60, 60)
    radio = RadioParams(beamwidth=30 * DEG)
    mean_i, s = time_averaged_shifted(geom, radio, 2000)
    ei, _, _ = shifted_trace(geom, radio, time_grid(500, 1, 2000))
    assert mean_i == pytest.approx(ei.mean())
    assert s == pytest.approx(serving_signal_w(geom, radio) / ei.mean())
    assert time_averaged_shifted(geom, RadioParams(beamwidth=4 * DEG), 500) == (0.0, math.inf)
