"""Closed-form response model: coefficients, branches, metrics."""

import math

import numpy as np
import pytest

import vppfreq as v
from conftest import make_grid


def test_coeffs_match_direct_arithmetic(grid, dist, published_vpp):
    co = v.derive_coeffs(grid, published_vpp, dist)
    h = 10.0 + 19.125
    d = 2.0 + 12.109
    t = 5.0
    omega_n = math.sqrt((d + 25.0) / (2.0 * h * t))
    zeta = (2.0 * h + d * t) / (2.0 * math.sqrt(2.0 * t * h * (25.0 + d)))
    assert co.h_total == pytest.approx(h, abs=1e-12)
    assert co.d_total == pytest.approx(d, abs=1e-12)
    assert co.omega_n == pytest.approx(omega_n, abs=1e-12)
    assert co.zeta == pytest.approx(zeta, abs=1e-12)
    assert co.omega_d == pytest.approx(omega_n * math.sqrt(1.0 - zeta**2), abs=1e-12)
    assert 0.0 < co.zeta < 1.0


def test_coeffs_match_characteristic_polynomial(grid, dist, published_vpp):
    # Independent check: the damped mode must be a root of the swing/governor
    # characteristic polynomial 2*H*T*s^2 + (2*H + D*T)*s + (D + R).
    co = v.derive_coeffs(grid, published_vpp, dist)
    h, d, t = co.h_total, co.d_total, grid.t_sg
    roots = np.roots([2.0 * h * t, 2.0 * h + d * t, d + grid.r])
    root = roots[np.argmax(roots.imag)]
    assert root.real == pytest.approx(-co.zeta * co.omega_n, abs=1e-10)
    assert root.imag == pytest.approx(co.omega_d, abs=1e-10)


def test_coeff_phase_identities(grid, dist, published_vpp):
    # The droop-active branch starts at zero deviation, which pins both
    # envelope phases: eta1*sin(phi1) = -1 and eta2*sin(phi2) = +1.
    co = v.derive_coeffs(grid, published_vpp, dist)
    assert co.eta1 * math.sin(co.phi1) == pytest.approx(-1.0, abs=1e-12)
    assert co.eta2 * math.sin(co.phi2) == pytest.approx(1.0, abs=1e-12)


def test_overdamped_raises(dist, published_vpp):
    fast = make_grid(t_sg=0.01)
    with pytest.raises(v.OverdampedError):
        v.derive_coeffs(fast, published_vpp, dist)


def test_crossing_times_frozen_values(grid, dist, published_vpp):
    t1, t2 = v.deadband_crossing_times(grid, published_vpp, dist)
    assert t1 == pytest.approx(0.140136597544, abs=1e-9)
    assert t2 == pytest.approx(0.154187413930, abs=1e-9)
    assert 0.0 < t1 < t2


def test_crossing_time_inverts_first_branch(grid, dist, published_vpp):
    t1, t2 = v.deadband_crossing_times(grid, published_vpp, dist)
    assert v.freq_response(grid, published_vpp, dist, t1) == pytest.approx(-0.03, abs=1e-9)
    # Just before the governor crossing the deviation is held at the edge.
    assert v.freq_response(grid, published_vpp, dist, t2 - 1e-9) == pytest.approx(-0.03, abs=1e-9)


def test_zero_deadband_crossing_is_immediate(dist, published_vpp):
    flat = make_grid(f_db1=0.0, f_db2=0.0)
    t1, t2 = v.deadband_crossing_times(flat, published_vpp, dist)
    assert t1 == 0.0
    assert t2 == 0.0


def test_never_activates_on_small_disturbance(grid, published_vpp):
    # Load damping absorbs delta_p = f_db1_pu * d0 exactly at the band edge.
    small = v.Disturbance(delta_p=0.03 / 50.0 * 2.0)
    with pytest.raises(v.NeverActivatesError):
        v.deadband_crossing_times(grid, published_vpp, small)


def test_response_starts_at_zero(grid, dist, published_vpp):
    assert v.freq_response(grid, published_vpp, dist, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_response_branch_structure(grid, dist, published_vpp):
    t1, t2 = v.deadband_crossing_times(grid, published_vpp, dist)
    mid_hold = 0.5 * (t1 + t2)
    assert v.freq_response(grid, published_vpp, dist, mid_hold) == pytest.approx(-0.03, abs=1e-12)
    # The droop-active branch takes over near the outer band edge; the hold
    # approximation leaves only a small jump there.
    after = v.freq_response(grid, published_vpp, dist, t2 + 1e-9)
    assert after == pytest.approx(-0.03344267, abs=1e-6)
    assert abs(after - (-0.03)) < 0.005


def test_response_rejects_negative_time(grid, dist, published_vpp):
    with pytest.raises(ValueError):
        v.freq_response(grid, published_vpp, dist, -0.1)


def test_response_curve_matches_scalar(grid, dist, published_vpp):
    times = np.linspace(0.0, 20.0, 57)
    curve = v.response_curve(grid, published_vpp, dist, times)
    scalar = np.array([v.freq_response(grid, published_vpp, dist, float(t)) for t in times])
    assert np.allclose(curve, scalar, atol=1e-12)


def test_rocof_values(grid, dist, published_vpp):
    assert v.rocof_max(grid, published_vpp, dist) == pytest.approx(0.214592274678, abs=1e-9)
    assert round(v.rocof_max(grid, published_vpp, dist), 4) == 0.2146
    assert v.rocof_max(grid, v.VppParams(0.0, 0.0), dist) == pytest.approx(0.625, abs=1e-12)


def test_qss_values(grid, dist, published_vpp):
    # At the exact minimal damping the steady-state limit is met exactly.
    exact = v.VppParams(h_vpp=19.125, d_vpp=12.109375)
    assert v.qss(grid, exact, dist) == pytest.approx(0.35, abs=1e-12)
    assert v.qss(grid, published_vpp, dist) == pytest.approx(0.350003068347, abs=1e-9)
    flat = make_grid(f_db1=0.0, f_db2=0.0)
    assert v.qss(flat, v.VppParams(0.0, 0.0), dist) == pytest.approx(0.25 / 27.0 * 50.0, abs=1e-12)


def test_qss_decreases_with_damping(grid, dist):
    values = [v.qss(grid, v.VppParams(19.125, d), dist) for d in np.linspace(0.0, 30.0, 40)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_response_settles_to_qss(grid, dist, published_vpp):
    settled = v.freq_response(grid, published_vpp, dist, 1e4)
    assert settled == pytest.approx(-v.qss(grid, published_vpp, dist), abs=1e-9)


def test_nadir_is_stationary(grid, dist, published_vpp):
    dip, t_n = v.nadir(grid, published_vpp, dist)
    h = 1e-5
    deriv = (
        v.freq_response(grid, published_vpp, dist, t_n + h)
        - v.freq_response(grid, published_vpp, dist, t_n - h)
    ) / (2.0 * h)
    assert abs(deriv) < 1e-6


def test_nadir_matches_dense_scan(grid, dist, published_vpp):
    dip, t_n = v.nadir(grid, published_vpp, dist)
    _, t2 = v.deadband_crossing_times(grid, published_vpp, dist)
    times = np.arange(t2, 20.0, 1e-4)
    curve = v.response_curve(grid, published_vpp, dist, times)
    k = int(np.argmin(curve))
    assert t_n == pytest.approx(float(times[k]), abs=2e-4)
    assert dip == pytest.approx(float(-curve[k]), abs=1e-9)


def test_nadir_frozen_benchmark(grid, dist, published_vpp):
    dip, t_n = v.nadir(grid, published_vpp, dist)
    assert dip == pytest.approx(0.499645890070, abs=1e-9)
    assert t_n == pytest.approx(5.278485069653, abs=1e-6)


def test_nadir_without_deadbands(dist, published_vpp):
    # Classic second-order step undershoot: first stationary point after 0.
    flat = make_grid(f_db1=0.0, f_db2=0.0)
    dip, t_n = v.nadir(flat, published_vpp, dist)
    times = np.arange(1e-4, 25.0, 1e-4)
    curve = v.response_curve(flat, published_vpp, dist, times)
    k = int(np.argmin(curve))
    assert t_n == pytest.approx(float(times[k]), abs=2e-4)
    assert dip == pytest.approx(float(-curve[k]), abs=1e-9)
    assert t_n > 0.0


def test_nadir_at_least_qss_randomized(grid):
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 30:
        g = make_grid(
            d0=2.0 * rng.uniform(0.5, 1.5),
            h0=10.0 * rng.uniform(0.5, 1.5),
            r=25.0 * rng.uniform(0.5, 1.5),
            t_sg=5.0 * rng.uniform(0.5, 1.5),
        )
        vpp = v.VppParams(rng.uniform(0.0, 30.0), rng.uniform(0.0, 20.0))
        dist = v.Disturbance(rng.uniform(0.1, 0.4))
        try:
            dip, _ = v.nadir(g, vpp, dist)
        except (v.OverdampedError, v.NeverActivatesError):
            continue
        assert dip >= v.qss(g, vpp, dist) - 1e-9
        checked += 1


def test_metrics_bundle(grid, dist, published_vpp):
    m = v.metrics(grid, published_vpp, dist)
    assert m.rocof_max == pytest.approx(v.rocof_max(grid, published_vpp, dist), abs=1e-15)
    assert m.qss == pytest.approx(v.qss(grid, published_vpp, dist), abs=1e-15)
    dip, t_n = v.nadir(grid, published_vpp, dist)
    assert m.nadir == pytest.approx(dip, abs=1e-15)
    assert m.t_nadir == pytest.approx(t_n, abs=1e-15)
    assert (round(m.rocof_max, 2), round(m.nadir, 2), round(m.qss, 2)) == (0.21, 0.50, 0.35)
    assert m.nadir >= m.qss
    assert 0.0 < m.t_db1 < m.t_db2 < m.t_nadir


def test_unit_round_trip(grid):
    values_hz = np.array([0.03, 0.033, 0.5, 0.35, 0.4])
    back = (values_hz / grid.f0) * grid.f0
    assert np.allclose(back, values_hz, rtol=1e-12, atol=0.0)


def test_param_validation():
    with pytest.raises(ValueError):
        make_grid(d0=0.0)
    with pytest.raises(ValueError):
        make_grid(f_db1=-0.01)
    with pytest.raises(ValueError):
        make_grid(f_db1=0.05, f_db2=0.033)
    with pytest.raises(ValueError):
        v.VppParams(h_vpp=-1.0, d_vpp=0.0)
    with pytest.raises(ValueError):
        v.Disturbance(delta_p=0.0)
    with pytest.raises(ValueError):
        v.Disturbance(delta_p=-0.25)
