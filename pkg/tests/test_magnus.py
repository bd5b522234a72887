import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from crowdgate.analysis import make_spec
from crowdgate.fidelity import avg_fidelity
from crowdgate.magnus import (
    HALF_AREA_TARGET,
    fourier_constraints,
    fourier_integral,
    magnus_theta0,
    magnus_theta1_diag01,
)
from crowdgate.model import SystemParams, basis_index
from crowdgate.propagation import PulseSequence
from crowdgate.pulses import AnalyticPulseSpec, normalize_area, render

amps = st.floats(-2.0, 2.0, allow_nan=False)


def theta1_brute(pulse, params):
    """Direct O(N^2) nested midpoint sum."""
    t, ox, oy, d = pulse.times, pulse.omega_x, pulse.omega_y, params.delta
    total = 0.0
    for k in range(1, t.size):
        w = ox[k] * oy[:k] - ox[:k] * oy[k]
        x = d * (t[:k] - t[k])
        total += np.sum(w * (1 + np.cos(x) - np.sin(x)))
    return 0.25 * total * pulse.dt**2


def expm_herm(h):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w)) @ v.conj().T


def test_zero_pulse_residuals(params):
    r = fourier_constraints(PulseSequence.zeros(100, 0.1), params)
    assert r.r_anharm == r.r_delta == r.r_delta_minus_anharm == 0.0
    assert r.area_error == HALF_AREA_TARGET


def test_constant_pulse_residuals_closed_form(params):
    omega, tg, n = 0.4, 20.0, 2000
    r = fourier_constraints(PulseSequence(tg / n, np.full(n, omega), np.zeros(n)), params)
    for value, nu in ((r.r_anharm, params.anharm), (r.r_delta, params.delta),
                      (r.r_delta_minus_anharm, params.delta - params.anharm)):
        assert value == pytest.approx(abs(omega * np.sin(nu * tg / 2) / nu), rel=1e-4)


def test_sideband_suppresses_crowding_residual(params):
    side = fourier_constraints(render(make_spec("sideband", params, 17.0), 0.01), params)
    gauss = fourier_constraints(render(make_spec("gaussian", params, 17.0), 0.01), params)
    assert side.r_delta < 0.5 * gauss.r_delta
    assert side.area_error < 1e-9


def test_residuals_json(params):
    r = fourier_constraints(render(make_spec("sideband", params, 17.0), 0.01), params)
    data = json.loads(r.to_json())
    assert set(data) == {"area_error", "r_anharm", "r_delta", "r_delta_minus_anharm"}
    assert len(r.table().splitlines()) == 4


def test_theta0_zero_pulse(params):
    assert not np.any(magnus_theta0(PulseSequence.zeros(10, 0.1), params))


def test_theta0_constraint_satisfying_pulse_is_qubit1_flip(params):
    # sigma = t_g/12: edges at 6 sigma and no power left at any detuning
    spec = normalize_area(AnalyticPulseSpec("gaussian", 400.0, sigma=400.0 / 12), 0.01)
    pulse = render(spec, 0.01)
    r = fourier_constraints(pulse, params)
    assert max(r.r_anharm, r.r_delta, r.r_delta_minus_anharm) < 1e-8
    theta = magnus_theta0(pulse, params)
    for k in range(3):
        assert abs(theta[basis_index(1, k), basis_index(0, k)]) == pytest.approx(np.pi / 2, rel=1e-12)
    off = theta.copy()
    for k in range(3):
        off[basis_index(1, k), basis_index(0, k)] = off[basis_index(0, k), basis_index(1, k)] = 0
    assert np.abs(off).max() < 1e-8
    assert avg_fidelity(expm_herm(theta)) > 0.99


def test_theta0_constant_pulse(params):
    tg, n = 400.0, 40000
    pulse = PulseSequence(tg / n, np.full(n, np.pi / tg), np.zeros(n))
    theta = magnus_theta0(pulse, params)
    assert abs(theta[basis_index(1, 0), basis_index(0, 0)]) == pytest.approx(np.pi / 2, rel=1e-12)
    # qubit-2 1-2 element: (sqrt2/2) * |integral e^{-i delta t} Omega| <= sqrt2 * Omega / delta
    elem = abs(theta[basis_index(0, 2), basis_index(0, 1)])
    assert elem <= np.sqrt(2) * (np.pi / tg) / params.delta + 1e-12
    assert elem < 0.01


def test_theta1_vanishes_without_quadrature(params):
    pulse = render(make_spec("gaussian", params, 20.0), 0.01)
    assert magnus_theta1_diag01(pulse, params) == 0.0


def test_theta1_vanishes_for_proportional_quadratures(params):
    base = render(make_spec("gaussian", params, 20.0), 0.01)
    pulse = base.with_controls(base.omega_x, 0.7 * base.omega_x)
    assert abs(magnus_theta1_diag01(pulse, params)) < 1e-14


def test_theta1_sideband_against_fine_grid_oracle(params):
    spec = make_spec("sideband", params, 17.0, dt=0.01)
    value = magnus_theta1_diag01(render(spec, 0.01), params)
    oracle = theta1_brute(render(spec, 0.0025), params)
    assert abs(value - oracle) < 1e-6
    assert abs(value) < 0.1 * np.pi


@given(arrays(float, st.integers(2, 80), elements=amps), arrays(float, 80, elements=amps))
def test_theta1_fast_sum_equals_direct_sum(ox, oy):
    pulse = PulseSequence(0.05, ox, oy[: ox.size])
    p = SystemParams()
    assert magnus_theta1_diag01(pulse, p) == pytest.approx(theta1_brute(pulse, p), abs=1e-12)


@given(arrays(float, st.integers(1, 60), elements=amps), arrays(float, 60, elements=amps))
def test_theta0_hermitian(ox, oy):
    theta = magnus_theta0(PulseSequence(0.1, ox, oy[: ox.size]), SystemParams())
    assert np.abs(theta - theta.conj().T).max() < 1e-12


@given(st.floats(10.0, 60.0), st.floats(-3.0, 3.0))
def test_real_palindromic_pulse_conjugate_residuals(tg, nu):
    p = SystemParams()
    pulse = render(make_spec("gaussian", p, tg), 0.01)
    assert fourier_integral(pulse, -nu) == pytest.approx(np.conj(fourier_integral(pulse, nu)), abs=1e-12)


@given(st.floats(10.0, 60.0), st.floats(-3.0, 3.0))
def test_quadrature_pulse_centred_transform_is_real(tg, nu):
    # Omega_X palindromic, Omega_Y antipalindromic: envelope mirrors to its conjugate
    p = SystemParams()
    pulse = render(make_spec("sideband", p, tg), 0.01)
    centred = fourier_integral(pulse, nu) * np.exp(1j * nu * pulse.gate_time / 2)
    assert abs(centred.imag) < 1e-12


@given(arrays(float, st.integers(1, 50), elements=amps), st.integers(1, 40))
def test_residuals_invariant_under_time_shift(ox, shift):
    p = SystemParams()
    pulse = PulseSequence(0.05, ox, 0.3 * ox[::-1])
    pad = np.zeros(shift)
    moved = PulseSequence(0.05, np.concatenate([pad, ox]), np.concatenate([pad, 0.3 * ox[::-1]]))
    a, b = fourier_constraints(pulse, p), fourier_constraints(moved, p)
    for name in ("area_error", "r_anharm", "r_delta", "r_delta_minus_anharm"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), abs=1e-12)
