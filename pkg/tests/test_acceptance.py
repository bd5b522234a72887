"""Acceptance gate: eight criteria at their stated tolerances.

Each test records a one-line verdict that is printed in the terminal summary.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE, random_unitary
from crowdgate.analysis import (
    dtft,
    gate_time_grid,
    gate_unitary,
    local_maxima,
    make_spec,
    peak_near,
    qubit2_leakage_population,
    sweep_gate_time,
    trace_populations,
)
from crowdgate.fidelity import (
    apply_frame_correction,
    avg_fidelity,
    embed_computational,
    extract_phases,
    gate_fidelity,
    product_form,
)
from crowdgate.grape import GrapeConfig, multistart, objective_and_gradient, optimize
from crowdgate.magnus import magnus_theta1_diag01
from crowdgate.model import SystemParams
from crowdgate.propagation import PulseSequence, oracle_propagate, propagate, unitarity_error
from crowdgate.pulses import drag_beta_menu, render

pytestmark = pytest.mark.slow


@contextmanager
def verdict(number, title):
    """Record PASS/FAIL for a criterion; ``notes`` collects the measured values."""
    notes = []
    try:
        yield notes
    except AssertionError:
        ACCEPTANCE[number] = f"criterion {number} FAIL  {title}: {'; '.join(notes)}"
        print(ACCEPTANCE[number])
        raise
    ACCEPTANCE[number] = f"criterion {number} PASS  {title}: {'; '.join(notes)}"
    print(ACCEPTANCE[number])


def dip(result, lo, hi):
    """Smallest interior local minimum of 1 - phi_avg with gate time in [lo, hi]."""
    v = result.column("infid_avg")
    idx = [i for i in local_maxima(-v) if lo <= result.gate_times[i] <= hi]
    if not idx:
        return None
    i = min(idx, key=lambda k: v[k])
    return result.gate_times[i], v[i]


def test_criterion_1_sideband_optimum(params):
    with verdict(1, "sideband optimum in [12, 25] ns") as notes:
        start = time.perf_counter()
        res = sweep_gate_time("sideband", params, gate_time_grid(12, 25, 0.5))
        elapsed = time.perf_counter() - start
        best = res.argmin("infid_avg")
        notes.append(f"min 1-phi_avg {best.infid_avg:.3e} at {best.gate_time:g} ns, {elapsed:.1f} s")
        assert best.infid_avg < 1e-3
        assert abs(best.gate_time - 17) <= 2
        assert elapsed < 30


def test_criterion_2_gaussian_drag_baseline(params):
    with verdict(2, "Gaussian and DRAG(beta=anharm) dips near 42 ns") as notes:
        grid = gate_time_grid(30, 60, 0.5)
        gauss = sweep_gate_time("gaussian", params, grid)
        drag = sweep_gate_time("drag", params, grid, beta=drag_beta_menu(params)["anharm"])
        g, d = dip(gauss, 38, 46), dip(drag, 38, 46)
        for name, found in (("gaussian", g), ("drag", d)):
            notes.append(f"{name} dip " + ("none" if found is None else f"{found[1]:.3e} at {found[0]:g} ns"))
        assert g is not None and d is not None
        assert d[1] <= g[1]


def test_criterion_3_fast_grape_gate(params):
    with verdict(3, "GRAPE 4 ns, dt 0.01 ns reaches phi >= 0.99999 within 5 min") as notes:
        config = GrapeConfig(gate_time=4.0, dt=0.01, objective="phi", fidelity_goal=0.99999)
        start = time.perf_counter()
        trace = optimize(params, None, config)
        elapsed = time.perf_counter() - start
        notes.append(f"phi {trace.report.phi:.7f} after {trace.iterations} iterations, {elapsed:.0f} s")
        assert trace.report.phi >= 0.99999
        assert elapsed < 300


def test_criterion_4_coarse_step_speed_limit(params):
    with verdict(4, "dt = 1 ns: some t_g <= 8 ns reaches phi >= 0.999, 4 ns does not") as notes:
        seeds = range(5)
        best = {}
        for tg in (4.0, 5.0, 6.0, 7.0, 8.0):
            traces = multistart(params, GrapeConfig(gate_time=tg, dt=1.0), seeds)
            best[tg] = max(t.report.phi for t in traces)
        notes.append(", ".join(f"{tg:g} ns phi {f:.6f}" for tg, f in best.items()))
        assert max(best.values()) >= 0.999
        assert best[4.0] < 0.999


def test_criterion_5_population_cycling(params):
    with verdict(5, "qubit-2 leakage after sideband gate: 17 ns vs 20 ns") as notes:
        leak = {}
        for tg in (17.0, 20.0):
            _, pops = trace_populations(params, render(make_spec("sideband", params, tg), 0.01), "01")
            leak[tg] = qubit2_leakage_population(pops)[-1]
        notes.append(f"17 ns {leak[17.0]:.3e}, 20 ns {leak[20.0]:.3e}, ratio {leak[20.0] / leak[17.0]:.0f}")
        assert leak[17.0] < 1e-3
        assert leak[20.0] > 5 * leak[17.0]


def test_criterion_6_phase_machinery(params):
    with verdict(6, "phase extraction and frame correction at 17 ns") as notes:
        u = gate_unitary(params, render(make_spec("sideband", params, 17.0), 0.01))
        _, _, residual = extract_phases(u)
        corrected = gate_fidelity(apply_frame_correction(u))
        raw_avg = avg_fidelity(u)
        notes.append(f"residual {residual:.3e}, corrected phi {corrected:.6f}, "
                     f"|corrected - phi_avg| {abs(corrected - raw_avg):.1e}")
        assert corrected >= 0.999
        assert abs(corrected - raw_avg) <= 1e-4
        assert residual < 1e-2


def _theta1_direct(pulse, params):
    t, ox, oy, d = pulse.times, pulse.omega_x, pulse.omega_y, params.delta
    total = 0.0
    for k in range(1, t.size):
        x = d * (t[:k] - t[k])
        total += np.sum((ox[k] * oy[:k] - ox[:k] * oy[k]) * (1 + np.cos(x) - np.sin(x)))
    return 0.25 * total * pulse.dt**2


def test_criterion_7_property_suites(params):
    with verdict(7, "unitarity, gradient, Theta_1, oracle, product-form suites") as notes:
        rng = np.random.default_rng(2024)

        worst = 0.0
        for _ in range(50):
            n = int(rng.integers(1, 400))
            pulse = PulseSequence(float(rng.uniform(0.005, 0.5)), rng.normal(0, 2, n), rng.normal(0, 2, n))
            worst = max(worst, unitarity_error(propagate(params, pulse)))
        for r in (2, 10):
            worst = max(worst, unitarity_error(oracle_propagate(params, render(make_spec("sideband", params, 17.0), 0.01), r)))
        notes.append(f"unitarity {worst:.1e}")

        grad_err = 0.0
        for k in range(20):
            pulse = PulseSequence(0.1, rng.normal(0, 1, 40), rng.normal(0, 1, 40))
            config = GrapeConfig(gate_time=4.0, dt=0.1, objective=("phi", "phi_avg")[k % 2])
            _, _, gx, gy = objective_and_gradient(params, pulse, config)
            d = rng.standard_normal(80)
            h = 1e-6
            x = np.concatenate([pulse.omega_x, pulse.omega_y])
            f = [objective_and_gradient(params, pulse.with_controls(*np.split(x + s * h * d, 2)), config, False)[0]
                 for s in (1, -1)]
            fd = (f[0] - f[1]) / (2 * h)
            grad_err = max(grad_err, abs(np.dot(np.concatenate([gx, gy]), d) - fd) / abs(fd))
        notes.append(f"gradient rel err {grad_err:.1e}")

        spec = make_spec("sideband", params, 17.0, dt=0.01)
        theta_err = abs(magnus_theta1_diag01(render(spec, 0.01), params) - _theta1_direct(render(spec, 0.0025), params))
        notes.append(f"Theta_1 {theta_err:.1e}")

        oracle_err = 0.0
        for family, tg, beta in (("sideband", 17.0, None), ("gaussian", 42.0, None), ("drag", 46.0, "anharm"),
                                 ("drag", 30.0, "delta_minus_anharm")):
            pulse = render(make_spec(family, params, tg, beta), 0.01)
            oracle_err = max(oracle_err, np.abs(oracle_propagate(params, pulse, 10) - propagate(params, pulse)).max())
        notes.append(f"oracle {oracle_err:.1e}")

        form_err = 0.0
        for _ in range(200):
            a, g = rng.uniform(-np.pi, np.pi, 2)
            u = embed_computational(product_form(a, g), random_unitary(rng, 5))
            form_err = max(form_err, abs(avg_fidelity(u) - 1))
        notes.append(f"product-form phi_avg {form_err:.1e}")

        assert worst < 1e-10
        assert grad_err < 1e-5
        assert theta_err < 1e-6
        assert oracle_err < 1e-6
        assert form_err < 1e-12


DETUNINGS = {
    "delta": lambda p: p.delta,
    "delta-anharm": lambda p: p.delta - p.anharm,
    "anharm": lambda p: p.anharm,
    "2delta-anharm": lambda p: 2 * p.delta - p.anharm,
}


def test_criterion_8_spectral_signature(params):
    with verdict(8, "DTFT of converged 130 ns GRAPE pulse peaks at the four detunings") as notes:
        config = GrapeConfig(gate_time=130.0, dt=0.01, fidelity_goal=0.99999)
        trace = optimize(params, None, config)
        notes.append(f"1-phi {1 - trace.report.phi:.1e} after {trace.iterations} iterations")
        assert trace.report.phi >= 0.99999

        freqs = np.linspace(0.0, 2 * np.pi * 0.8, 4001)
        mag = dtft(trace.pulse, freqs).abs_x
        median = np.median(mag)
        window = 2 * np.pi / config.gate_time
        found = {}
        for name, nu in DETUNINGS.items():
            peak = peak_near(freqs, mag, abs(nu(params)), window)
            found[name] = None if peak is None else peak[1] / median
        notes.append(", ".join(f"{k} {'none' if v is None else f'{v:.1f}x median'}" for k, v in found.items()))
        for v in found.values():
            assert v is not None and v > 1
