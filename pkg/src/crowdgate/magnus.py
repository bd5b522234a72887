"""
Zeroth- and first-order Magnus quantities of the interaction-frame drive.

The Fourier residuals are the magnitudes of the off-resonant matrix elements
of ``Theta_0``: they use the envelope that multiplies the lowering operators,
``Omega_X - i*Omega_Y``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .model import SystemParams, interaction_hamiltonians
from .propagation import PulseSequence

# zeroth-order rotation condition: 1/2 * integral of the envelope equals pi/2
HALF_AREA_TARGET = np.pi / 2


def fourier_integral(pulse: PulseSequence, nu: float) -> complex:
    """``1/2 * integral exp(-i nu t) (Omega_X - i Omega_Y) dt`` by the midpoint rule."""
    env = pulse.omega_x - 1j * pulse.omega_y
    return complex(0.5 * np.sum(np.exp(-1j * nu * pulse.times) * env) * pulse.dt)


@dataclass(frozen=True)
class ConstraintResiduals:
    area_error: float
    r_anharm: float
    r_delta: float
    r_delta_minus_anharm: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table(self) -> str:
        rows = [
            ("area (nu = 0)", self.area_error),
            ("nu = anharm", self.r_anharm),
            ("nu = delta", self.r_delta),
            ("nu = delta - anharm", self.r_delta_minus_anharm),
        ]
        return "\n".join(f"{name:<22s}{value:.6e}" for name, value in rows)


def fourier_constraints(pulse: PulseSequence, params: SystemParams) -> ConstraintResiduals:
    return ConstraintResiduals(
        area_error=abs(fourier_integral(pulse, 0.0) - HALF_AREA_TARGET),
        r_anharm=abs(fourier_integral(pulse, params.anharm)),
        r_delta=abs(fourier_integral(pulse, params.delta)),
        r_delta_minus_anharm=abs(fourier_integral(pulse, params.delta - params.anharm)),
    )


def magnus_theta0(pulse: PulseSequence, params: SystemParams) -> np.ndarray:
    """Midpoint-rule integral of the interaction-frame Hamiltonian over the gate."""
    hs = interaction_hamiltonians(params, pulse.omega_c, pulse.times)
    theta = hs.sum(axis=0) * pulse.dt
    return 0.5 * (theta + theta.conj().T)


def magnus_theta1_diag01(pulse: PulseSequence, params: SystemParams) -> float:
    """Slow part of ``<01|Theta_1|01>``.

    Evaluates

        1/4 int_0^tg dt2 int_0^t2 dt1 W(t1, t2) [1 + cos(d(t1-t2)) - sin(d(t1-t2))]

    with ``W(t1, t2) = Ox(t2) Oy(t1) - Ox(t1) Oy(t2)``.  The kernel separates
    into products of functions of ``t1`` and ``t2``, so the triangular sum is
    done with running sums in O(N) instead of O(N^2).
    """
    t = pulse.times
    ox, oy = pulse.omega_x, pulse.omega_y
    c, s = np.cos(params.delta * t), np.sin(params.delta * t)
    one = np.ones_like(t)
    # kernel(t1, t2) = sum_m p_m(t1) * q_m(t2)
    terms = [(one, one), (c, c), (s, s), (-s, c), (c, s)]
    total = 0.0
    for p, q in terms:
        cum_y = np.concatenate([[0.0], np.cumsum(oy * p)[:-1]])
        cum_x = np.concatenate([[0.0], np.cumsum(ox * p)[:-1]])
        total += np.sum(ox * q * cum_y) - np.sum(oy * q * cum_x)
    return float(0.25 * total * pulse.dt**2)
