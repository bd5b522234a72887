"""
Analytic pulse families: Gaussian, DRAG Gaussian and the sideband-modulated
Gaussian with a derivative quadrature.

Gaussians are truncated to ``[0, t_g]`` without subtracting the edge value, so
rendered pulses start and end at a small nonzero amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import SystemParams
from .propagation import PulseSequence

FAMILIES = ("gaussian", "drag", "sideband")

# rotation angle of an X gate: integral of Omega_X over the pulse
PI_AREA = np.pi


@dataclass(frozen=True)
class AnalyticPulseSpec:
    """Closed-form pulse description.

    ``Omega_X = amplitude * g(t) * (1 - sideband_depth * cos(sideband_freq * (t - t_g/2)))``
    with ``g`` a Gaussian of width ``sigma`` centred at ``t_g/2``, and
    ``Omega_Y = -dOmega_X/dt / drag_beta``.  The modulation is only applied for
    the ``sideband`` family and the derivative quadrature only for ``drag`` and
    ``sideband``.
    """

    family: str
    gate_time: float
    sigma: float | None = None
    amplitude: float = 1.0
    sideband_depth: float = 1.0
    sideband_freq: float = 0.0
    drag_beta: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown pulse family {self.family!r}; expected one of {FAMILIES}")
        if not self.gate_time > 0:
            raise ValueError("gate_time must be positive")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.family == "drag" and self.drag_beta is None:
            raise ValueError("drag family needs drag_beta")
        if self.drag_beta == 0:
            raise ValueError("drag_beta must be nonzero")

    @property
    def width(self) -> float:
        return self.gate_time / 6 if self.sigma is None else self.sigma

    def with_gate_time(self, gate_time: float) -> "AnalyticPulseSpec":
        return replace(self, gate_time=gate_time)

    def envelope(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``Omega_X(t)`` and its exact time derivative."""
        x = np.asarray(t, dtype=float) - self.gate_time / 2
        s = self.width
        g = np.exp(-0.5 * (x / s) ** 2)
        dg = -x / s**2 * g
        if self.family == "sideband":
            a, w = self.sideband_depth, self.sideband_freq
            m = 1 - a * np.cos(w * x)
            dm = a * w * np.sin(w * x)
        else:
            m, dm = 1.0, 0.0
        return self.amplitude * g * m, self.amplitude * (dg * m + g * dm)

    def evaluate(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ox, dox = self.envelope(t)
        if self.family == "gaussian" or self.drag_beta is None or np.isinf(self.drag_beta):
            return ox, np.zeros_like(ox)
        return ox, -dox / self.drag_beta


def gaussian(gate_time: float, sigma: float | None = None) -> AnalyticPulseSpec:
    return AnalyticPulseSpec("gaussian", gate_time, sigma=sigma)


def drag(gate_time: float, beta: float, sigma: float | None = None) -> AnalyticPulseSpec:
    return AnalyticPulseSpec("drag", gate_time, sigma=sigma, drag_beta=beta)


def sideband_pulse(params: SystemParams, gate_time: float) -> AnalyticPulseSpec:
    """Sideband preset: full-depth modulation at ``delta/2``, derivative quadrature over ``2*anharm``, ``sigma = t_g/6``."""
    return AnalyticPulseSpec(
        "sideband",
        gate_time,
        sigma=None,
        sideband_depth=1.0,
        sideband_freq=params.delta / 2,
        drag_beta=2 * params.anharm,
    )


def drag_beta_menu(params: SystemParams) -> dict[str, float]:
    return {
        "anharm": params.anharm,
        "delta": params.delta,
        "delta_minus_anharm": params.delta - params.anharm,
    }


def n_samples(gate_time: float, dt: float) -> int:
    return max(1, int(round(gate_time / dt)))


def render(spec: AnalyticPulseSpec, dt: float) -> PulseSequence:
    """Sample ``spec`` at midpoints.

    The step is adjusted to ``gate_time / round(gate_time / dt)`` so the
    rendered pulse spans the gate time exactly.
    """
    if not (np.isfinite(dt) and dt > 0):
        raise ValueError("dt must be positive")
    n = n_samples(spec.gate_time, dt)
    step = spec.gate_time / n
    ox, oy = spec.evaluate((np.arange(n) + 0.5) * step)
    return PulseSequence(step, ox, oy)


def rotation_area(pulse: PulseSequence) -> complex:
    """Midpoint-rule integral of ``Omega_X + i*Omega_Y``."""
    return complex(np.sum(pulse.omega_c) * pulse.dt)


def normalize_area(spec: AnalyticPulseSpec, dt: float) -> AnalyticPulseSpec:
    """Return ``spec`` with ``amplitude`` chosen so the rendered pulse has rotation angle pi.

    The envelope is linear in the amplitude, so the condition is solved
    directly on the rendered samples.

    Raises
    ------
    ValueError
        If the unit-amplitude pulse has (numerically) zero area.
    """
    unit = render(replace(spec, amplitude=1.0), dt)
    area = float(np.sum(unit.omega_x) * unit.dt)
    scale = float(np.sum(np.abs(unit.omega_x)) * unit.dt)
    if scale == 0 or abs(area) <= 1e-12 * scale:
        raise ValueError("pulse shape has vanishing area; cannot normalise")
    return replace(spec, amplitude=PI_AREA / area)


@dataclass(frozen=True)
class DragCoefficients:
    """First-order residual drive coefficients left after the DRAG frame change.

    ``q1_12``: qubit-1 1-2; ``q2_01``: qubit-2 0-1; ``q2_12``: qubit-2 1-2;
    ``q1_02`` and ``q2_02``: two-photon 0-2 prefactors (multiply ``Omega_X**2``).
    """

    q1_12: float
    q2_01: float
    q2_12: float
    q1_02: float
    q2_02: float

    def ranked(self) -> list[tuple[str, float]]:
        items = [("q1_12", self.q1_12), ("q2_01", self.q2_01), ("q2_12", self.q2_12)]
        return sorted(items, key=lambda kv: abs(kv[1]))


def drag_residual_coefficients(beta: float, params: SystemParams, eta: float = 1.0) -> DragCoefficients:
    if beta == 0:
        raise ValueError("beta must be nonzero")
    d, a = params.delta, params.anharm
    l1, l2 = params.lam[0, 1], params.lam[1, 1]
    return DragCoefficients(
        q1_12=l1 * (beta - a) / (2 * beta),
        q2_01=eta * (beta - d + a) / (2 * beta),
        q2_12=eta * l2 * (beta - d) / (2 * beta),
        q1_02=l1 * a / (8 * beta**2),
        q2_02=eta**2 * l2 * a / (8 * beta**2),
    )
