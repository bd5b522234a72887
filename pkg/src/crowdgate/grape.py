"""
Gradient ascent pulse engineering on sampled two-quadrature controls.

Gradients are exact: each slice propagator ``exp(-i H_j dt)`` is
differentiated in the eigenbasis of ``H_j``, so the result agrees with finite
differences for any step size, not only in the small-``dt`` limit.
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .fidelity import FidelityReport, TargetGate
from .model import SystemParams, build_control_generators, drift_energies, to_qubit_frame
from .propagation import PulseSequence, propagate, slice_eigensystems, slice_propagators
from .pulses import gaussian, normalize_area, render

logger = logging.getLogger(__name__)

OBJECTIVES = ("phi", "phi_avg")
FRAMES = ("qubit", "rotating")


class GrapeDivergenceError(FloatingPointError):
    pass


@dataclass(frozen=True)
class GrapeConfig:
    """Optimizer settings.

    ``step_size`` is the initial line-search step; it grows by ``step_growth``
    after every accepted step and halves on rejection.  The run stops after
    ``max_iterations``, when an accepted step gains less than
    ``convergence_threshold``, when the step underflows ``min_step``, or when
    the fidelity reaches ``fidelity_goal``.
    """

    gate_time: float
    dt: float = 0.01
    objective: str = "phi"
    frame: str = "qubit"
    target: TargetGate = field(default_factory=TargetGate)
    step_size: float = 1.0
    step_growth: float = 1.5
    min_step: float = 1e-14
    max_iterations: int = 5000
    convergence_threshold: float = 1e-12
    fidelity_goal: float | None = None
    penalty_weight: float = 0.0
    perturbation: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if int(round(self.gate_time / self.dt)) < 2:
            raise ValueError("gate_time / dt must round to at least 2 slices")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}")
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be >= 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["target"] = [[[z.real, z.imag] for z in row] for row in self.target.u1]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "GrapeConfig":
        data = dict(data)
        if "target" in data:
            data["target"] = TargetGate(np.array([[complex(*z) for z in row] for row in data["target"]]))
        return cls(**data)


def _weighted_targets(params: SystemParams, config: GrapeConfig, gate_time: float):
    if config.objective == "phi":
        targets = [(config.target.embedded(), 1 / 16)]
    else:
        targets = [(t, 1 / 8) for t in config.target.block_targets()]
    if config.frame == "qubit":
        # Tr(T^dag D U) with D = exp(i E t_g) equals Tr((D^dag T)^dag U)
        back = np.exp(-1j * drift_energies(params) * gate_time)[:, None]
        targets = [(back * t, w) for t, w in targets]
    return targets


def boundary_penalty(pulse: PulseSequence, weight: float):
    """Raised-cosine weighted quadratic penalty on the first and last samples.

    Covers ``M = max(1, round(0.05 N))`` samples at each end with weight
    ``(1 + cos(pi k / M)) / 2`` at distance ``k`` from the edge.  Returns
    ``(value, grad_x, grad_y)``.
    """
    if weight < 0:
        raise ValueError("penalty weight must be >= 0")
    n = pulse.n_samples
    m = max(1, int(round(0.05 * n)))
    ramp = np.zeros(n)
    k = np.arange(min(m, n))
    edge = 0.5 * (1 + np.cos(np.pi * k / m))
    ramp[k] = np.maximum(ramp[k], edge)
    ramp[n - 1 - k] = np.maximum(ramp[n - 1 - k], edge)
    ox, oy = pulse.omega_x, pulse.omega_y
    value = weight * float(np.sum(ramp * (ox**2 + oy**2)))
    return value, 2 * weight * ramp * ox, 2 * weight * ramp * oy


def _fidelity_and_gradient(params, pulse, config, with_grad=True):
    evals, evecs = slice_eigensystems(params, pulse)
    dt = pulse.dt
    us = slice_propagators(evals, evecs, dt)
    n = len(us)
    eye = np.eye(us.shape[1], dtype=complex)

    forward = np.empty_like(us)
    cur = eye
    for j in range(n):
        forward[j] = cur
        cur = us[j] @ cur
    u_total = cur

    targets = _weighted_targets(params, config, pulse.gate_time)
    overlaps = [np.trace(t.conj().T @ u_total) for t, _ in targets]
    fid = float(sum(w * abs(g) ** 2 for (_, w), g in zip(targets, overlaps)))
    if not with_grad:
        return fid, None, None

    # d fid = Re Tr(M dU),  M = sum_b 2 w_b conj(g_b) T_b^dag
    m = sum(2 * w * np.conj(g) * t.conj().T for (t, w), g in zip(targets, overlaps))
    left = np.empty_like(us)  # M @ (slices after j)
    cur = m
    for j in range(n - 1, -1, -1):
        left[j] = cur
        cur = cur @ us[j]
    c = forward @ left  # Tr(M B_j dU_j A_j) = Tr(A_j M B_j dU_j)

    vh = evecs.conj().transpose(0, 2, 1)
    c_eig = vh @ c @ evecs
    ph = np.exp(-1j * evals * dt)
    diff = evals[:, :, None] - evals[:, None, :]
    degenerate = np.abs(diff) < 1e-10
    safe = np.where(degenerate, 1.0, diff)
    kernel = np.where(
        degenerate,
        -1j * dt * ph[:, :, None],
        (ph[:, :, None] - ph[:, None, :]) / safe,
    )
    grads = []
    for h in build_control_generators(params):
        k_eig = vh @ h @ evecs
        # Tr(C V (G*K) V^dag) = sum_ab (V^dag C V)_ba G_ab K_ab
        grads.append(np.real(np.einsum("nba,nab->n", c_eig, kernel * k_eig)))
    return fid, grads[0], grads[1]


def fidelity_gradient(params: SystemParams, pulse: PulseSequence, config: GrapeConfig):
    """Exact ``(dF/dOmega_X[j], dF/dOmega_Y[j])`` of the configured fidelity."""
    _, gx, gy = _fidelity_and_gradient(params, pulse, config)
    return gx, gy


def objective_fidelity(params: SystemParams, pulse: PulseSequence, config: GrapeConfig) -> float:
    return _fidelity_and_gradient(params, pulse, config, with_grad=False)[0]


def objective_and_gradient(params, pulse, config, with_grad=True):
    """Penalised objective ``F - penalty``; returns ``(objective, fidelity, gx, gy)``."""
    fid, gx, gy = _fidelity_and_gradient(params, pulse, config, with_grad)
    if config.penalty_weight > 0:
        pen, px, py = boundary_penalty(pulse, config.penalty_weight)
    else:
        pen, px, py = 0.0, 0.0, 0.0
    obj = fid - pen
    if not np.isfinite(obj):
        raise GrapeDivergenceError(f"objective became non-finite (fidelity={fid}, penalty={pen})")
    if not with_grad:
        return obj, fid, None, None
    return obj, fid, gx - px, gy - py


def default_initial_pulse(config: GrapeConfig) -> PulseSequence:
    """Area-normalised Gaussian (``sigma = t_g/6``) with a seeded 1% perturbation."""
    spec = normalize_area(gaussian(config.gate_time), config.dt)
    base = render(spec, config.dt)
    rng = np.random.default_rng(config.seed)
    n = base.n_samples
    ox = base.omega_x * (1 + config.perturbation * rng.standard_normal(n))
    oy = config.perturbation * np.abs(base.omega_x).max() * rng.standard_normal(n)
    return base.with_controls(ox, oy)


def evaluate_pulse(params: SystemParams, pulse: PulseSequence, config: GrapeConfig) -> FidelityReport:
    u = propagate(params, pulse)
    if config.frame == "qubit":
        u = to_qubit_frame(u, params, pulse.gate_time)
    return FidelityReport.from_unitary(u, config.target)


@dataclass
class OptimizationTrace:
    objective: list[float]
    fidelity: list[float]
    grad_norm: list[float]
    step_size: list[float]
    pulse: PulseSequence
    report: FidelityReport
    stop_reason: str

    @property
    def iterations(self) -> int:
        return len(self.objective) - 1

    @property
    def final_fidelity(self) -> float:
        return self.fidelity[-1]

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "fidelity": self.fidelity,
            "grad_norm": self.grad_norm,
            "step_size": self.step_size,
            "stop_reason": self.stop_reason,
            "pulse": {
                "dt": self.pulse.dt,
                "omega_x": self.pulse.omega_x.tolist(),
                "omega_y": self.pulse.omega_y.tolist(),
            },
            "report": self.report.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def optimize(params: SystemParams, initial: PulseSequence | None, config: GrapeConfig, callback=None) -> OptimizationTrace:
    """Gradient ascent with a backtracking step size.

    Every accepted step strictly increases the penalised objective, so the
    recorded trace is monotone.
    """
    pulse = default_initial_pulse(config) if initial is None else initial
    n = pulse.n_samples
    x = np.concatenate([pulse.omega_x, pulse.omega_y])
    obj, fid, gx, gy = objective_and_gradient(params, pulse, config)
    grad = np.concatenate([gx, gy])
    eps = config.step_size
    trace = OptimizationTrace([obj], [fid], [float(np.abs(grad).max())], [0.0], pulse, None, "max_iterations")

    def done_by_goal(f):
        return config.fidelity_goal is not None and f >= config.fidelity_goal

    if done_by_goal(fid):
        trace.stop_reason = "fidelity_goal"
    else:
        for it in range(config.max_iterations):
            while True:
                trial = x + eps * grad
                trial_pulse = pulse.with_controls(trial[:n], trial[n:])
                t_obj, _, _, _ = objective_and_gradient(params, trial_pulse, config, with_grad=False)
                if t_obj > obj:
                    break
                eps *= 0.5
                if eps < config.min_step:
                    break
            if eps < config.min_step:
                trace.stop_reason = "step_underflow"
                break
            gain = t_obj - obj
            x, pulse = trial, trial_pulse
            obj, fid, gx, gy = objective_and_gradient(params, pulse, config)
            grad = np.concatenate([gx, gy])
            trace.objective.append(obj)
            trace.fidelity.append(fid)
            trace.grad_norm.append(float(np.abs(grad).max()))
            trace.step_size.append(eps)
            if callback is not None:
                callback(it, obj, fid)
            if it % 100 == 0:
                logger.debug("iter %d objective %.12f fidelity %.12f step %.3g", it, obj, fid, eps)
            eps *= config.step_growth
            if done_by_goal(fid):
                trace.stop_reason = "fidelity_goal"
                break
            if gain < config.convergence_threshold:
                trace.stop_reason = "converged"
                break
    trace.pulse = pulse
    trace.report = evaluate_pulse(params, pulse, config)
    return trace


def _run_seed(args):
    params, config, seed = args
    return optimize(params, None, replace(config, seed=seed))


def worker_count(default: int | None = None) -> int:
    env = os.environ.get("CROWDGATE_WORKERS")
    if env:
        return max(1, int(env))
    return default if default is not None else (os.cpu_count() or 1)


def multistart(params: SystemParams, config: GrapeConfig, seeds, workers: int | None = None) -> list[OptimizationTrace]:
    """Independent runs from differently seeded default initial pulses, in seed order."""
    jobs = [(params, config, s) for s in seeds]
    workers = min(worker_count(workers), len(jobs))
    if workers <= 1:
        return [_run_seed(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_seed, jobs))


def best_trace(traces: list[OptimizationTrace]) -> OptimizationTrace:
    return max(traces, key=lambda t: t.objective[-1])
