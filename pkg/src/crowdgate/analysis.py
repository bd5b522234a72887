"""
Gate-time sweeps, the calibration protocol, population traces and pulse spectra.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .fidelity import X_TARGET, FidelityReport, TargetGate
from .grape import worker_count
from .model import SystemParams, basis_index, to_qubit_frame
from .propagation import PulseSequence, propagate, propagate_trajectory
from .pulses import AnalyticPulseSpec, drag, drag_beta_menu, gaussian, normalize_area, render, sideband_pulse


class NoUsableGateTimeError(RuntimeError):
    pass


def gate_unitary(params: SystemParams, pulse: PulseSequence, frame: str = "qubit") -> np.ndarray:
    u = propagate(params, pulse)
    if frame == "qubit":
        return to_qubit_frame(u, params, pulse.gate_time)
    if frame != "rotating":
        raise ValueError(f"unknown frame {frame!r}")
    return u


def simulate(params: SystemParams, pulse: PulseSequence, target: TargetGate = X_TARGET, frame: str = "qubit") -> FidelityReport:
    return FidelityReport.from_unitary(gate_unitary(params, pulse, frame), target)


def resolve_beta(beta, params: SystemParams) -> float | None:
    """Accept a number (rad/ns) or a name from the DRAG menu."""
    if beta is None or isinstance(beta, (int, float)):
        return beta
    menu = drag_beta_menu(params)
    if beta not in menu:
        raise ValueError(f"unknown beta {beta!r}; choose a number or one of {sorted(menu)}")
    return menu[beta]


def make_spec(family: str, params: SystemParams, gate_time: float, beta=None, amplitude: float | None = None,
              dt: float = 0.01) -> AnalyticPulseSpec:
    """Pulse spec for a named family; area-normalised unless ``amplitude`` is given."""
    if family == "gaussian":
        spec = gaussian(gate_time)
    elif family == "drag":
        b = resolve_beta("anharm" if beta is None else beta, params)
        spec = drag(gate_time, b)
    elif family == "sideband":
        spec = sideband_pulse(params, gate_time)
    else:
        raise ValueError(f"unknown pulse family {family!r}")
    if amplitude is not None:
        return replace(spec, amplitude=amplitude)
    return normalize_area(spec, dt)


@dataclass(frozen=True)
class SweepRow:
    gate_time: float
    infid: float
    infid_star0: float
    infid_star1: float
    infid_avg: float
    alpha: float
    gamma: float
    status: str = "ok"

    @classmethod
    def from_report(cls, gate_time: float, r: FidelityReport) -> "SweepRow":
        status = "ok" if np.isfinite(r.alpha) else "phase_undefined"
        return cls(gate_time, 1 - r.phi, 1 - r.phi_star0, 1 - r.phi_star1, 1 - r.phi_avg, r.alpha, r.gamma, status)

    @classmethod
    def failed(cls, gate_time: float, message: str) -> "SweepRow":
        nan = float("nan")
        return cls(gate_time, nan, nan, nan, nan, nan, nan, f"error: {message}")


SWEEP_COLUMNS = ("gate_time", "infid", "infid_star0", "infid_star1", "infid_avg", "alpha", "gamma", "status")


@dataclass
class SweepResult:
    family: str
    rows: list[SweepRow] = field(default_factory=list)

    def __post_init__(self):
        times = [r.gate_time for r in self.rows]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("sweep rows must be strictly ascending in gate time")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def gate_times(self) -> np.ndarray:
        return self.column("gate_time")

    def argmin(self, name: str = "infid_avg") -> SweepRow:
        vals = self.column(name)
        return self.rows[int(np.nanargmin(vals))]


def _sweep_point(args):
    family, params, tg, dt, beta, amplitude, frame, target = args
    try:
        spec = make_spec(family, params, tg, beta, amplitude, dt)
        report = simulate(params, render(spec, dt), target, frame)
        return SweepRow.from_report(tg, report)
    except (ValueError, np.linalg.LinAlgError) as exc:
        return SweepRow.failed(tg, str(exc))


def _map(fn, jobs, workers):
    workers = min(worker_count(workers), len(jobs))
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def sweep_gate_time(family: str, params: SystemParams, gate_times, dt: float = 0.01, beta=None,
                    amplitude: float | None = None, frame: str = "qubit", target: TargetGate = X_TARGET,
                    workers: int | None = None) -> SweepResult:
    """Normalise, render, propagate and report one pulse family over gate times.

    Failing points are kept as rows whose ``status`` starts with ``error``.
    """
    times = np.unique(np.asarray(gate_times, dtype=float))
    if times.size == 0:
        raise ValueError("gate-time range is empty")
    jobs = [(family, params, float(tg), dt, beta, amplitude, frame, target) for tg in times]
    return SweepResult(family, _map(_sweep_point, jobs, workers))


def gate_time_grid(t_min: float, t_max: float, step: float) -> np.ndarray:
    if t_max < t_min:
        raise ValueError("t_max must be >= t_min")
    if not step > 0:
        raise ValueError("grid step must be positive")
    n = int(math.floor((t_max - t_min) / step + 1e-9))
    grid = t_min + step * np.arange(n + 1)
    if t_max - grid[-1] > 1e-9:
        grid = np.append(grid, t_max)
    return grid


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-3, max_iter: int = 100):
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


@dataclass
class ProtocolResult:
    gate_time: float
    amplitude: float
    alpha: float
    gamma: float
    report: FidelityReport
    grid: SweepResult
    spec: AnalyticPulseSpec

    def to_dict(self) -> dict:
        return {
            "gate_time": self.gate_time,
            "amplitude": self.amplitude,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "correction_phase": self.gamma - self.alpha,
            "report": self.report.to_dict(),
        }


def protocol_run(params: SystemParams, family: str, t_range, dt: float = 0.01, grid_step: float = 0.5,
                 beta=None, frame: str = "qubit", tol: float = 1e-3, workers: int | None = None) -> ProtocolResult:
    """Calibration workflow for an analytic family.

    Builds the pulse shape from ``(delta, anharm)``, fixes its amplitude by
    the area condition, picks the gate time maximising ``phi_avg`` on a grid
    and refines it by golden-section search, then reports the phases that a
    following frame correction needs.

    Raises
    ------
    NoUsableGateTimeError
        If no grid point reaches ``phi_avg > 0.5``.
    """
    t_min, t_max = float(t_range[0]), float(t_range[1])
    grid = sweep_gate_time(family, params, gate_time_grid(t_min, t_max, grid_step), dt, beta, frame=frame,
                           workers=workers)
    fid = 1 - grid.column("infid_avg")
    if not np.any(fid > 0.5):
        raise NoUsableGateTimeError(f"no gate time in [{t_min}, {t_max}] ns reaches phi_avg > 0.5")
    best = int(np.nanargmax(fid))
    t_best, f_best = grid.rows[best].gate_time, fid[best]

    def phi_avg_at(tg):
        spec = make_spec(family, params, tg, beta, dt=dt)
        return simulate(params, render(spec, dt), frame=frame).phi_avg

    if t_max > t_min:
        lo, hi = max(t_min, t_best - grid_step), min(t_max, t_best + grid_step)
        t_ref, f_ref = golden_section_max(phi_avg_at, lo, hi, tol)
        if f_ref > f_best:
            t_best = t_ref
    spec = make_spec(family, params, t_best, beta, dt=dt)
    report = simulate(params, render(spec, dt), frame=frame)
    return ProtocolResult(t_best, spec.amplitude, report.alpha, report.gamma, report, grid, spec)


@dataclass(frozen=True, eq=False)
class Spectrum:
    freqs: np.ndarray
    x: np.ndarray
    y: np.ndarray

    @property
    def abs_x(self) -> np.ndarray:
        return np.abs(self.x)

    @property
    def abs_y(self) -> np.ndarray:
        return np.abs(self.y)


def symmetric_grid(nu_max: float, n_positive: int) -> np.ndarray:
    """``2 n + 1`` frequencies evenly spaced on ``[-nu_max, nu_max]``, including 0."""
    pos = np.linspace(0.0, nu_max, n_positive + 1)
    return np.concatenate([-pos[:0:-1], pos])


def dtft(pulse: PulseSequence, freqs, chunk: int = 512) -> Spectrum:
    """Direct DTFT ``sum_j Omega[j] exp(-i nu t_j) dt`` at arbitrary angular frequencies."""
    freqs = np.asarray(freqs, dtype=float)
    if freqs.size == 0:
        raise ValueError("frequency grid is empty")
    t = pulse.times
    x = np.empty(freqs.size, dtype=complex)
    y = np.empty(freqs.size, dtype=complex)
    for start in range(0, freqs.size, chunk):
        kern = np.exp(-1j * np.outer(freqs[start:start + chunk], t)) * pulse.dt
        x[start:start + chunk] = kern @ pulse.omega_x
        y[start:start + chunk] = kern @ pulse.omega_y
    return Spectrum(freqs, x, y)


def local_maxima(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values)
    return np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1


def peak_near(freqs: np.ndarray, magnitude: np.ndarray, nu: float, window: float):
    """Largest local maximum of ``magnitude`` within ``window`` of ``nu``, or ``None``."""
    idx = local_maxima(magnitude)
    idx = idx[np.abs(freqs[idx] - nu) <= window]
    if idx.size == 0:
        return None
    k = idx[np.argmax(magnitude[idx])]
    return float(freqs[k]), float(magnitude[k])


def trace_populations(params: SystemParams, pulse: PulseSequence, initial) -> tuple[np.ndarray, np.ndarray]:
    """Times ``j*dt`` and the matching ``(N+1, 9)`` basis populations."""
    if isinstance(initial, str):
        initial = basis_index(int(initial[0]), int(initial[1]))
    pops = propagate_trajectory(params, pulse, initial)
    return np.arange(pops.shape[0]) * pulse.dt, pops


def qubit2_leakage_population(pops: np.ndarray) -> np.ndarray:
    """Total population with qubit 2 in ``|2>``."""
    return pops[..., [basis_index(j, 2) for j in range(3)]].sum(axis=-1)
