"""Single-qubit gates on two spectrally crowded transmons: simulation, analytic pulses and GRAPE."""

from .analysis import (
    NoUsableGateTimeError,
    protocol_run,
    simulate,
    sweep_gate_time,
)
from .fidelity import X_TARGET, FidelityReport, TargetGate, apply_frame_correction, extract_phases
from .grape import GrapeConfig, multistart, optimize
from .magnus import fourier_constraints, magnus_theta1_diag01
from .model import MHZ, SystemParams, load_params
from .propagation import PulseSequence, propagate
from .pulses import AnalyticPulseSpec, drag, gaussian, normalize_area, render, sideband_pulse

__all__ = [
    "AnalyticPulseSpec",
    "FidelityReport",
    "GrapeConfig",
    "MHZ",
    "NoUsableGateTimeError",
    "PulseSequence",
    "SystemParams",
    "TargetGate",
    "X_TARGET",
    "apply_frame_correction",
    "drag",
    "extract_phases",
    "fourier_constraints",
    "gaussian",
    "load_params",
    "magnus_theta1_diag01",
    "multistart",
    "normalize_area",
    "optimize",
    "propagate",
    "protocol_run",
    "render",
    "sideband_pulse",
    "simulate",
    "sweep_gate_time",
]
