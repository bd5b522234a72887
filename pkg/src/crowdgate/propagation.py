"""
Time-ordered propagation of piecewise-constant two-quadrature controls.

Samples of a :class:`PulseSequence` are taken at interval midpoints
``(j + 1/2) * dt``, which makes the product of slice exponentials a
second-order integrator for smooth envelopes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .model import (
    DIM,
    SystemParams,
    build_control_generators,
    build_drift,
    interaction_hamiltonians,
)


@dataclass(frozen=True, eq=False)
class PulseSequence:
    """Uniformly sampled control envelope (rad/ns) on ``[0, N*dt]``."""

    dt: float
    omega_x: np.ndarray
    omega_y: np.ndarray

    def __post_init__(self):
        ox = np.array(self.omega_x, dtype=float).ravel()
        oy = np.array(self.omega_y, dtype=float).ravel()
        if ox.shape != oy.shape:
            raise ValueError("omega_x and omega_y must have equal length")
        if ox.size < 1:
            raise ValueError("a pulse needs at least one sample")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be positive and finite")
        ox.setflags(write=False)
        oy.setflags(write=False)
        object.__setattr__(self, "omega_x", ox)
        object.__setattr__(self, "omega_y", oy)
        object.__setattr__(self, "dt", float(self.dt))

    @classmethod
    def zeros(cls, n: int, dt: float) -> "PulseSequence":
        return cls(dt, np.zeros(n), np.zeros(n))

    def __len__(self) -> int:
        return self.omega_x.size

    @property
    def n_samples(self) -> int:
        return self.omega_x.size

    @property
    def gate_time(self) -> float:
        return self.n_samples * self.dt

    @property
    def times(self) -> np.ndarray:
        """Midpoint sample times."""
        return (np.arange(self.n_samples) + 0.5) * self.dt

    @property
    def omega_c(self) -> np.ndarray:
        return self.omega_x + 1j * self.omega_y

    def concatenate(self, other: "PulseSequence") -> "PulseSequence":
        if other.dt != self.dt:
            raise ValueError("cannot join pulses with different dt")
        return PulseSequence(
            self.dt,
            np.concatenate([self.omega_x, other.omega_x]),
            np.concatenate([self.omega_y, other.omega_y]),
        )

    def with_controls(self, omega_x, omega_y) -> "PulseSequence":
        return PulseSequence(self.dt, omega_x, omega_y)


def _check_finite(pulse: PulseSequence):
    if not (np.all(np.isfinite(pulse.omega_x)) and np.all(np.isfinite(pulse.omega_y))):
        raise ValueError("pulse contains non-finite samples")


def slice_hamiltonians(params: SystemParams, omega_x, omega_y) -> np.ndarray:
    hx, hy = build_control_generators(params)
    ox = np.asarray(omega_x, dtype=float)[:, None, None]
    oy = np.asarray(omega_y, dtype=float)[:, None, None]
    return build_drift(params)[None] + ox * hx + oy * hy


def slice_eigensystems(params: SystemParams, pulse: PulseSequence):
    """Eigenvalues ``(N, 9)`` and eigenvectors ``(N, 9, 9)`` of every slice Hamiltonian."""
    _check_finite(pulse)
    return np.linalg.eigh(slice_hamiltonians(params, pulse.omega_x, pulse.omega_y))


def slice_propagators(evals: np.ndarray, evecs: np.ndarray, dt: float) -> np.ndarray:
    phases = np.exp(-1j * evals * dt)
    return (evecs * phases[:, None, :]) @ evecs.conj().transpose(0, 2, 1)


def ordered_product(slices: np.ndarray) -> np.ndarray:
    """``slices[N-1] @ ... @ slices[0]`` by pairwise reduction."""
    mats = slices
    if mats.shape[0] == 0:
        return np.eye(DIM, dtype=complex)
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, np.eye(DIM, dtype=complex)[None]])
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def propagate(params: SystemParams, pulse: PulseSequence) -> np.ndarray:
    """Rotating-frame propagator ``U(t_g)`` of a sampled pulse.

    Each slice is exponentiated exactly through its eigendecomposition and the
    rightmost factor is the earliest slice.

    Raises
    ------
    ValueError
        If any control sample is not finite.
    """
    evals, evecs = slice_eigensystems(params, pulse)
    return ordered_product(slice_propagators(evals, evecs, pulse.dt))


def _initial_state(initial) -> np.ndarray:
    if np.isscalar(initial) and float(initial).is_integer():
        idx = int(initial)
        if not 0 <= idx < DIM:
            raise ValueError(f"basis index {idx} out of range")
        psi = np.zeros(DIM, dtype=complex)
        psi[idx] = 1.0
        return psi
    psi = np.asarray(initial, dtype=complex).ravel()
    if psi.shape != (DIM,):
        raise ValueError("initial state must be a basis index or a 9-vector")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValueError("initial state is not normalised")
    return psi


def propagate_trajectory(params: SystemParams, pulse: PulseSequence, initial) -> np.ndarray:
    """Basis populations after every slice.

    Returns an array of shape ``(N + 1, 9)``; row ``j`` holds the populations
    at time ``j * dt`` (row 0 is the initial state).
    """
    psi = _initial_state(initial)
    evals, evecs = slice_eigensystems(params, pulse)
    us = slice_propagators(evals, evecs, pulse.dt)
    states = np.empty((len(us) + 1, DIM), dtype=complex)
    states[0] = psi
    for j, u in enumerate(us):
        psi = u @ psi
        states[j + 1] = psi
    return np.abs(states) ** 2


def _interp_linear(t_new, t, y):
    # np.interp clamps; extend the end segments linearly instead
    out = np.interp(t_new, t, y)
    if t.size < 2:
        return out
    lo, hi = t_new < t[0], t_new > t[-1]
    out[lo] = y[0] + (t_new[lo] - t[0]) * (y[1] - y[0]) / (t[1] - t[0])
    out[hi] = y[-1] + (t_new[hi] - t[-1]) * (y[-1] - y[-2]) / (t[-1] - t[-2])
    return out


def refine(pulse: PulseSequence, refinement: int) -> PulseSequence:
    """Resample a pulse on a grid ``refinement`` times finer by linear interpolation."""
    if refinement < 1:
        raise ValueError("refinement must be >= 1")
    fine_dt = pulse.dt / refinement
    t_fine = (np.arange(pulse.n_samples * refinement) + 0.5) * fine_dt
    return PulseSequence(
        fine_dt,
        _interp_linear(t_fine, pulse.times, pulse.omega_x),
        _interp_linear(t_fine, pulse.times, pulse.omega_y),
    )


def oracle_propagate(params: SystemParams, pulse: PulseSequence, refinement: int) -> np.ndarray:
    """Reference propagator on a refined grid.

    Independent of :func:`propagate`: slice exponentials come from
    :func:`scipy.linalg.expm` and the product is accumulated sequentially.
    """
    if refinement < 2:
        raise ValueError("refinement must be >= 2")
    _check_finite(pulse)
    fine = refine(pulse, refinement)
    hs = slice_hamiltonians(params, fine.omega_x, fine.omega_y)
    u = np.eye(DIM, dtype=complex)
    for step in expm(-1j * hs * fine.dt):
        u = step @ u
    return u


def propagate_interaction_frame(params: SystemParams, pulse: PulseSequence) -> np.ndarray:
    """Propagator of the interaction-frame Hamiltonian sampled at the pulse midpoints."""
    _check_finite(pulse)
    hs = interaction_hamiltonians(params, pulse.omega_c, pulse.times)
    evals, evecs = np.linalg.eigh(hs)
    return ordered_product(slice_propagators(evals, evecs, pulse.dt))


def unitarity_error(u: np.ndarray) -> float:
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())
