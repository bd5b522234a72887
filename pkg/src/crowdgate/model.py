"""
Two three-level transmons driven by one shared field.

Basis ordering is ``index = 3*j1 + j2`` with ``j1, j2`` in ``{0, 1, 2}``.
All frequencies are stored as angular frequencies in rad/ns; user-facing
constructors take ordinary frequencies in MHz.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

LEVELS = 3
DIM = LEVELS * LEVELS
MHZ = 2 * np.pi * 1e-3  # MHz -> rad/ns

# Reference lab-frame 0<->1 frequencies (GHz).  Documentation only: they do not
# agree with delta/2pi = 45 MHz and never enter the model.
LAB_FREQUENCIES_GHZ = (5.508, 5.5903)


def basis_index(j1: int, j2: int) -> int:
    return LEVELS * j1 + j2


def basis_label(index: int) -> str:
    return f"{index // LEVELS}{index % LEVELS}"


def _as_lambda(lam) -> np.ndarray:
    arr = np.array(lam, dtype=float)
    if arr.shape == (2,):
        arr = np.vstack([arr, arr])
    if arr.shape != (2, 2):
        raise ValueError("lambda must be [l1, l2] or [[l1, l2], [l1, l2]] per qubit")
    return arr


@dataclass(frozen=True, eq=False)
class SystemParams:
    """Rotating-frame parameters of the two-transmon system.

    Parameters
    ----------
    delta : float
        Crowding detuning between qubit 1's 0-1 and qubit 2's 1-2 transition
        (rad/ns).
    anharm : float
        Shared anharmonicity (rad/ns), negative for transmons.
    lam : array_like
        Ladder couplings.  Either ``[l1, l2]`` shared by both qubits or a
        ``2x2`` array ``lam[k, j-1]`` for qubit ``k``.
    """

    delta: float = 45 * MHZ
    anharm: float = -350 * MHZ
    lam: np.ndarray = field(default_factory=lambda: np.array([[1.0, np.sqrt(2)], [1.0, np.sqrt(2)]]))
    levels: int = LEVELS

    def __post_init__(self):
        object.__setattr__(self, "lam", _as_lambda(self.lam))
        self.lam.setflags(write=False)
        if self.levels != LEVELS:
            raise ValueError("only three-level transmons are supported")
        if not (np.isfinite(self.delta) and np.isfinite(self.anharm)):
            raise ValueError("delta and anharm must be finite")
        if self.anharm > 0:
            raise ValueError("transmon anharmonicity must be negative")
        if not abs(self.delta) < abs(self.anharm):
            warnings.warn(
                "|delta| >= |anharm|: configuration is not spectrally crowded",
                stacklevel=2,
            )

    @classmethod
    def from_mhz(cls, delta_mhz=45.0, anharm_mhz=-350.0, lam=(1.0, np.sqrt(2))):
        return cls(delta=delta_mhz * MHZ, anharm=anharm_mhz * MHZ, lam=lam)

    @property
    def delta_mhz(self) -> float:
        return self.delta / MHZ

    @property
    def anharm_mhz(self) -> float:
        return self.anharm / MHZ

    def level_energies(self) -> tuple[np.ndarray, np.ndarray]:
        """Rotating-frame level energies of qubit 1 and qubit 2."""
        d, a = self.delta, self.anharm
        return np.array([0.0, 0.0, a]), np.array([0.0, d - a, 2 * d - a])

    def detunings(self) -> "DetuningTable":
        return DetuningTable.from_params(self)

    def to_dict(self) -> dict:
        return {
            "delta_mhz": self.delta_mhz,
            "anharm_mhz": self.anharm_mhz,
            "lambda": self.lam.tolist(),
        }


@dataclass(frozen=True)
class DetuningTable:
    """Transition detunings ``d[k][j-1]`` for the ``j-1 <-> j`` transition of qubit ``k``."""

    q1_01: float
    q1_12: float
    q2_01: float
    q2_12: float

    @classmethod
    def from_params(cls, params: SystemParams) -> "DetuningTable":
        return cls(0.0, params.anharm, params.delta - params.anharm, params.delta)

    def as_array(self) -> np.ndarray:
        return np.array([[self.q1_01, self.q1_12], [self.q2_01, self.q2_12]])


def default_params() -> SystemParams:
    return SystemParams()


def load_params(path) -> SystemParams:
    """Read ``delta_mhz``, ``anharm_mhz`` and ``lambda`` from a JSON file.

    Missing keys fall back to the defaults (45 MHz, -350 MHz, [1, sqrt 2]).
    """
    data = json.loads(Path(path).read_text())
    unknown = set(data) - {"delta_mhz", "anharm_mhz", "lambda"}
    if unknown:
        raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
    return SystemParams.from_mhz(
        delta_mhz=float(data.get("delta_mhz", 45.0)),
        anharm_mhz=float(data.get("anharm_mhz", -350.0)),
        lam=data.get("lambda", [1.0, np.sqrt(2)]),
    )


def save_params(params: SystemParams, path) -> None:
    Path(path).write_text(json.dumps(params.to_dict(), indent=2) + "\n")


def _embed(op3: np.ndarray, qubit: int) -> np.ndarray:
    eye = np.eye(LEVELS)
    return np.kron(op3, eye) if qubit == 0 else np.kron(eye, op3)


def _weighted_lowering(lam_k: np.ndarray) -> np.ndarray:
    low = np.zeros((LEVELS, LEVELS))
    low[0, 1] = lam_k[0]
    low[1, 2] = lam_k[1]
    return low


def build_drift(params: SystemParams) -> np.ndarray:
    """Drive-free diagonal Hamiltonian ``E1(j1) + E2(j2)``."""
    e1, e2 = params.level_energies()
    return np.diag((e1[:, None] + e2[None, :]).ravel()).astype(complex)


def drift_energies(params: SystemParams) -> np.ndarray:
    e1, e2 = params.level_energies()
    return (e1[:, None] + e2[None, :]).ravel()


def build_control_generators(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Generators ``Hx, Hy`` with ``H = drift + Ox*Hx + Oy*Hy``.

    The factor 1/2 of the rotating-frame drive is folded into the generators.
    ``<j|Hy|j-1> = +i*lam/2``.
    """
    hx = np.zeros((DIM, DIM), dtype=complex)
    hy = np.zeros((DIM, DIM), dtype=complex)
    for k in range(2):
        low = _embed(_weighted_lowering(params.lam[k]), k)
        hx += 0.5 * (low + low.T)
        hy += 0.5 * (1j * low.T - 1j * low)
    return hx, hy


def build_hamiltonian(params: SystemParams, omega_x: float, omega_y: float) -> np.ndarray:
    hx, hy = build_control_generators(params)
    return build_drift(params) + omega_x * hx + omega_y * hy


def build_interaction_hamiltonian(params: SystemParams, omega_c: complex, t: float) -> np.ndarray:
    """Interaction-frame drive Hamiltonian at time ``t``.

    Equal to ``V(t) (Re(Oc) Hx + Im(Oc) Hy) V(t)^dagger`` with
    ``V(t) = exp(+i*drift*t)``.  The lowering element of transition ``j`` is
    ``lam/2 * conj(Oc) * exp(-i*d_j*t)``; for real ``Oc`` this is exactly the
    familiar ``Oc/2 * lam * exp(-i*d_j*t)``.
    """
    det = params.detunings().as_array()
    h = np.zeros((DIM, DIM), dtype=complex)
    for k in range(2):
        for j in (1, 2):
            coeff = 0.5 * params.lam[k, j - 1] * np.conj(omega_c) * np.exp(-1j * det[k, j - 1] * t)
            low = np.zeros((LEVELS, LEVELS))
            low[j - 1, j] = 1.0
            h += coeff * _embed(low, k)
    return h + h.conj().T


def interaction_hamiltonians(params: SystemParams, omega_c: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Vectorised :func:`build_interaction_hamiltonian` over samples, shape ``(N, 9, 9)``."""
    hx, hy = build_control_generators(params)
    energies = drift_energies(params)
    phase = np.exp(1j * np.subtract.outer(energies, energies)[None] * np.asarray(times)[:, None, None])
    oc = np.asarray(omega_c)
    h = oc.real[:, None, None] * hx + oc.imag[:, None, None] * hy
    return h * phase


def to_qubit_frame(unitary: np.ndarray, params: SystemParams, t: float) -> np.ndarray:
    """Map a rotating-frame propagator from 0 to ``t`` into the interaction frame."""
    return np.exp(1j * drift_energies(params) * t)[:, None] * unitary


def is_hermitian(h: np.ndarray, rtol: float = 1e-12) -> bool:
    scale = max(np.abs(h).max(), 1.0)
    return np.abs(h - h.conj().T).max() <= rtol * scale
