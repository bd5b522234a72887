"""
Gate fidelities on the computational subspace {|00>, |01>, |10>, |11>}.

The full fidelity compares the projected propagator with ``U1 (x) 1``; the
reduced fidelities fix qubit 2 in ``|0>`` or ``|1>`` and are therefore blind to
a conditional phase on qubit 2.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .model import DIM, basis_index

COMP = np.array([basis_index(0, 0), basis_index(0, 1), basis_index(1, 0), basis_index(1, 1)])
LEAK = np.array([i for i in range(DIM) if i not in COMP])
X_GATE = np.array([[0, 1], [1, 0]], dtype=complex)


class PhaseUndefinedError(ValueError):
    """The propagator is too far from the X-type product form to read a phase."""


def wrap_phase(x):
    """Wrap to ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


@dataclass(frozen=True, eq=False)
class TargetGate:
    u1: np.ndarray = field(default_factory=lambda: X_GATE.copy())

    def __post_init__(self):
        u1 = np.array(self.u1, dtype=complex)
        if u1.shape != (2, 2):
            raise ValueError("target must be a 2x2 single-qubit gate")
        if np.abs(u1.conj().T @ u1 - np.eye(2)).max() > 1e-12:
            raise ValueError("target gate is not unitary")
        object.__setattr__(self, "u1", u1)

    @property
    def computational(self) -> np.ndarray:
        """4x4 target ``U1 (x) 1`` in the order |00>, |01>, |10>, |11>."""
        return np.kron(self.u1, np.eye(2))

    def embedded(self) -> np.ndarray:
        """9x9 matrix carrying the target on the computational block, zero elsewhere."""
        t = np.zeros((DIM, DIM), dtype=complex)
        t[np.ix_(COMP, COMP)] = self.computational
        return t

    def block_targets(self) -> list[np.ndarray]:
        """9x9 targets restricted to ``{|0,i>, |1,i>}`` for ``i = 0, 1``."""
        out = []
        for i in (0, 1):
            idx = [basis_index(0, i), basis_index(1, i)]
            t = np.zeros((DIM, DIM), dtype=complex)
            t[np.ix_(idx, idx)] = self.u1
            out.append(t)
        return out


X_TARGET = TargetGate()


def computational_block(u: np.ndarray) -> np.ndarray:
    return u[np.ix_(COMP, COMP)]


def embed_computational(u4: np.ndarray, leak_block: np.ndarray | None = None) -> np.ndarray:
    """Build a 9x9 operator from a 4x4 computational block and a 5x5 leakage block."""
    u = np.zeros((DIM, DIM), dtype=complex)
    u[np.ix_(COMP, COMP)] = u4
    u[np.ix_(LEAK, LEAK)] = np.eye(LEAK.size) if leak_block is None else leak_block
    return u


def product_form(alpha: float, gamma: float) -> np.ndarray:
    """``e^{i alpha} X (x) diag(1, e^{i(gamma - alpha)})`` on the computational block."""
    return np.exp(1j * alpha) * np.kron(X_GATE, np.diag([1.0, np.exp(1j * (gamma - alpha))]))


def _block_trace(u: np.ndarray, target: TargetGate, i: int) -> complex:
    idx = [basis_index(0, i), basis_index(1, i)]
    return np.trace(target.u1.conj().T @ u[np.ix_(idx, idx)])


def gate_fidelity(u: np.ndarray, target: TargetGate = X_TARGET) -> float:
    tr = np.trace(target.computational.conj().T @ computational_block(u))
    return float(abs(tr) ** 2 / 16)


def reduced_fidelity(u: np.ndarray, target: TargetGate = X_TARGET, i: int = 0) -> float:
    if i not in (0, 1):
        raise ValueError("qubit-2 state must be 0 or 1")
    return float(abs(_block_trace(u, target, i)) ** 2 / 4)


def avg_fidelity(u: np.ndarray, target: TargetGate = X_TARGET) -> float:
    return 0.5 * (reduced_fidelity(u, target, 0) + reduced_fidelity(u, target, 1))


def leakage(u: np.ndarray) -> float:
    """Population lost from the computational subspace, averaged over its four basis states."""
    return float(1.0 - np.sum(np.abs(computational_block(u)) ** 2) / 4)


def extract_phases(u: np.ndarray, tol: float = 1e-6) -> tuple[float, float, float]:
    """Read ``(alpha, gamma, residual)`` of the X-type product form.

    ``alpha = arg <10|U|00>``, ``gamma = arg <11|U|01>``; ``residual`` is the
    max-norm distance of the computational block from :func:`product_form`.
    """
    a_el = u[basis_index(1, 0), basis_index(0, 0)]
    g_el = u[basis_index(1, 1), basis_index(0, 1)]
    if abs(a_el) < tol or abs(g_el) < tol:
        raise PhaseUndefinedError(
            f"matrix elements too small to define phases (|<10|U|00>|={abs(a_el):.2e}, "
            f"|<11|U|01>|={abs(g_el):.2e})"
        )
    alpha = float(wrap_phase(np.angle(a_el)))
    gamma = float(wrap_phase(np.angle(g_el)))
    residual = float(np.abs(computational_block(u) - product_form(alpha, gamma)).max())
    return alpha, gamma, residual


def optimal_correction_phase(u: np.ndarray, target: TargetGate = X_TARGET) -> float:
    """Qubit-2 phase that best aligns the two reduced blocks (``gamma - alpha`` for an exact product form)."""
    t0 = _block_trace(u, target, 0)
    t1 = _block_trace(u, target, 1)
    return float(wrap_phase(np.angle(t1) - np.angle(t0)))


def apply_frame_correction(u: np.ndarray, phase: float | None = None, target: TargetGate = X_TARGET) -> np.ndarray:
    """Remove a conditional qubit-2 phase by a virtual frame change.

    Applies ``diag(1, e^{-i*phase}, 1)`` on qubit 2 after the gate, i.e. the
    XY-frame rotation of subsequent qubit-2 pulses.  Qubit 2's leakage level
    is left alone.  Without ``phase`` the trace-optimal value is used.
    """
    if phase is None:
        phase = optimal_correction_phase(u, target)
    r2 = np.diag([1.0, np.exp(-1j * phase), 1.0])
    return np.kron(np.eye(3), r2) @ u


@dataclass(frozen=True)
class FidelityReport:
    phi: float
    phi_star0: float
    phi_star1: float
    phi_avg: float
    alpha: float
    gamma: float
    leakage: float
    phase_residual: float = float("nan")

    @classmethod
    def from_unitary(cls, u: np.ndarray, target: TargetGate = X_TARGET) -> "FidelityReport":
        f0 = reduced_fidelity(u, target, 0)
        f1 = reduced_fidelity(u, target, 1)
        try:
            alpha, gamma, residual = extract_phases(u)
        except PhaseUndefinedError:
            alpha = gamma = residual = float("nan")
        return cls(
            phi=gate_fidelity(u, target),
            phi_star0=f0,
            phi_star1=f1,
            phi_avg=0.5 * (f0 + f1),
            alpha=alpha,
            gamma=gamma,
            leakage=leakage(u),
            phase_residual=residual,
        )

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and np.isnan(v) else v) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "FidelityReport":
        return cls(**{k: (float("nan") if v is None else float(v)) for k, v in data.items()})


def fidelity_report(u: np.ndarray, target: TargetGate = X_TARGET) -> FidelityReport:
    return FidelityReport.from_unitary(u, target)
