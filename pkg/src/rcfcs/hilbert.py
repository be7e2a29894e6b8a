"""Operator algebra on the truncated qubit (x) bosonic-mode Hilbert space.

Conventions
-----------
Qubit basis is (|0>, |1>) with sigma_minus |1> = |0>.  The bosonic mode is
truncated to Fock levels 0 .. n_max-1.  Composite operators are ordered
qubit-major, i.e. basis index k = s * n_max + n for qubit state s and Fock
level n, so ``embed(Q, M) = kron(Q, M)`` and the partial trace over the
qubit is a sum of two contiguous diagonal blocks.

All operators are dense complex numpy arrays and are treated as immutable
after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Truncation",
    "annihilation",
    "qubit_ops",
    "embed",
    "partial_trace_qubit",
    "thermal_state",
    "coherent_state",
    "fock_state",
]


@dataclass(frozen=True)
class Truncation:
    """Number of Fock levels retained for the bosonic mode."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError(f"n_max must be an integer >= 2, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        """Dimension of the extended (qubit x mode) space."""
        return 2 * self.n_max


def annihilation(trunc: Truncation) -> np.ndarray:
    """Truncated bosonic annihilation operator, A[n-1, n] = sqrt(n)."""
    n_max = trunc.n_max
    a = np.zeros((n_max, n_max), dtype=complex)
    for n in range(1, n_max):
        a[n - 1, n] = math.sqrt(n)
    return a


def qubit_ops() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Qubit ladder and Pauli-x operators: (sigma_-, sigma_+, sigma_x, sigma_+ sigma_-)."""
    sm = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    sp = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    sx = sp + sm
    n_q = sp @ sm
    return sm, sp, sx, n_q


def embed(qubit_op: np.ndarray, mode_op: np.ndarray) -> np.ndarray:
    """Lift a (qubit_op, mode_op) pair onto the extended space, qubit factor first."""
    qubit_op = np.asarray(qubit_op)
    mode_op = np.asarray(mode_op)
    if qubit_op.shape != (2, 2):
        raise ValueError(f"qubit factor must be 2x2, got {qubit_op.shape}")
    if mode_op.ndim != 2 or mode_op.shape[0] != mode_op.shape[1]:
        raise ValueError(f"mode factor must be square, got {mode_op.shape}")
    return np.kron(qubit_op, mode_op)


def partial_trace_qubit(rho: np.ndarray) -> np.ndarray:
    """Trace out the qubit factor of an extended-space density matrix."""
    d = rho.shape[0]
    if rho.shape != (d, d) or d % 2:
        raise ValueError(f"expected a square matrix of even dimension, got {rho.shape}")
    n_max = d // 2
    return rho[:n_max, :n_max] + rho[n_max:, n_max:]


def thermal_state(trunc: Truncation, n_occupation: float) -> np.ndarray:
    """Truncated, renormalized thermal state of the mode with mean occupation n.

    The geometric weights p(n) ~ (n/(n+1))^n are renormalized over the kept
    levels; this truncated state is an exact fixed point of the truncated
    thermal dissipator.
    """
    if n_occupation < 0:
        raise ValueError("occupation must be >= 0")
    levels = np.arange(trunc.n_max)
    if n_occupation == 0:
        weights = np.zeros(trunc.n_max)
        weights[0] = 1.0
    else:
        ratio = n_occupation / (n_occupation + 1.0)
        weights = ratio**levels
        weights /= weights.sum()
    return np.diag(weights).astype(complex)


def coherent_state(trunc: Truncation, alpha: complex) -> np.ndarray:
    """Truncated coherent-state vector, renormalized over the kept levels."""
    amps = np.zeros(trunc.n_max, dtype=complex)
    amps[0] = 1.0
    for n in range(1, trunc.n_max):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    amps /= np.linalg.norm(amps)
    return amps


def fock_state(trunc: Truncation, n: int) -> np.ndarray:
    """Fock-basis unit vector |n> of the truncated mode."""
    if not 0 <= n < trunc.n_max:
        raise ValueError(f"Fock level {n} outside truncation 0..{trunc.n_max - 1}")
    v = np.zeros(trunc.n_max, dtype=complex)
    v[n] = 1.0
    return v
