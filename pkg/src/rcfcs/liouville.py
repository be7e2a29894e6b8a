"""Lindblad generators, plain and counting-field dressed, as dense superoperator matrices.

Vectorization is column-stacking throughout: vec(A rho B) = (B^T kron A) vec(rho).
Under this convention a Lindblad generator

    L rho = -i[H, rho] + sum_k r_k (L_k rho L_k' - 1/2 {L_k' L_k, rho})

becomes the d^2 x d^2 matrix

    -i (1 kron H - H^T kron 1)
    + sum_k r_k (conj(L_k) kron L_k - 1/2 (1 kron L_k'L_k) - 1/2 ((L_k'L_k)^T kron 1)).

Counting fields enter in one of two ways ("cuts"): on the qubit-mode
coupling term of the Hamiltonian with half-angle phases (the commutator is
then generalized to H_chi rho - rho H_{-chi}), or on the sandwich terms of
the mode dissipators with full-angle phases e^{+i chi} (emission) and
e^{-i chi} (absorption).  The two dressings count excitation exchange at
different interfaces but are unitarily equivalent, so they share the full
counting statistics; this is asserted numerically in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .hilbert import Truncation, annihilation, embed, qubit_ops
from .model import BathThermo, ModelParams, drude_lorentz, extended_hamiltonian

__all__ = [
    "TILT_NONE",
    "TILT_HAMILTONIAN",
    "TILT_DISSIPATOR",
    "Generator",
    "JumpChannel",
    "vectorize",
    "unvectorize",
    "rc_lme_generator",
    "tilted_generator_hcut",
    "tilted_generator_dcut",
    "weak_coupling_generator",
    "jump_channels",
    "weak_jump_channels",
    "weak_coupling_rates",
]

TILT_NONE = "none"
TILT_HAMILTONIAN = "hamiltonian_cut"
TILT_DISSIPATOR = "dissipator_cut"


@dataclass(frozen=True, eq=False)
class Generator:
    """Dense generator acting on column-stacked density matrices.

    ``dim`` is the superoperator dimension d^2; ``chi`` is the counting
    field (None when untilted) and ``tilt_kind`` records where it acts.
    """

    matrix: np.ndarray
    dim: int
    chi: complex | None = None
    tilt_kind: str = TILT_NONE

    def __post_init__(self):
        if self.matrix.shape != (self.dim, self.dim):
            raise ValueError("generator matrix shape does not match dim")
        if self.tilt_kind not in (TILT_NONE, TILT_HAMILTONIAN, TILT_DISSIPATOR):
            raise ValueError(f"unknown tilt kind {self.tilt_kind!r}")

    @property
    def hilbert_dim(self) -> int:
        return isqrt(self.dim)

    @property
    def is_tilted(self) -> bool:
        return self.tilt_kind != TILT_NONE and self.chi not in (None, 0, 0.0)


@dataclass(frozen=True, eq=False)
class JumpChannel:
    """One dissipation channel: unscaled operator, rate, and counting weight.

    The physical jump operator is sqrt(rate) * operator; emissions into the
    bath carry weight +1, absorptions weight -1.
    """

    operator: np.ndarray
    rate: float
    weight: int

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("rate must be >= 0")
        if self.weight not in (+1, -1):
            raise ValueError("weight must be +1 or -1")

    @property
    def scaled_operator(self) -> np.ndarray:
        return np.sqrt(self.rate) * self.operator

    @property
    def norm_operator(self) -> np.ndarray:
        """rate * operator' operator, the weighted number operator of the channel."""
        return self.rate * (self.operator.conj().T @ self.operator)


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a square matrix into a vector."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.reshape(-1, order="F")

def unvectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v)
    d = isqrt(v.size)
    if d * d != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape((d, d), order="F")


def _lindblad_matrix(h_left, h_right, channels, phases) -> np.ndarray:
    """Assemble the vectorized generator from Hamiltonian and dissipator pieces.

    ``h_left``/``h_right`` act from the left/right in the (generalized)
    commutator; ``phases[k]`` multiplies only the sandwich term of channel k.
    """
    d = h_left.shape[0]
    ident = np.eye(d, dtype=complex)
    gen = -1j * (np.kron(ident, h_left) - np.kron(h_right.T, ident))
    for ch, phase in zip(channels, phases):
        op = ch.operator
        op_dag_op = op.conj().T @ op
        sandwich = np.kron(op.conj(), op)
        gen = gen + ch.rate * (
            phase * sandwich
            - 0.5 * np.kron(ident, op_dag_op)
            - 0.5 * np.kron(op_dag_op.T, ident)
        )
    return gen


def jump_channels(p: ModelParams, trunc: Truncation) -> tuple[JumpChannel, JumpChannel]:
    """Emission and absorption channels of the mode coupled to the residual bath."""
    a = embed(np.eye(2, dtype=complex), annihilation(trunc))
    gamma = p.gamma
    emission = JumpChannel(operator=a, rate=gamma * (p.n_bath + 1.0), weight=+1)
    absorption = JumpChannel(operator=a.conj().T, rate=gamma * p.n_bath, weight=-1)
    return emission, absorption


def _rc_generator_matrix(p: ModelParams, trunc: Truncation, chi_h, chi_d) -> np.ndarray:
    h_left = extended_hamiltonian(p, trunc, chi=chi_h)
    h_right = extended_hamiltonian(p, trunc, chi=-chi_h) if chi_h != 0 else h_left
    channels = jump_channels(p, trunc)
    phases = (np.exp(1j * chi_d), np.exp(-1j * chi_d))
    return _lindblad_matrix(h_left, h_right, channels, phases)


def rc_lme_generator(p: ModelParams, trunc: Truncation) -> Generator:
    """Lindblad generator of the driven qubit + damped mode extended system."""
    mat = _rc_generator_matrix(p, trunc, 0.0, 0.0)
    return Generator(matrix=mat, dim=mat.shape[0])


def tilted_generator_hcut(p: ModelParams, trunc: Truncation, chi: complex) -> Generator:
    """Generator counting excitation exchange at the qubit-mode interface.

    The counting field lives on the half-angle of the coupling term, so the
    generator entries have period 4*pi in chi.
    """
    mat = _rc_generator_matrix(p, trunc, chi, 0.0)
    return Generator(matrix=mat, dim=mat.shape[0], chi=chi, tilt_kind=TILT_HAMILTONIAN)


def tilted_generator_dcut(p: ModelParams, trunc: Truncation, chi: complex) -> Generator:
    """Generator counting excitation exchange with the residual bath.

    Full-angle phases multiply only the dissipator sandwich terms: e^{+i chi}
    for emission, e^{-i chi} for absorption (period 2*pi).  Complex chi is
    allowed, e.g. for checking the fluctuation-theorem symmetry.
    """
    mat = _rc_generator_matrix(p, trunc, 0.0, chi)
    return Generator(matrix=mat, dim=mat.shape[0], chi=chi, tilt_kind=TILT_DISSIPATOR)


def weak_coupling_rates(p: ModelParams) -> tuple[float, float]:
    """Decay rate and occupation seen by the bare qubit at its transition frequency.

    The rate is the structured spectral density evaluated at
    omega_q = omega_c + (delta_q - delta_c); the occupation is the bath's at
    the same frequency (equal to n_bath on resonance).
    """
    omega_q = p.omega_c + (p.delta_q - p.delta_c)
    if omega_q <= 0:
        raise ValueError("qubit frequency must be positive for the weak-coupling benchmark")
    gamma_q = drude_lorentz(omega_q, p)
    if omega_q == p.omega_c:
        n_q = p.n_bath
    else:
        n_q = BathThermo.from_occupation(p.n_bath, p.omega_c).occupation_at(omega_q)
    return gamma_q, n_q


def weak_jump_channels(p: ModelParams) -> tuple[JumpChannel, JumpChannel]:
    """Emission and absorption channels of the bare qubit benchmark."""
    sm, sp, _, _ = qubit_ops()
    gamma_q, n_q = weak_coupling_rates(p)
    emission = JumpChannel(operator=sm, rate=gamma_q * (n_q + 1.0), weight=+1)
    absorption = JumpChannel(operator=sp, rate=gamma_q * n_q, weight=-1)
    return emission, absorption


def weak_coupling_generator(p: ModelParams, chi: complex = 0.0) -> Generator:
    """Qubit-only benchmark generator for the flat-spectral-density regime.

    Local rotating-frame Lindblad equation for the bare qubit with decay
    rate gamma_q = S(omega_q); intended for alpha * omega_c >> lambda where
    the structured density is flat across the qubit line.  The counting
    field dresses the dissipator sandwich terms as in the dissipator cut.
    """
    sm, sp, sx, n_q_op = qubit_ops()
    h = p.delta_q * n_q_op + p.omega_rabi * sx
    channels = weak_jump_channels(p)
    phases = (np.exp(1j * chi), np.exp(-1j * chi))
    mat = _lindblad_matrix(h, h, channels, phases)
    tilt = TILT_DISSIPATOR if chi not in (0, 0.0) else TILT_NONE
    return Generator(matrix=mat, dim=mat.shape[0], chi=chi if chi else None, tilt_kind=tilt)
