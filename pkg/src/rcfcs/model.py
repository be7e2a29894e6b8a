"""Physical parameters, spectral densities, and the rotating-frame Hamiltonian.

Units: the mode frequency omega_c = 1 sets the energy scale, and
hbar = k_B = 1.  Laboratory-frame frequencies never enter individually;
only the drive detunings delta_q = omega_q - omega_d and
delta_c = omega_c - omega_d do, so configurations specify detunings
directly.  Temperature is specified through the bath occupation n_bath at
omega_c; the affinity and temperature are derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .hilbert import Truncation, annihilation, embed, qubit_ops

__all__ = [
    "ModelParams",
    "BathThermo",
    "drude_lorentz",
    "ohmic_residual",
    "extended_hamiltonian",
]


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the driven qubit + mode extended system (units of omega_c).

    Attributes
    ----------
    omega_rabi : drive strength of the coherent field.
    lambda_coupling : qubit-mode interaction strength.
    alpha : dimensionless width of the structured spectral density.
    n_bath : residual-bath occupation at omega_c.
    delta_q, delta_c : qubit and mode detunings from the drive frequency.
    omega_c : mode frequency (energy unit, default 1).
    cutoff : UV cutoff of the Ohmic residual density; the default is large
        enough that gamma = alpha * omega_c within 0.1%.
    """

    omega_rabi: float
    lambda_coupling: float
    alpha: float
    n_bath: float
    delta_q: float = 0.0
    delta_c: float = 0.0
    omega_c: float = 1.0
    cutoff: float = 1000.0

    def __post_init__(self):
        if self.omega_rabi < 0:
            raise ValueError("omega_rabi must be >= 0")
        if self.lambda_coupling < 0:
            raise ValueError("lambda_coupling must be >= 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be > 0")
        if self.n_bath < 0:
            raise ValueError("n_bath must be >= 0")
        if self.omega_c <= 0:
            raise ValueError("omega_c must be > 0")

    @property
    def gamma(self) -> float:
        """Dissipation rate of the mode into the residual bath, S_res(omega_c)."""
        return ohmic_residual(self.omega_c, self)

    def with_(self, **kwargs) -> "ModelParams":
        """Copy with the given fields replaced."""
        return replace(self, **kwargs)


@dataclass(frozen=True)
class BathThermo:
    """Affinity and temperature derived from the bath occupation at omega_c."""

    affinity: float
    temperature: float

    @classmethod
    def from_occupation(cls, n_bath: float, omega_c: float = 1.0) -> "BathThermo":
        if n_bath < 0:
            raise ValueError("n_bath must be >= 0")
        if n_bath == 0:
            return cls(affinity=math.inf, temperature=0.0)
        affinity = math.log1p(1.0 / n_bath)
        return cls(affinity=affinity, temperature=omega_c / affinity)

    def occupation_at(self, omega: float) -> float:
        """Bose-Einstein occupation of this bath at frequency omega."""
        if omega <= 0:
            raise ValueError("occupation_at requires omega > 0")
        if self.temperature == 0:
            return 0.0
        return 1.0 / math.expm1(omega / self.temperature)


def drude_lorentz(omega: float, p: ModelParams) -> float:
    """Structured (peaked) spectral density of the original bath.

    S(w) = 4 w alpha lambda^2 wc^2 / [(w^2 - wc^2)^2 + (2 pi alpha wc w)^2],
    peaked at the mode frequency with width ~ alpha * wc.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    lam2 = p.lambda_coupling**2
    wc = p.omega_c
    num = 4.0 * omega * p.alpha * lam2 * wc**2
    den = (omega**2 - wc**2) ** 2 + (2.0 * math.pi * p.alpha * wc * omega) ** 2
    return num / den if num else 0.0


def ohmic_residual(omega: float, p: ModelParams) -> float:
    """Ohmic spectral density of the residual bath after the mode extraction."""
    if omega < 0:
        raise ValueError("omega must be >= 0")
    return p.alpha * omega * math.exp(-omega / p.cutoff)


def extended_hamiltonian(p: ModelParams, trunc: Truncation, chi: float = 0.0) -> np.ndarray:
    """Rotating-frame Hamiltonian of the extended qubit + mode system.

    H = delta_q s+s-  +  Omega (s+ + s-)  +  delta_c a'a
        + lambda (e^{-i chi/2} s+ a + e^{+i chi/2} s- a')

    With chi = 0 this is the plain excitation-conserving interaction; a
    nonzero chi dresses the coupling with the counting-field half-angle
    phases used to monitor excitation exchange at the qubit-mode interface.
    """
    sm, sp, sx, n_q = qubit_ops()
    a = annihilation(trunc)
    ident_q = np.eye(2, dtype=complex)
    ident_m = np.eye(trunc.n_max, dtype=complex)
    h = p.delta_q * embed(n_q, ident_m)
    h = h + p.omega_rabi * embed(sx, ident_m)
    h = h + p.delta_c * embed(ident_q, a.conj().T @ a)
    coupling = np.exp(-0.5j * chi) * embed(sp, a) + np.exp(0.5j * chi) * embed(sm, a.conj().T)
    return h + p.lambda_coupling * coupling
