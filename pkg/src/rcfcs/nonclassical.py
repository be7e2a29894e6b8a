"""Reduced-state diagnostics of the embedded mode.

The mode state is the partial trace of the extended steady state over the
qubit.  Three complementary nonclassicality quantifiers are computed:

* zero-delay second-order coherence g2(0) = <a'a'aa> / <a'a>^2
  (values below 1 indicate antibunching),
* non-Gaussianity delta_G = S(tau) - S(rho): the relative-entropy distance
  to the Gaussian state tau with the same first and second moments, whose
  entropy follows from the symplectic eigenvalue nu = sqrt(det sigma),
* the l1-coherence, the summed moduli of Fock-basis off-diagonals.

Covariance convention: quadratures x = (a + a')/sqrt(2), p = (a - a')/(i sqrt(2)),
sigma_ij = <{dR_i, dR_j}> with first moments subtracted, so the vacuum has
sigma = identity and a thermal state nu = 2n + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import Truncation, annihilation, partial_trace_qubit

__all__ = [
    "RcState",
    "NonclassicalityReport",
    "UncertaintyViolationError",
    "reduce_rc",
    "g2_zero",
    "non_gaussianity",
    "l1_coherence",
    "nonclassicality",
    "von_neumann_entropy",
]

ENTROPY_EIGENVALUE_FLOOR = 1e-14
NU_TOLERANCE = 1e-8


class UncertaintyViolationError(RuntimeError):
    """det sigma < 1 beyond tolerance, i.e. numerical positivity failure."""


@dataclass(frozen=True, eq=False)
class RcState:
    """Reduced mode state with the moments used by the quantifiers."""

    rho_rc: np.ndarray
    mean_a: complex
    mean_n: float
    mean_a2: complex
    mean_adag2a2: float
    top_population: float


@dataclass(frozen=True)
class NonclassicalityReport:
    """Scalar nonclassicality measures of the mode state."""

    g2_zero: float | None
    delta_G: float
    l1_coherence: float
    symplectic_nu: float


def reduce_rc(rho_ss) -> RcState:
    """Partial trace over the qubit plus the mode moments."""
    rho = rho_ss.rho if hasattr(rho_ss, "rho") else np.asarray(rho_ss, dtype=complex)
    rho_rc = partial_trace_qubit(rho)
    n_max = rho_rc.shape[0]
    a = annihilation(Truncation(n_max))
    adag = a.conj().T
    mean_a = complex(np.trace(a @ rho_rc))
    mean_n = float(np.trace(adag @ a @ rho_rc).real)
    mean_a2 = complex(np.trace(a @ a @ rho_rc))
    mean_adag2a2 = float(np.trace(adag @ adag @ a @ a @ rho_rc).real)
    top_population = float(rho_rc[n_max - 1, n_max - 1].real)
    return RcState(
        rho_rc=rho_rc,
        mean_a=mean_a,
        mean_n=mean_n,
        mean_a2=mean_a2,
        mean_adag2a2=mean_adag2a2,
        top_population=top_population,
    )


def g2_zero(rc: RcState) -> float | None:
    """Zero-delay second-order coherence; None for vacuum-like states."""
    if rc.mean_n <= 1e-12:
        return None
    return rc.mean_adag2a2 / rc.mean_n**2


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr[rho ln rho] with eigenvalues below 1e-14 clamped to zero."""
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > ENTROPY_EIGENVALUE_FLOOR]
    return float(-np.sum(evals * np.log(evals)))


def _gaussian_entropy(nu: float) -> float:
    """Entropy of a single-mode Gaussian state with symplectic eigenvalue nu."""
    up = 0.5 * (nu + 1.0)
    down = 0.5 * (nu - 1.0)
    s = up * np.log(up)
    if down > 0:
        s -= down * np.log(down)
    return float(s)


def non_gaussianity(rc: RcState) -> tuple[float, float]:
    """(delta_G, nu): entropy distance to the moment-matched Gaussian state.

    First moments are subtracted before building the covariance matrix (the
    driven steady state has <a> != 0).
    """
    n_max = rc.rho_rc.shape[0]
    a = annihilation(Truncation(n_max))
    adag = a.conj().T
    x = (a + adag) / np.sqrt(2.0)
    p = (a - adag) / (1j * np.sqrt(2.0))
    mean_x = float(np.trace(x @ rc.rho_rc).real)
    mean_p = float(np.trace(p @ rc.rho_rc).real)
    sig_xx = 2.0 * (float(np.trace(x @ x @ rc.rho_rc).real) - mean_x**2)
    sig_pp = 2.0 * (float(np.trace(p @ p @ rc.rho_rc).real) - mean_p**2)
    sig_xp = float(np.trace((x @ p + p @ x) @ rc.rho_rc).real) - 2.0 * mean_x * mean_p
    det_sigma = sig_xx * sig_pp - sig_xp**2
    nu = np.sqrt(det_sigma) if det_sigma > 0 else 0.0
    if nu < 1.0 - NU_TOLERANCE:
        raise UncertaintyViolationError(
            f"symplectic eigenvalue {nu:.12f} below 1; the reduced state is "
            "not numerically positive"
        )
    nu = max(float(nu), 1.0)
    delta_g = _gaussian_entropy(nu) - von_neumann_entropy(rc.rho_rc)
    return delta_g, nu


def l1_coherence(rc: RcState) -> float:
    """Sum of |rho_ij| over all Fock-basis off-diagonal entries."""
    mags = np.abs(rc.rho_rc)
    return float(mags.sum() - np.trace(mags))


def nonclassicality(rc: RcState) -> NonclassicalityReport:
    delta_g, nu = non_gaussianity(rc)
    return NonclassicalityReport(
        g2_zero=g2_zero(rc),
        delta_G=delta_g,
        l1_coherence=l1_coherence(rc),
        symplectic_nu=nu,
    )
