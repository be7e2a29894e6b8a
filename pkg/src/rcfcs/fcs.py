"""Steady-state excitation-current statistics.

The mean current J and dynamical activity K are expectation values of the
jump channels in the steady state.  The noise D (second scaled cumulant) is
available through two independent deterministic routes that must agree:

* finite differences of the leading tilted-generator eigenvalue
  (the scaled cumulant generating function), and
* the Drazin-inverse closed form D = K - 2 Tr[J_op x] with
  x = drazin_apply(L, J_op rho_ss), equivalent to D = K + 2 int_0^inf C(tau).

A third, stochastic route lives in :mod:`rcfcs.trajectories`.

Entropy production uses the affinity ln(1 + 1/n_B) = omega_c / T by
default ("thermodynamic" convention); the literal ln(n_B + 1) variant is
available behind the ``convention`` flag for comparison.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .hilbert import Truncation
from .liouville import (
    Generator,
    JumpChannel,
    tilted_generator_dcut,
    tilted_generator_hcut,
    unvectorize,
    vectorize,
)
from .model import ModelParams
from .spectral import SteadyState, drazin_apply, leading_eigenvalue

__all__ = [
    "FcsResult",
    "CurrentSuperop",
    "EquivalenceReport",
    "current_superop",
    "apply_current_superop",
    "average_current",
    "dynamical_activity",
    "fd_cumulants",
    "fd_cumulants_from",
    "noise_fd_cgf",
    "noise_drazin",
    "entropy_production",
    "tur_ratio",
    "equivalence_certificate",
    "affinity",
]

IMAG_RESIDUE_TOL = 1e-8
FD_STABILITY_TOL = 1e-7


@dataclass(frozen=True)
class FcsResult:
    """Steady-state current statistics with method provenance.

    tur_Q is None when the mean current vanishes (the ratio is undefined
    there, not infinite).
    """

    current_J: float
    activity_K: float
    noise_D: float
    noise_method: str
    tur_Q: float | None
    entropy_rate: float
    snr: float


@dataclass(frozen=True, eq=False)
class CurrentSuperop:
    """Vectorized current superoperator sum_k nu_k r_k conj(L_k) kron L_k."""

    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Per-chi comparison of the leading eigenvalue across the two tilt cuts."""

    chi_grid: np.ndarray
    theta_hcut: np.ndarray
    theta_dcut: np.ndarray
    max_abs_diff: float
    tolerance: float
    passed: bool


def current_superop(channels: Sequence[JumpChannel]) -> CurrentSuperop:
    mats = [
        ch.weight * ch.rate * np.kron(ch.operator.conj(), ch.operator) for ch in channels
    ]
    return CurrentSuperop(matrix=sum(mats))


def apply_current_superop(channels: Sequence[JumpChannel], rho: np.ndarray) -> np.ndarray:
    """J_op rho = sum_k nu_k r_k L_k rho L_k' in matrix form."""
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    for ch in channels:
        out += ch.weight * ch.rate * (ch.operator @ rho @ ch.operator.conj().T)
    return out


def _real_expectation(value: complex, what: str, tol: float = IMAG_RESIDUE_TOL) -> float:
    if abs(value.imag) > tol * max(1.0, abs(value.real)):
        warnings.warn(f"{what} has imaginary residue {value.imag:.3e}", RuntimeWarning)
    return float(value.real)


def average_current(rho_ss: SteadyState | np.ndarray, channels: Sequence[JumpChannel]) -> float:
    """Mean excitation current J = Tr[J_op rho_ss] (emissions minus absorptions)."""
    rho = rho_ss.rho if isinstance(rho_ss, SteadyState) else rho_ss
    value = sum(ch.weight * np.trace(ch.norm_operator @ rho) for ch in channels)
    return _real_expectation(complex(value), "average current")


def dynamical_activity(rho_ss: SteadyState | np.ndarray, channels: Sequence[JumpChannel]) -> float:
    """Total jump rate K = sum_k r_k <L_k' L_k> (emissions plus absorptions)."""
    rho = rho_ss.rho if isinstance(rho_ss, SteadyState) else rho_ss
    value = sum(np.trace(ch.norm_operator @ rho) for ch in channels)
    return _real_expectation(complex(value), "dynamical activity")


def fd_cumulants_from(
    generator_fn: Callable[[complex], Generator],
    h: float = 1e-3,
    check_stability: bool = True,
) -> tuple[float, float]:
    """First and second scaled cumulants by central differences of theta_0(chi).

    J = -i (theta(h) - theta(-h)) / 2h,
    D = -(theta(h) - 2 theta(0) + theta(-h)) / h^2.

    A consistency evaluation at h/2 guards against an unstable step choice.
    """
    if not 1e-4 <= h <= 1e-2:
        raise ValueError(f"fd step h must lie in [1e-4, 1e-2], got {h}")

    def cumulants(step: float) -> tuple[float, float]:
        theta_p = leading_eigenvalue(generator_fn(step))
        theta_m = leading_eigenvalue(generator_fn(-step))
        theta_0 = leading_eigenvalue(generator_fn(0.0))
        j = -1j * (theta_p - theta_m) / (2.0 * step)
        d = -(theta_p - 2.0 * theta_0 + theta_m) / step**2
        j_r = _real_expectation(j, "first fd cumulant")
        d_r = _real_expectation(d, "second fd cumulant")
        return j_r, d_r

    j_h, d_h = cumulants(h)
    if check_stability:
        j_half, d_half = cumulants(h / 2.0)
        if abs(j_h - j_half) > FD_STABILITY_TOL or abs(d_h - d_half) > FD_STABILITY_TOL:
            warnings.warn(
                f"fd cumulants unstable between h={h:g} and h/2: "
                f"dJ={abs(j_h - j_half):.2e}, dD={abs(d_h - d_half):.2e}",
                RuntimeWarning,
            )
    return j_h, d_h


def fd_cumulants(
    p: ModelParams,
    trunc: Truncation,
    h: float = 1e-3,
    cut: str = "dissipator",
    check_stability: bool = True,
) -> tuple[float, float]:
    """Finite-difference cumulants of the extended-system counting statistics."""
    if cut == "dissipator":
        gen = lambda chi: tilted_generator_dcut(p, trunc, chi)
    elif cut == "hamiltonian":
        gen = lambda chi: tilted_generator_hcut(p, trunc, chi)
    else:
        raise ValueError(f"unknown cut {cut!r}; expected 'hamiltonian' or 'dissipator'")
    return fd_cumulants_from(gen, h=h, check_stability=check_stability)


def noise_fd_cgf(
    p: ModelParams,
    trunc: Truncation,
    h: float = 1e-3,
    cut: str = "dissipator",
) -> float:
    """Second scaled cumulant from the tilted-generator eigenvalue."""
    return fd_cumulants(p, trunc, h=h, cut=cut)[1]


def noise_drazin(
    rho_ss: SteadyState | np.ndarray,
    channels: Sequence[JumpChannel],
    g: Generator,
) -> float:
    """Noise via the constrained solve: D = K - 2 Tr[J_op L^D (J_op rho_ss)]."""
    rho = rho_ss.rho if isinstance(rho_ss, SteadyState) else rho_ss
    k = dynamical_activity(rho, channels)
    j_rho = apply_current_superop(channels, rho)
    x = drazin_apply(g, j_rho, rho)
    correction = sum(ch.weight * np.trace(ch.norm_operator @ x) for ch in channels)
    corr = _real_expectation(complex(correction), "drazin noise correction")
    return k - 2.0 * corr


def affinity(p: ModelParams, convention: str = "thermodynamic") -> float:
    """Entropy produced per transferred excitation.

    "thermodynamic": ln(1 + 1/n_B) = omega_c / T, consistent with
    Sigma_dot = Q_dot / T for heat quanta of energy omega_c.
    "paper": the literal ln(n_B + 1) variant, kept for comparison.
    """
    if convention == "thermodynamic":
        return float(np.inf) if p.n_bath == 0 else float(np.log1p(1.0 / p.n_bath))
    if convention == "paper":
        return float(np.log1p(p.n_bath))
    raise ValueError(f"unknown affinity convention {convention!r}")


def entropy_production(current_j: float, p: ModelParams, convention: str = "thermodynamic") -> float:
    """Steady-state entropy production rate Sigma_dot = J * affinity."""
    if current_j == 0.0:
        return 0.0
    return current_j * affinity(p, convention)


def tur_ratio(
    result: FcsResult | tuple[float, float],
    p: ModelParams,
    convention: str = "thermodynamic",
) -> float | None:
    """Uncertainty ratio Q = (D / J^2) Sigma_dot = (D / J) * affinity.

    Returns None when J = 0 (the ratio is undefined, not infinite).
    Classical Markov dynamics with local detailed balance obeys Q >= 2.
    """
    if isinstance(result, FcsResult):
        j, d = result.current_J, result.noise_D
    else:
        j, d = result
    if j == 0.0:
        return None
    return (d / j) * affinity(p, convention)


def equivalence_certificate(
    p: ModelParams,
    trunc: Truncation,
    chi_grid: Sequence[float],
    tolerance: float = 1e-9,
) -> EquivalenceReport:
    """Compare theta_0(chi) across the two counting-field placements.

    The two tilted generators monitor excitation exchange at different
    interfaces but are related by a unitary rotation of the mode, so their
    leading eigenvalues must coincide for every chi.
    """
    chis = np.asarray(list(chi_grid), dtype=float)
    if chis.size < 1:
        raise ValueError("chi grid must be nonempty")
    theta_h = np.array(
        [leading_eigenvalue(tilted_generator_hcut(p, trunc, chi)) for chi in chis]
    )
    theta_d = np.array(
        [leading_eigenvalue(tilted_generator_dcut(p, trunc, chi)) for chi in chis]
    )
    max_diff = float(np.max(np.abs(theta_h - theta_d)))
    return EquivalenceReport(
        chi_grid=chis,
        theta_hcut=theta_h,
        theta_dcut=theta_d,
        max_abs_diff=max_diff,
        tolerance=tolerance,
        passed=bool(max_diff < tolerance),
    )
