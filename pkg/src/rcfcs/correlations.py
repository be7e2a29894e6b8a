"""Two-time current correlation functions and the D - K decomposition.

The regular part of the stationary current autocorrelation is

    C(tau) = Tr[J_op e^{L tau} J_op rho_ss] - J^2,

obtained by propagating J_op rho_ss and applying the current superoperator
again.  Its integral relates the noise to the activity,
D = K + 2 int_0^inf C(tau) dtau, so D - K isolates the contribution of
temporal correlations between jumps: negative values certify
anticorrelation (antibunching) of the emission record.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fcs import apply_current_superop, average_current
from .liouville import Generator, JumpChannel, unvectorize, vectorize
from .spectral import Propagator, drazin_apply

__all__ = [
    "CorrelationTrace",
    "default_tau_grid",
    "correlation_function",
    "d_minus_k",
]

IMAG_RESIDUE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CorrelationTrace:
    """Sampled C(tau) with its grid integral and a tail estimate.

    ``integral`` is the composite trapezoid of the samples over the grid;
    ``tail_bound`` estimates the neglected tail from an exponential envelope
    fitted to the late samples.
    """

    taus: np.ndarray
    values: np.ndarray
    integral: float
    tail_bound: float


def default_tau_grid(gamma: float, t_max_over_gamma: float = 50.0, n_points: int = 400) -> np.ndarray:
    """Log-spaced grid on [0, t_max/gamma], dense near zero to resolve the dip."""
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    t_max = t_max_over_gamma / gamma
    grid = np.geomspace(1e-3 / gamma, t_max, n_points - 1)
    return np.concatenate(([0.0], grid))


def _tail_estimate(taus: np.ndarray, values: np.ndarray) -> float:
    """Integral bound for the neglected tail from a fitted exponential envelope."""
    n = taus.size
    start = max(n - n // 4, 1)
    t_fit = taus[start:]
    c_fit = np.abs(values[start:])
    mask = c_fit > 0
    if mask.sum() < 4:
        return 0.0
    slope = np.polyfit(t_fit[mask], np.log(c_fit[mask]), 1)[0]
    if slope >= -1e-300:
        return float(np.inf)
    return float(abs(values[-1]) / abs(slope))


def correlation_function(
    g: Generator,
    rho_ss,
    channels: Sequence[JumpChannel],
    taus: np.ndarray | None = None,
    propagator: Propagator | None = None,
) -> CorrelationTrace:
    """Sample C(tau) on a grid of delays starting at zero."""
    rho = rho_ss.rho if hasattr(rho_ss, "rho") else rho_ss
    if taus is None:
        raise ValueError("a tau grid is required; see default_tau_grid")
    taus = np.asarray(taus, dtype=float)
    if taus.ndim != 1 or taus.size < 2 or taus[0] != 0.0 or np.any(np.diff(taus) <= 0):
        raise ValueError("taus must be a sorted grid starting at 0")
    j_current = average_current(rho, channels)
    seed = vectorize(apply_current_superop(channels, rho))
    if propagator is None:
        propagator = Propagator(g)
    propagated = propagator.apply(seed, taus)
    values = np.empty(taus.size)
    worst_residue = 0.0
    for i in range(taus.size):
        state = unvectorize(propagated[i])
        c = np.trace(apply_current_superop(channels, state)) - j_current**2
        worst_residue = max(worst_residue, abs(c.imag))
        values[i] = c.real
    if worst_residue > IMAG_RESIDUE_TOL * max(1.0, float(np.abs(values).max())):
        warnings.warn(
            f"correlation samples carry imaginary residue up to {worst_residue:.3e}",
            RuntimeWarning,
        )
    integral = float(np.trapezoid(values, taus))
    return CorrelationTrace(
        taus=taus,
        values=values,
        integral=integral,
        tail_bound=_tail_estimate(taus, values),
    )


def d_minus_k(g: Generator, rho_ss, channels: Sequence[JumpChannel]) -> float:
    """Correlation contribution to the noise, D - K = 2 int_0^inf C(tau) dtau.

    Evaluated in closed form through the Drazin action; negative values
    certify net anticorrelation between jumps.
    """
    rho = rho_ss.rho if hasattr(rho_ss, "rho") else rho_ss
    x = drazin_apply(g, apply_current_superop(channels, rho), rho)
    value = sum(ch.weight * ch.rate * np.trace(ch.operator.conj().T @ ch.operator @ x) for ch in channels)
    value = complex(value)
    if abs(value.imag) > IMAG_RESIDUE_TOL * max(1.0, abs(value.real)):
        warnings.warn(f"D-K has imaginary residue {value.imag:.3e}", RuntimeWarning)
    return -2.0 * value.real
