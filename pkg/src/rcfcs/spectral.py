"""Steady states, Liouvillian spectra, constrained solves, and propagation.

All solvers are dense and pure.  The steady state is extracted from the
smallest singular vector of the generator, which also exposes degeneracy
of the stationary subspace through the second-smallest singular value.
The Drazin-inverse action is evaluated through one bordered linear system
(trace constraint appended) instead of forming the ill-conditioned full
inverse.  Leading eigenvalues can be polished by a Newton iteration with
extended-precision residuals; finite-difference cumulants of the counting
statistics divide eigenvalue noise by h^2, so the raw LAPACK accuracy is
not always sufficient.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .liouville import Generator, unvectorize, vectorize

__all__ = [
    "SteadyState",
    "SpectrumSlice",
    "SteadyStateError",
    "DegenerateSteadyStateError",
    "ConvergenceError",
    "steady_state",
    "leading_eigenvalue",
    "spectrum_top",
    "drazin_apply",
    "propagate",
    "Propagator",
]

DEGENERACY_RTOL = 1e-12
RESIDUAL_RTOL = 1e-10


class SteadyStateError(RuntimeError):
    pass


class DegenerateSteadyStateError(SteadyStateError):
    """The generator's null space has more than one direction."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SteadyState:
    """Stationary density matrix with solver diagnostics."""

    rho: np.ndarray
    residual_norm: float
    trace_error: float
    min_eigenvalue: float


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    """Leading eigenvalues sorted by descending real part, one per conjugate pair."""

    eigenvalues: np.ndarray
    count: int


def _require_untilted(g: Generator, what: str) -> None:
    if g.is_tilted:
        raise ValueError(f"{what} requires an untilted generator (chi absent or 0)")


def steady_state(g: Generator) -> SteadyState:
    """Unique trace-one null state of an untilted generator.

    Raises DegenerateSteadyStateError when the null space is more than
    one-dimensional (e.g. drive and coupling both zero) and ConvergenceError
    when the null-vector residual is not at solver accuracy.
    """
    _require_untilted(g, "steady_state")
    _, s, vh = sla.svd(g.matrix)
    s_max = s[0]
    if s_max == 0:
        raise SteadyStateError("generator is identically zero")
    if s[-2] <= DEGENERACY_RTOL * s_max:
        raise DegenerateSteadyStateError(
            "stationary subspace is degenerate: second singular value "
            f"{s[-2]:.3e} below {DEGENERACY_RTOL:.0e} * {s_max:.3e}"
        )
    null_vec = vh[-1].conj()
    rho = unvectorize(null_vec)
    trace = np.trace(rho)
    if abs(trace) < 1e-10:
        raise ConvergenceError("null vector has vanishing trace; cannot normalize")
    rho = rho / trace
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    residual = float(np.linalg.norm(g.matrix @ vectorize(rho)))
    if residual > RESIDUAL_RTOL * s_max:
        raise ConvergenceError(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_RTOL:.0e} * {s_max:.3e}"
        )
    trace_error = abs(np.trace(rho) - 1.0)
    min_eig = float(np.linalg.eigvalsh(rho).min())
    return SteadyState(
        rho=rho,
        residual_norm=residual,
        trace_error=float(trace_error),
        min_eigenvalue=min_eig,
    )


def _select_leading(evals: np.ndarray) -> int:
    """Index of the eigenvalue with largest real part, ties broken by smallest |Im|."""
    re_max = evals.real.max()
    tol = 1e-12 * max(1.0, abs(re_max))
    candidates = np.flatnonzero(evals.real >= re_max - tol)
    return int(candidates[np.argmin(np.abs(evals.imag[candidates]))])


def _refine_eigenpair(matrix: np.ndarray, theta: complex, vec: np.ndarray, iterations: int = 3):
    """Newton-polish an eigenpair, evaluating residuals in extended precision.

    Solves the bordered system [[A - theta I, -v], [c^H, 0]] for corrections,
    with the residual A v - theta v accumulated in long-double arithmetic so
    the refined eigenvalue error is far below double roundoff on ||A||.
    """
    n = matrix.shape[0]
    vec = vec / np.linalg.norm(vec)
    c = vec.conj()
    a_ext = matrix.astype(np.clongdouble)
    for _ in range(iterations):
        v_ext = vec.astype(np.clongdouble)
        residual = a_ext @ v_ext - np.clongdouble(theta) * v_ext
        r1 = residual.astype(complex)
        r2 = complex(c @ vec - 1.0)
        bordered = np.zeros((n + 1, n + 1), dtype=complex)
        bordered[:n, :n] = matrix - theta * np.eye(n)
        bordered[:n, n] = -vec
        bordered[n, :n] = c
        rhs = np.concatenate([-r1, [-r2]])
        try:
            delta = sla.solve(bordered, rhs)
        except sla.LinAlgError:
            break
        vec = vec + delta[:n]
        theta = theta + complex(delta[n])
    return theta, vec


def leading_eigenvalue(g: Generator, refine: bool = True) -> complex:
    """Eigenvalue of largest real part (the scaled cumulant generating function at g.chi)."""
    evals, evecs = sla.eig(g.matrix)
    idx = _select_leading(evals)
    theta = complex(evals[idx])
    if refine:
        theta, _ = _refine_eigenpair(g.matrix, theta, evecs[:, idx])
    return theta


def spectrum_top(g: Generator, k: int) -> SpectrumSlice:
    """The k+1 eigenvalues of largest real part, one representative per conjugate pair.

    Representatives carry Im >= 0.  For untilted generators the spectrum is
    closed under conjugation, so pairing removes exact mirror duplicates.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    evals = sla.eigvals(g.matrix)
    scale = max(1.0, float(np.abs(evals).max()))
    pair_tol = 1e-8 * scale
    order = np.lexsort((np.abs(evals.imag), -evals.real))
    kept: list[complex] = []
    for ev in evals[order]:
        ev = complex(ev)
        if any(abs(np.conj(ev) - existing) <= pair_tol for existing in kept):
            continue
        kept.append(ev if ev.imag >= 0 else np.conj(ev))
        if len(kept) == k + 1:
            break
    return SpectrumSlice(eigenvalues=np.asarray(kept, dtype=complex), count=len(kept))


def drazin_apply(g: Generator, rhs: np.ndarray, rho_ss: np.ndarray) -> np.ndarray:
    """Solve L x = rhs - rho_ss Tr[rhs] with Tr[x] = 0 (Drazin-inverse action).

    Implemented as one bordered linear system with the trace constraint
    appended; the border makes the matrix nonsingular despite the single
    stationary null direction.
    """
    _require_untilted(g, "drazin_apply")
    d2 = g.dim
    d = g.hilbert_dim
    b = vectorize(rhs - rho_ss * np.trace(rhs))
    bordered = np.zeros((d2 + 1, d2 + 1), dtype=complex)
    bordered[:d2, :d2] = g.matrix
    bordered[:d2, d2] = vectorize(rho_ss)
    bordered[d2, :d2] = vectorize(np.eye(d, dtype=complex))
    full_rhs = np.concatenate([b, [0.0]])
    try:
        sol = sla.solve(bordered, full_rhs)
    except sla.LinAlgError as exc:
        raise ConvergenceError(f"bordered Drazin solve failed: {exc}") from exc
    x = sol[:d2]
    residual = np.linalg.norm(g.matrix @ x - b)
    scale = np.linalg.norm(b) + np.linalg.norm(g.matrix, ord=np.inf) * np.linalg.norm(x)
    if scale > 0 and residual > 1e-9 * scale:
        raise ConvergenceError(
            f"Drazin solve residual {residual:.3e} too large; system may be "
            "rank-deficient beyond the stationary direction"
        )
    return unvectorize(x)


class Propagator:
    """Action of exp(L tau) on vectorized states, cached per generator.

    Uses the eigendecomposition when the eigenvector basis is well
    conditioned and falls back to per-step dense matrix exponentials
    otherwise (e.g. near exceptional points).
    """

    def __init__(self, g: Generator, cond_max: float = 1e10):
        self._g = g
        evals, v = sla.eig(g.matrix)
        cond = np.linalg.cond(v)
        if np.isfinite(cond) and cond <= cond_max:
            self._mode = "eig"
            self._evals = evals
            self._v = v
            self._lu = sla.lu_factor(v)
        else:
            warnings.warn(
                f"eigenvector condition number {cond:.2e} too large; "
                "falling back to stepwise matrix exponentials",
                RuntimeWarning,
            )
            self._mode = "expm"

    def apply(self, vec0: np.ndarray, taus) -> np.ndarray:
        """Propagated vectors at each tau >= 0, shape (len(taus), d^2)."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        if np.any(taus < 0):
            raise ValueError("propagation times must be >= 0")
        if self._mode == "eig":
            weights = sla.lu_solve(self._lu, vec0)
            modes = np.exp(np.outer(taus, self._evals)) * weights[None, :]
            return modes @ self._v.T
        out = np.empty((taus.size, vec0.size), dtype=complex)
        order = np.argsort(taus)
        current = vec0
        t_prev = 0.0
        for pos in order:
            dt = taus[pos] - t_prev
            if dt > 0:
                current = sla.expm(self._g.matrix * dt) @ current
                t_prev = taus[pos]
            out[pos] = current
        return out


def propagate(g: Generator, rho0: np.ndarray, tau: float) -> np.ndarray:
    """Evolve rho0 for time tau under the generator (dense matrix exponential)."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if tau == 0:
        return np.array(rho0, dtype=complex)
    v = sla.expm(g.matrix * tau) @ vectorize(rho0)
    return unvectorize(v)
