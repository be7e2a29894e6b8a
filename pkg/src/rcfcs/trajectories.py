"""Quantum-jump Monte Carlo unraveling of the extended-system master equation.

Click records from an ideal detector on the mode-bath interface: emissions
(weight +1) and absorptions (weight -1).  The sampler uses the
norm-threshold waiting-time algorithm: the conditional state evolves under
the non-Hermitian effective Hamiltonian H_eff = H - (i/2) sum_k L_k' L_k,
whose propagator over a step is evaluated exactly (H_eff is
time-independent), and the jump time where ||psi||^2 crosses a uniform
threshold is refined by bisection with cached dyadic-fraction propagators.
This avoids first-order dt*rate jump probabilities entirely.

Trajectories are reproducible: the random stream is keyed by the seed, and
ensembles key each trajectory by (master_seed, trajectory_index).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .hilbert import Truncation
from .liouville import jump_channels
from .model import ModelParams, extended_hamiltonian

__all__ = [
    "JumpRecord",
    "EnsembleEstimate",
    "TruncationOverflowError",
    "sample_trajectory",
    "sample_ensemble",
    "estimate_cumulants",
    "net_count",
    "default_windows",
]

TOP_LEVEL_POPULATION_LIMIT = 1e-6
JUMP_TIME_RTOL = 1e-10


class TruncationOverflowError(RuntimeError):
    """Conditional state leaked into the top Fock level beyond tolerance."""


@dataclass(frozen=True)
class JumpRecord:
    """Time-ordered click record of one trajectory.

    events holds (time, weight) pairs with strictly increasing times in
    (0, t_final]; the implied counting process is
    N(t) = sum of weights with event time <= t.  Snapshots, when requested,
    hold the normalized conditional state at the given times.
    """

    seed: tuple[int, ...]
    t_final: float
    events: tuple[tuple[float, int], ...]
    snapshots: tuple[tuple[float, np.ndarray], ...] = field(default=())


@dataclass(frozen=True)
class EnsembleEstimate:
    """Current and noise estimated from counting increments over a window."""

    n_traj: int
    J_hat: float
    J_stderr: float
    D_hat: float
    D_stderr: float
    t_window: float


def default_windows(p: ModelParams) -> tuple[float, float]:
    """(burn-in, observation window) defaults of 50/gamma and 500/gamma."""
    gamma = p.gamma
    return 50.0 / gamma, 500.0 / gamma


class _TrajectoryEngine:
    """Shared propagator cache for sampling many trajectories of one model."""

    def __init__(self, p: ModelParams, trunc: Truncation, dt: float | None = None):
        self.trunc = trunc
        h = extended_hamiltonian(p, trunc)
        self.channels = jump_channels(p, trunc)
        damping = sum(ch.norm_operator for ch in self.channels)
        h_eff = h - 0.5j * damping
        self._drift = -1j * h_eff
        gamma = p.gamma
        if gamma <= 0:
            raise ValueError("trajectory sampling requires gamma > 0")
        self.dt = dt if dt is not None else 0.5 / gamma
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        self._propagators: dict[float, np.ndarray] = {}
        self.n_max = trunc.n_max
        self.dim = trunc.dim

    def propagator(self, step: float) -> np.ndarray:
        u = self._propagators.get(step)
        if u is None:
            u = sla.expm(self._drift * step)
            self._propagators[step] = u
        return u

    def top_population(self, psi: np.ndarray) -> float:
        norm_sq = float(np.vdot(psi, psi).real)
        top = abs(psi[self.n_max - 1]) ** 2 + abs(psi[2 * self.n_max - 1]) ** 2
        return top / norm_sq

    def _guard(self, psi: np.ndarray, t: float) -> None:
        if self.top_population(psi) > TOP_LEVEL_POPULATION_LIMIT:
            raise TruncationOverflowError(
                f"top Fock level population {self.top_population(psi):.3e} exceeds "
                f"{TOP_LEVEL_POPULATION_LIMIT:g} at t={t:.3g}; raise n_max"
            )

    def _refine_jump(self, t0: float, psi0: np.ndarray, step0: float, threshold: float):
        """Bisect the threshold crossing inside (t0, t0 + step0].

        The no-jump norm decays monotonically, so the crossing is unique;
        dyadic steps reuse cached propagators.
        """
        offset = 0.0
        psi = psi0
        step = step0 / 2.0
        tol = JUMP_TIME_RTOL * max(t0 + step0, self.dt)
        while step > tol:
            candidate = self.propagator(step) @ psi
            if float(np.vdot(candidate, candidate).real) >= threshold:
                offset += step
                psi = candidate
            step /= 2.0
        return t0 + offset, psi

    def run(
        self,
        seed,
        t_final: float,
        snapshot_times=(),
    ) -> JumpRecord:
        if t_final <= 0:
            raise ValueError("t_final must be > 0")
        rng = np.random.default_rng(seed)
        psi = np.zeros(self.dim, dtype=complex)
        psi[0] = 1.0  # qubit ground, mode vacuum
        snapshots_pending = sorted(float(t) for t in snapshot_times)
        snapshots: list[tuple[float, np.ndarray]] = []
        events: list[tuple[float, int]] = []
        t = 0.0
        threshold = rng.random()
        while t < t_final:
            while snapshots_pending and snapshots_pending[0] <= t:
                t_snap = snapshots_pending.pop(0)
                snapshots.append((t_snap, psi / np.linalg.norm(psi)))
            boundaries = [t + self.dt, t_final]
            if snapshots_pending:
                boundaries.append(snapshots_pending[0])
            t_next = min(boundaries)
            step = t_next - t
            candidate = self.propagator(step) @ psi
            if float(np.vdot(candidate, candidate).real) < threshold:
                t_jump, psi_pre = self._refine_jump(t, psi, step, threshold)
                weights = np.array(
                    [ch.rate * float(np.linalg.norm(ch.operator @ psi_pre) ** 2) for ch in self.channels]
                )
                total = weights.sum()
                if total <= 0:
                    raise RuntimeError("no jump channel has weight at the crossing time")
                pick = int(np.searchsorted(np.cumsum(weights) / total, rng.random()))
                ch = self.channels[pick]
                psi = ch.operator @ psi_pre
                psi = psi / np.linalg.norm(psi)
                events.append((t_jump, ch.weight))
                self._guard(psi, t_jump)
                threshold = rng.random()
                t = t_jump
            else:
                psi = candidate
                t = t_next
                self._guard(psi, t)
        while snapshots_pending and snapshots_pending[0] <= t_final:
            t_snap = snapshots_pending.pop(0)
            snapshots.append((t_snap, psi / np.linalg.norm(psi)))
        seed_tuple = tuple(np.atleast_1d(np.asarray(seed, dtype=np.int64)).tolist())
        return JumpRecord(
            seed=seed_tuple,
            t_final=t_final,
            events=tuple(events),
            snapshots=tuple(snapshots),
        )


def sample_trajectory(
    p: ModelParams,
    trunc: Truncation,
    t_final: float,
    seed,
    dt: float | None = None,
    snapshot_times=(),
) -> JumpRecord:
    """Sample one click record; deterministic for a given seed."""
    engine = _TrajectoryEngine(p, trunc, dt=dt)
    return engine.run(seed, t_final, snapshot_times=snapshot_times)


def _ensemble_chunk(args) -> list[JumpRecord]:
    p, trunc, t_final, master_seed, indices, dt, snapshot_times = args
    engine = _TrajectoryEngine(p, trunc, dt=dt)
    return [engine.run((master_seed, i), t_final, snapshot_times=snapshot_times) for i in indices]


def sample_ensemble(
    p: ModelParams,
    trunc: Truncation,
    n_traj: int,
    t_final: float,
    master_seed: int,
    workers: int = 1,
    dt: float | None = None,
    snapshot_times=(),
) -> list[JumpRecord]:
    """Independent trajectories seeded by (master_seed, index), in index order."""
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    indices = list(range(n_traj))
    if workers <= 1:
        engine = _TrajectoryEngine(p, trunc, dt=dt)
        return [engine.run((master_seed, i), t_final, snapshot_times=snapshot_times) for i in indices]
    chunks = [indices[k::workers] for k in range(workers)]
    args = [(p, trunc, t_final, master_seed, chunk, dt, snapshot_times) for chunk in chunks if chunk]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_ensemble_chunk, args))
    by_index: dict[int, JumpRecord] = {}
    for chunk, records in zip([a[4] for a in args], results):
        for i, rec in zip(chunk, records):
            by_index[i] = rec
    return [by_index[i] for i in indices]


def net_count(record: JumpRecord, t: float) -> int:
    """Net transferred excitations N(t) implied by the click record."""
    return sum(w for time, w in record.events if time <= t)


def estimate_cumulants(records, t_burn: float) -> EnsembleEstimate:
    """Estimate J and D from counting increments over (t_burn, t_final].

    J_hat is the mean increment per unit time, D_hat the increment variance
    per unit time; standard errors come from the trajectory scatter (J) and
    from batch statistics over 20 contiguous batches (D).
    """
    records = list(records)
    if len(records) < 100:
        raise ValueError(f"need at least 100 records, got {len(records)}")
    t_final = records[0].t_final
    if any(rec.t_final != t_final for rec in records):
        raise ValueError("records must share a common t_final")
    if not 0 <= t_burn < t_final / 2:
        raise ValueError("t_burn must satisfy 0 <= t_burn < t_final / 2")
    window = t_final - t_burn
    increments = np.array(
        [net_count(rec, t_final) - net_count(rec, t_burn) for rec in records], dtype=float
    )
    n = increments.size
    j_hat = float(increments.mean() / window)
    j_stderr = float(increments.std(ddof=1) / np.sqrt(n) / window)
    d_hat = float(increments.var(ddof=1) / window)
    n_batches = 20
    batches = np.array_split(increments, n_batches)
    batch_d = np.array([b.var(ddof=1) / window for b in batches])
    d_stderr = float(batch_d.std(ddof=1) / np.sqrt(n_batches))
    return EnsembleEstimate(
        n_traj=n,
        J_hat=j_hat,
        J_stderr=j_stderr,
        D_hat=d_hat,
        D_stderr=d_stderr,
        t_window=window,
    )
