"""Monte-Carlo measurement simulation against the theoretical efficiency.

States are drawn by their priors and outcomes sampled from the Born rows of
the POVM by inverse CDF; the inconclusive outcome takes the clamped
remainder of each row, so rows that sum to 1 +- 1e-10 stay valid. The PRNG
is numpy's PCG64 (128-bit state, seedable); trials can be partitioned over
workers with per-worker spawned seeds, and the merged report is
deterministic for a fixed worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import state_matrix
from .config import TOLS
from .errors import DimensionMismatchError, DomainError
from .geometry import check_priors
from .povm import PovmSet

GENERATOR = "pcg64"


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    success_rate: float
    inconclusive_rate: float
    error_rate: float
    per_state: np.ndarray        # (n, n+1) outcome counts; last column inconclusive
    theoretical_pm: float        # sum_j eta_j x_j^2
    z_score: float               # deviation of the success rate under binomial variance
    seed: int
    workers: int
    generator: str = GENERATOR


def born_table(psi, povm: PovmSet) -> np.ndarray:
    """Outcome probabilities: entry (j, k) = <psi_j | Pi_k | psi_j>.

    Shape (n, n+1); the last column is the inconclusive probability through
    the complement. Rows sum to one by POVM completeness; the diagonal holds
    the per-state success probabilities x_j^2.
    """
    m = state_matrix(psi)
    n = m.shape[0]
    if povm.n != n:
        raise DimensionMismatchError(f"POVM dimension {povm.n} != state dimension {n}")
    table = np.empty((n, n + 1))
    for k, op in enumerate(povm.detectors):
        table[:, k] = np.einsum("ij,ik,kj->j", m.conj(), op, m).real
    table[:, n] = np.einsum("ij,ik,kj->j", m.conj(), povm.complement, m).real
    return np.clip(table, 0.0, 1.0)


def _sample_counts(table: np.ndarray, eta: np.ndarray, trials: int,
                   rng: np.random.Generator) -> np.ndarray:
    n = eta.size
    counts = np.zeros((n, n + 1), dtype=np.int64)
    states = rng.choice(n, size=trials, p=eta)
    draws = rng.random(trials)
    for j in range(n):
        picks = draws[states == j]
        if picks.size == 0:
            continue
        # inverse CDF over the Born row; remainder clamped into the last bin
        cdf = np.cumsum(table[j])
        cdf[-1] = 1.0
        outcomes = np.searchsorted(cdf, picks, side="right")
        counts[j] = np.bincount(np.minimum(outcomes, n), minlength=n + 1)
    return counts


def simulate(psi, eta, povm: PovmSet, trials: int, seed: int,
             workers: int = 1) -> SimulationReport:
    """Sample ``trials`` measurements and compare against theory.

    Outcome k == state drawn counts as success, the last column as
    inconclusive and anything else as a misidentification (those rows have
    probability at the floating-point floor but are counted if drawn).
    Identical (seed, workers) reproduce the report exactly.
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    if workers < 1:
        raise DomainError("need at least one worker")
    m = state_matrix(psi)
    e = check_priors(eta, m.shape[0])
    table = born_table(m, povm)
    n = e.size

    seeds = np.random.SeedSequence(seed).spawn(workers)
    split = [trials // workers + (1 if i < trials % workers else 0) for i in range(workers)]
    counts = np.zeros((n, n + 1), dtype=np.int64)
    for chunk, ss in zip(split, seeds):
        if chunk:
            counts += _sample_counts(table, e, chunk, np.random.default_rng(ss))

    diag = np.arange(n)
    successes = int(counts[diag, diag].sum())
    inconclusive = int(counts[:, n].sum())
    errors = trials - successes - inconclusive

    p_theory = float(e @ np.diag(table[:, :n]))
    variance = p_theory * (1.0 - p_theory) / trials
    rate = successes / trials
    if variance > 0:
        z = (rate - p_theory) / np.sqrt(variance)
    else:
        z = 0.0 if successes in (0, trials) and abs(rate - p_theory) < 1e-15 else float("inf")

    return SimulationReport(
        trials=trials,
        success_rate=rate,
        inconclusive_rate=inconclusive / trials,
        error_rate=errors / trials,
        per_state=counts,
        theoretical_pm=p_theory,
        z_score=float(z),
        seed=seed,
        workers=workers,
    )
