"""Ground-truth engines that share no code with the closed forms.

enumerate_paths sums the probability of every one of the 2^n state
sequences, bucketed by (success count, terminal state).  It is the
definition of the distribution made executable, so everything else in the
package is tested against it at small n.  sample runs a seeded Monte Carlo
simulation of the chain for statistical smoke tests.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .chain import ChainParams

__all__ = [
    "ENUMERATION_CAP",
    "EnumerationResult",
    "SampleSummary",
    "enumerate_paths",
    "sample",
    "sample_to_json",
    "sample_to_csv",
]

ENUMERATION_CAP = 20

# replicate block size for the sampler; fixed so the uniform draw order,
# and hence every histogram, is reproducible bit for bit
_SAMPLE_BLOCK = 65536

_GENERATOR_NAME = "numpy-PCG64(default_rng)"


@dataclass(frozen=True)
class EnumerationResult:
    """Exact joint law: joint[j, t] = P(K_n = j, Y_n = t), cols (F, A)."""

    n: int
    joint: np.ndarray
    params: ChainParams

    def __post_init__(self):
        self.joint.setflags(write=False)

    @property
    def marginal(self) -> np.ndarray:
        return self.joint.sum(axis=1)


@dataclass(frozen=True)
class SampleSummary:
    """Histogram of K_n over reps simulated chains, plus terminal counts."""

    n: int
    reps: int
    seed: int
    histogram: np.ndarray
    terminal_counts: np.ndarray  # (count ending in F, count ending in A)
    generator: str = _GENERATOR_NAME

    def __post_init__(self):
        self.histogram.setflags(write=False)
        self.terminal_counts.setflags(write=False)


@lru_cache(maxsize=None)
def _path_tables(n: int):
    """Per-n path structure, independent of (a, b, nu), cached for reuse.

    bit k of path index i is the state at step k+1 (1 = F).  Returns the
    first-state bits, the transition codes prev*2 + cur for consecutive
    steps, and for each (j, terminal) bucket the sorted path indices.
    """
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = ((idx[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(np.uint8)
    first = bits[:, 0].copy()
    tcode = (bits[:, :-1] << 1) | bits[:, 1:] if n > 1 else None
    j_count = bits.sum(axis=1, dtype=np.int64)
    terminal = bits[:, -1]
    buckets = []
    for j in range(n + 1):
        for t_bit, t_col in ((1, 0), (0, 1)):  # state F -> column 0
            members = np.flatnonzero((j_count == j) & (terminal == t_bit))
            if members.size:
                buckets.append((j, t_col, members))
    return first, tcode, buckets


def enumerate_paths(params: ChainParams, n: int) -> EnumerationResult:
    """Exact joint law of (K_n, Y_n) by exhaustive path summation.

    Each path weight is nu(state_1) times the product of its transition
    probabilities; bucket sums use compensated summation (math.fsum), so
    the only rounding is in the per-path products.  Refuses n above the
    cap rather than approximating.
    """
    if not 1 <= n <= ENUMERATION_CAP:
        raise ValueError(f"n must be in 1..{ENUMERATION_CAP}, got {n}")
    a, b = params.a, params.b
    first, tcode, buckets = _path_tables(n)
    weights = np.array([params.nu_A, params.nu_F])[first]
    if tcode is not None:
        # code 0 = A->A, 1 = A->F, 2 = F->A, 3 = F->F
        trans = np.array([1.0 - b, b, a, 1.0 - a])
        # row chunks keep the (paths, n-1) product matrix small
        chunk = 1 << 16
        for lo in range(0, tcode.shape[0], chunk):
            block = trans[tcode[lo: lo + chunk]]
            weights[lo: lo + chunk] *= block.prod(axis=1)
    joint = np.zeros((n + 1, 2))
    for j, t_col, members in buckets:
        joint[j, t_col] = math.fsum(weights[members])
    return EnumerationResult(n=n, joint=joint, params=params)


def sample(params: ChainParams, n: int, reps: int, seed: int) -> SampleSummary:
    """Simulate reps chains of length n and histogram the success counts.

    Deterministic for fixed (params, n, reps, seed): uniforms come from
    numpy's default_rng(seed) (PCG64), drawn as an (n, block) matrix per
    replicate block of 65536 chains, step-major within the block.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    a, b = params.a, params.b
    rng = np.random.default_rng(seed)
    hist = np.zeros(n + 1, dtype=np.int64)
    ended_f = 0
    for start in range(0, reps, _SAMPLE_BLOCK):
        m = min(_SAMPLE_BLOCK, reps - start)
        u = rng.random((n, m))
        state_f = u[0] < params.nu_F
        counts = state_f.astype(np.int64)
        for k in range(1, n):
            to_f = np.where(state_f, 1.0 - a, b)
            state_f = u[k] < to_f
            counts += state_f
        hist += np.bincount(counts, minlength=n + 1)
        ended_f += int(state_f.sum())
    terminal = np.array([ended_f, reps - ended_f], dtype=np.int64)
    return SampleSummary(n=n, reps=reps, seed=seed, histogram=hist,
                         terminal_counts=terminal)


def sample_to_json(s: SampleSummary, params: ChainParams) -> str:
    return json.dumps(
        {
            "n": s.n,
            "a": params.a,
            "b": params.b,
            "nu_F": params.nu_F,
            "reps": s.reps,
            "seed": s.seed,
            "generator": s.generator,
            "histogram": [int(c) for c in s.histogram],
            "terminal_counts": {"F": int(s.terminal_counts[0]),
                                "A": int(s.terminal_counts[1])},
        }
    )


def sample_to_csv(s: SampleSummary, params: ChainParams) -> str:
    lines = [
        f"# n={s.n} a={params.a:.17g} b={params.b:.17g} nu_F={params.nu_F:.17g}"
        f" reps={s.reps} seed={s.seed} generator={s.generator}"
        f" terminal_F={int(s.terminal_counts[0])}"
        f" terminal_A={int(s.terminal_counts[1])}",
        "j,count",
    ]
    lines.extend(f"{j},{int(c)}" for j, c in enumerate(s.histogram))
    return "\n".join(lines) + "\n"
