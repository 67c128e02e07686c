"""Reproducible Monte Carlo estimates of joint distributions and CHSH values.

The sample index range ``[0, n)`` is cut into fixed chunks of
:data:`CHUNK_SIZE` samples. Chunk ``k`` of stream ``s`` always draws from its
own Philox generator keyed by ``(master_seed, s, k)``, and per-chunk integer
counts are summed in chunk order, so results do not depend on how many
worker threads ran the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bell_polytope import ChshSettings

CHUNK_SIZE = 2**16
THREADS_ENV = "BELLSEP_THREADS"


@dataclass(frozen=True)
class RngSpec:
    master_seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if int(self.stream_index) < 0:
            raise ValueError("stream_index must be nonnegative")

    def substream(self, index: int) -> "RngSpec":
        """A derived stream; distinct ``index`` values never share chunks."""
        return RngSpec(self.master_seed, self.stream_index * 1_000_003 + index + 1)

    def chunk_generator(self, chunk: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_index), int(chunk)))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    n_samples: int

    def to_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error, "n_samples": self.n_samples}


def default_workers() -> int:
    cap = os.environ.get(THREADS_ENV)
    if cap:
        return max(1, int(cap))
    return min(8, os.cpu_count() or 1)


def _chunk_sizes(n: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _count_chunk(model, x, y, rng: RngSpec, chunk: int, size: int) -> np.ndarray:
    gen = rng.chunk_generator(chunk)
    lam = model.sample_hidden(x, y, gen, size=size)
    a, b = model.outcomes(lam, x, y)
    ia = (np.asarray(a) < 0).astype(np.int64)
    ib = (np.asarray(b) < 0).astype(np.int64)
    return np.bincount(2 * ia + ib, minlength=4).reshape(2, 2)


def sample_counts(model, x, y, n: int, rng: RngSpec, workers: int | None = None, chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    """Outcome counts over ``n`` samples, as a 2x2 integer array (index 0 = +1)."""
    if n < 1:
        raise ValueError("need at least one sample")
    sizes = _chunk_sizes(int(n), chunk_size)
    workers = default_workers() if workers is None else max(1, int(workers))
    jobs = list(enumerate(sizes))
    if workers == 1 or len(jobs) == 1:
        parts = [_count_chunk(model, x, y, rng, k, s) for k, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _count_chunk(model, x, y, rng, *job), jobs))
    total = np.zeros((2, 2), dtype=np.int64)
    for p in parts:
        total += p
    return total


@dataclass(frozen=True)
class JointEstimate:
    """Empirical ``p(a, b | x, y)`` with plug-in binomial standard errors."""

    probs: np.ndarray
    std_errors: np.ndarray
    n_samples: int

    def entry(self, ia: int, ib: int) -> Estimate:
        return Estimate(float(self.probs[ia, ib]), float(self.std_errors[ia, ib]), self.n_samples)

    def estimates(self) -> list[Estimate]:
        return [self.entry(ia, ib) for ia in range(2) for ib in range(2)]


def estimate_joint(model, x, y, n: int, rng: RngSpec = RngSpec(), workers: int | None = None) -> JointEstimate:
    counts = sample_counts(model, x, y, n, rng, workers)
    p = counts / n
    se = np.sqrt(p * (1.0 - p) / n)
    return JointEstimate(p, se, int(n))


def estimate_correlator(model, x, y, n: int, rng: RngSpec = RngSpec(), workers: int | None = None) -> Estimate:
    """Mean of ``a b``; its standard error is ``sqrt((1 - E^2)/n)``."""
    counts = sample_counts(model, x, y, n, rng, workers)
    e = float(counts[0, 0] + counts[1, 1] - counts[0, 1] - counts[1, 0]) / n
    return Estimate(e, math.sqrt(max(0.0, 1.0 - e * e) / n), int(n))


@dataclass(frozen=True)
class ChshEstimate:
    s: Estimate
    correlators: tuple[Estimate, Estimate, Estimate, Estimate]

    def to_dict(self) -> dict:
        labels = ("E(x,y)", "E(x,y')", "E(x',y)", "E(x',y')")
        return {"S": self.s.to_dict(), "correlators": {k: e.to_dict() for k, e in zip(labels, self.correlators)}}


def estimate_chsh(model, settings: ChshSettings, n: int, rng: RngSpec = RngSpec(), workers: int | None = None) -> ChshEstimate:
    """Monte Carlo CHSH value; ``settings`` holds directions. Each pair uses its own substream."""
    es = tuple(
        estimate_correlator(model, x, y, n, rng.substream(k), workers) for k, (x, y) in enumerate(settings.pairs())
    )
    value = es[0].value + es[1].value + es[2].value - es[3].value
    se = math.sqrt(sum(e.std_error**2 for e in es))
    return ChshEstimate(Estimate(value, se, 4 * int(n)), es)
