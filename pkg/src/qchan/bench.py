"""Monte-Carlo statistics of similarity measures between random channels.

For each dimension, ``n_pairs`` pairs of Jamiolkowski states of independent
Ginibre channels are drawn and every measure in :data:`BENCH_METRICS` is
evaluated. Work is split into fixed-size chunks, chunk ``i`` of dimension
``d`` draws from ``RandomSource(seed).derive(d, i)``, so the output does not
depend on the number of worker threads.

Percentiles use the nearest-rank rule: ``p_q`` is the element at index
``ceil(q n) - 1`` of the sorted sample.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import metric_arrays
from .random import RandomSource, random_jamiolkowski

BENCH_METRICS = (
    "fidelity",
    "superfidelity",
    "trace_distance",
    "bures_BF",
    "root_infidelity_CF",
    "root_superinfidelity_CG",
    "angle_AG2",
    "bures_BG",
)
METRIC_RANGES = {
    "angle_AG2": (0.0, math.pi / 2),
    "bures_BF": (0.0, math.sqrt(2.0)),
    "bures_BG": (0.0, math.sqrt(2.0)),
}
N_BINS = 100
MIN_DIM, MAX_DIM = 2, 9
CSV_HEADER = ["metric", "dim", "k", "seed", "n_pairs", "mean", "p5", "p95"] + [f"bin_{i}" for i in range(N_BINS)]
THREADS_ENV = "QCHAN_THREADS"
EIGH_PER_PAIR = 6


def metric_range(name: str) -> tuple[float, float]:
    return METRIC_RANGES.get(name, (0.0, 1.0))


def nearest_rank(sorted_values, q: float) -> float:
    n = len(sorted_values)
    if n == 0:
        raise ValueError("empty sample")
    idx = min(n - 1, max(0, math.ceil(q * n) - 1))
    return float(sorted_values[idx])


@dataclass(frozen=True)
class SampleStats:
    metric: str
    dim: int
    k: int
    seed: int
    n_pairs: int
    mean: float
    p5: float
    p95: float
    bins: tuple = field(repr=False)

    @classmethod
    def from_sample(cls, metric: str, dim: int, k: int, seed: int, values) -> "SampleStats":
        values = np.sort(np.asarray(values, dtype=float))
        lo, hi = metric_range(metric)
        counts, _ = np.histogram(np.clip(values, lo, hi), bins=N_BINS, range=(lo, hi))
        return cls(
            metric=metric,
            dim=dim,
            k=k,
            seed=seed,
            n_pairs=len(values),
            mean=math.fsum(values) / len(values),
            p5=nearest_rank(values, 0.05),
            p95=nearest_rank(values, 0.95),
            bins=tuple(int(c) for c in counts),
        )

    def row(self) -> list[str]:
        head = [self.metric, str(self.dim), str(self.k), str(self.seed), str(self.n_pairs)]
        return head + [repr(self.mean), repr(self.p5), repr(self.p95)] + [str(c) for c in self.bins]


def chunk_size(dim: int) -> int:
    return max(16, min(1000, 2**20 // dim**4))


def worker_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from exc
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def check_dims(dims) -> list[int]:
    dims = [int(d) for d in dims]
    bad = [d for d in dims if not MIN_DIM <= d <= MAX_DIM]
    if bad or not dims:
        raise ValueError(f"bench dimensions must lie in {MIN_DIM}..{MAX_DIM}, got {dims}")
    return dims


def cost_budget(dims, n_pairs: int) -> str:
    """Human-readable estimate of the eigendecomposition workload."""
    lines = [f"bench: {n_pairs} pairs per dimension, {worker_count()} worker thread(s)"]
    total = 0.0
    for d in dims:
        n = d * d
        flops = EIGH_PER_PAIR * n_pairs * 10.0 * n**3
        total += flops
        lines.append(f"  d={d}: {EIGH_PER_PAIR} eigendecompositions of {n}x{n} per pair, ~{flops:.2e} flop")
    lines.append(f"  total ~{total:.2e} flop")
    return "\n".join(lines)


def _chunk(dim: int, k: int, seed: int, index: int, size: int) -> dict:
    src = RandomSource(seed).derive(dim, index)
    rho = random_jamiolkowski(dim, k, src, size=size)
    sigma = random_jamiolkowski(dim, k, src, size=size)
    out = metric_arrays(rho, sigma)
    return {m: np.atleast_1d(out[m]) for m in BENCH_METRICS}


def sample_dimension(dim: int, n_pairs: int, seed: int, k: int | None = None, pool=None) -> dict:
    """Metric samples (unsorted, in chunk order) for one dimension."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    k = dim * dim if k is None else int(k)
    size = chunk_size(dim)
    jobs = [(i, min(size, n_pairs - i * size)) for i in range(math.ceil(n_pairs / size))]
    if pool is None:
        parts = [_chunk(dim, k, seed, i, s) for i, s in jobs]
    else:
        parts = list(pool.map(lambda job: _chunk(dim, k, seed, *job), jobs))
    return {m: np.concatenate([p[m] for p in parts]) for m in BENCH_METRICS}


def run_bench(dims, n_pairs: int, seed: int = 0, k: int | None = None, workers: int | None = None, log=None) -> list[SampleStats]:
    """Statistics for every metric at every dimension, ordered by dimension then metric."""
    dims = check_dims(dims)
    if k is not None and any(not 1 <= k <= d * d for d in dims):
        raise ValueError(f"Kraus rank {k} is out of range for dims {dims}")
    if log is not None:
        print(cost_budget(dims, n_pairs), file=log)
    workers = worker_count() if workers is None else int(workers)
    stats = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for d in dims:
            samples = sample_dimension(d, n_pairs, seed, k, pool if workers > 1 else None)
            kd = d * d if k is None else k
            stats.extend(SampleStats.from_sample(m, d, kd, seed, samples[m]) for m in BENCH_METRICS)
            if log is not None:
                print(f"  d={d} done", file=log)
    return stats


def format_csv(stats) -> str:
    lines = [",".join(CSV_HEADER)] + [",".join(s.row()) for s in stats]
    return "\n".join(lines) + "\n"


def write_csv(stats, out) -> None:
    """Write to a path or a text stream."""
    text = format_csv(stats)
    if hasattr(out, "write"):
        out.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)


def read_csv(path) -> list[dict]:
    """Parse a bench CSV back into dictionaries (numbers converted)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError("unexpected bench CSV header")
        rows = []
        for r in reader:
            rows.append({
                "metric": r[0],
                "dim": int(r[1]),
                "k": int(r[2]),
                "seed": int(r[3]),
                "n_pairs": int(r[4]),
                "mean": float(r[5]),
                "p5": float(r[6]),
                "p95": float(r[7]),
                "bins": [int(x) for x in r[8:]],
            })
    return rows
