"""Monte Carlo for last-passage percolation, PNG and Hammersley's process.

Geometric weights are supported on ``{0, 1, 2, ...}`` with
``P[k] = (1 - q) q^k``.  Every sampler takes its randomness from a
:class:`~growthlab.rng.SeededStream` (or a numpy ``Generator``); the batch
drivers hand sample ``i`` the stream ``base + i`` so results are identical
for any number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .combinatorics import _lis_fast
from .errors import DomainError, PreconditionError
from .rng import SeededStream, as_generator

__all__ = [
    "LppGrid",
    "PngField",
    "UpRightPath",
    "hammersley_sample",
    "hammersley_samples",
    "lpp_maximal_path",
    "lpp_samples",
    "lpp_table",
    "lpp_to_l_alpha_limit_check",
    "lpp_value",
    "lpp_values_batch",
    "permutation_lis_samples",
    "png_evolve",
    "png_nucleations_from_grid",
    "run_batch",
    "sample_geometric",
    "transversal_deviation",
    "transversal_samples",
    "mean_lis_over_sqrt",
]


def _check_q(q):
    if not (0.0 < q < 1.0):
        raise DomainError(f"geometric parameter q must lie in (0, 1), got {q!r}")


def sample_geometric(q, rng, size=None):
    """Draw from ``P[k] = (1 - q) q^k``, k >= 0 (mean ``q / (1 - q)``)."""
    _check_q(q)
    g = as_generator(rng)
    draws = g.geometric(1.0 - q, size=size) - 1
    return int(draws) if size is None else draws.astype(np.int64)


@dataclass(frozen=True)
class LppGrid:
    """M x N array of site weights; ``w[i-1, j-1]`` is the weight of site (i, j)."""

    w: np.ndarray
    q: float | None = None

    def __post_init__(self):
        w = np.array(self.w, dtype=np.int64)
        if w.ndim != 2 or 0 in w.shape:
            raise DomainError("LPP grid must be a non-empty 2-d array")
        if (w < 0).any():
            raise DomainError("LPP weights must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def M(self):
        return self.w.shape[0]

    @property
    def N(self):
        return self.w.shape[1]

    @classmethod
    def sample(cls, M, N, q, rng):
        if M < 1 or N < 1:
            raise DomainError("grid dimensions must be positive")
        return cls(sample_geometric(q, rng, size=(M, N)), q=q)


def _weights(grid):
    return grid.w if isinstance(grid, LppGrid) else LppGrid(grid).w


def lpp_values_batch(ws):
    """Last-passage values G(M, N) for a stack of grids shaped (B, M, N).

    Row by row, ``G(i, j) = S_j + max_{k <= j} (G(i-1, k) - S_{k-1})`` with
    ``S`` the prefix sums of row i, which turns the recursion into a
    cumulative maximum.
    """
    ws = np.asarray(ws, dtype=np.int64)
    B, M, N = ws.shape
    g = np.zeros((B, N), dtype=np.int64)
    for i in range(M):
        row = ws[:, i, :]
        s = np.cumsum(row, axis=1)
        g = s + np.maximum.accumulate(g - (s - row), axis=1)
    return g[:, -1]


def lpp_value(grid) -> int:
    """G(M, N) of the recursion ``G = max(G(M-1, N), G(M, N-1)) + w(M, N)``."""
    w = _weights(grid)
    return int(lpp_values_batch(w[None])[0])


def lpp_table(grid):
    """Full table ``G[i, j]`` for 0 <= i <= M, 0 <= j <= N with a zero boundary."""
    w = _weights(grid)
    M, N = w.shape
    G = np.zeros((M + 1, N + 1), dtype=np.int64)
    for i in range(1, M + 1):
        row = w[i - 1]
        s = np.cumsum(row)
        G[i, 1:] = s + np.maximum.accumulate(G[i - 1, 1:] - (s - row))
    return G


@dataclass(frozen=True)
class UpRightPath:
    cells: tuple

    def __post_init__(self):
        cells = tuple((int(i), int(j)) for i, j in self.cells)
        if not cells or cells[0] != (1, 1):
            raise DomainError("an up/right path starts at (1, 1)")
        for (i0, j0), (i1, j1) in zip(cells, cells[1:]):
            if (i1 - i0, j1 - j0) not in ((1, 0), (0, 1)):
                raise DomainError(f"illegal step {(i0, j0)} -> {(i1, j1)}")
        object.__setattr__(self, "cells", cells)

    @property
    def end(self):
        return self.cells[-1]

    def weight(self, grid):
        w = _weights(grid)
        return int(sum(w[i - 1, j - 1] for i, j in self.cells))


def lpp_maximal_path(grid) -> UpRightPath:
    """A maximal up/right path, found by backtracking the G table.

    On a tie between G(i-1, j) and G(i, j-1) the backtrack steps to (i-1, j).
    """
    G = lpp_table(grid)
    i, j = G.shape[0] - 1, G.shape[1] - 1
    cells = [(i, j)]
    while (i, j) != (1, 1):
        if i == 1:
            j -= 1
        elif j == 1:
            i -= 1
        elif G[i - 1, j] >= G[i, j - 1]:
            i -= 1
        else:
            j -= 1
        cells.append((i, j))
    return UpRightPath(tuple(reversed(cells)))


def transversal_deviation(path: UpRightPath) -> int:
    """Largest distance ``|i - j|`` of a square-grid path from the diagonal."""
    M, N = path.end
    if M != N:
        raise PreconditionError(f"transversal deviation needs a square grid, got {M}x{N}")
    return max(abs(i - j) for i, j in path.cells)


# ---------------------------------------------------------------------------
# polynuclear growth


@dataclass(frozen=True)
class PngField:
    """Heights ``h[x + T, t]`` for |x| <= T, 0 <= t <= T and the nucleations used."""

    h: np.ndarray
    a: np.ndarray
    T: int

    def height(self, x, t):
        return int(self.h[x + self.T, t])


def png_evolve(a, T) -> PngField:
    """Run the discrete PNG model on the window |x| <= T for T steps.

    ``a[x + T, t]`` is the nucleation deposited at site x at time t, so
    ``h(x, t) = max(h(x-1, t-1), h(x, t-1), h(x+1, t-1)) + a(x, t)`` with a flat
    start ``h(., 0) = 0``.  Sites outside the window count as height 0.
    """
    T = int(T)
    a = np.asarray(a, dtype=np.int64)
    if a.shape != (2 * T + 1, T + 1):
        raise DomainError(f"nucleation array must have shape {(2 * T + 1, T + 1)}, got {a.shape}")
    if (a < 0).any():
        raise DomainError("nucleations must be non-negative")
    xs = np.arange(-T, T + 1)[:, None]
    ts = np.arange(T + 1)[None, :]
    even = (xs - ts) % 2 == 0
    if (a[even] != 0).any():
        raise PreconditionError("nucleations are only allowed where x - t is odd")
    if (a[:, 0] != 0).any():
        raise PreconditionError("the initial profile is flat: a(x, 0) must vanish")
    h = np.zeros((2 * T + 1, T + 1), dtype=np.int64)
    for t in range(1, T + 1):
        prev = np.pad(h[:, t - 1], 1)
        h[:, t] = np.maximum(np.maximum(prev[:-2], prev[1:-1]), prev[2:]) + a[:, t]
    return PngField(h=h, a=a, T=T)


def png_nucleations_from_grid(grid):
    """Nucleations ``a(i - j, i + j - 1) = w(i, j)``; returns (a, T)."""
    w = _weights(grid)
    M, N = w.shape
    T = M + N - 1
    a = np.zeros((2 * T + 1, T + 1), dtype=np.int64)
    for i in range(1, M + 1):
        for j in range(1, N + 1):
            a[i - j + T, i + j - 1] = w[i - 1, j - 1]
    return a, T


# ---------------------------------------------------------------------------
# Hammersley's process


def hammersley_sample(alpha, rng) -> int:
    """Longest up/right chain among Poisson(alpha) uniform points in the unit square."""
    if not (alpha >= 0.0) or alpha > 1e6:
        raise DomainError(f"alpha must lie in [0, 1e6], got {alpha!r}")
    g = as_generator(rng)
    k = int(g.poisson(alpha))
    if k == 0:
        return 0
    xs = g.random(k).tolist()
    ys = g.random(k).tolist()
    # colliding coordinates would make the induced permutation ill defined
    while len(set(xs)) < k or len(set(ys)) < k:
        seen_x, seen_y = set(), set()
        for idx in range(k):
            if xs[idx] in seen_x or ys[idx] in seen_y:
                xs[idx], ys[idx] = g.random(2).tolist()
            seen_x.add(xs[idx])
            seen_y.add(ys[idx])
    return _lis_fast([y for _, y in sorted(zip(xs, ys))])


def _permutation_lis(N, stream):
    return _lis_fast(stream.generator().permutation(N).tolist())


# ---------------------------------------------------------------------------
# seeded batches


def _chunk_worker(fn, seed, start, stop):
    return np.array([fn(SeededStream(seed, i)) for i in range(start, stop)], dtype=np.int64)


def run_batch(fn, seed, samples, base=0, workers=1, chunk=2048):
    """Evaluate ``fn(SeededStream(seed, base + i))`` for i < samples, in index order.

    ``fn`` must be picklable when ``workers > 1``.
    """
    bounds = [(base + s, base + min(s + chunk, samples)) for s in range(0, samples, chunk)]
    if workers <= 1 or len(bounds) <= 1:
        parts = [_chunk_worker(fn, seed, a, b) for a, b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(partial(_chunk_worker, fn, seed), *zip(*bounds)))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def _lpp_chunk(M, N, q, seed, start, stop):
    ws = np.stack([sample_geometric(q, SeededStream(seed, i), size=(M, N)) for i in range(start, stop)])
    return lpp_values_batch(ws)


def lpp_samples(M, N, q, seed, samples, base=0, workers=1, chunk=256):
    """G(M, N) for ``samples`` independent grids; grid i uses stream ``base + i``."""
    _check_q(q)
    bounds = [(base + s, base + min(s + chunk, samples)) for s in range(0, samples, chunk)]
    job = partial(_lpp_chunk, M, N, q, seed)
    if workers <= 1 or len(bounds) <= 1:
        parts = [job(a, b) for a, b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, *zip(*bounds)))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def hammersley_samples(alpha, seed, samples, base=0, workers=1):
    return run_batch(partial(hammersley_sample, alpha), seed, samples, base=base, workers=workers)


def permutation_lis_samples(N, seed, samples, base=0, workers=1):
    """LIS of uniform random permutations of size N."""
    return run_batch(partial(_permutation_lis, N), seed, samples, base=base, workers=workers)


@dataclass
class LimitCheckReport:
    alpha: float
    N: int
    q: float
    samples: int
    lpp_values: np.ndarray
    hammersley_values: np.ndarray
    ks: float

    def ecdf_table(self):
        """Rows ``(value, lpp_ecdf, hammersley_ecdf)`` on the common integer support."""
        hi = int(max(self.lpp_values.max(initial=0), self.hammersley_values.max(initial=0)))
        grid = np.arange(hi + 1)
        a = np.searchsorted(np.sort(self.lpp_values), grid, side="right") / len(self.lpp_values)
        b = np.searchsorted(np.sort(self.hammersley_values), grid, side="right") / len(self.hammersley_values)
        return list(zip(grid.tolist(), a.tolist(), b.tolist()))


def lpp_to_l_alpha_limit_check(alpha, N, seed, samples, workers=1) -> LimitCheckReport:
    """Compare G(N, N) at ``q = alpha / N^2`` with L(alpha) by a two-sample KS distance.

    LPP samples use streams ``0..samples-1``; Hammersley samples use
    ``samples..2*samples-1``.
    """
    from .stats import ks_two_sample

    q = alpha / (N * N)
    if not 0.0 < q < 1.0:
        raise DomainError(f"q = alpha / N^2 = {q} is outside (0, 1)")
    g = lpp_samples(N, N, q, seed, samples, base=0, workers=workers)
    h = hammersley_samples(alpha, seed, samples, base=samples, workers=workers)
    return LimitCheckReport(alpha, N, q, samples, g, h, ks_two_sample(g, h))


def transversal_samples(N, q, seed, samples, base=0):
    """transversal_deviation of the maximal path on ``samples`` seeded N x N grids."""
    out = np.empty(samples, dtype=np.int64)
    for k in range(samples):
        grid = LppGrid.sample(N, N, q, SeededStream(seed, base + k))
        out[k] = transversal_deviation(lpp_maximal_path(grid))
    return out


def mean_lis_over_sqrt(N, seed, samples):
    """Monte Carlo estimate of ``E[l_N] / sqrt(N)`` and its standard error."""
    v = permutation_lis_samples(N, seed, samples).astype(float)
    return float(v.mean() / math.sqrt(N)), float(v.std(ddof=1) / math.sqrt(samples * N))
