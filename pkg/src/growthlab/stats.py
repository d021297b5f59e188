"""Empirical distributions and Kolmogorov-Smirnov distances."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["EmpiricalDistribution", "ecdf", "ks_distance", "ks_two_sample", "format_float"]


def format_float(x):
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: np.ndarray
    seed_provenance: tuple = field(default=())

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if s.size == 0:
            raise DomainError("an empirical distribution needs at least one sample")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self):
        return self.samples.size

    def mean(self):
        return float(self.samples.mean())

    def to_csv(self):
        """CSV with columns (value, ecdf) at the distinct sample values."""
        values, counts = np.unique(self.samples, return_counts=True)
        cum = np.cumsum(counts) / self.n
        buf = io.StringIO()
        buf.write("value,ecdf\n")
        for v, c in zip(values, cum):
            buf.write(f"{format_float(v)},{format_float(c)}\n")
        return buf.getvalue()


def _as_dist(d):
    return d if isinstance(d, EmpiricalDistribution) else EmpiricalDistribution(d)


def ecdf(dist, x):
    """Fraction of samples ``<= x`` (right-continuous); ``x`` may be an array."""
    dist = _as_dist(dist)
    r = np.searchsorted(dist.samples, x, side="right") / dist.n
    return float(r) if np.ndim(r) == 0 else r


def _eval_cdf(cdf, xs):
    vals = np.array([cdf(float(x)) for x in xs], dtype=float)
    if (vals < -1e-12).any() or (vals > 1 + 1e-12).any():
        raise DomainError("reference cdf leaves [0, 1]")
    if (np.diff(vals) < -1e-12).any():
        raise DomainError("reference cdf is not monotone on the sample points")
    return vals


def ks_distance(dist, cdf, discrete=False):
    """Kolmogorov-Smirnov distance ``sup_x |F_n(x) - F(x)|``.

    For a continuous ``cdf`` the supremum is taken over both one-sided limits
    of the empirical step function at each sample point.  With
    ``discrete=True`` both functions are treated as integer-lattice step
    functions and compared at every integer from ``min - 1`` to ``max``.
    """
    dist = _as_dist(dist)
    s = dist.samples
    if discrete:
        lattice = np.arange(int(np.floor(s[0])) - 1, int(np.floor(s[-1])) + 1)
        f = _eval_cdf(cdf, lattice)
        fn = np.searchsorted(s, lattice, side="right") / dist.n
        return float(np.max(np.abs(fn - f)))
    values = np.unique(s)
    f = _eval_cdf(cdf, values)
    upper = np.searchsorted(s, values, side="right") / dist.n
    lower = np.searchsorted(s, values, side="left") / dist.n
    return float(max(np.max(np.abs(upper - f)), np.max(np.abs(lower - f))))


def ks_two_sample(a, b):
    """Two-sample KS distance between the empirical CDFs of ``a`` and ``b``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    pts = np.union1d(a, b)
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))
