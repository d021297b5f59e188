"""The exact identity suite run by ``growthlab verify``.

Each check yields records ``{identity, params, pass, lhs, rhs, abs_diff}``
with values rendered as strings: integers in decimal, rationals as ``p/q``,
floats with 17 significant digits.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from . import combinatorics, ensembles, growth, limits, toeplitz
from .rng import SeededStream
from .stats import format_float

__all__ = ["identity_suite", "render_value", "CHECKS"]


def render_value(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return format_float(v)


def _record(identity, params, lhs, rhs, tol=None):
    if tol is None:
        diff = abs(Fraction(lhs) - Fraction(rhs))
        ok = diff == 0
    else:
        diff = abs(float(lhs) - float(rhs))
        ok = diff <= tol
    return {
        "identity": identity,
        "params": params,
        "pass": bool(ok),
        "lhs": render_value(lhs),
        "rhs": render_value(rhs),
        "abs_diff": render_value(diff),
    }


def check_heine():
    omega = range(12)
    weight = {x: Fraction(x + 1, 3) for x in omega}
    phi = [lambda x, i=i: Fraction(x) ** i for i in range(4)]
    psi = [lambda x, i=i: Fraction(1, x + 1) ** i for i in range(4)]
    for n in range(1, 5):
        lhs, rhs = toeplitz.heine_check(weight, phi[:n], psi[:n])
        yield _record("heine", {"n": n, "omega": 12}, lhs, rhs)
    small = {0: Fraction(1), 1: Fraction(2)}
    lhs, rhs = toeplitz.heine_check(small, phi[:3], phi[:3])
    yield _record("heine", {"n": 3, "omega": 2}, lhs, rhs)


def check_jacobi_trudi():
    a = [Fraction(1, 2), Fraction(1, 3), Fraction(2)]
    for size in range(0, 9):
        for lam in combinatorics.partitions(size):
            lhs = combinatorics.schur_jacobi_trudi(lam, a)
            rhs = combinatorics.schur_tableaux(lam, a)
            yield _record("jacobi_trudi", {"shape": list(lam.parts), "n_vars": 3}, lhs, rhs)


def check_gessel():
    vals = [Fraction(1, 2), Fraction(1, 3)]
    lists = [()] + [(v,) for v in vals] + list(itertools.product(vals, repeat=2))
    for n in range(0, 5):
        for a in lists:
            for b in lists:
                lhs, rhs = toeplitz.gessel_check(n, list(a), list(b))
                params = {"n": n, "a": [str(x) for x in a], "b": [str(x) for x in b]}
                yield _record("gessel", params, lhs, rhs)


def check_macmahon():
    for a in range(4):
        for b in range(4):
            for n in range(5):
                lhs, rhs = toeplitz.macmahon_toeplitz_check(a, b, n)
                yield _record("macmahon_toeplitz", {"a": a, "b": b, "n": n}, lhs, rhs)
    for a, b, c in [(1, 1, 1), (2, 2, 2), (2, 3, 1), (3, 3, 2)]:
        lhs = combinatorics.plane_partition_count(a, b, c)
        rhs = combinatorics.macmahon_product(a, b, c)
        yield _record("plane_partitions", {"a": a, "b": b, "c": c}, lhs, rhs)
    yield _record("plane_partitions_222", {}, combinatorics.plane_partition_count(2, 2, 2), 20)


def check_cue_exact():
    for n in range(1, 11):
        for k in range(0, 11):
            f = math.factorial
            val = math.prod(Fraction(f(j) * f(j + 2 * k), f(j + k) ** 2) for j in range(n))
            yield _record("cue_integer", {"n": n, "k": k}, val, toeplitz.cue_moment_exact(n, k))


def check_cue_mc(seed=2024, samples=10_000):
    mean, err = toeplitz.cue_moment_mc(4, 1, 0.0, samples, seed)
    exact = toeplitz.cue_moment_exact(4, 1)
    yield _record("cue_mc", {"n": 4, "k": 1, "samples": samples, "seed": seed}, mean, exact, tol=3 * err)
    for n in (1, 4, 8):
        mc, err, det_side = toeplitz.weyl_mc_check({1: 0.5, -1: 0.5}, n, samples, seed + n)
        yield _record("weyl", {"n": n, "g": "cos", "samples": samples}, mc, det_side.real, tol=3 * err)


def check_rsk(seeds=100):
    for s in range(seeds):
        g = SeededStream(s, 0).generator()
        M = N = int(g.integers(1, 9))
        w = growth.sample_geometric(0.5, g, size=(M, N))
        P, _ = combinatorics.rsk(w)
        lam1 = P.shape.part(1)
        yield _record("rsk_lpp", {"seed": s, "M": M}, lam1, growth.lpp_value(w))


def check_png(seeds=100):
    for s in range(seeds):
        grid = growth.LppGrid.sample(16, 16, 0.5, SeededStream(s, 1))
        a, T = growth.png_nucleations_from_grid(grid)
        field = growth.png_evolve(a, T)
        table = growth.lpp_table(grid)
        mism = sum(
            field.height(i - j, i + j - 1) != table[i, j]
            for i in range(1, 17)
            for j in range(1, 17)
        )
        yield _record("png_lpp", {"seed": s, "size": 16}, mism, 0)


def _small_weights():
    rng = SeededStream(77, 0).generator()
    yield "uniform3", ensembles.DiscreteWeight(np.ones(3))
    yield "random8", ensembles.DiscreteWeight(rng.random(8) + 0.1)
    yield "random10", ensembles.DiscreteWeight(rng.random(10) + 0.1)


def check_determinantal():
    for name, w in _small_weights():
        for N in range(1, min(3, w.size - 1) + 1):
            ops = ensembles.stieltjes_system(w, N)
            K = ensembles.kernel_matrix(ops, w, N)
            E = K.entries
            params = {"weight": name, "N": N}
            yield _record("kernel_trace", params, float(np.trace(E)), N, tol=1e-10)
            proj = float(np.max(np.abs(E @ E - E)))
            yield _record("kernel_projection", params, proj, 0.0, tol=1e-9)
            for m in range(1, N + 1):
                for pts in itertools.combinations(range(w.size), m):
                    lhs = ensembles.correlation_fn(K, pts)
                    rhs = ensembles.brute_correlation(w, N, pts)
                    yield _record("correlation", dict(params, points=list(pts)), lhs, rhs, tol=1e-10)
            f = np.sin(np.arange(w.size)) * 0.8
            lhs, rhs = ensembles.fredholm_expectation_check(w, N, f, ops)
            yield _record("fredholm_expectation", params, lhs, rhs, tol=1e-10)
    weight, ops = ensembles.meixner_ensemble(3, 3, 0.3)
    E = ensembles.kernel_matrix(ops, weight, 3).entries
    yield _record("kernel_projection", {"weight": "meixner", "M": 3, "N": 3, "q": 0.3},
                  float(np.max(np.abs(E @ E - E))), 0.0, tol=1e-9)


def check_triangle():
    for alpha in (0.5, 1.0, 2.0):
        for n in range(1, 7):
            params = {"alpha": alpha, "n": n}
            tp = toeplitz.poissonized_toeplitz(alpha, n)
            la = limits.l_alpha_cdf(alpha, n)
            ps = limits.poissonized_lis_cdf(alpha, n)
            yield _record("triangle_toeplitz_bessel", params, tp, la, tol=1e-9)
            yield _record("triangle_bessel_poisson", params, la, ps, tol=1e-9)
            yield _record("triangle_toeplitz_poisson", params, tp, ps, tol=1e-9)


def check_lis_monotone():
    for N in range(1, 9):
        law_n, law_n1 = combinatorics.lis_law(N), combinatorics.lis_law(N + 1)
        bad = sum(law_n1[n] > law_n.get(n, Fraction(1)) for n in range(1, N + 2))
        yield _record("lis_monotone", {"N": N}, bad, 0)


CHECKS = {
    "heine": check_heine,
    "jacobi_trudi": check_jacobi_trudi,
    "gessel": check_gessel,
    "macmahon": check_macmahon,
    "cue_exact": check_cue_exact,
    "cue_mc": check_cue_mc,
    "rsk": check_rsk,
    "png": check_png,
    "determinantal": check_determinantal,
    "triangle": check_triangle,
    "lis_monotone": check_lis_monotone,
}


def identity_suite(names=None):
    """Run the named checks (all by default) and return the records."""
    out = []
    for name in names or CHECKS:
        out.extend(CHECKS[name]())
    return out
