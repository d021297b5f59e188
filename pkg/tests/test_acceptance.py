"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected in ``RESULTS`` and printed by the terminal-summary
hook in ``conftest.py``, so they show up with or without ``-s``.
"""

import functools
import itertools
import json
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from growthlab import cli, combinatorics, ensembles, growth, limits, toeplitz
from growthlab.rng import SeededStream
from growthlab.stats import EmpiricalDistribution, ks_distance

RESULTS = []


@contextmanager
def criterion(number, title):
    start = time.perf_counter()
    detail = {}
    try:
        yield detail
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        line = f"[{number:2d}] FAIL {title} ({elapsed:.1f}s): {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        RESULTS.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    extra = ", ".join(f"{k}={v}" for k, v in detail.items())
    line = f"[{number:2d}] PASS {title} ({elapsed:.1f}s){': ' + extra if extra else ''}"
    RESULTS.append(line)
    print(line)


def test_01_exact_identity_suite(tmp_path):
    with criterion(1, "exact identity suite") as d:
        start = time.perf_counter()
        code = cli.main(["verify", "--out", str(tmp_path)])
        elapsed = time.perf_counter() - start
        records = json.loads((tmp_path / "verify.json").read_text())
        assert code == 0
        assert all(r["pass"] for r in records)
        by = lambda name: [r for r in records if r["identity"] == name]
        heine = by("heine")
        assert {r["params"]["n"] for r in heine if r["params"]["omega"] == 12} == {1, 2, 3, 4}
        jt = by("jacobi_trudi")
        assert len(jt) == sum(len(list(combinatorics.partitions(s))) for s in range(9))
        gessel = by("gessel")
        assert {r["params"]["n"] for r in gessel} == {0, 1, 2, 3, 4} and len(gessel) == 5 * 49
        mm = by("macmahon_toeplitz")
        assert len(mm) == 4 * 4 * 5
        assert by("plane_partitions_222")[0]["lhs"] == "20"
        cue = by("cue_integer")
        assert len(cue) == 10 * 11 and all("/" not in r["rhs"] for r in cue)
        assert elapsed <= 300
        d["records"] = len(records)
        d["runtime_s"] = f"{elapsed:.1f}"


@functools.lru_cache(maxsize=None)
def _lis_cdf(N, n):
    if N <= 10:
        return float(combinatorics.exhaustive_lis_law(N)[n])
    return combinatorics.lis_count_at_most(N, n) / math.factorial(N)


def _poisson_sum_exhaustive(alpha, n, tail=1e-12):
    # sum_N e^-alpha alpha^N / N! P[l_N <= n]; exhaustive laws for N <= 10, counting DP beyond
    total, N = 0.0, 0
    while True:
        pmf = math.exp(-alpha) * alpha**N / math.factorial(N)
        if N == 0 or n >= N:
            p = 1.0
        else:
            p = _lis_cdf(N, n)
        total += pmf * p
        nxt = math.exp(-alpha) * alpha ** (N + 1) / math.factorial(N + 1)
        if N + 2 > alpha and nxt / (1 - alpha / (N + 2)) < tail:
            return total
        N += 1


def test_02_triangle_identity():
    with criterion(2, "triangle identity (Toeplitz = Bessel = Poisson sum)") as d:
        for N in range(1, 11):
            assert combinatorics.lis_law(N) == combinatorics.exhaustive_lis_law(N)
        worst = 0.0
        for alpha in (0.5, 1.0, 2.0):
            for n in range(1, 7):
                tp = toeplitz.poissonized_toeplitz(alpha, n)
                la = limits.l_alpha_cdf(alpha, n)
                ps = _poisson_sum_exhaustive(alpha, n)
                worst = max(worst, abs(tp - la), abs(tp - ps), abs(la - ps))
                assert abs(tp - la) <= 1e-9
                assert abs(tp - ps) <= 1e-9 and abs(la - ps) <= 1e-9
        anchor = math.exp(-1) * sum(1 / math.factorial(m) ** 2 for m in range(30))
        assert abs(limits.l_alpha_cdf(1.0, 1) - anchor) <= 1e-12
        assert abs(anchor - 0.8386125671260258) <= 1e-15
        d["max_diff"] = f"{worst:.2e}"
        d["P[L(1)<=1]"] = f"{anchor:.12f}"


def test_03_meixner_exactness():
    with criterion(3, "LPP law equals the shifted Meixner rightmost-particle law") as d:
        start = time.perf_counter()
        g = growth.lpp_samples(3, 3, 0.3, 2024, 10**5)
        ks = ks_distance(EmpiricalDistribution(g), lambda x: ensembles.meixner_lpp_cdf(3, 3, 0.3, math.floor(x)),
                         discrete=True)
        assert ks <= 0.01
        for q in (0.2, 0.5):
            for a in range(30):
                assert abs(ensembles.meixner_lpp_cdf(1, 1, q, a) - (1 - q ** (a + 1))) <= 1e-12
        elapsed = time.perf_counter() - start
        assert elapsed <= 60
        d["ks"] = f"{ks:.4f}"
        d["runtime_s"] = f"{elapsed:.1f}"


def test_04_tracy_widom_cross_method():
    with criterion(4, "Tracy-Widom F2: Fredholm vs Painleve and mean") as d:
        start = time.perf_counter()
        worst = max(abs(limits.tw2_fredholm(x) - limits.tw2_painleve(x)) for x in range(-5, 3))
        assert worst <= 1e-6
        table = limits.tw2_table(-8.0, 4.0, 0.1, "painleve")
        x, F = table.xi_grid, table.f2_values
        table_mean = x[-1] * F[-1] - x[0] * F[0] - np.sum(np.diff(x) * (F[1:] + F[:-1]) / 2)
        mean_p = limits.tw2_mean("painleve")
        mean_f = limits.tw2_mean("fredholm", m=120)
        for m in (table_mean, mean_p, mean_f):
            assert abs(m - (-1.771)) <= 0.002
        elapsed = time.perf_counter() - start
        assert elapsed <= 120
        d["max_diff"] = f"{worst:.2e}"
        d["mean"] = f"{mean_p:.6f}"
        d["runtime_s"] = f"{elapsed:.1f}"


def _experiment(tmp_path, name, *extra):
    start = time.perf_counter()
    code = cli.main(["experiment", name, "--out", str(tmp_path), *map(str, extra)])
    elapsed = time.perf_counter() - start
    summary = json.loads((tmp_path / f"{name}_summary.json").read_text())
    return code, float(summary["ks"]), elapsed


def test_05_lpp_edge_fluctuations(tmp_path):
    with criterion(5, "LPP fluctuations vs F2 (gamma=1, q=1/4, N=200)") as d:
        omega, sigma = limits.thm32_scaling(1.0, 0.25)
        assert omega == pytest.approx(2.0, abs=1e-15)
        assert sigma == pytest.approx(1.8171, abs=1e-4)
        code, ks, elapsed = _experiment(tmp_path, "thm32", "--gamma", 1, "--q", 0.25, "--N", 200,
                                        "--samples", 10**4, "--seed", 3)
        assert code == 0 and ks <= 0.05
        assert elapsed <= 120
        d["ks"] = f"{ks:.4f}"
        d["runtime_s"] = f"{elapsed:.1f}"


def test_06_poissonized_lis_fluctuations(tmp_path):
    with criterion(6, "Hammersley L(400) fluctuations vs F2") as d:
        code, ks, elapsed = _experiment(tmp_path, "thm33", "--alpha", 400, "--samples", 10**4, "--seed", 3)
        assert code == 0 and ks <= 0.05
        assert elapsed <= 120
        d["ks"] = f"{ks:.4f}"
        d["runtime_s"] = f"{elapsed:.1f}"


def test_07_gue_edge():
    with criterion(7, "GUE N=50 edge law vs F2") as d:
        diffs = [abs(ensembles.gue_xmax_cdf(50, xi) - limits.f2(xi)) for xi in (-2.0, 0.0, 1.0)]
        assert max(diffs) <= 0.05
        d["max_diff"] = f"{max(diffs):.4f}"


def test_08_determinantal_invariants():
    with criterion(8, "determinantal structure (trace, projection, correlations, Fredholm)") as d:
        rng = SeededStream(808).generator()
        weights = [ensembles.DiscreteWeight(np.ones(3))]
        weights += [ensembles.DiscreteWeight(rng.random(s) + 0.05) for s in range(3, 11)]
        cases = 0
        for w in weights:
            for N in range(1, min(3, w.size - 1) + 1):
                ops = ensembles.stieltjes_system(w, N)
                K = ensembles.kernel_matrix(ops, w, N)
                E = K.entries
                assert abs(np.trace(E) - N) <= 1e-10
                assert np.max(np.abs(E @ E - E)) <= 1e-9
                for m in range(1, N + 1):
                    for pts in itertools.combinations(range(w.size), m):
                        assert abs(ensembles.correlation_fn(K, pts) - ensembles.brute_correlation(w, N, pts)) <= 1e-10
                        cases += 1
                for f in (np.sin(np.arange(w.size)), -np.ones(w.size), rng.random(w.size) - 0.5):
                    lhs, rhs = ensembles.fredholm_expectation_check(w, N, f, ops)
                    assert abs(lhs - rhs) <= 1e-10
        wm, opm = ensembles.meixner_ensemble(3, 3, 0.3)
        E = ensembles.kernel_matrix(opm, wm, 3).entries
        assert abs(np.trace(E) - 3) <= 1e-10 and np.max(np.abs(E @ E - E)) <= 1e-9
        d["correlation_cases"] = cases


def test_09_couplings():
    with criterion(9, "RSK and PNG couplings with LPP") as d:
        for s in range(100):
            g = SeededStream(s, 90).generator()
            M = int(g.integers(1, 9))
            w = growth.sample_geometric(0.5, g, size=(M, M))
            P, Q = combinatorics.rsk(w)
            assert P.shape.part(1) == growth.lpp_value(w)
        for s in range(100):
            grid = growth.LppGrid.sample(16, 16, 0.5, SeededStream(s, 91))
            a, T = growth.png_nucleations_from_grid(grid)
            field = growth.png_evolve(a, T)
            G = growth.lpp_table(grid)
            for i in range(1, 17):
                for j in range(1, 17):
                    assert field.height(i - j, i + j - 1) == G[i, j]
        d["seeds"] = 100


def test_10_lis_monotone_in_N():
    with criterion(10, "P[l_{N+1} <= n] <= P[l_N <= n] exactly") as d:
        for N in range(1, 9):
            a, b = combinatorics.exhaustive_lis_law(N), combinatorics.exhaustive_lis_law(N + 1)
            for n in range(1, N + 2):
                assert b[n] <= a.get(n, Fraction(1))
        d["N_max"] = 8


def test_11_cue_monte_carlo():
    with criterion(11, "CUE moment and Weyl formula by Haar Monte Carlo") as d:
        mean, err = toeplitz.cue_moment_mc(4, 1, 0.0, 10**4, 1111)
        exact = toeplitz.cue_moment_exact(4, 1)
        assert abs(mean - exact) <= 3 * err
        z = []
        for n in range(1, 9):
            mc, se, det = toeplitz.weyl_mc_check({1: 0.5, -1: 0.5}, n, 10**4, 1200 + n)
            z.append(abs(mc - det) / se)
            assert abs(mc - det) <= 3 * se
        d["cue_mean"] = f"{mean:.3f}+-{err:.3f} vs {exact}"
        d["max_weyl_z"] = f"{max(z):.2f}"


def _snapshot(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_12_determinism(tmp_path):
    with criterion(12, "byte-identical outputs across runs and worker counts") as d:
        commands = [
            ["simulate", "lpp", "--M", 12, "--N", 12, "--q", 0.3, "--samples", 4000, "--seed", 12],
            ["simulate", "hammersley", "--alpha", 20, "--samples", 4000, "--seed", 12],
            ["simulate", "png", "--M", 6, "--N", 6, "--q", 0.4, "--samples", 200, "--seed", 12],
            ["exact", "--method", "meixner", "--M", 3, "--N", 3, "--q", 0.3],
            ["exact", "--method", "bessel", "--alpha", 2, "--n", 8],
            ["exact", "--method", "toeplitz", "--alpha", 2, "--n", 8],
            ["tw-table", "--method", "both", "--xi-min", -4, "--xi-max", 2, "--step", 0.5],
            ["experiment", "thm32", "--N", 40, "--q", 0.25, "--samples", 3000, "--seed", 12],
            ["experiment", "thm33", "--alpha", 50, "--samples", 3000, "--seed", 12],
            ["experiment", "transversal", "--N", 32, "--samples", 30, "--seed", 12],
            ["experiment", "gue_edge", "--N", 10, "--xi-min", -2, "--xi-max", 1, "--step", 1],
            ["verify"],
        ]
        runs = []
        for idx, workers in enumerate((1, 3, 1)):
            out = tmp_path / f"run{idx}"
            for cmd in commands:
                code = cli.main([*map(str, cmd), "--workers", str(workers), "--out", str(out)])
                assert code in (0, 4), (cmd, code)
            runs.append(_snapshot(out))
        assert runs[0] == runs[1] == runs[2]
        d["files"] = len(runs[0])
