"""Exact combinatorics: partitions, Schur polynomials, RSK, LIS laws.

All arithmetic in this module is exact (``int`` and ``fractions.Fraction``);
floating point never enters.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DomainError, PreconditionError, ResourceError

__all__ = [
    "Partition",
    "Tableau",
    "bareiss_det",
    "conjugate",
    "elementary_symmetric",
    "exhaustive_lis_law",
    "gessel_rhs",
    "lis_count_at_most",
    "lis_length",
    "lis_law",
    "macmahon_product",
    "partitions",
    "partitions_in_box",
    "permutation_matrix",
    "plane_partition_count",
    "rsk",
    "schur_jacobi_trudi",
    "schur_measure_weight",
    "schur_tableaux",
    "semistandard_tableaux",
]

EXHAUSTIVE_LIS_MAX = 10
LIS_DP_MAX = 24


@dataclass(frozen=True)
class Partition:
    """Integer partition stored as a weakly decreasing tuple of positive parts."""

    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(p <= 0 for p in parts):
            raise DomainError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise DomainError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @property
    def size(self):
        return sum(self.parts)

    @property
    def first(self):
        """Largest part, 0 for the empty partition."""
        return self.parts[0] if self.parts else 0

    def part(self, i):
        """1-based part with the convention ``lambda_i = 0`` beyond the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def conjugate(self):
        if not self.parts:
            return Partition(())
        return Partition(tuple(sum(1 for p in self.parts if p >= i) for i in range(1, self.parts[0] + 1)))

    def __repr__(self):
        return f"Partition{self.parts}"


def _as_partition(lam):
    return lam if isinstance(lam, Partition) else Partition(tuple(lam))


def conjugate(lam):
    """Conjugate partition: ``lambda'_i = #{j : lambda_j >= i}``."""
    return _as_partition(lam).conjugate()


def partitions(n, max_part=None, max_length=None) -> Iterator[Partition]:
    """All partitions of ``n``, optionally bounded in largest part and length."""
    if n < 0:
        return
    max_part = n if max_part is None else min(max_part, n)
    max_length = n if max_length is None else max_length

    def rec(remaining, cap, length):
        if remaining == 0:
            yield ()
            return
        if length == 0:
            return
        for first in range(min(cap, remaining), 0, -1):
            for rest in rec(remaining - first, first, length - 1):
                yield (first,) + rest

    for parts in rec(n, max_part, max_length):
        yield Partition(parts)


def partitions_in_box(max_part, max_length) -> Iterator[Partition]:
    """Every partition with ``lambda_1 <= max_part`` and at most ``max_length`` parts."""
    for n in range(max_part * max_length + 1):
        yield from partitions(n, max_part=max_part, max_length=max_length)


# ---------------------------------------------------------------------------
# permutations and longest increasing subsequences


def _check_permutation(sigma):
    sigma = [int(s) for s in sigma]
    if not sigma:
        raise DomainError("permutation must be non-empty")
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise DomainError(f"not a permutation of 1..{len(sigma)}: {sigma}")
    return sigma


def lis_length(sigma: Sequence[int]) -> int:
    """Length of the longest increasing subsequence by patience sorting."""
    return _lis_fast(_check_permutation(sigma))


def _lis_fast(seq):
    piles: list = []
    for v in seq:
        i = bisect_left(piles, v)
        if i == len(piles):
            piles.append(v)
        else:
            piles[i] = v
    return len(piles)


def exhaustive_lis_law(N: int) -> dict[int, Fraction]:
    """``{n: P[l_N <= n]}`` for n = 1..N by enumerating all of S_N."""
    if N < 1:
        raise DomainError("exhaustive_lis_law needs N >= 1")
    if N > EXHAUSTIVE_LIS_MAX:
        raise ResourceError(f"exhaustive enumeration of S_{N} exceeds N <= {EXHAUSTIVE_LIS_MAX}")
    counts = [0] * (N + 1)
    for perm in itertools.permutations(range(N)):
        counts[_lis_fast(perm)] += 1
    total = math.factorial(N)
    law = {}
    acc = 0
    for n in range(1, N + 1):
        acc += counts[n]
        law[n] = Fraction(acc, total)
    return law


# n -> (frontier states, counts per N); extended lazily
_LIS_DP: dict = {}


def _lis_counts(n, N):
    # Permutations are grown one element at a time; the new element is given
    # its rank r among the k+1 elements seen so far.  The state is the sorted
    # tuple of ranks of the patience-pile tops, which determines the future of
    # the LIS.  States whose pile count exceeds n are dropped.
    states, counts = _LIS_DP.get(n, ({(): 1}, [1]))
    for k in range(len(counts) - 1, N):
        nxt: dict = defaultdict(int)
        for tops, c in states.items():
            size = len(tops)
            for r in range(k + 1):
                i = bisect_left(tops, r)
                if i == size:
                    if size == n:
                        continue
                    new = tops + (r,)
                else:
                    new = tops[:i] + (r,) + tuple(t + 1 for t in tops[i + 1 :])
                nxt[new] += c
        states = nxt
        counts = counts + [sum(states.values())]
    _LIS_DP[n] = (states, counts)
    return counts[N]


def lis_count_at_most(N: int, n: int) -> int:
    """Number of permutations in S_N whose LIS is at most ``n`` (exact)."""
    if N < 0:
        raise DomainError("N must be non-negative")
    if n >= N:
        return math.factorial(N)
    if n <= 0:
        return 0
    if N > LIS_DP_MAX:
        raise ResourceError(f"LIS counting limited to N <= {LIS_DP_MAX}")
    return _lis_counts(n, N)


def lis_law(N: int) -> dict[int, Fraction]:
    """Exact ``{n: P[l_N <= n]}``; agrees with :func:`exhaustive_lis_law` where both apply."""
    if N < 1:
        raise DomainError("lis_law needs N >= 1")
    total = math.factorial(N)
    return {n: Fraction(lis_count_at_most(N, n), total) for n in range(1, N + 1)}


def permutation_matrix(sigma):
    """0/1 matrix with ``w[i][sigma(i)] = 1`` (1-based permutation)."""
    sigma = _check_permutation(sigma)
    N = len(sigma)
    w = [[0] * N for _ in range(N)]
    for i, s in enumerate(sigma):
        w[i][s - 1] = 1
    return w


# ---------------------------------------------------------------------------
# symmetric polynomials


def _fractions(a):
    return [x if isinstance(x, Fraction) else Fraction(x) for x in a]


def elementary_symmetric(a, m) -> Fraction:
    """Coefficient of ``z^m`` in ``prod_j (1 + a_j z)``; zero outside ``0..len(a)``."""
    a = _fractions(a)
    if m < 0 or m > len(a):
        return Fraction(0)
    e = [Fraction(1)] + [Fraction(0)] * len(a)
    for j, x in enumerate(a, start=1):
        for k in range(j, 0, -1):
            e[k] += x * e[k - 1]
    return e[m]


def _elementary_all(a):
    a = _fractions(a)
    return [elementary_symmetric(a, m) for m in range(len(a) + 1)]


def bareiss_det(matrix):
    """Exact determinant by fraction-free (Bareiss) elimination with row pivoting."""
    A = [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in matrix]
    n = len(A)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in A):
        raise DomainError("determinant of a non-square matrix")
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) / prev
            row_i[k] = 0
        prev = akk
    return sign * A[n - 1][n - 1]


def schur_jacobi_trudi(lam, a, n=None) -> Fraction:
    """Schur polynomial ``det(e_{lambda'_i - i + j}(a))_{n x n}`` with ``n >= lambda_1``.

    ``n`` defaults to ``lambda_1``; any larger ``n`` gives the same value.
    """
    lam = _as_partition(lam)
    if n is None:
        n = lam.first
    if lam.first > n:
        raise PreconditionError(f"Jacobi-Trudi needs lambda_1 <= n, got lambda_1={lam.first}, n={n}")
    lam_c = lam.conjugate()
    e = _elementary_all(a)
    L = len(e) - 1

    def e_at(m):
        return e[m] if 0 <= m <= L else Fraction(0)

    mat = [[e_at(lam_c.part(i) - i + j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    return bareiss_det(mat)


@dataclass(frozen=True)
class Tableau:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows if len(r)))

    @property
    def shape(self):
        return Partition(tuple(len(r) for r in self.rows))

    def is_semistandard(self):
        for r in self.rows:
            if any(r[k] > r[k + 1] for k in range(len(r) - 1)):
                return False
        for i in range(len(self.rows) - 1):
            upper, lower = self.rows[i], self.rows[i + 1]
            if len(lower) > len(upper):
                return False
            if any(lower[k] <= upper[k] for k in range(len(lower))):
                return False
        return True

    def content(self, M):
        m = [0] * M
        for r in self.rows:
            for v in r:
                m[v - 1] += 1
        return m


def semistandard_tableaux(shape, max_entry) -> Iterator[Tableau]:
    """Enumerate SSYT of the given shape with entries in ``1..max_entry``."""
    shape = _as_partition(shape)
    cells = [(i, j) for i, row_len in enumerate(shape.parts) for j in range(row_len)]
    filling = [[0] * row_len for row_len in shape.parts]

    def rec(idx):
        if idx == len(cells):
            yield Tableau(tuple(tuple(r) for r in filling))
            return
        i, j = cells[idx]
        lo = 1
        if j > 0:
            lo = max(lo, filling[i][j - 1])
        if i > 0:
            lo = max(lo, filling[i - 1][j] + 1)
        # the column below needs room for strictly larger entries
        below = sum(1 for r in shape.parts[i + 1 :] if r > j)
        for v in range(lo, max_entry - below + 1):
            filling[i][j] = v
            yield from rec(idx + 1)
        filling[i][j] = 0

    yield from rec(0)


def schur_tableaux(lam, a) -> Fraction:
    """Schur polynomial as the sum over semistandard tableaux of ``prod a_i^{m_i(T)}``."""
    lam = _as_partition(lam)
    a = _fractions(a)
    if lam.size > 12 or len(a) > 5:
        raise ResourceError("tableau enumeration limited to |lambda| <= 12 and at most 5 variables")
    M = len(a)
    if len(lam) > M:
        return Fraction(0)
    total = Fraction(0)
    for T in semistandard_tableaux(lam, M):
        term = Fraction(1)
        for x, mult in zip(a, T.content(M)):
            if mult:
                term *= x**mult
        total += term
    return total


# ---------------------------------------------------------------------------
# RSK


def _row_insert(P, Q, value, label):
    r = 0
    while True:
        if r == len(P):
            P.append([value])
            Q.append([label])
            return
        row = P[r]
        k = bisect_right(row, value)
        if k == len(row):
            row.append(value)
            Q[r].append(label)
            return
        row[k], value = value, row[k]
        r += 1


def rsk(w) -> tuple[Tableau, Tableau]:
    """Row-insertion RSK of a non-negative integer matrix.

    The matrix is read as a two-line array in lexicographic order: pair
    ``(i, j)`` appears ``w[i][j]`` times.  Column indices are inserted into P,
    row indices recorded in Q (both 1-based).
    """
    P: list[list[int]] = []
    Q: list[list[int]] = []
    for i, row in enumerate(w, start=1):
        for j, mult in enumerate(row, start=1):
            mult = int(mult)
            if mult < 0:
                raise DomainError("RSK input must be non-negative")
            for _ in range(mult):
                _row_insert(P, Q, j, i)
    return Tableau(tuple(map(tuple, P))), Tableau(tuple(map(tuple, Q)))


# ---------------------------------------------------------------------------
# Schur measure, Gessel sums, MacMahon


def schur_measure_weight(lam, a, b) -> Fraction:
    """Schur-measure mass ``prod_{i,j}(1 - a_i b_j) s_lambda(a) s_lambda(b)``."""
    a, b = _fractions(a), _fractions(b)
    for x in a + b:
        if not 0 <= x < 1:
            raise DomainError(f"Schur measure parameters must lie in [0, 1), got {x}")
    norm = Fraction(1)
    for x in a:
        for y in b:
            norm *= 1 - x * y
    lam = _as_partition(lam)
    return norm * _schur(lam, a) * _schur(lam, b)


def _schur(lam, a):
    if len(lam) > len(a):
        return Fraction(0)
    return schur_jacobi_trudi(lam, a)


def gessel_rhs(n, a, b) -> Fraction:
    """``sum_{lambda_1 <= n} s_lambda(a) s_lambda(b)`` (finite: lengths cap ``l(lambda)``)."""
    a, b = _fractions(a), _fractions(b)
    if n > 6 or len(a) > 3 or len(b) > 3:
        raise ResourceError("gessel_rhs limited to n <= 6 and at most 3 variables per side")
    if n < 0:
        raise DomainError("n must be non-negative")
    total = Fraction(0)
    for lam in partitions_in_box(n, min(len(a), len(b))):
        total += _schur(lam, a) * _schur(lam, b)
    return total


def macmahon_product(a, b, c) -> int:
    """``prod_{i<=a, j<=b, k<=c} (i+j+k-1)/(i+j+k-2)``, the boxed plane partition count."""
    if min(a, b, c) < 0:
        raise DomainError("MacMahon product needs a, b, c >= 0")
    value = Fraction(1)
    for i in range(1, a + 1):
        for j in range(1, b + 1):
            for k in range(1, c + 1):
                value *= Fraction(i + j + k - 1, i + j + k - 2)
    assert value.denominator == 1, value
    return int(value)


def plane_partition_count(a, b, c) -> int:
    """Count a x b arrays over ``0..c`` weakly decreasing along rows and columns."""
    if min(a, b, c) < 0:
        raise DomainError("plane_partition_count needs a, b, c >= 0")
    if a * b > 9 or c > 4:
        raise ResourceError("plane partition enumeration limited to a*b <= 9 and c <= 4")
    grid = [[0] * b for _ in range(a)]

    def rec(idx):
        if idx == a * b:
            return 1
        i, j = divmod(idx, b)
        hi = c
        if i > 0:
            hi = min(hi, grid[i - 1][j])
        if j > 0:
            hi = min(hi, grid[i][j - 1])
        count = 0
        for v in range(hi + 1):
            grid[i][j] = v
            count += rec(idx + 1)
        return count

    return rec(0)
