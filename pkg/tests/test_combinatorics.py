import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from growthlab import combinatorics as C
from growthlab.errors import DomainError, PreconditionError, ResourceError
from growthlab.growth import lpp_value
from growthlab.rng import SeededStream


def _lis_bruteforce(seq):
    best = 0
    for r in range(1, len(seq) + 1):
        for sub in itertools.combinations(seq, r):
            if all(sub[i] < sub[i + 1] for i in range(r - 1)):
                best = r
    return best


def test_lis_examples():
    assert C.lis_length((1, 2, 3)) == 3
    assert C.lis_length((3, 1, 2)) == 2
    assert C.lis_length((2, 7, 4, 1, 5, 6, 3)) == 4
    assert _lis_bruteforce((2, 7, 4, 1, 5, 6, 3)) == 4


@given(st.permutations(list(range(1, 10))))
def test_lis_matches_exhaustive_subsequences(perm):
    assert C.lis_length(perm) == _lis_bruteforce(perm)


def test_lis_rejects_non_permutation():
    with pytest.raises(DomainError):
        C.lis_length((1, 1, 2))


def test_exhaustive_law_examples():
    assert C.exhaustive_lis_law(1) == {1: F(1)}
    assert C.exhaustive_lis_law(3)[2] == F(5, 6)
    law2 = C.exhaustive_lis_law(2)
    mean = sum(n * (law2[n] - law2.get(n - 1, F(0))) for n in law2)
    assert mean == F(3, 2)


def test_exhaustive_law_limits():
    with pytest.raises(ResourceError):
        C.exhaustive_lis_law(11)
    for N in range(1, 9):
        law = C.exhaustive_lis_law(N)
        assert law[N] == 1
        assert all(p.denominator <= math.factorial(N) and math.factorial(N) % p.denominator == 0 for p in law.values())


@pytest.mark.parametrize("N", range(1, 10))
def test_counting_dp_matches_enumeration(N):
    assert C.lis_law(N) == C.exhaustive_lis_law(N)


def test_counting_dp_known_values():
    # permutations avoiding 123 are counted by the Catalan numbers
    for N in range(1, 15):
        assert C.lis_count_at_most(N, 2) == math.comb(2 * N, N) // (N + 1)
    # l_N <= 1 only for the reversal
    assert C.lis_count_at_most(12, 1) == 1


@pytest.mark.parametrize("N", range(1, 9))
def test_lis_law_decreases_in_N(N):
    a, b = C.exhaustive_lis_law(N), C.exhaustive_lis_law(N + 1)
    for n in range(1, N + 2):
        assert b[n] <= a.get(n, F(1))


def test_elementary_symmetric_examples():
    assert C.elementary_symmetric([1, 1], 1) == 2
    assert C.elementary_symmetric([1, 1], 2) == 1
    assert C.elementary_symmetric([F(1, 2), F(1, 3), F(1, 4)], 2) == F(3, 8)
    assert C.elementary_symmetric([1, 2], -1) == 0
    assert C.elementary_symmetric([1, 2], 3) == 0


small_rationals = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@given(st.lists(small_rationals, max_size=5), st.integers(-1, 6))
def test_elementary_symmetric_is_product_coefficient(a, m):
    coeffs = [F(1)]
    for x in a:
        coeffs = [c + x * p for c, p in zip(coeffs + [F(0)], [F(0)] + coeffs)]
    expect = coeffs[m] if 0 <= m < len(coeffs) else 0
    assert C.elementary_symmetric(a, m) == expect


def test_conjugate_examples():
    assert C.conjugate((2, 1)).parts == (2, 1)
    assert C.conjugate((3,)).parts == (1, 1, 1)
    assert C.conjugate((4, 2, 1)).parts == (3, 2, 1, 1)
    assert C.conjugate(()).parts == ()


partitions_st = st.lists(st.integers(1, 7), max_size=7).map(lambda p: C.Partition(tuple(sorted(p, reverse=True))))


@given(partitions_st)
def test_conjugate_is_involution(lam):
    assert C.conjugate(C.conjugate(lam)) == lam
    assert C.conjugate(lam).size == lam.size


def test_partition_validation():
    with pytest.raises(DomainError):
        C.Partition((1, 2))


def test_jacobi_trudi_examples():
    assert C.schur_jacobi_trudi((2, 1), [1, 1], 2) == 2
    assert C.schur_jacobi_trudi((), [F(1, 2)]) == 1
    assert C.schur_jacobi_trudi((1,), [F(5, 7)]) == F(5, 7)
    with pytest.raises(PreconditionError):
        C.schur_jacobi_trudi((3,), [1, 1], 2)


@given(partitions_st, st.integers(0, 3))
def test_jacobi_trudi_independent_of_size(lam, extra):
    a = [F(1, 2), F(2, 3), F(3)]
    assert C.schur_jacobi_trudi(lam, a) == C.schur_jacobi_trudi(lam, a, lam.first + extra)


def test_schur_tableaux_examples():
    assert C.schur_tableaux((2, 1), [1, 1]) == 2
    assert C.schur_tableaux((1, 1, 1), [1, 1]) == 0
    assert C.schur_tableaux((2,), [1, 1]) == 3
    with pytest.raises(ResourceError):
        C.schur_tableaux((13,), [1])


@pytest.mark.parametrize("size", range(0, 9))
def test_jacobi_trudi_equals_tableau_sum(size):
    lists = [[F(1, 2)], [F(1, 3), F(-2)], [F(1, 2), F(1, 3), F(3, 4)]]
    for lam in C.partitions(size):
        for a in lists:
            assert C.schur_jacobi_trudi(lam, a) == C.schur_tableaux(lam, a)


def test_semistandard_tableaux_are_semistandard():
    tabs = list(C.semistandard_tableaux((3, 1), 3))
    assert len(tabs) == 15
    assert all(t.is_semistandard() for t in tabs)


def test_rsk_examples():
    P, Q = C.rsk([[1]])
    assert P.shape.parts == (1,)
    P, _ = C.rsk([[0, 1], [1, 0]])
    assert P.shape.parts == (1, 1)
    assert lpp_value(np.array([[0, 1], [1, 0]])) == 1 == P.shape.part(1)
    P, _ = C.rsk([[1, 0], [0, 1]])
    assert P.shape.parts == (2,)
    assert lpp_value(np.array([[1, 0], [0, 1]])) == 2


@pytest.mark.parametrize("seed", range(100))
def test_rsk_first_row_is_lpp(seed):
    g = SeededStream(seed, 5).generator()
    M = int(g.integers(1, 9))
    w = g.geometric(0.5, size=(M, M)) - 1
    P, Q = C.rsk(w)
    assert P.shape == Q.shape
    assert P.is_semistandard() and Q.is_semistandard()
    assert P.shape.size == int(w.sum())
    assert P.shape.part(1) == lpp_value(w)


@pytest.mark.parametrize("seed", range(200))
def test_rsk_of_permutation_gives_lis(seed):
    g = SeededStream(seed, 6).generator()
    N = int(g.integers(1, 10))
    sigma = (g.permutation(N) + 1).tolist()
    P, _ = C.rsk(C.permutation_matrix(sigma))
    assert P.shape.part(1) == C.lis_length(sigma)


def test_schur_measure_examples():
    h = F(1, 2)
    assert C.schur_measure_weight((), [h], [h]) == F(3, 4)
    assert C.schur_measure_weight((1,), [h], [h]) == F(3, 16)
    total = sum(C.schur_measure_weight((k,) if k else (), [h], [h]) for k in range(60))
    assert abs(total - 1) < F(1, 10**30)
    with pytest.raises(DomainError):
        C.schur_measure_weight((), [F(1)], [h])


@pytest.mark.parametrize("r", [F(1, 2), F(1, 3)])
def test_schur_measure_normalisation_from_below(r):
    prev = F(0)
    for n in range(0, 12):
        total = sum(C.schur_measure_weight(lam, [r], [r]) for lam in C.partitions_in_box(n, 1))
        assert prev < total < 1
        prev = total
    assert 1 - prev < F(1, 10**5)


def test_macmahon_examples():
    assert C.macmahon_product(1, 1, 1) == 2
    assert C.macmahon_product(2, 2, 2) == 20
    assert C.macmahon_product(3, 0, 5) == 1
    with pytest.raises(DomainError):
        C.macmahon_product(-1, 1, 1)


def test_plane_partition_examples():
    assert C.plane_partition_count(1, 1, 1) == 2
    assert C.plane_partition_count(2, 2, 2) == 20
    for c in range(5):
        assert C.plane_partition_count(1, 1, c) == c + 1
    with pytest.raises(ResourceError):
        C.plane_partition_count(4, 3, 1)


def test_plane_partitions_equal_macmahon_on_bounded_domain():
    for a in range(0, 10):
        for b in range(0, 10):
            if a * b > 9:
                continue
            for c in range(0, 5):
                assert C.plane_partition_count(a, b, c) == C.macmahon_product(a, b, c)


def test_gessel_rhs_examples():
    x = F(2, 5)
    assert C.gessel_rhs(0, [x], [x]) == 1
    assert C.gessel_rhs(1, [x], [x]) == 1 + x * x
    with pytest.raises(ResourceError):
        C.gessel_rhs(7, [x], [x])


def test_bareiss_det_against_fraction_cofactor():
    def cofactor(m):
        if not m:
            return F(1)
        return sum((-1) ** j * m[0][j] * cofactor([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))

    g = SeededStream(9, 0).generator()
    for n in range(0, 6):
        m = [[F(int(g.integers(-5, 6)), int(g.integers(1, 4))) for _ in range(n)] for _ in range(n)]
        assert C.bareiss_det(m) == cofactor(m)
