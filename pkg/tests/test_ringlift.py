import itertools

import numpy as np
import pytest

from algmod.algebra import make_split, make_truncated_poly
from algmod.enumeration import classify
from algmod.ringlift import (
    DigitCarryError,
    FiniteRing,
    additive_automorphisms,
    additive_order,
    bound_check,
    canonical_key,
    digits,
    enumerate_rings,
    make_product_fp,
    make_zmod,
    partitions,
    ring_count_bound,
    ring_violations,
    to_fp_algebra,
    validate_ring,
)
from algmod.symmetry import isomorphic


def test_partitions():
    assert partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert len(partitions(7)) == 15


def test_validate_ring():
    assert validate_ring(make_zmod(3, 2)) == []
    assert validate_ring(make_product_fp(2, 3)) == []
    broken = FiniteRing(2, (1, 1), [[[1, 0], [0, 1]], [[1, 0], [0, 0]]], [1, 0])
    kinds = {v.kind for v in ring_violations(broken)}
    assert "comm" in kinds
    assert any(v.kind == "unit" for v in ring_violations(FiniteRing(2, (1,), [[[0]]], [1])))
    # x^2 = 1 is not killed by 2 when x has order 2 and 1 lives in Z/4
    assert any(v.kind == "order" for v in ring_violations(FiniteRing(2, (2, 1), [[[1, 0], [0, 1]], [[0, 1], [1, 0]]], [1, 0])))


def test_additive_automorphism_counts():
    # |Aut(Z/p^k)| = phi(p^k); |Aut(F_p^2)| = |GL_2(F_p)|
    assert len(additive_automorphisms(3, (2,))) == 6
    assert len(additive_automorphisms(2, (1, 1))) == 6
    assert len(additive_automorphisms(2, (2, 1))) == 8


@pytest.mark.parametrize("p,n,count", [(2, 1, 1), (2, 2, 4), (3, 2, 4)])
def test_enumerate_counts(p, n, count):
    rings = enumerate_rings(p, n)
    assert len(rings) == count
    assert all(not validate_ring(R) for R in rings)
    assert len({canonical_key(R) for R in rings}) == count


def test_enumerate_contains_known_rings():
    keys = {canonical_key(R) for R in enumerate_rings(2, 2)}
    assert canonical_key(make_zmod(2, 2)) in keys
    assert canonical_key(make_product_fp(2, 2)) in keys


def test_digits():
    R = make_zmod(3, 3)
    assert digits(R, [14]).tolist() == [2, 1, 1]
    assert digits(R, [27 + 5]).tolist() == [2, 1, 0]


def test_zmod4_reduces_to_dual_numbers():
    a, A = to_fp_algebra(make_zmod(2, 2))
    assert a == (2,)
    assert isomorphic(A, make_truncated_poly(2, 2)) is not None


def test_char_p_reduction_is_identity():
    R = make_product_fp(3, 3)
    _, A = to_fp_algebra(R)
    assert np.array_equal(A.c, R.mult) and np.array_equal(A.d, R.one)
    assert isomorphic(A, make_split(3, 3)) is not None


def test_digit_carry_failure_on_bad_generator():
    # x = 2 generates Z/9; its products carry between digits
    R = FiniteRing(3, (2,), [[[2]]], [5])
    assert not validate_ring(R)
    with pytest.raises(DigitCarryError):
        to_fp_algebra(R)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 2)])
def test_reduction_rank_and_unit_order(p, n):
    for R in enumerate_rings(p, n):
        a, A = to_fp_algebra(R)
        assert A.n == n == sum(a)
        support = [R.a[i] for i in range(R.m) if R.one[i] % p]
        assert additive_order(R, R.one) == p ** max(support)


def test_reduction_stable_under_reordering():
    for R in enumerate_rings(2, 2) + enumerate_rings(3, 2):
        _, A = to_fp_algebra(R)
        for perm in itertools.permutations(range(R.m)):
            if [R.a[i] for i in perm] != list(R.a):
                continue
            P = list(perm)
            S = FiniteRing(R.p, R.a, R.mult[np.ix_(P, P, P)], R.one[P])
            _, B = to_fp_algebra(S)
            assert isomorphic(A, B) is not None


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 2)])
def test_injectivity(p, n):
    classes = [r.representative for r in classify(n, p)]
    seen = set()
    for R in enumerate_rings(p, n):
        a, A = to_fp_algebra(R)
        idx = [k for k, C in enumerate(classes) if isomorphic(A, C) is not None]
        assert len(idx) == 1
        assert (a, idx[0]) not in seen
        seen.add((a, idx[0]))


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 2)])
def test_bound_check(p, n):
    assert bound_check(p, n)
    assert ring_count_bound(2, 2, 3) == 192


def test_json_round_trip():
    R = make_zmod(2, 3)
    S = FiniteRing.from_json(R.to_json())
    assert S.key() == R.key()
