import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algmod.algebra import discriminant, make_bullet, make_split, make_truncated_poly, product
from algmod.enumeration import classify
from algmod.exactla import InvertibleMatrix, gl_order, iterate_gl, stacked
from algmod.symmetry import (
    act,
    act_batch,
    automorphisms,
    check_split_stabilizer,
    isomorphic,
    normalize,
    permutation_matrices,
    split_stabilizer,
)
from helpers import f4, random_normalized_tables, rank2


def random_gl(rng, n, q):
    from algmod.exactla import det_mod

    while True:
        M = rng.integers(0, q, (n, n))
        if det_mod(M, q):
            return InvertibleMatrix(n, q, M)


def brute_stabilizer_and_orbit(A):
    """Apply every element of GL_n to A's table."""
    mats = list(iterate_gl(A.n, A.modulus))
    Ms, Ps = stacked(mats)
    C = act_batch(Ms, Ps, A.c, A.modulus)
    D = np.einsum("hlm,m->hl", Ms, A.d) % A.modulus
    return mats, C, D


def brute_isomorphic(A, B):
    mats, C, D = brute_stabilizer_and_orbit(A)
    hit = (C == B.c).all(axis=(1, 2, 3)) & (D == B.d).all(axis=1)
    return bool(hit.any())


def test_act_identity_and_permutation():
    A = make_truncated_poly(3, 5)
    assert act(InvertibleMatrix.identity(3, 5), A) == A
    S = make_split(3, 2)
    for P in permutation_matrices(3, 2):
        assert act(P, S) == S


def test_discriminant_scaling_example():
    A = make_split(2, 5)
    M = InvertibleMatrix(2, 5, np.diag([2, 1]))
    assert discriminant(act(M, A)) == 4 * discriminant(A) % 5


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(3, 5), (3, 2), (4, 3)]), st.integers(0, 2**32 - 1))
def test_functoriality_and_equivariance(nq, seed):
    n, q = nq
    rng = np.random.default_rng(seed)
    A = random_normalized_tables(rng, n, q, 1)[0]
    M, N = random_gl(rng, n, q), random_gl(rng, n, q)
    assert act(M @ N, A) == act(M, act(N, A))
    inv_det_sq = pow(M.det, -2, q)
    assert discriminant(act(M, A)) == inv_det_sq * discriminant(A) % q


def test_isomorphism_char2_rank2():
    A = rank2(1, 0, 2)  # x^2 = 1
    B = rank2(0, 0, 2)  # x^2 = 0
    M = isomorphic(A, B)
    assert M is not None and act(M, A) == B
    # x -> x + 1: in the new coordinates x maps to (1, 1)
    assert M.entries[:, 1].tolist() == [1, 1]


def test_f4_not_split():
    assert isomorphic(f4(), make_split(2, 2)) is None
    assert not brute_isomorphic(f4(), make_split(2, 2))


def test_identity_witness():
    A = make_truncated_poly(4, 3)
    assert act(isomorphic(A, A), A) == A


@pytest.mark.parametrize(
    "A,order",
    [(make_split(3, 2), 6), (f4(), 2), (make_bullet(2, 3), 2), (make_bullet(4, 2), 168), (make_split(1, 5), 1)],
)
def test_automorphism_orders(A, order):
    auts = automorphisms(A)
    assert len(auts) == order
    mats, C, D = brute_stabilizer_and_orbit(A)
    fixed = (C == A.c).all(axis=(1, 2, 3)) & (D == A.d).all(axis=1)
    assert set(auts) == {m for m, f in zip(mats, fixed) if f}


def test_split_automorphisms_are_permutations():
    assert set(automorphisms(make_split(3, 2))) == permutation_matrices(3, 2)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(3, 2), (3, 3)]), st.integers(0, 2**32 - 1))
def test_automorphism_group_properties(nq, seed):
    n, q = nq
    rng = np.random.default_rng(seed)
    A = act(random_gl(rng, n, q), random_normalized_tables(rng, n, q, 1)[0])
    auts = automorphisms(A)
    group = set(auts)
    assert InvertibleMatrix.identity(n, q) in group
    assert gl_order(n, q) % len(auts) == 0
    for g in auts[:6]:
        assert g.inv() in group
        for h in auts[:6]:
            assert g @ h in group


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_isomorphic_matches_exhaustive_gl(n, q):
    reps = [r.representative for r in classify(n, q)]
    rng = np.random.default_rng(n * 10 + q)
    pool = [act(random_gl(rng, n, q), R) for R in reps for _ in range(2)]
    for A, B in itertools.combinations(pool, 2):
        M = isomorphic(A, B)
        assert (M is not None) == brute_isomorphic(A, B)
        if M is not None:
            assert act(M, A) == B
            assert act(M.inv(), B) == A


def test_transitivity_on_class_members():
    rng = np.random.default_rng(3)
    R = product(make_truncated_poly(2, 3), make_split(1, 3))
    A, B, C = (act(random_gl(rng, 3, 3), R) for _ in range(3))
    MAB, MBC = isomorphic(A, B), isomorphic(B, C)
    assert act(MBC @ MAB, A) == C


def test_normalize():
    A = act(random_gl(np.random.default_rng(1), 4, 3), make_truncated_poly(4, 3))
    N, A1 = normalize(A)
    assert A1.normalized and act(N, A) == A1


@pytest.mark.parametrize("n,q", [(1, 5), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_split_stabilizer(n, q):
    assert check_split_stabilizer(n, q)
    assert len(split_stabilizer(n, q)) == math.factorial(n)
