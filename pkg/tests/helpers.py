"""Shared constructors and independent oracles for the test suite."""

import numpy as np
import sympy

from algmod.algebra import StructureTable, from_arrays, validate


def f4(q=2):
    """F_2[w]/(w^2 + w + 1) on basis 1, w."""
    c = np.zeros((2, 2, 2), dtype=np.int64)
    c[0] = np.eye(2, dtype=np.int64)
    c[1, 0] = [0, 1]
    c[1, 1] = [1, 1]
    return from_arrays(c, [1, 0], q)


def rank2(a0, a1, q):
    """Normalized rank-2 table with x^2 = a0 + a1 x."""
    c = np.zeros((2, 2, 2), dtype=np.int64)
    c[0] = np.eye(2, dtype=np.int64)
    c[1, 0] = [0, 1]
    c[1, 1] = [a0, a1]
    return from_arrays(c, [1, 0], q)


def naive_product(A, u, v):
    """u * v computed from the table with explicit loops."""
    n, q = A.n, A.modulus
    out = [0] * n
    for i in range(n):
        for j in range(n):
            for l in range(n):
                out[l] += int(u[i]) * int(v[j]) * int(A.c[i, j, l])
    return np.array(out, dtype=np.int64) % q


def naive_discriminant(A):
    """det of Tr(e_i e_j), where Tr(a) is the trace of the matrix of y -> a*y."""
    n, q = A.n, A.modulus
    eye = np.eye(n, dtype=np.int64)

    def trace(a):
        return sum(int(naive_product(A, a, eye[k])[k]) for k in range(n))

    gram = sympy.Matrix(n, n, lambda i, j: trace(naive_product(A, eye[i], eye[j])))
    return int(gram.det()) % q


def random_valid_normalized(rng, n, q, tries=10000):
    """Random valid normalized table: conjugate a random product of small pieces."""
    from algmod.algebra import make_bullet, make_split, make_truncated_poly, product
    from algmod.exactla import InvertibleMatrix, det_mod
    from algmod.symmetry import act, normalize

    pieces = []
    left = n
    while left:
        k = int(rng.integers(1, left + 1))
        kind = int(rng.integers(0, 3))
        pieces.append([make_split, make_bullet, make_truncated_poly][kind](k, q))
        left -= k
    A = pieces[0]
    for P in pieces[1:]:
        A = product(A, P)
    for _ in range(tries):
        M = rng.integers(0, q, size=(n, n))
        if det_mod(M, q):
            break
    B = act(InvertibleMatrix(n, q, M), A)
    return normalize(B)[1]


def sympy_rank(M, p):
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF

    dm = DomainMatrix.from_list_sympy(*M.shape, [[int(x) for x in row] for row in M]).convert_to(GF(p))
    return dm.rank()


def table_from_lists(c, d, q):
    return StructureTable(len(d), q, np.array(c), np.array(d))




def random_h(rng, n, q):
    """Random matrix with first column e_0."""
    from algmod.exactla import InvertibleMatrix, det_mod

    while True:
        M = rng.integers(0, q, size=(n, n))
        M[:, 0] = 0
        M[0, 0] = 1
        if det_mod(M, q):
            return InvertibleMatrix(n, q, M)


def random_normalized_tables(rng, n, q, count, per_seed=10):
    """Random valid normalized tables: random search leaves and random H-conjugates of them."""
    from algmod.enumeration import sample_valid
    from algmod.symmetry import act

    out = []
    while len(out) < count:
        A = sample_valid(n, q, rng)
        out.append(A)
        for _ in range(per_seed - 1):
            if len(out) < count:
                out.append(act(random_h(rng, n, q), A))
    return out
