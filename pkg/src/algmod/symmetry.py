"""GL_n action on based algebras, isomorphism search and automorphism groups.

``act(M, A)`` transports the multiplication along the coordinate change M:
mu'(x, y) = M mu(M^-1 x, M^-1 y) and d' = M d.  An M with act(M, A) = B is the
same thing as an algebra isomorphism A -> B written in coordinates (its
columns are the images of A's basis vectors).

Isomorphism search first moves both algebras to B^1 normal form (identity as
first basis vector), then looks for images of an adapted sequence of
elements of A: the identity, free generators and products of earlier
elements.  Product images are forced; each free image ranges over the
solutions of the linear constraints imposed by already-placed elements,
restricted to the matching power of the nilradical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .algebra import BasedAlgebra, StructureTable, discriminant, make_split, multiply, validate
from .exactla import (
    BudgetExceeded,
    InvertibleMatrix,
    Subspace,
    affine_solutions,
    inverse_mod,
    iterate_gl,
    rre_form,
    search_budget,
)
from .localstruct import idempotents, nilradical, radical_powers, radical_signature


def _act_arrays(M: np.ndarray, P: np.ndarray, c: np.ndarray, d: np.ndarray, p: int):
    t = np.einsum("ai,abm->ibm", P, c) % p
    t = np.einsum("bj,ibm->ijm", P, t) % p
    return np.einsum("lm,ijm->ijl", M, t) % p, M @ d % p


def act(M: InvertibleMatrix, A: BasedAlgebra) -> BasedAlgebra:
    if M.n != A.n or M.modulus != A.modulus:
        raise ValueError("matrix and algebra disagree in size or modulus")
    c, d = _act_arrays(M.entries, M.inverse, A.c, A.d, A.modulus)
    return BasedAlgebra(StructureTable(A.n, A.modulus, c, d))


def act_table(M: InvertibleMatrix, t: StructureTable) -> StructureTable:
    c, d = _act_arrays(M.entries, M.inverse, t.c, t.d, t.modulus)
    return StructureTable(t.n, t.modulus, c, d)


def act_batch(Ms: np.ndarray, Ps: np.ndarray, c: np.ndarray, p: int) -> np.ndarray:
    """Transformed structure constants for a stack of (M, M^-1) pairs."""
    t = np.einsum("hai,abm->hibm", Ps, c) % p
    t = np.einsum("hbj,hibm->hijm", Ps, t) % p
    return np.einsum("hlm,hijm->hijl", Ms, t) % p


def normalizer(A: BasedAlgebra) -> InvertibleMatrix:
    """N with act(N, A) in B^1 form.

    New basis: the identity, then the old basis vectors in order with the
    first one having a nonzero coefficient in the identity removed.
    """
    n, p = A.n, A.modulus
    if n == 0:
        return InvertibleMatrix.identity(0, p)
    k = int(np.nonzero(A.d)[0][0])
    cols = [A.d] + [np.eye(n, dtype=np.int64)[i] for i in range(n) if i != k]
    P = np.array(cols, dtype=np.int64).T
    return InvertibleMatrix(n, p, inverse_mod(P, p))


def normalize(A: BasedAlgebra) -> tuple[InvertibleMatrix, BasedAlgebra]:
    N = normalizer(A)
    return N, act(N, A)


# -- invariants ----------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    etale: bool
    nilradical_dim: int
    radical_dims: tuple[int, ...]
    idempotent_count: int | None


def signature(A: BasedAlgebra, idempotent_budget: int = 10**6) -> Signature:
    count = len(idempotents(A)) if A.modulus**A.n <= idempotent_budget else None
    return Signature(discriminant(A) != 0, nilradical(A).dim, radical_signature(A), count)


# -- search ----------------------------------------------------------------------


class _Plan:
    """Adapted sequence a_0 = 1, a_1, ... for a normalized algebra A."""

    def __init__(self, A: BasedAlgebra):
        n, p = A.n, A.modulus
        self.A = A
        powers = radical_powers(A)
        candidates = list(nilradical(A).matrix) + list(np.eye(n, dtype=np.int64))
        elems = [A.d.copy()]
        kinds: list[tuple] = [("one",)]
        span = Subspace.span([A.d], n, p)
        while len(elems) < n:
            added = False
            for j in range(len(elems)):
                for i in range(j + 1):
                    w = multiply(A, elems[i], elems[j])
                    if not span.contains(w):
                        elems.append(w)
                        kinds.append(("prod", i, j))
                        span = span.join([w])
                        added = True
                        break
                if added:
                    break
            if added:
                continue
            for v in candidates:
                if not span.contains(v):
                    level = max(e for e, P in enumerate(powers) if P.contains(v))
                    elems.append(np.asarray(v, dtype=np.int64))
                    kinds.append(("free", level))
                    span = span.join([v])
                    break
        self.elems = elems
        self.kinds = kinds
        self.P = np.array(elems, dtype=np.int64).T
        self.Pinv = inverse_mod(self.P, p)
        # pair checks grouped by the level at which they become decidable
        self.checks: list[list[tuple[int, int, np.ndarray]]] = [[] for _ in range(n)]
        for j in range(n):
            for i in range(j + 1):
                coef = self.Pinv @ multiply(A, elems[i], elems[j]) % p
                support = np.nonzero(coef)[0]
                level = max(j, int(support[-1]) if support.size else 0)
                self.checks[level].append((i, j, coef))


def _homomorphisms(A1: BasedAlgebra, B1: BasedAlgebra, budget: int | None = None) -> Iterator[np.ndarray]:
    """Yield every M with act(M, A1) = B1 (both normalized), in DFS order."""
    n, p = A1.n, A1.modulus
    if n == 0:
        yield np.zeros((0, 0), dtype=np.int64)
        return
    plan = _Plan(A1)
    limit = search_budget() if budget is None else budget
    B_powers = radical_powers(B1)
    annihilators = []
    for P in B_powers:
        ker = rre_form(P.matrix, p).kernel if P.dim else Subspace.full(n, p)
        annihilators.append(ker.matrix)
    eye = np.eye(n, dtype=np.int64)
    nodes = 0

    def ok(level: int, imgs: list[np.ndarray]) -> bool:
        for i, j, coef in plan.checks[level]:
            lhs = multiply(B1, imgs[i], imgs[j])
            rhs = np.array(imgs[: level + 1], dtype=np.int64).T @ coef[: level + 1] % p
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def candidates(k: int, imgs: list[np.ndarray]) -> np.ndarray:
        kind = plan.kinds[k]
        if kind[0] == "prod":
            return multiply(B1, imgs[kind[1]], imgs[kind[2]]).reshape(1, n)
        level = kind[1]
        rows = [annihilators[min(level, len(annihilators) - 1)]]
        rhs = [np.zeros(rows[0].shape[0], dtype=np.int64)]
        placed = np.array(imgs, dtype=np.int64).T
        for i, j, coef in plan.checks[k]:
            if i == j == k:
                continue
            if j == k:
                rows.append((B1.left_op(imgs[i]) - coef[k] * eye) % p)
                rhs.append(placed @ coef[:k] % p)
            else:
                rows.append(coef[k] * eye % p)
                rhs.append((multiply(B1, imgs[i], imgs[j]) - placed @ coef[:k]) % p)
        return affine_solutions(np.vstack(rows), np.concatenate(rhs), p)

    def rec(imgs: list[np.ndarray], span: Subspace):
        nonlocal nodes
        k = len(imgs)
        if k == n:
            yield np.array(imgs, dtype=np.int64).T @ plan.Pinv % p
            return
        for v in candidates(k, imgs):
            nodes += 1
            if nodes > limit:
                raise BudgetExceeded(f"isomorphism search exceeded {limit} nodes")
            if span.contains(v):
                continue
            new = imgs + [v]
            if not ok(k, new):
                continue
            yield from rec(new, span.join([v]))

    one = B1.d.copy()
    if ok(0, [one]):
        yield from rec([one], Subspace.span([one], n, p))


def isomorphic(A: BasedAlgebra, B: BasedAlgebra, budget: int | None = None) -> InvertibleMatrix | None:
    """An M in GL_n with act(M, A) = B, or None when A and B are not isomorphic."""
    if A.n != B.n or A.modulus != B.modulus:
        return None
    if signature(A) != signature(B):
        return None
    NA, A1 = normalize(A)
    NB, B1 = normalize(B)
    for M1 in _homomorphisms(A1, B1, budget):
        M = NB.inv() @ InvertibleMatrix(A.n, A.modulus, M1) @ NA
        if act(M, A) != B:
            raise AssertionError("isomorphism witness failed re-verification")
        return M
    return None


def automorphisms(A: BasedAlgebra, budget: int | None = None) -> list[InvertibleMatrix]:
    """The stabilizer of A's table in GL_n, sorted by flattened entries."""
    N, A1 = normalize(A)
    Ninv = N.inv()
    out = []
    for M1 in _homomorphisms(A1, A1, budget):
        M = Ninv @ InvertibleMatrix(A.n, A.modulus, M1) @ N
        if act(M, A) != A:
            raise AssertionError("automorphism failed re-verification")
        out.append(M)
    out.sort(key=lambda m: m.key())
    return out


def permutation_matrices(n: int, p: int) -> set[InvertibleMatrix]:
    import itertools

    out = set()
    for perm in itertools.permutations(range(n)):
        M = np.zeros((n, n), dtype=np.int64)
        for j, i in enumerate(perm):
            M[i, j] = 1
        out.add(InvertibleMatrix(n, p, M))
    return out


def split_stabilizer(n: int, q: int, budget: int | None = None) -> list[InvertibleMatrix]:
    """Stabilizer of the split algebra, by iterating over all of GL_n(F_q)."""
    S = make_split(n, q)
    c, d = S.c, S.d
    out = []
    batch: list[InvertibleMatrix] = []

    def flush():
        if not batch:
            return
        Ms = np.stack([m.entries for m in batch])
        # M is an automorphism iff M mu(u, v) = mu(Mu, Mv) and M d = d
        lhs = np.einsum("hlm,ijm->hijl", Ms, c) % q
        rhs = np.einsum("hai,hbj,abl->hijl", Ms, Ms, c) % q
        fixes = (lhs == rhs).reshape(len(batch), -1).all(axis=1)
        fixes &= (np.einsum("hlm,m->hl", Ms, d) % q == d).all(axis=1)
        out.extend(m for m, f in zip(batch, fixes) if f)
        batch.clear()

    for M in iterate_gl(n, q, budget):
        batch.append(M)
        if len(batch) >= 4096:
            flush()
    flush()
    return out


def check_split_stabilizer(n: int, q: int, budget: int | None = None) -> bool:
    stab = split_stabilizer(n, q, budget)
    return len(stab) == math.factorial(n) and set(stab) == permutation_matrices(n, q)


def is_normalized_table(t: StructureTable) -> bool:
    return validate(t).normalized
