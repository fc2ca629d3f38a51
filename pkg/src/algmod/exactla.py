"""Exact linear algebra over prime fields F_p (and plain arithmetic mod p^k).

Matrices are numpy ``int64`` arrays whose entries are kept reduced in
``[0, modulus)``.  Moduli here are tiny (p <= 7, p^k <= 125), so products of
two residues never come close to overflowing.

Iteration orders are fixed once and for all:

* matrices are produced in lexicographic order of their row-major flattened
  entry vectors;
* subspaces of a given dimension are produced in lexicographic order of their
  flattened reduced row-echelon basis, smaller dimensions first.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """An exhaustive search would exceed the configured node budget."""


def search_budget() -> int:
    """Node-count ceiling for exhaustive searches (env ``ALGMOD_BUDGET``)."""
    raw = os.environ.get("ALGMOD_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(count: int, what: str, budget: int | None = None) -> None:
    limit = search_budget() if budget is None else budget
    if count > limit:
        raise BudgetExceeded(f"{what}: {count} exceeds budget {limit}")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, math.isqrt(p) + 1))


def prime_power(m: int) -> tuple[int, int]:
    """Return (p, k) with m = p**k, or raise ValueError."""
    for p in range(2, m + 1):
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                break
            return p, k
    raise ValueError("modulus is not a prime power")


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime; echelon forms need a field")


def as_matrix(a, p: int) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    return np.mod(arr, p)


def _rref(M: np.ndarray, p: int, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form; pivots searched only in the first ``ncols``."""
    R = np.mod(np.array(M, dtype=np.int64), p)
    rows, cols = R.shape
    limit = cols if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for col in range(limit):
        if r == rows:
            break
        nz = np.nonzero(R[r:, col])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = pow(int(R[r, col]), -1, p)
        R[r] = (R[r] * inv) % p
        factors = R[:, col].copy()
        factors[r] = 0
        if factors.any():
            R = (R - np.outer(factors, R[r])) % p
        pivots.append(col)
        r += 1
    return R, pivots


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_p^ambient_dim stored by its unique reduced echelon basis."""

    ambient_dim: int
    modulus: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence[int]] | np.ndarray, ambient_dim: int, p: int) -> "Subspace":
        _require_prime(p)
        arr = np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors, dtype=np.int64)
        if arr.size == 0:
            return cls(ambient_dim, p, ())
        arr = arr.reshape(-1, ambient_dim)
        R, piv = _rref(arr, p)
        return cls(ambient_dim, p, tuple(tuple(int(x) for x in row) for row in R[: len(piv)]))

    @classmethod
    def zero(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls(ambient_dim, p, ())

    @classmethod
    def full(cls, ambient_dim: int, p: int) -> "Subspace":
        return cls.span(np.eye(ambient_dim, dtype=np.int64), ambient_dim, p)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return np.array(self.basis, dtype=np.int64)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(row) if x) for row in self.basis)

    def coordinates(self, v) -> np.ndarray | None:
        """Coordinates of ``v`` in the echelon basis, or None if v is outside."""
        v = np.mod(np.asarray(v, dtype=np.int64), self.modulus)
        coords = v[list(self.pivots)] if self.basis else np.zeros(0, dtype=np.int64)
        if np.array_equal((coords @ self.matrix) % self.modulus, v):
            return coords
        return None

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis)

    def join(self, other: "Subspace | Iterable") -> "Subspace":
        rows = list(self.basis)
        rows.extend(other.basis if isinstance(other, Subspace) else other)
        return Subspace.span(rows, self.ambient_dim, self.modulus)

    def elements(self) -> np.ndarray:
        """All q^dim vectors of the subspace (rows), in coordinate-lex order."""
        check_budget(self.modulus**self.dim, "subspace element enumeration")
        coords = all_vectors(self.dim, self.modulus)
        return (coords @ self.matrix) % self.modulus if self.dim else np.zeros((1, self.ambient_dim), dtype=np.int64)

    def complement_basis(self) -> np.ndarray:
        """Standard basis vectors completing this subspace, in index order."""
        free = [i for i in range(self.ambient_dim) if i not in set(self.pivots)]
        out = np.zeros((len(free), self.ambient_dim), dtype=np.int64)
        for r, i in enumerate(free):
            out[r, i] = 1
        return out


@dataclass(frozen=True)
class RREResult:
    rank: int
    echelon: np.ndarray
    kernel: Subspace
    pivots: tuple[int, ...]


def rre_form(matrix, p: int) -> RREResult:
    """Rank, reduced row-echelon form and null space of a matrix over F_p.

    The echelon matrix keeps the input shape (zero rows at the bottom).
    The kernel is the right null space, as a canonical Subspace.
    """
    _require_prime(p)
    M = np.asarray(matrix, dtype=np.int64)
    if M.ndim != 2:
        raise ValueError("rre_form expects a 2-d matrix")
    rows, cols = M.shape
    R, piv = _rref(M, p) if rows else (M.copy(), [])
    free = [c for c in range(cols) if c not in set(piv)]
    kernel_rows = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for r, pc in enumerate(piv):
            v[pc] = (-R[r, f]) % p
        kernel_rows.append(v)
    kernel = Subspace.span(kernel_rows, cols, p) if kernel_rows else Subspace.zero(cols, p)
    return RREResult(len(piv), R, kernel, tuple(piv))


def rank(matrix, p: int) -> int:
    M = np.asarray(matrix, dtype=np.int64)
    if M.size == 0:
        return 0
    return len(_rref(M, p)[1])


def solve_affine(A, b, m: int) -> np.ndarray | None:
    """One solution x of A x = b over Z/m (m prime), or None if infeasible."""
    _require_prime(m)
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: A {A.shape}, b {b.shape}")
    rows, cols = A.shape
    if rows == 0:
        return np.zeros(cols, dtype=np.int64)
    R, piv = _rref(np.hstack([A % m, (b % m).reshape(-1, 1)]), m, ncols=cols)
    if R[len(piv):, cols].any():
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, pc in enumerate(piv):
        x[pc] = R[r, cols]
    return x


def infeasibility_certificate(A, b, p: int) -> np.ndarray | None:
    """A vector y with y A = 0 and y b != 0 (proof that A x = b has no solution)."""
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1) % p
    left_kernel = rre_form(A.T, p).kernel
    for y in left_kernel.basis:
        y = np.array(y, dtype=np.int64)
        if int(y @ b) % p:
            return y
    return None


def affine_solutions(A, b, p: int) -> np.ndarray:
    """All solutions of A x = b over F_p as rows (empty array when infeasible)."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    x0 = solve_affine(A, b, p)
    if x0 is None:
        return np.zeros((0, cols), dtype=np.int64)
    ker = rre_form(A, p).kernel if A.shape[0] else Subspace.full(cols, p)
    return (ker.elements() + x0) % p


def det_mod(M, p: int) -> int:
    _require_prime(p)
    R = np.mod(np.array(M, dtype=np.int64), p)
    n = R.shape[0]
    det = 1
    for col in range(n):
        nz = np.nonzero(R[col:, col])[0]
        if nz.size == 0:
            return 0
        piv = col + int(nz[0])
        if piv != col:
            R[[col, piv]] = R[[piv, col]]
            det = -det
        det = det * int(R[col, col]) % p
        inv = pow(int(R[col, col]), -1, p)
        below = R[col + 1 :, col] * inv % p
        R[col + 1 :] = (R[col + 1 :] - np.outer(below, R[col])) % p
    return det % p


def inverse_mod(M, p: int) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    R, piv = _rref(np.hstack([M % p, np.eye(n, dtype=np.int64)]), p, ncols=n)
    if len(piv) < n:
        raise ValueError("matrix is singular")
    return R[:, n:]


def all_vectors(n: int, q: int) -> np.ndarray:
    """Every vector of (Z/q)^n as rows, lexicographic order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((q,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def gl_order(n: int, q: int) -> int:
    return math.prod(q**n - q**i for i in range(n))


def h_order(n: int, q: int) -> int:
    """Order of the stabilizer of (1,0,...,0) in GL_n(F_q)."""
    if n == 0:
        return 1
    return q ** (n - 1) * gl_order(n - 1, q)


@dataclass(frozen=True, eq=False)
class InvertibleMatrix:
    n: int
    modulus: int
    entries: np.ndarray

    def __post_init__(self):
        arr = np.mod(np.asarray(self.entries, dtype=np.int64).reshape(self.n, self.n), self.modulus)
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        if self.n and det_mod(arr, self.modulus) == 0:
            raise ValueError("matrix is not invertible")

    @classmethod
    def identity(cls, n: int, p: int) -> "InvertibleMatrix":
        return cls(n, p, np.eye(n, dtype=np.int64))

    @cached_property
    def inverse(self) -> np.ndarray:
        if self.n == 0:
            return self.entries.copy()
        inv = inverse_mod(self.entries, self.modulus)
        inv.flags.writeable = False
        return inv

    @property
    def det(self) -> int:
        return det_mod(self.entries, self.modulus) if self.n else 1

    def __matmul__(self, other: "InvertibleMatrix") -> "InvertibleMatrix":
        return InvertibleMatrix(self.n, self.modulus, self.entries @ other.entries % self.modulus)

    def inv(self) -> "InvertibleMatrix":
        return InvertibleMatrix(self.n, self.modulus, self.inverse)

    def key(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.entries.flat)

    def __eq__(self, other) -> bool:
        return isinstance(other, InvertibleMatrix) and self.modulus == other.modulus and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.modulus, self.key()))

    def __repr__(self) -> str:
        return f"InvertibleMatrix(n={self.n}, modulus={self.modulus}, entries={self.entries.tolist()})"


def _independent_rows(n: int, q: int, first_entries: Sequence[tuple[int, ...]]) -> Iterator[np.ndarray]:
    """Row-by-row DFS producing invertible matrices in lex order.

    ``first_entries[r]`` restricts the leading entries of row r (used for H).
    """
    vecs = all_vectors(n, q)

    def rec(rows: list[np.ndarray], span: set[tuple[int, ...]]):
        r = len(rows)
        if r == n:
            yield np.array(rows, dtype=np.int64)
            return
        prefix = first_entries[r] if r < len(first_entries) else ()
        for v in vecs:
            if prefix and tuple(int(x) for x in v[: len(prefix)]) != prefix:
                continue
            t = tuple(int(x) for x in v)
            if t in span:
                continue
            new_span = {tuple(int(x) for x in (np.array(s) + a * v) % q) for s in span for a in range(q)}
            yield from rec(rows + [v], new_span)

    yield from rec([], {(0,) * n})


def iterate_gl(n: int, q: int, budget: int | None = None) -> Iterator[InvertibleMatrix]:
    """Every element of GL_n(F_q) exactly once, lexicographic in flattened entries."""
    _require_prime(q)
    check_budget(q ** (n * n), f"GL_{n}(F_{q}) iteration", budget)
    if n == 0:
        yield InvertibleMatrix(0, q, np.zeros((0, 0), dtype=np.int64))
        return
    for M in _independent_rows(n, q, ()):
        yield InvertibleMatrix(n, q, M)


def iterate_h(n: int, q: int, budget: int | None = None) -> Iterator[InvertibleMatrix]:
    """Every invertible matrix with first column (1,0,...,0), lexicographic order."""
    _require_prime(q)
    check_budget(q ** (n * (n - 1)) if n else 1, f"H_{n}(F_{q}) iteration", budget)
    if n == 0:
        yield InvertibleMatrix(0, q, np.zeros((0, 0), dtype=np.int64))
        return
    prefixes = [(1,)] + [(0,)] * (n - 1)
    for M in _independent_rows(n, q, prefixes):
        yield InvertibleMatrix(n, q, M)


def stacked(mats: Iterable[InvertibleMatrix]) -> tuple[np.ndarray, np.ndarray]:
    """(entries, inverses) stacked as (h, n, n) arrays."""
    mats = list(mats)
    if not mats:
        return np.zeros((0, 0, 0), dtype=np.int64), np.zeros((0, 0, 0), dtype=np.int64)
    return np.stack([m.entries for m in mats]), np.stack([m.inverse for m in mats])


def _subspace_count(n: int, k: int, q: int) -> int:
    num = math.prod(q**n - q**i for i in range(k))
    den = math.prod(q**k - q**i for i in range(k))
    return num // den


def iterate_subspaces(ambient_dim: int, k: int, p: int, budget: int | None = None) -> list[Subspace]:
    """All k-dimensional subspaces of F_p^ambient_dim in the fixed order."""
    _require_prime(p)
    check_budget(_subspace_count(ambient_dim, k, p), "subspace iteration", budget)
    out: list[Subspace] = []
    for pivots in itertools.combinations(range(ambient_dim), k):
        free_slots = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, ambient_dim) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free_slots)):
            B = np.zeros((k, ambient_dim), dtype=np.int64)
            for r, pc in enumerate(pivots):
                B[r, pc] = 1
            for (r, c), v in zip(free_slots, vals):
                B[r, c] = v
            out.append(Subspace(ambient_dim, p, tuple(tuple(int(x) for x in row) for row in B)))
    out.sort(key=lambda s: s.basis)
    return out
