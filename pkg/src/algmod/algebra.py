"""Based commutative algebras given by structure constants.

A based rank-n algebra over Z/m is stored as ``c[i, j, l]`` (the coefficient
of e_l in e_i * e_j) together with ``d``, the coordinates of the identity.
Indices are 0-based in code and in JSON; human-readable reports add 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .exactla import Subspace, det_mod, is_prime, solve_affine


def _frozen(arr) -> np.ndarray:
    a = np.array(arr, dtype=np.int64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StructureTable:
    """Raw candidate point (n, modulus, c, d); no algebraic laws assumed."""

    n: int
    modulus: int
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.int64).reshape(self.n, self.n, self.n)
        d = np.asarray(self.d, dtype=np.int64).reshape(self.n)
        object.__setattr__(self, "c", _frozen(np.mod(c, self.modulus)))
        object.__setattr__(self, "d", _frozen(np.mod(d, self.modulus)))

    def key(self) -> tuple[int, ...]:
        """Flattened (c, d) entries; the fixed order on tables is lex on this."""
        return tuple(int(x) for x in self.c.flat) + tuple(int(x) for x in self.d)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StructureTable)
            and self.n == other.n
            and self.modulus == other.modulus
            and np.array_equal(self.c, other.c)
            and np.array_equal(self.d, other.d)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.modulus, self.key()))

    def to_json(self) -> dict:
        return {"n": self.n, "modulus": self.modulus, "c": self.c.tolist(), "d": self.d.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "StructureTable":
        n, m = int(obj["n"]), int(obj["modulus"])
        c = np.asarray(obj["c"], dtype=np.int64)
        d = np.asarray(obj["d"], dtype=np.int64)
        if c.shape != (n, n, n) or d.shape != (n,):
            raise ValueError(f"table shape mismatch for n={n}: c{c.shape}, d{d.shape}")
        if (c < 0).any() or (c >= m).any() or (d < 0).any() or (d >= m).any():
            raise ValueError(f"entries must be reduced residues in [0, {m})")
        return cls(n, m, c, d)


class Violation(NamedTuple):
    kind: str  # "comm", "assoc" or "unit"
    index: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind} at {tuple(i + 1 for i in self.index)}"


class InvalidStructure(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        shown = ", ".join(str(v) for v in violations[:5])
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        super().__init__(f"{len(violations)} violated identities: {shown}{more}")


def violations(t: StructureTable) -> list[Violation]:
    """Every defining identity of the moduli space that fails for ``t``."""
    c, d, m, n = t.c, t.d, t.modulus, t.n
    out: list[Violation] = []
    comm = (c - c.transpose(1, 0, 2)) % m
    out.extend(Violation("comm", tuple(int(x) for x in idx)) for idx in np.argwhere(comm))
    assoc = (np.einsum("ijm,mkl->ijkl", c, c) - np.einsum("jkm,iml->ijkl", c, c)) % m
    out.extend(Violation("assoc", tuple(int(x) for x in idx)) for idx in np.argwhere(assoc))
    unit = (np.einsum("i,ijl->jl", d, c) - np.eye(n, dtype=np.int64)) % m
    out.extend(Violation("unit", tuple(int(x) for x in idx)) for idx in np.argwhere(unit))
    return out


class BasedAlgebra:
    """A structure table known to satisfy commutativity, associativity and unit."""

    def __init__(self, table: StructureTable):
        self.table = table

    n = property(lambda self: self.table.n)
    modulus = property(lambda self: self.table.modulus)
    c = property(lambda self: self.table.c)
    d = property(lambda self: self.table.d)

    def key(self):
        return self.table.key()

    def __eq__(self, other) -> bool:
        return isinstance(other, BasedAlgebra) and self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"BasedAlgebra(n={self.n}, modulus={self.modulus})"

    @cached_property
    def mult_ops(self) -> np.ndarray:
        """Stack of left-multiplication matrices, (M_i)[l, j] = c[i, j, l]."""
        return _frozen(self.c.transpose(0, 2, 1))

    @cached_property
    def trace_vec(self) -> np.ndarray:
        return _frozen(np.einsum("mll->m", self.c) % self.modulus)

    @cached_property
    def normalized(self) -> bool:
        n = self.n
        if n == 0:
            return True
        e1 = np.zeros(n, dtype=np.int64)
        e1[0] = 1
        eye = np.eye(n, dtype=np.int64)
        return bool(
            np.array_equal(self.d, e1) and np.array_equal(self.c[0], eye) and np.array_equal(self.c[:, 0, :], eye)
        )

    @cached_property
    def one(self) -> np.ndarray:
        return self.d

    def mul(self, u, v) -> np.ndarray:
        return multiply(self, u, v)

    def left_op(self, u) -> np.ndarray:
        """Matrix of y -> u*y."""
        u = np.asarray(u, dtype=np.int64)
        return np.einsum("i,ilj->lj", u, self.mult_ops) % self.modulus

    def to_json(self) -> dict:
        return self.table.to_json()


def validate(t: StructureTable) -> BasedAlgebra:
    """Return the based algebra, or raise InvalidStructure listing every violation."""
    bad = violations(t)
    if bad:
        raise InvalidStructure(bad)
    return BasedAlgebra(t)


def is_valid(t: StructureTable) -> bool:
    return not violations(t)


def multiply(A: BasedAlgebra, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != (A.n,) or v.shape != (A.n,):
        raise ValueError(f"vectors must have length {A.n}")
    return np.einsum("i,j,ijl->l", u, v, A.c) % A.modulus


def power(A: BasedAlgebra, u, e: int) -> np.ndarray:
    result = A.d.copy()
    base = np.asarray(u, dtype=np.int64) % A.modulus
    while e:
        if e & 1:
            result = multiply(A, result, base)
        base = multiply(A, base, base)
        e >>= 1
    return result


def trace_form(A: BasedAlgebra) -> np.ndarray:
    """Gram matrix Tr(e_i e_j) with Tr the regular-representation trace."""
    return np.einsum("ijm,m->ij", A.c, A.trace_vec) % A.modulus


def discriminant(A: BasedAlgebra) -> int:
    if A.n == 0:
        return 1 % A.modulus
    return det_mod(trace_form(A), A.modulus)


def is_etale(A: BasedAlgebra) -> bool:
    return discriminant(A) != 0


# -- constructors -----------------------------------------------------------


def from_arrays(c, d, modulus: int) -> BasedAlgebra:
    c = np.asarray(c, dtype=np.int64)
    return validate(StructureTable(c.shape[0], modulus, c, d))


def make_split(n: int, q: int) -> BasedAlgebra:
    c = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        c[i, i, i] = 1
    return from_arrays(c, np.ones(n, dtype=np.int64), q)


def _normalized_from_products(n: int, q: int, products: np.ndarray) -> BasedAlgebra:
    """Build a table in B^1 form given e_i e_j (i, j >= 1) as ``products``."""
    c = np.zeros((n, n, n), dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    c[0] = eye
    c[:, 0, :] = eye
    if n > 1:
        c[1:, 1:, :] = products
    d = eye[0] if n else np.zeros(0, dtype=np.int64)
    return from_arrays(c, d, q)


def make_bullet(n: int, q: int) -> BasedAlgebra:
    """k[x_1..x_{n-1}]/(x_1..x_{n-1})^2 with basis 1, x_1, ..., x_{n-1}."""
    if n < 1:
        raise ValueError("bullet needs n >= 1")
    return _normalized_from_products(n, q, np.zeros((n - 1, n - 1, n), dtype=np.int64))


def make_truncated_poly(n: int, q: int) -> BasedAlgebra:
    """k[x]/x^n with basis 1, x, ..., x^{n-1}."""
    c = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i + j < n:
                c[i, j, i + j] = 1
    d = np.zeros(n, dtype=np.int64)
    if n:
        d[0] = 1
    return from_arrays(c, d, q)


def product(A: BasedAlgebra, B: BasedAlgebra) -> BasedAlgebra:
    """A x B with the concatenated basis and componentwise multiplication."""
    if A.modulus != B.modulus:
        raise ValueError("moduli differ")
    a, b = A.n, B.n
    n = a + b
    c = np.zeros((n, n, n), dtype=np.int64)
    c[:a, :a, :a] = A.c
    c[a:, a:, a:] = B.c
    return from_arrays(c, np.concatenate([A.d, B.d]), A.modulus)


def make_cubic(a: int, b: int, c: int, d: int, q: int) -> BasedAlgebra:
    """Rank-3 algebra with good basis 1, alpha, beta attached to (a, b, c, d).

    alpha^2 = -ac + b alpha - a beta, beta^2 = -bd + d alpha - c beta,
    alpha beta = -ad.
    """
    prod = np.zeros((2, 2, 3), dtype=np.int64)
    prod[0, 0] = (-a * c, b, -a)
    prod[1, 1] = (-b * d, d, -c)
    prod[0, 1] = prod[1, 0] = (-a * d, 0, 0)
    return _normalized_from_products(3, q, prod % q)


def quadratic_monomials(d: int) -> list[tuple[int, int]]:
    """Degree-2 monomials x_a x_b (a <= b) in graded lex order."""
    return [(a, b) for a in range(d) for b in range(a, d)]


def make_truncated_local(d: int, relation_span: Subspace, q: int) -> BasedAlgebra:
    """k[x_1..x_d]/m^3 modulo a subspace V of m^2/m^3.

    Basis: 1, x_1..x_d, then the lexicographically least quadratic monomials
    whose classes complete V.  ``relation_span`` lives in coordinates indexed by
    ``quadratic_monomials(d)``.
    """
    mons = quadratic_monomials(d)
    D = len(mons)
    if relation_span.ambient_dim != D:
        raise ValueError(f"relation span must live in dimension {D}")
    chosen: list[int] = []
    span = relation_span
    for idx in range(D):
        e = np.zeros(D, dtype=np.int64)
        e[idx] = 1
        if not span.contains(e):
            chosen.append(idx)
            span = span.join([e])
    r = len(chosen)
    n = 1 + d + r
    # express each monomial class in the chosen representatives
    rel = relation_span.matrix
    full = np.vstack([np.eye(D, dtype=np.int64)[chosen], rel]) if rel.size else np.eye(D, dtype=np.int64)[chosen]
    prod = np.zeros((n - 1, n - 1, n), dtype=np.int64)
    for idx, (a, b) in enumerate(mons):
        e = np.zeros(D, dtype=np.int64)
        e[idx] = 1
        coeffs = solve_affine(full.T, e, q)
        prod[a, b, 1 + d : n] = coeffs[:r]
        prod[b, a, 1 + d : n] = coeffs[:r]
    return _normalized_from_products(n, q, prod)


def relation_span_from_polys(d: int, polys: Iterable[dict[tuple[int, int], int]], q: int) -> Subspace:
    """Subspace of m^2/m^3 spanned by quadratic forms {(a, b): coeff}."""
    mons = quadratic_monomials(d)
    index = {m: i for i, m in enumerate(mons)}
    rows = []
    for poly in polys:
        v = np.zeros(len(mons), dtype=np.int64)
        for (a, b), coeff in poly.items():
            v[index[(min(a, b), max(a, b))]] += coeff
        rows.append(v % q)
    return Subspace.span(rows, len(mons), q) if rows else Subspace.zero(len(mons), q)


def make_rank8_example(q: int) -> BasedAlgebra:
    """k[a,b,c,d]/(a^2, ab, b^2, c^2, cd, d^2, ad - bc), rank 8."""
    a, b, c, d = range(4)
    polys = [{(a, a): 1}, {(a, b): 1}, {(b, b): 1}, {(c, c): 1}, {(c, d): 1}, {(d, d): 1}, {(a, d): 1, (b, c): -1}]
    return make_truncated_local(4, relation_span_from_polys(4, polys, q), q)


# -- generation and weighted scaling -----------------------------------------


def generated_subspace(A: BasedAlgebra, gens: Sequence) -> Subspace:
    """Span of all monomials in ``gens`` of total degree <= n-1 (with 1)."""
    p = A.modulus
    span = Subspace.span([A.d], A.n, p) if A.n else Subspace.zero(0, p)
    layer = [np.asarray(A.d, dtype=np.int64)]
    gens = [np.asarray(g, dtype=np.int64) % p for g in gens]
    for _ in range(max(A.n - 1, 0)):
        nxt = []
        for u in layer:
            for g in gens:
                w = multiply(A, u, g)
                if not span.contains(w):
                    span = span.join([w])
                    nxt.append(w)
        if not nxt:
            break
        layer = nxt
    return span


def generates(A: BasedAlgebra, gens: Sequence) -> bool:
    if not is_prime(A.modulus):
        raise ValueError("generation test needs a prime field")
    return generated_subspace(A, gens).dim == A.n


def scale_weighted(A: BasedAlgebra, t: int) -> StructureTable:
    """Rescale c_ij^l (i, j >= 2) by t^2 when l = 1 and by t otherwise."""
    if not A.normalized:
        raise ValueError("scale_weighted needs a table in B^1 normal form")
    m = A.modulus
    c = A.c.copy()
    c[1:, 1:, 0] = c[1:, 1:, 0] * (t * t % m) % m
    c[1:, 1:, 1:] = c[1:, 1:, 1:] * (t % m) % m
    return StructureTable(A.n, m, c, A.d)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, separators=(",", ":"))
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def load_table(path) -> StructureTable:
    with open(path) as fh:
        return StructureTable.from_json(json.load(fh))

