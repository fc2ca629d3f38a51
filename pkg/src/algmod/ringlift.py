"""Finite commutative rings of order p^n and their reduction to F_p-algebras.

A ring is stored through its additive group G = Z/p^{a_1} x ... x Z/p^{a_m}
(a descending), the products x_i x_j of the standard generators as elements
of G, and the identity element.  Group elements are coordinate vectors with
entry k reduced mod p^{a_k}.

The reduction uses the elements y_{ij} = p^j x_i (0 <= j < a_i), ordered by
i then j.  Every group element has a unique base-p digit expansion in the
y_{ij}; the digits of y_{ij} y_{kl} give the structure constants of a rank-n
F_p-algebra.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .algebra import BasedAlgebra, StructureTable, violations
from .enumeration import classify
from .exactla import check_budget, is_prime


@dataclass(frozen=True, eq=False)
class FiniteRing:
    p: int
    a: tuple[int, ...]
    mult: np.ndarray  # (m, m, m): mult[i, j] is x_i x_j
    one: np.ndarray | None

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        m = len(self.a)
        mult = np.asarray(self.mult, dtype=np.int64).reshape(m, m, m) % self.orders
        mult.flags.writeable = False
        object.__setattr__(self, "mult", mult)
        if self.one is not None:
            one = np.asarray(self.one, dtype=np.int64).reshape(m) % self.orders
            one.flags.writeable = False
            object.__setattr__(self, "one", one)

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def n(self) -> int:
        return sum(self.a)

    @property
    def orders(self) -> np.ndarray:
        return np.array([self.p**k for k in self.a], dtype=np.int64)

    def reduce(self, g) -> np.ndarray:
        return np.asarray(g, dtype=np.int64) % self.orders

    def mul(self, u, v) -> np.ndarray:
        return self.reduce(np.einsum("i,j,ijk->k", np.asarray(u), np.asarray(v), self.mult))

    def elements(self) -> np.ndarray:
        return np.array(list(itertools.product(*(range(o) for o in self.orders))), dtype=np.int64).reshape(-1, self.m)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "a": list(self.a),
            "mult": self.mult.tolist(),
            "one": None if self.one is None else self.one.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteRing":
        return cls(int(obj["p"]), tuple(obj["a"]), np.asarray(obj["mult"]), obj.get("one"))

    def key(self) -> tuple:
        one = () if self.one is None else tuple(int(x) for x in self.one)
        return (self.p, self.a, tuple(int(x) for x in self.mult.flat), one)


class DigitCarryError(ValueError):
    """The digit table of a ring fails the algebra identities for the chosen generators.

    Digit expansion is not additive, so for some generator choices (x = 2 in
    Z/9 is the smallest) the reduced table is not a based algebra.
    """


@dataclass(frozen=True)
class RingViolation:
    kind: str  # "order", "comm", "assoc", "unit"
    index: tuple[int, ...]


def ring_violations(R: FiniteRing) -> list[RingViolation]:
    p, m, orders = R.p, R.m, R.orders
    out: list[RingViolation] = []
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    # p^{a_i} x_i = 0 forces p^{a_i} (x_i x_j) = 0
    for i, j in itertools.product(range(m), repeat=2):
        if ((orders[i] * R.mult[i, j]) % orders).any():
            out.append(RingViolation("order", (i, j)))
    for i, j in itertools.product(range(m), repeat=2):
        if not np.array_equal(R.mult[i, j], R.mult[j, i]):
            out.append(RingViolation("comm", (i, j)))
    eye = np.eye(m, dtype=np.int64)
    for i, j, k in itertools.product(range(m), repeat=3):
        left = R.mul(R.mult[i, j], eye[k])
        right = R.mul(eye[i], R.mult[j, k])
        if not np.array_equal(left, right):
            out.append(RingViolation("assoc", (i, j, k)))
    if R.one is None:
        out.append(RingViolation("unit", ()))
    else:
        for j in range(m):
            if not np.array_equal(R.mul(R.one, eye[j]), eye[j]):
                out.append(RingViolation("unit", (j,)))
    return out


def validate_ring(R: FiniteRing) -> list[RingViolation]:
    """Empty list when R is a commutative unital ring."""
    return ring_violations(R)


def find_one(p: int, a: tuple[int, ...], mult) -> np.ndarray | None:
    """The identity element for the given products, if one exists."""
    R = FiniteRing(p, a, mult, None)
    eye = np.eye(R.m, dtype=np.int64)
    for g in R.elements():
        if all(np.array_equal(R.mul(g, eye[j]), eye[j]) for j in range(R.m)):
            return g
    return None


# -- reduction to F_p-algebras -------------------------------------------------------


def _y_index(a: tuple[int, ...]) -> list[tuple[int, int]]:
    return [(i, j) for i in range(len(a)) for j in range(a[i])]


def digits(R: FiniteRing, g) -> np.ndarray:
    """Base-p digits of g on the elements y_{ij} = p^j x_i."""
    g = R.reduce(g)
    out = []
    for i, ai in enumerate(R.a):
        v = int(g[i])
        for _ in range(ai):
            out.append(v % R.p)
            v //= R.p
    return np.array(out, dtype=np.int64)


def to_fp_algebra(R: FiniteRing) -> tuple[tuple[int, ...], BasedAlgebra]:
    """(a, A): A is the F_p-algebra whose constants are the digits of y_{ij} y_{kl}."""
    if validate_ring(R):
        raise ValueError("ring fails validation")
    p, n = R.p, R.n
    ys = _y_index(R.a)
    eye = np.eye(R.m, dtype=np.int64)
    elems = [p**j * eye[i] for i, j in ys]
    c = np.zeros((n, n, n), dtype=np.int64)
    for s, u in enumerate(elems):
        for t, v in enumerate(elems):
            c[s, t] = digits(R, R.mul(u, v))
    d = digits(R, R.one)
    table = StructureTable(n, p, c, d)
    bad = violations(table)
    if bad:
        raise DigitCarryError(f"reduced table is not a based algebra: {', '.join(map(str, bad[:5]))}")
    return R.a, BasedAlgebra(table)


# -- enumeration ---------------------------------------------------------------------


def partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of n as descending tuples, in descending lexicographic order."""
    if n == 0:
        return [()]
    largest = n if largest is None else largest
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return out


def additive_automorphisms(p: int, a: tuple[int, ...]) -> list[tuple[np.ndarray, dict]]:
    """All automorphisms of G as (images of generators, inverse lookup on elements)."""
    orders = np.array([p**k for k in a], dtype=np.int64)
    elems = np.array(list(itertools.product(*(range(o) for o in orders))), dtype=np.int64).reshape(-1, len(a))
    size = len(elems)
    # candidate images of x_i: elements killed by p^{a_i}
    cands = [[g for g in elems if not ((orders[i] * g) % orders).any()] for i in range(len(a))]
    out = []
    for imgs in itertools.product(*cands):
        phi = np.array(imgs, dtype=np.int64).reshape(len(a), len(a))
        images = (elems @ phi) % orders
        keys = {tuple(int(x) for x in row): k for k, row in enumerate(images)}
        if len(keys) != size:
            continue
        inverse = {key: elems[k] for key, k in keys.items()}
        out.append((phi, inverse))
    return out


def _transport(R: FiniteRing, phi: np.ndarray, inverse: dict) -> tuple:
    """Key of the table of R with respect to the generators phi(x_i)."""
    m = R.m
    mult = np.zeros((m, m, m), dtype=np.int64)
    for i, j in itertools.product(range(m), repeat=2):
        prod = R.mul(phi[i], phi[j])
        mult[i, j] = inverse[tuple(int(x) for x in prod)]
    one = inverse[tuple(int(x) for x in R.one)]
    return tuple(int(x) for x in mult.flat) + tuple(int(x) for x in one)


def canonical_key(R: FiniteRing, autos=None) -> tuple:
    autos = additive_automorphisms(R.p, R.a) if autos is None else autos
    return (R.a, min(_transport(R, phi, inv) for phi, inv in autos))


def enumerate_rings(p: int, n: int, budget: int | None = None) -> list[FiniteRing]:
    """Commutative unital rings of order p^n up to isomorphism, by brute force."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    rings = []
    for a in partitions(n):
        m = len(a)
        orders = [p**k for k in a]
        group = list(itertools.product(*(range(o) for o in orders)))
        pairs = [(i, j) for i in range(m) for j in range(i, m)]
        check_budget(len(group) ** len(pairs), "ring multiplication tables", budget)
        autos = additive_automorphisms(p, a)
        seen = set()
        for choice in itertools.product(group, repeat=len(pairs)):
            mult = np.zeros((m, m, m), dtype=np.int64)
            for (i, j), g in zip(pairs, choice):
                mult[i, j] = g
                mult[j, i] = g
            one = find_one(p, a, mult)
            if one is None:
                continue
            R = FiniteRing(p, a, mult, one)
            if validate_ring(R):
                continue
            key = canonical_key(R, autos)
            if key in seen:
                continue
            seen.add(key)
            rings.append(R)
    return rings


def ring_count_bound(p: int, n: int, algebra_classes: int) -> int:
    return p ** (n * n + n) * algebra_classes


def bound_check(p: int, n: int, ring_count: int | None = None, algebra_classes: int | None = None) -> bool:
    """#rings of order p^n <= p^(n^2+n) * #(rank-n F_p-algebra classes)."""
    if ring_count is None:
        ring_count = len(enumerate_rings(p, n))
    if algebra_classes is None:
        algebra_classes = len(classify(n, p))
    return ring_count <= ring_count_bound(p, n, algebra_classes)


def make_zmod(p: int, k: int) -> FiniteRing:
    """Z/p^k."""
    return FiniteRing(p, (k,), [[[1]]], [1])


def make_product_fp(p: int, m: int) -> FiniteRing:
    """F_p^m with coordinatewise multiplication."""
    mult = np.zeros((m, m, m), dtype=np.int64)
    for i in range(m):
        mult[i, i, i] = 1
    return FiniteRing(p, (1,) * m, mult, np.ones(m, dtype=np.int64))


def additive_order(R: FiniteRing, g) -> int:
    g = R.reduce(g)
    orders = R.orders
    return max((int(o) // math.gcd(int(x), int(o)) for x, o in zip(g, orders)), default=1)
