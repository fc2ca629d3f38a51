"""Local structure of finite algebras over F_p.

Nilradical and idempotent decomposition, the m-adic filtration, good bases
and minimal generating subspaces for symmetric bilinear maps V x V -> W, and
the canonical data that pins down a local algebra with residue field F_p.

Canonical data keeps the filtration-style indexing of the construction: a
basis element is g[i, j] with i the m-adic degree and j = 1..m_i.  Constants
are stored as (i, j, l, u, v) -> value meaning g[i,j] * g[1,l] has coefficient
``value`` on g[u,v].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .algebra import BasedAlgebra, InvalidStructure, StructureTable, multiply, power, validate
from .exactla import (
    BudgetExceeded,
    Subspace,
    all_vectors,
    check_budget,
    inverse_mod,
    is_prime,
    iterate_subspaces,
    rank,
    rre_form,
    search_budget,
    solve_affine,
)


class NotLocalError(ValueError):
    pass


# -- radical and idempotents -------------------------------------------------


def _frobenius_matrix(A: BasedAlgebra) -> np.ndarray:
    p, n = A.modulus, A.n
    e = 1
    while p**e < n:
        e += 1
    cols = [power(A, np.eye(n, dtype=np.int64)[i], p**e) for i in range(n)]
    return np.array(cols, dtype=np.int64).T


def nilradical(A: BasedAlgebra) -> Subspace:
    """Nilpotent elements, as the kernel of the additive map x -> x^(p^k), p^k >= n."""
    if not is_prime(A.modulus):
        raise ValueError("nilradical needs a prime field")
    if A.n == 0:
        return Subspace.zero(0, A.modulus)
    return rre_form(_frobenius_matrix(A), A.modulus).kernel


def product_space(A: BasedAlgebra, U: Subspace, V: Subspace) -> Subspace:
    """span{u v : u in U, v in V}."""
    if not U.dim or not V.dim:
        return Subspace.zero(A.n, A.modulus)
    prods = np.einsum("ai,bj,ijl->abl", U.matrix, V.matrix, A.c).reshape(-1, A.n) % A.modulus
    return Subspace.span(prods, A.n, A.modulus)


def radical_powers(A: BasedAlgebra) -> list[Subspace]:
    """[N^0 = A, N^1, ..., N^t, 0] for the nilradical N."""
    N = nilradical(A)
    powers = [Subspace.full(A.n, A.modulus), N]
    while powers[-1].dim:
        powers.append(product_space(A, powers[-1], N))
    return powers


def radical_signature(A: BasedAlgebra) -> tuple[int, ...]:
    """dim N^i / N^(i+1) for i >= 0 (N^0 = A); an isomorphism invariant."""
    pw = radical_powers(A)
    return tuple(pw[i].dim - pw[i + 1].dim for i in range(len(pw) - 1))


def idempotents(A: BasedAlgebra, budget: int | None = None) -> np.ndarray:
    """All idempotents, by exhaustive scan, in lexicographic order (rows)."""
    q = A.modulus
    check_budget(q**A.n, "idempotent scan", budget)
    X = all_vectors(A.n, q)
    sq = np.einsum("ni,nj,ijl->nl", X, X, A.c) % q
    return X[(sq == X).all(axis=1)]


def primitive_idempotents(A: BasedAlgebra, budget: int | None = None) -> list[np.ndarray]:
    idem = idempotents(A, budget)
    nonzero = [e for e in idem if e.any()]
    prim = []
    for e in nonzero:
        below = [f for f in nonzero if not np.array_equal(f, e) and np.array_equal(multiply(A, e, f), f)]
        if not below:
            prim.append(e)
    return prim


def subalgebra_on(A: BasedAlgebra, basis: np.ndarray, one) -> BasedAlgebra:
    """Algebra structure on span(basis) (closed under products) with identity ``one``."""
    p = A.modulus
    r = basis.shape[0]
    sub = Subspace.span(basis, A.n, p)
    # coordinates w.r.t. ``basis``: solve via the echelon basis of the span
    to_ech = np.array([sub.coordinates(b) for b in basis], dtype=np.int64)  # r x r
    from_ech = inverse_mod(to_ech, p) if r else to_ech

    def coords(v):
        ech = sub.coordinates(v)
        if ech is None:
            raise ValueError("product leaves the subspace")
        return ech @ from_ech % p

    c = np.zeros((r, r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            c[i, j] = coords(multiply(A, basis[i], basis[j]))
    return validate(StructureTable(r, p, c, coords(one)))


def decompose_local(A: BasedAlgebra, budget: int | None = None) -> list[BasedAlgebra]:
    """Local factors e*A for the primitive idempotents e (lex order of e)."""
    factors = []
    for e in primitive_idempotents(A, budget):
        ideal = Subspace.span(A.left_op(e).T, A.n, A.modulus)
        factors.append(subalgebra_on(A, ideal.matrix, e))
    return factors


def is_local(A: BasedAlgebra) -> bool:
    """Local iff A/N is a field; decided via the idempotents 0 and 1 only."""
    if nilradical(A).dim == A.n - 1:
        return True
    return len(idempotents(A)) == 2


# -- filtration --------------------------------------------------------------


@dataclass(frozen=True)
class Filtration:
    dims: tuple[int, ...]
    powers: tuple[Subspace, ...]  # m^0 = A, m^1, ..., m^{t+1} = 0


def filtration(A: BasedAlgebra) -> Filtration:
    N = nilradical(A)
    if N.dim != A.n - 1:
        if A.modulus ** A.n <= search_budget() and len(idempotents(A)) > 2:
            raise NotLocalError("algebra is not local")
        raise NotLocalError("residue field is larger than F_p (or algebra not local)")
    pw = radical_powers(A)
    dims = tuple(pw[i].dim - pw[i + 1].dim for i in range(len(pw) - 1))
    return Filtration(dims, tuple(pw))


# -- symmetric bilinear maps ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymBilinearMap:
    """values[a, b] = (x_a, x_b) in coordinates of W; symmetric in a, b."""

    dimV: int
    dimW: int
    modulus: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.mod(np.asarray(self.values, dtype=np.int64).reshape(self.dimV, self.dimV, self.dimW), self.modulus)
        if not np.array_equal(vals, vals.transpose(1, 0, 2)):
            raise ValueError("bilinear map is not symmetric")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def pair(self, u, v) -> np.ndarray:
        return np.einsum("a,b,abw->w", np.asarray(u), np.asarray(v), self.values) % self.modulus

    def image(self, U: Subspace | None = None) -> Subspace:
        """(U, U) as a subspace of W; U defaults to V."""
        p = self.modulus
        B = np.eye(self.dimV, dtype=np.int64) if U is None else U.matrix
        if B.shape[0] == 0 or self.dimW == 0:
            return Subspace.zero(self.dimW, p)
        prods = np.einsum("ai,bj,ijw->abw", B, B, self.values).reshape(-1, self.dimW) % p
        return Subspace.span(prods, self.dimW, p)

    def restrict(self, U: Subspace) -> "SymBilinearMap":
        """The map on U (echelon basis of U) with values in coordinates of (U, U)."""
        img = self.image(U)
        B = U.matrix
        vals = np.einsum("ai,bj,ijw->abw", B, B, self.values) % self.modulus
        out = np.zeros((U.dim, U.dim, img.dim), dtype=np.int64)
        for a in range(U.dim):
            for b in range(U.dim):
                out[a, b] = img.coordinates(vals[a, b])
        return SymBilinearMap(U.dim, img.dim, self.modulus, out)


def min_generating_subspace(f: SymBilinearMap, budget: int | None = None) -> Subspace:
    """First subspace U of least dimension (fixed order) with (U, U) = (V, V)."""
    p = f.modulus
    target = f.image()
    if target.dim == 0:
        return Subspace.zero(f.dimV, p)
    k = 1
    while k * (k + 1) // 2 < target.dim:
        k += 1
    for dim in range(k, f.dimV + 1):
        for U in iterate_subspaces(f.dimV, dim, p, budget):
            if f.image(U) == target:
                return U
    raise AssertionError("V itself generates (V, V)")


def _projective_points(m: int, p: int) -> list[np.ndarray]:
    vecs = all_vectors(m, p)
    out = []
    for v in vecs:
        nz = np.nonzero(v)[0]
        if nz.size and v[nz[0]] == 1:
            out.append(v)
    return out


def check_good_basis(f: SymBilinearMap, basis: np.ndarray) -> bool:
    """(x_i, x_{i+1}) not in (V_i, V_i) for 1 <= i <= m-1, and basis spans V."""
    p = f.modulus
    if rank(basis, p) != f.dimV or basis.shape[0] != f.dimV:
        return False
    for i in range(1, f.dimV):
        Vi = Subspace.span(basis[:i], f.dimV, p)
        if f.image(Vi).contains(f.pair(basis[i - 1], basis[i])):
            return False
    return True


class GoodBasisError(ValueError):
    pass


def good_basis(f: SymBilinearMap, budget: int | None = None) -> np.ndarray:
    """A basis x_1..x_m with (x_i, x_{i+1}) outside (V_i, V_i), as rows.

    Backtracking over projective representatives in lexicographic order.
    Requires (V, V) = W with no proper subspace generating W.
    """
    p, m = f.modulus, f.dimV
    if f.image().dim != f.dimW:
        raise GoodBasisError("precondition violated: (V, V) != W")
    if m and min_generating_subspace(f, budget).dim != m:
        raise GoodBasisError("precondition violated: a proper subspace generates W")
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    points = _projective_points(m, p)
    limit = search_budget() if budget is None else budget
    nodes = 0

    def rec(chosen: list[np.ndarray], span: Subspace) -> list[np.ndarray] | None:
        nonlocal nodes
        if len(chosen) == m:
            return chosen
        Wi = f.image(span)
        for x in points:
            nodes += 1
            if nodes > limit:
                raise BudgetExceeded("good basis search exceeded budget")
            if span.contains(x):
                continue
            if chosen and Wi.contains(f.pair(chosen[-1], x)):
                continue
            found = rec(chosen + [x], span.join([x]))
            if found is not None:
                return found
        return None

    found = rec([], Subspace.zero(m, p))
    if found is None:
        raise GoodBasisError("no good basis exists; precondition must have failed")
    basis = np.array(found, dtype=np.int64)
    assert check_good_basis(f, basis)
    return basis


# -- canonical data -----------------------------------------------------------


@dataclass
class CanonicalData:
    m_seq: tuple[int, ...]
    s: int
    w_dims: tuple[int, ...]
    constants: dict[tuple[int, int, int, int, int], int]
    q: int

    def to_json(self) -> dict:
        rows = [[*k, v] for k, v in sorted(self.constants.items())]
        return {"m_seq": list(self.m_seq), "s": self.s, "w_dims": list(self.w_dims), "constants": rows, "q": self.q}

    @classmethod
    def from_json(cls, obj: dict) -> "CanonicalData":
        consts = {tuple(int(x) for x in row[:5]): int(row[5]) for row in obj["constants"]}
        return cls(tuple(obj["m_seq"]), int(obj["s"]), tuple(obj["w_dims"]), consts, int(obj["q"]))


def constant_index_set(m_seq, s: int, w_dims) -> Iterator[tuple[int, int, int, int, int]]:
    """Index tuples (i, j, l, u, v) whose constants determine the algebra."""
    t = len(m_seq) - 1
    m = lambda u: m_seq[u] if u <= t else 0  # noqa: E731
    m1, m2 = m(1), m(2)
    for j in range(1, m1 + 1):
        for l in range(j, m1 + 1):
            for u in range(2, t + 1):
                for v in range(1, m(u) + 1):
                    yield (1, j, l, u, v)
    for l in range(1, s + 1):
        for j in range(w_dims[l - 1] + 1, m2 + 1):
            for u in range(3, t + 1):
                for v in range(1, m(u) + 1):
                    yield (2, j, l, u, v)
    for i in range(3, t + 1):
        for j in range(1, m(i) + 1):
            for l in range(1, s + 1):
                for u in range(i + 1, t + 1):
                    for v in range(1, m(u) + 1):
                        yield (i, j, l, u, v)


class _Graded:
    """Coordinates of A adapted to the powers of m: lifts of each m^i/m^(i+1)."""

    def __init__(self, A: BasedAlgebra, filt: Filtration):
        self.A = A
        self.p = A.modulus
        self.filt = filt
        self.lifts: list[np.ndarray] = []
        for i in range(len(filt.dims)):
            hi, lo = filt.powers[i], filt.powers[i + 1]
            chosen, span = [], lo
            for row in hi.matrix:
                if not span.contains(row):
                    chosen.append(row)
                    span = span.join([row])
            self.lifts.append(np.array(chosen, dtype=np.int64).reshape(-1, A.n))

    def quotient_coords(self, i: int, v) -> np.ndarray:
        """Coordinates of v in m^i/m^(i+1) w.r.t. lifts[i]; v must lie in m^i."""
        lo = self.filt.powers[i + 1]
        M = np.vstack([self.lifts[i], lo.matrix]) if lo.dim else self.lifts[i]
        x = solve_affine(M.T, v, self.p)
        if x is None:
            raise ValueError(f"vector not in m^{i}")
        return x[: self.lifts[i].shape[0]]


def _extend_to_basis(vectors: list[np.ndarray], dim: int, p: int) -> list[np.ndarray]:
    span = Subspace.span(vectors, dim, p) if vectors else Subspace.zero(dim, p)
    out = list(vectors)
    for i in range(dim):
        e = np.zeros(dim, dtype=np.int64)
        e[i] = 1
        if not span.contains(e):
            out.append(e)
            span = span.join([e])
    return out


@dataclass
class Extraction:
    """Canonical data together with the basis g[i, j] used (columns in A-coordinates)."""

    data: CanonicalData
    g: dict[tuple[int, int], np.ndarray] = field(repr=False)
    good_basis: np.ndarray = field(repr=False)
    y_pairs: list[tuple[int, int]] = field(repr=False)


def extract_canonical(A: BasedAlgebra, budget: int | None = None) -> CanonicalData:
    return extract_canonical_full(A, budget).data


def extract_canonical_full(A: BasedAlgebra, budget: int | None = None) -> Extraction:
    p = A.modulus
    filt = filtration(A)
    ms = filt.dims
    t = len(ms) - 1
    gr = _Graded(A, filt)
    m1 = ms[1] if t >= 1 else 0
    m2 = ms[2] if t >= 2 else 0

    # bilinear map V x V -> W on the chosen lifts of V = m/m^2
    U = gr.lifts[1] if t >= 1 else np.zeros((0, A.n), dtype=np.int64)
    vals = np.zeros((m1, m1, m2), dtype=np.int64)
    if m2:
        for a in range(m1):
            for b in range(m1):
                vals[a, b] = gr.quotient_coords(2, multiply(A, U[a], U[b]))
    f = SymBilinearMap(m1, m2, p, vals)

    Vbar = min_generating_subspace(f, budget)
    s = Vbar.dim
    assert s <= m2 + 1
    if s:
        gb_local = good_basis(f.restrict(Vbar), budget)
        xs = [(row @ Vbar.matrix) % p for row in gb_local]
    else:
        xs = []
    # W_i = (V_i, V_i) and the y-basis, each y_j = (x_b, x_i) with least b
    w_dims = [0]
    y_pairs: list[tuple[int, int]] = []
    Wspan = Subspace.zero(m2, p)
    for i in range(1, s + 1):
        for b in range(1, i + 1):
            y = f.pair(xs[b - 1], xs[i - 1])
            if not Wspan.contains(y):
                y_pairs.append((b, i))
                Wspan = Wspan.join([y])
        w_dims.append(Wspan.dim)
        assert Wspan == f.image(Subspace.span(xs[:i], m1, p))
    assert w_dims[-1] == m2

    xs_full = _extend_to_basis(xs, m1, p) if m1 else []
    g: dict[tuple[int, int], np.ndarray] = {(0, 1): A.d.copy()}
    for i, x in enumerate(xs_full, start=1):
        g[(1, i)] = (x @ U) % p
    for j, (b, i) in enumerate(y_pairs, start=1):
        g[(2, j)] = multiply(A, g[(1, b)], g[(1, i)])

    for deg in range(3, t + 1):
        chosen = []
        span = Subspace.zero(ms[deg], p)
        for l in range(1, s + 1):
            for r in range(1, ms[deg - 1] + 1):
                w = multiply(A, g[(deg - 1, r)], g[(1, l)])
                cls = gr.quotient_coords(deg, w)
                if not span.contains(cls):
                    if deg == 3:
                        assert r > w_dims[l - 1], "stage constraint r > w_{l-1} failed"
                    chosen.append(w)
                    span = span.join([cls])
        # surjectivity of m^{deg-1}/m^deg (x) Vbar -> m^deg/m^{deg+1}
        assert span.dim == ms[deg], f"multiplication onto m^{deg}/m^{deg + 1} is not surjective"
        for j, w in enumerate(chosen, start=1):
            g[(deg, j)] = w

    order = [(i, j) for i in range(t + 1) for j in range(1, ms[i] + 1)]
    G = np.array([g[k] for k in order], dtype=np.int64).T
    Ginv = inverse_mod(G, p)
    pos = {k: idx for idx, k in enumerate(order)}

    constants: dict[tuple[int, int, int, int, int], int] = {}
    cache: dict[tuple[int, int, int], np.ndarray] = {}
    for key in constant_index_set(ms, s, tuple(w_dims)):
        i, j, l, u, v = key
        if (i, j, l) not in cache:
            cache[(i, j, l)] = Ginv @ multiply(A, g[(i, j)], g[(1, l)]) % p
        constants[key] = int(cache[(i, j, l)][pos[(u, v)]])

    data = CanonicalData(tuple(ms), s, tuple(w_dims), constants, p)
    xs_arr = np.array(xs, dtype=np.int64).reshape(len(xs), m1)
    return Extraction(data, g, xs_arr, y_pairs)


class InconsistentData(ValueError):
    pass


def reconstruct(data: CanonicalData) -> BasedAlgebra:
    """Rebuild the local algebra on basis g[i, j] from its canonical data.

    Multiplication by each g[1, l] is recovered by the double induction
    (first l <= s by strong induction on l, then all l by induction on the
    degree); products g[i,j] = g[i-1,r] g[1,b] are located from the data.
    """
    p, ms, s, w = data.q, tuple(data.m_seq), data.s, tuple(data.w_dims)
    t = len(ms) - 1
    order = [(i, j) for i in range(t + 1) for j in range(1, ms[i] + 1)]
    pos = {k: idx for idx, k in enumerate(order)}
    n = len(order)
    m1 = ms[1] if t >= 1 else 0
    m2 = ms[2] if t >= 2 else 0
    if ms[0] != 1 or sum(ms) != n:
        raise InconsistentData("m_seq must start with 1")
    if len(w) != s + 1 or w[0] != 0 or (s and w[-1] != m2) or any(a >= b for a, b in zip(w[1:], w[2:])):
        raise InconsistentData(f"w_dims {w} inconsistent with s={s}, m_2={m2}")
    if s > m1:
        raise InconsistentData("s exceeds m_1")

    def const(key) -> int:
        try:
            return data.constants[key] % p
        except KeyError:
            raise InconsistentData(f"missing constant c{key}") from None

    def unit(k) -> np.ndarray:
        e = np.zeros(n, dtype=np.int64)
        e[pos[k]] = 1
        return e

    def given(i, j, l, lo) -> np.ndarray:
        vec = np.zeros(n, dtype=np.int64)
        for u in range(lo, t + 1):
            for v in range(1, ms[u] + 1):
                vec[pos[(u, v)]] = const((i, j, l, u, v))
        return vec

    # L[l][:, pos[(i,j)]] = coordinates of g[i,j] * g[1,l]
    L = {l: np.full((n, n), -1, dtype=np.int64) for l in range(1, m1 + 1)}

    def known(l, k) -> bool:
        return L[l][0, pos[k]] >= 0

    def apply(l, vec) -> np.ndarray:
        cols = [pos[k] for k in order if vec[pos[k]]]
        if any(L[l][0, c] < 0 for c in cols):
            raise InconsistentData(f"product by g[1,{l}] needed before it is determined")
        return L[l][:, cols] @ vec[cols] % p if cols else np.zeros(n, dtype=np.int64)

    for l in range(1, m1 + 1):
        L[l][:, pos[(0, 1)]] = unit((1, l))
        for j in range(1, m1 + 1):
            a, b = min(j, l), max(j, l)
            L[l][:, pos[(1, j)]] = given(1, a, b, 2)

    def find_pair(j: int, cmax: int) -> tuple[int, int]:
        """(b, c) with b <= c <= cmax and g[1,b] g[1,c] = g[2,j] exactly."""
        target = unit((2, j))
        for c in range(1, cmax + 1):
            for b in range(1, c + 1):
                if np.array_equal(given(1, b, c, 2), target):
                    return b, c
        raise InconsistentData(f"g[2,{j}] is not a product g[1,b] g[1,c] with c <= {cmax}")

    # l <= s, degree 2, strong induction on l
    for l in range(1, s + 1):
        for j in range(1, m2 + 1):
            if j > w[l - 1]:
                L[l][:, pos[(2, j)]] = given(2, j, l, 3)
            else:
                b, c = find_pair(j, l - 1)
                L[l][:, pos[(2, j)]] = apply(c, given(1, b, l, 2))
        for i in range(3, t + 1):
            for j in range(1, ms[i] + 1):
                L[l][:, pos[(i, j)]] = given(i, j, l, i + 1)

    # how each g[i,j] (i >= 2) factors through a generator g[1,b] with b <= s
    factor: dict[tuple[int, int], tuple[tuple[int, int], int]] = {}
    for j in range(1, m2 + 1):
        b, c = find_pair(j, s)
        factor[(2, j)] = ((1, b), c)
    for i in range(3, t + 1):
        for j in range(1, ms[i] + 1):
            target = unit((i, j))
            hit = None
            for b in range(1, s + 1):
                for r in range(1, ms[i - 1] + 1):
                    if np.array_equal(L[b][:, pos[(i - 1, r)]], target):
                        hit = ((i - 1, r), b)
                        break
                if hit:
                    break
            if hit is None:
                raise InconsistentData(f"g[{i},{j}] is not a product g[{i - 1},r] g[1,b] with b <= s")
            factor[(i, j)] = hit

    # remaining l > s by induction on degree
    for l in range(s + 1, m1 + 1):
        for i in range(2, t + 1):
            for j in range(1, ms[i] + 1):
                prev, b = factor[(i, j)]
                L[l][:, pos[(i, j)]] = apply(b, L[l][:, pos[prev]])

    if any((L[l] < 0).any() for l in L):
        raise InconsistentData("multiplication left undetermined")

    # full multiplication operators
    ops: dict[tuple[int, int], np.ndarray] = {(0, 1): np.eye(n, dtype=np.int64)}
    for l in range(1, m1 + 1):
        ops[(1, l)] = L[l]
    for i in range(2, t + 1):
        for j in range(1, ms[i] + 1):
            prev, b = factor[(i, j)]
            ops[(i, j)] = L[b] @ ops[prev] % p
    c = np.zeros((n, n, n), dtype=np.int64)
    for a, ka in enumerate(order):
        c[a] = ops[ka].T
    d = unit((0, 1))
    try:
        A = validate(StructureTable(n, p, c, d))
    except InvalidStructure as exc:
        raise InconsistentData(f"reconstructed table is not an algebra: {exc}") from None
    # the recorded constants must be reproduced
    for (i, j, l, u, v), val in data.constants.items():
        got = multiply(A, unit((i, j)), unit((1, l)))[pos[(u, v)]]
        if got != val % p:
            raise InconsistentData(f"constant c{(i, j, l, u, v)} conflicts with the rebuilt product")
    return A


def is_ideal(A: BasedAlgebra, S: Subspace) -> bool:
    return all(S.contains(multiply(A, e, x)) for e in np.eye(A.n, dtype=np.int64) for x in S.matrix)

