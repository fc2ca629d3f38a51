"""First-order deformations: tangent dimensions and the mod p^3 lifting test.

The defining identities of based algebras are polynomials in the cells
c[i][j][l] and d[i]:

    comm   c[i,j,l] - c[j,i,l]
    assoc  sum_m c[i,j,m] c[m,k,l] - c[j,k,m] c[i,m,l]
    unit   sum_i d[i] c[i,j,l] - delta(j,l)

``jacobian`` returns their partial derivatives at a point, one row per
identity, one column per cell (all n^3 c-cells, then the n d-cells).  The
tangent space is the kernel of the columns that are allowed to move.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import BasedAlgebra, StructureTable, make_split, validate
from .exactla import infeasibility_certificate, is_prime, prime_power, rank, solve_affine


def _cell(n: int, i, j, l):
    return (np.asarray(i) * n + np.asarray(j)) * n + np.asarray(l)


def identity_values(c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Integer values of all identities (no reduction), in the row order of ``jacobian``."""
    n = c.shape[0]
    comm = c - c.transpose(1, 0, 2)
    assoc = np.einsum("ijm,mkl->ijkl", c, c) - np.einsum("jkm,iml->ijkl", c, c)
    unit = np.einsum("i,ijl->jl", d, c) - np.eye(n, dtype=np.int64)
    return np.concatenate([comm.reshape(-1), assoc.reshape(-1), unit.reshape(-1)])


def jacobian(c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Integer Jacobian of the identities at (c, d); columns are c-cells then d-cells."""
    c = np.asarray(c, dtype=np.int64)
    d = np.asarray(d, dtype=np.int64)
    n = c.shape[0]
    n3 = n**3
    ncomm, nassoc, nunit = n3, n**4, n * n
    J = np.zeros((ncomm + nassoc + nunit, n3 + n), dtype=np.int64)

    i, j, l = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    rows = np.arange(n3).reshape(n, n, n)
    np.add.at(J, (rows.ravel(), _cell(n, i, j, l).ravel()), 1)
    np.add.at(J, (rows.ravel(), _cell(n, j, i, l).ravel()), -1)

    I, Jj, K, L, Mm = np.meshgrid(*(np.arange(n),) * 5, indexing="ij")
    arow = ncomm + ((I * n + Jj) * n + K) * n + L
    # d/dc[i,j,m] of c[i,j,m] c[m,k,l] and the three other monomials
    np.add.at(J, (arow.ravel(), _cell(n, I, Jj, Mm).ravel()), c[Mm, K, L].ravel())
    np.add.at(J, (arow.ravel(), _cell(n, Mm, K, L).ravel()), c[I, Jj, Mm].ravel())
    np.add.at(J, (arow.ravel(), _cell(n, Jj, K, Mm).ravel()), -c[I, Mm, L].ravel())
    np.add.at(J, (arow.ravel(), _cell(n, I, Mm, L).ravel()), -c[Jj, K, Mm].ravel())

    Ii, Jn, Ln = np.meshgrid(*(np.arange(n),) * 3, indexing="ij")
    urow = ncomm + nassoc + Jn * n + Ln
    np.add.at(J, (urow.ravel(), _cell(n, Ii, Jn, Ln).ravel()), d[Ii].ravel())
    np.add.at(J, (urow.ravel(), (n3 + Ii).ravel()), c[Ii, Jn, Ln].ravel())
    return J


def free_columns(n: int, space: str) -> np.ndarray:
    """Columns that move: every cell for "b"; c-cells with i, j >= 1 for "b1"."""
    if space == "b":
        return np.arange(n**3 + n)
    if space == "b1":
        return np.array([(i * n + j) * n + l for i in range(1, n) for j in range(1, n) for l in range(n)], dtype=np.int64)
    raise ValueError(f"unknown space {space!r}; expected 'b' or 'b1'")


def tangent_dim(A: BasedAlgebra, space: str = "b1") -> int:
    if not is_prime(A.modulus):
        raise ValueError("tangent dimension is computed over a prime field")
    if space == "b1" and not A.normalized:
        raise ValueError("the b1 tangent space needs a normalized table")
    cols = free_columns(A.n, space)
    if cols.size == 0:
        return 0
    J = jacobian(A.c, A.d)[:, cols] % A.modulus
    return int(cols.size - rank(J, A.modulus))


@dataclass(frozen=True)
class SingularityReport:
    space: str
    n: int
    tangent_dim: int
    component_floor: int
    certified_singular: bool
    note: str


def singularity_report(A: BasedAlgebra, space: str = "b1") -> SingularityReport:
    """Compare the tangent dimension with the dimension of the etale component.

    The etale component has dimension n^2 in B and n(n-1) in B1.  A point is
    reported as certainly singular only for the bullet algebra with n >= 4, on
    the grounds that it lies on that component.
    """
    n = A.n
    floor = n * n if space == "b" else n * (n - 1)
    t = tangent_dim(A, space)
    is_bullet = A.normalized and n >= 1 and not A.c[1:, 1:, :].any()
    certified = bool(is_bullet and n >= 4 and t > floor)
    if certified:
        note = "certified singular"
    elif t == floor:
        note = "smooth-consistent"
    else:
        note = "tangent dimension exceeds the etale floor; not certified"
    return SingularityReport(space, n, t, floor, certified, note)


# -- lifting -------------------------------------------------------------------


def make_pi_example(p: int) -> StructureTable:
    """Rank 4 over Z/p^2, basis 1, x, y, z with x^2=px, y^2=py, z^2=pz, xy=pz, yz=px, zx=py."""
    n, m = 4, p * p
    c = np.zeros((n, n, n), dtype=np.int64)
    c[0] = np.eye(n, dtype=np.int64)
    c[:, 0, :] = np.eye(n, dtype=np.int64)
    x, y, z = 1, 2, 3
    for a, b, target in [(x, x, x), (y, y, y), (z, z, z), (x, y, z), (y, z, x), (z, x, y)]:
        c[a, b, target] = p
        c[b, a, target] = p
    d = np.zeros(n, dtype=np.int64)
    d[0] = 1
    return StructureTable(n, m, c, d)


def split_table(n: int, modulus: int) -> StructureTable:
    """The split table (entries 0 and 1) read over an arbitrary modulus."""
    S = make_split(n, 2)
    return StructureTable(n, modulus, S.c, S.d)


@dataclass(frozen=True)
class LiftResult:
    feasible: bool
    lifted: StructureTable | None
    certificate: np.ndarray | None


def lift_obstruction(t: StructureTable) -> LiftResult:
    """Decide whether a valid table over Z/p^2 lifts to a valid table over Z/p^3.

    Every lift has the form c + p^2 T, d + p^2 S with T, S taken mod p.  Each
    identity F satisfies F(c + p^2 T) = F(c) + p^2 J(c) T mod p^3, so a lift
    exists iff J(c) T = -F(c)/p^2 has a solution mod p.  When it does not, the
    certificate y satisfies y J = 0 and y.(F(c)/p^2) != 0 mod p.
    """
    p, k = prime_power(t.modulus)
    if k != 2:
        raise ValueError("lifting starts from a table over Z/p^2")
    validate(t)
    c = np.asarray(t.c, dtype=np.int64)
    d = np.asarray(t.d, dtype=np.int64)
    F = identity_values(c, d)
    if (F % (p * p)).any():
        raise AssertionError("table is not valid mod p^2")
    b = (-(F // (p * p))) % p
    J = jacobian(c, d) % p
    sol = solve_affine(J, b, p)
    if sol is None:
        return LiftResult(False, None, infeasibility_certificate(J, b, p))
    n = t.n
    m3 = p**3
    lc = (c + p * p * sol[: n**3].reshape(n, n, n)) % m3
    ld = (d + p * p * sol[n**3 :]) % m3
    lifted = StructureTable(n, m3, lc, ld)
    validate(lifted)
    return LiftResult(True, lifted, None)

