"""Dimension formulas: the Z_{d,r} family bound, its maximization, c_alpha and B(x, y).

Everything here is exact rational arithmetic except the grid scan in
``maximize_B``, whose resolution is the caller's ``grid_step``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# cubic branches of the lower bound, indexed by n mod 3: coefficients of n^3, n^2, n, 1
_BRANCHES = {
    0: (Fraction(2, 27), Fraction(1, 9), Fraction(5, 3), Fraction(-1)),
    1: (Fraction(2, 27), Fraction(1, 9), Fraction(14, 9), Fraction(-20, 27)),
    2: (Fraction(2, 27), Fraction(1, 9), Fraction(5, 3), Fraction(-37, 27)),
}


class BoundPreconditionError(ValueError):
    pass


def zdr_admissible(n: int, d: int, r: int) -> bool:
    return min(n, d, r) >= 0 and n == 1 + d + r and 2 * r <= d * (d + 1)


def zdr_bound(n: int, d: int, r: int) -> int:
    """r(d(d+1)/2 - r) + n^2 - (d^2 + dr): dimension of the image of Z_{d,r}."""
    problems = []
    if min(n, d, r) < 0:
        problems.append("n, d, r must be nonnegative")
    if n != 1 + d + r:
        problems.append(f"n = {n} differs from 1 + d + r = {1 + d + r}")
    if 2 * r > d * (d + 1):
        problems.append(f"r = {r} exceeds d(d+1)/2 = {d * (d + 1) // 2}")
    if problems:
        raise BoundPreconditionError("; ".join(problems))
    return r * (d * (d + 1) // 2 - r) + n * n - (d * d + d * r)


def zdr_table(n: int) -> dict[int, int]:
    """zdr_bound(n, d, n-1-d) for every admissible d."""
    return {d: zdr_bound(n, d, n - 1 - d) for d in range(n) if zdr_admissible(n, d, n - 1 - d)}


def branch_value(n: int) -> Fraction:
    a, b, c, e = _BRANCHES[n % 3]
    return a * n**3 + b * n**2 + c * n + e


def optimal_d(n: int) -> int:
    """Least maximizer of zdr_bound(n, d, n-1-d) over admissible d, by exhaustive scan."""
    if n < 1:
        raise BoundPreconditionError("n must be at least 1")
    table = zdr_table(n)
    best = max(table.values())
    return min(d for d, v in table.items() if v == best)


def optimal_d_formula(n: int) -> int:
    return (2 * n - 2) // 3


@dataclass(frozen=True)
class BoundReport:
    n: int
    zdr_values: dict[int, int]
    argmax_d: int
    lower_bound: Fraction
    branch: int

    @property
    def etale_floor(self) -> int:
        return self.n * self.n


def lower_bound(n: int) -> BoundReport:
    """The cubic in the residue class of n, checked against the exhaustive maximum."""
    if n < 1:
        raise BoundPreconditionError("n must be at least 1")
    table = zdr_table(n)
    value = branch_value(n)
    scanned = max(table.values())
    if value != scanned:
        raise AssertionError(f"branch value {value} differs from scanned maximum {scanned} at n={n}")
    return BoundReport(n, table, optimal_d(n), value, n % 3)


def lower_bound_value(n: int) -> Fraction:
    return lower_bound(n).lower_bound


@dataclass(frozen=True)
class HilbDim:
    value: int
    exact: bool


def hilb_dim(n: int, d: int, dimB: int) -> HilbDim:
    """dimB - n^2 + nd; an equality when d >= n-1, otherwise an upper bound."""
    if n < 0 or d < 0:
        raise BoundPreconditionError("n and d must be nonnegative")
    return HilbDim(dimB - n * n + n * d, d >= n - 1)


def c_alpha(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if alpha < 0:
        raise BoundPreconditionError("alpha must be nonnegative")
    if alpha >= Fraction(2, 3):
        return Fraction(2, 27)
    return alpha * alpha * (1 - alpha) / 2


def c_alpha_polynomial_branch(alpha) -> Fraction:
    alpha = Fraction(alpha)
    return alpha * alpha * (1 - alpha) / 2


def B(x, y):
    z = 1 - x - y
    return x * x * z / 2 + y * y * z / 2 + y * z * z / 2


def maximize_B(alpha: float, grid_step: float) -> tuple[float, float, float]:
    """Grid argmax of B on {0 <= x <= alpha, x + y <= 1, 0 <= y <= x}.

    The grid is the multiples of grid_step together with alpha itself.  Grid
    values within 1e-12 of the maximum count as ties, resolved toward the
    largest x and then the least y.  At alpha = 1/2 the maximum is attained
    at both (1/2, 0) and (1/4, 1/4), so the tie rule matters there.
    """
    if grid_step <= 0:
        raise BoundPreconditionError("grid_step must be positive")
    alpha = float(alpha)
    xs = np.arange(0.0, alpha + grid_step / 2, grid_step)
    xs = np.unique(np.append(xs[xs <= alpha], alpha))
    ys = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    ok = (Y <= X + 1e-12) & (X + Y <= 1.0 + 1e-12)
    vals = np.where(ok, B(X, Y), -math.inf)
    top = vals.max()
    cand = np.argwhere(vals >= top - 1e-12)
    i, j = max(cand.tolist(), key=lambda ij: (X[ij[0], ij[1]], -Y[ij[0], ij[1]]))
    return float(X[i, j]), float(Y[i, j]), float(vals[i, j])
