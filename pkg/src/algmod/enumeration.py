"""Exhaustive enumeration of normalized tables and their classification under H.

A normalized table has d = e_0 and c[0] = c[:, 0] = I, so the only free
entries are c[i][j][l] with i, j >= 1.  Commutativity is built in by
assigning the cells (i, j, l) and (j, i, l) together; an associativity
identity involving e_0 holds automatically, so only identities with
i, j, k >= 1 are checked.  The depth-first search assigns free cells in a
fixed order and rejects a partial table as soon as some associativity
identity has all of its cells decided and fails.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .algebra import BasedAlgebra, StructureTable, is_etale, validate
from .exactla import BudgetExceeded, check_budget, h_order, iterate_h, search_budget, stacked
from .localstruct import idempotents, is_local, radical_powers
from .symmetry import act_batch

CSV_HEADER = ["n", "q", "class_id", "aut_order", "orbit_size", "delta_nonzero", "is_local", "filtration", "idempotents"]


def free_cells(n: int) -> list[tuple[int, int, int]]:
    """Cells (i, j, l) with 1 <= i <= j < n in the natural order."""
    return [(i, j, l) for i in range(1, n) for j in range(i, n) for l in range(n)]


def cell_order(n: int, seed_order: int = 0) -> list[tuple[int, int, int]]:
    """Order 0 is the natural one; order 1 runs target index first, pairs reversed."""
    cells = free_cells(n)
    if seed_order == 0:
        return cells
    if seed_order == 1:
        return sorted(cells, key=lambda c: (c[2], -c[1], -c[0]))
    raise ValueError(f"unknown cell order {seed_order}")


def _base_table(n: int) -> np.ndarray:
    c = np.zeros((n, n, n), dtype=np.int64)
    if n:
        c[0] = np.eye(n, dtype=np.int64)
        c[:, 0, :] = np.eye(n, dtype=np.int64)
    return c


def _unit_vector(n: int) -> np.ndarray:
    d = np.zeros(n, dtype=np.int64)
    if n:
        d[0] = 1
    return d


def _identity_schedule(n: int, order: list[tuple[int, int, int]]) -> list[list[tuple[int, int, int, int]]]:
    """For each depth, the associativity identities whose last free cell is decided there."""
    pos = {cell: k for k, cell in enumerate(order)}

    def slot(i, j, l):
        if i == 0 or j == 0:
            return -1
        return pos[(min(i, j), max(i, j), l)]

    schedule: list[list[tuple[int, int, int, int]]] = [[] for _ in order]
    for i, j, k, l in itertools.product(range(1, n), repeat=4):
        deps = [-1]
        for m in range(n):
            deps += [slot(i, j, m), slot(m, k, l), slot(j, k, m), slot(i, m, l)]
        last = max(deps)
        if last >= 0:
            schedule[last].append((i, j, k, l))
    return schedule


def enumerate_valid(n: int, q: int, seed_order: int = 0, budget: int | None = None) -> Iterator[BasedAlgebra]:
    """Every valid normalized table of rank n over F_q, by pruned depth-first search."""
    if n == 0:
        return
    order = cell_order(n, seed_order)
    schedule = _identity_schedule(n, order)
    limit = search_budget() if budget is None else budget
    c = _base_table(n).tolist()
    d = _unit_vector(n)
    nodes = 0

    def holds(i, j, k, l) -> bool:
        total = 0
        for m in range(n):
            total += c[i][j][m] * c[m][k][l] - c[j][k][m] * c[i][m][l]
        return total % q == 0

    def rec(depth: int):
        nonlocal nodes
        if depth == len(order):
            yield validate(StructureTable(n, q, np.array(c, dtype=np.int64), d))
            return
        i, j, l = order[depth]
        for v in range(q):
            nodes += 1
            if nodes > limit:
                raise BudgetExceeded(f"table search exceeded {limit} nodes")
            c[i][j][l] = v
            c[j][i][l] = v
            if all(holds(*ident) for ident in schedule[depth]):
                yield from rec(depth + 1)
        c[i][j][l] = 0
        c[j][i][l] = 0

    yield from rec(0)


def sample_valid(n: int, q: int, rng, budget: int | None = None) -> BasedAlgebra:
    """A valid normalized table: the first leaf of the search with values tried in random order."""
    order = cell_order(n)
    schedule = _identity_schedule(n, order)
    limit = search_budget() if budget is None else budget
    c = _base_table(n).tolist()
    nodes = 0

    def holds(i, j, k, l) -> bool:
        return sum(c[i][j][m] * c[m][k][l] - c[j][k][m] * c[i][m][l] for m in range(n)) % q == 0

    def rec(depth: int) -> bool:
        nonlocal nodes
        if depth == len(order):
            return True
        i, j, l = order[depth]
        for v in rng.permutation(q):
            nodes += 1
            if nodes > limit:
                raise BudgetExceeded(f"table search exceeded {limit} nodes")
            c[i][j][l] = c[j][i][l] = int(v)
            if all(holds(*ident) for ident in schedule[depth]) and rec(depth + 1):
                return True
        c[i][j][l] = c[j][i][l] = 0
        return False

    if n and not rec(0):
        raise AssertionError("no valid table found")
    return validate(StructureTable(n, q, np.array(c, dtype=np.int64).reshape(n, n, n), _unit_vector(n)))


def sweep_valid(n: int, q: int, budget: int | None = None, chunk: int = 1 << 16) -> list[StructureTable]:
    """Unpruned sweep: every assignment of the n(n-1)^2 cells with i, j >= 1.

    Cells are filled independently (no symmetry imposed), so commutativity is
    tested along with associativity.  Used as an oracle for the search.
    """
    if n == 0:
        return []
    cells = [(i, j, l) for i in range(1, n) for j in range(1, n) for l in range(n)]
    total = q ** len(cells)
    check_budget(total, "unpruned table sweep", budget)
    base = _base_table(n)
    idx = tuple(np.array(x) for x in zip(*cells)) if cells else None
    out = []
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        codes = np.arange(start, stop, dtype=np.int64)
        digits = np.empty((stop - start, len(cells)), dtype=np.int64)
        for pos in range(len(cells) - 1, -1, -1):
            digits[:, pos] = codes % q
            codes //= q
        C = np.broadcast_to(base, (stop - start, n, n, n)).copy()
        if cells:
            C[:, idx[0], idx[1], idx[2]] = digits
        comm = (C == C.transpose(0, 2, 1, 3)).all(axis=(1, 2, 3))
        lhs = np.einsum("hijm,hmkl->hijkl", C, C)
        rhs = np.einsum("hjkm,himl->hijkl", C, C)
        assoc = ((lhs - rhs) % q == 0).all(axis=(1, 2, 3, 4))
        for h in np.nonzero(comm & assoc)[0]:
            out.append(StructureTable(n, q, C[h], _unit_vector(n)))
    return out


# -- classification --------------------------------------------------------------


@dataclass(frozen=True)
class ClassRecord:
    class_id: int
    representative: BasedAlgebra
    aut_order: int
    orbit_size: int
    delta_nonzero: bool
    is_local: bool
    filtration: tuple[int, ...]
    idempotents: int

    def csv_row(self) -> list:
        A = self.representative
        return [
            A.n,
            A.modulus,
            self.class_id,
            self.aut_order,
            self.orbit_size,
            int(self.delta_nonzero),
            int(self.is_local),
            "-".join(str(x) for x in self.filtration),
            self.idempotents,
        ]


def radical_filtration(A: BasedAlgebra) -> tuple[int, ...]:
    """dim N^i / N^{i+1} for i >= 0, where N^0 = A; the Hilbert function when A is local."""
    pw = radical_powers(A)
    return tuple(pw[i].dim - pw[i + 1].dim for i in range(len(pw) - 1))


def classify(
    n: int,
    q: int,
    full_sweep: bool = False,
    seed_order: int = 0,
    budget: int | None = None,
) -> list[ClassRecord]:
    """Partition the valid normalized tables into H-orbits.

    Tables are visited in the fixed order; the first unvisited one becomes the
    representative of its orbit, which makes it the orbit minimum.
    """
    if full_sweep:
        tables = sorted(sweep_valid(n, q, budget), key=lambda t: t.key())
    else:
        tables = sorted((A.table for A in enumerate_valid(n, q, seed_order, budget)), key=lambda t: t.key())
    if not tables:
        return []
    index = {t.key(): k for k, t in enumerate(tables)}
    Ms, Ps = stacked(iterate_h(n, q, budget))
    visited = np.zeros(len(tables), dtype=bool)
    records = []
    for k, t in enumerate(tables):
        if visited[k]:
            continue
        images = act_batch(Ms, Ps, t.c, q).reshape(len(Ms), -1)
        orbit = set()
        stab = 0
        base = np.asarray(t.c).reshape(-1)
        d_key = tuple(int(x) for x in t.d)
        for row in images:
            key = tuple(int(x) for x in row) + d_key
            orbit.add(index[key])
            if np.array_equal(row, base):
                stab += 1
        visited[list(orbit)] = True
        A = BasedAlgebra(t)
        records.append(
            ClassRecord(
                class_id=len(records),
                representative=A,
                aut_order=stab,
                orbit_size=len(orbit),
                delta_nonzero=is_etale(A),
                is_local=is_local(A),
                filtration=radical_filtration(A),
                idempotents=len(idempotents(A)),
            )
        )
    if sum(r.orbit_size for r in records) != len(tables):
        raise AssertionError("orbits do not partition the valid tables")
    return records


@dataclass(frozen=True)
class Census:
    n: int
    q: int
    valid_tables: int
    h_order: int
    classes: tuple[ClassRecord, ...]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def etale_class_count(self) -> int:
        return sum(r.delta_nonzero for r in self.classes)

    @property
    def local_class_count(self) -> int:
        return sum(r.is_local for r in self.classes)


def census(n: int, q: int, **kwargs) -> Census:
    records = classify(n, q, **kwargs)
    return Census(n, q, sum(r.orbit_size for r in records), h_order(n, q), tuple(records))


def records_csv(records: list[ClassRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def etale_class_count_expected(n: int) -> int:
    """Number of multisets of positive integers summing to n (residue degrees of an etale algebra)."""
    counts = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            counts[total] += counts[total - part]
    return counts[n]
