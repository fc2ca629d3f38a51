import itertools

import numpy as np
import pytest

from algmod.algebra import is_etale, make_bullet, make_split, make_truncated_poly, violations
from algmod.enumeration import (
    CSV_HEADER,
    cell_order,
    census,
    classify,
    enumerate_valid,
    etale_class_count_expected,
    free_cells,
    radical_filtration,
    records_csv,
    sample_valid,
    sweep_valid,
)
from algmod.exactla import BudgetExceeded, h_order
from algmod.localstruct import is_local
from algmod.symmetry import automorphisms, is_normalized_table, isomorphic


def keys(tables):
    return sorted(t.key() for t in tables)


@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (2, 3), (2, 5), (3, 2)])
def test_search_matches_sweep(n, q):
    searched = [A.table for A in enumerate_valid(n, q)]
    assert keys(searched) == keys(sweep_valid(n, q))
    assert keys(searched) == keys(A.table for A in enumerate_valid(n, q, seed_order=1))


def test_enumerated_tables_are_valid_and_normalized():
    for A in enumerate_valid(3, 3):
        assert not violations(A.table)
        assert is_normalized_table(A.table)


def test_cell_orders_are_permutations():
    for n in range(1, 5):
        assert sorted(cell_order(n, 1)) == sorted(free_cells(n)) == cell_order(n, 0)
    with pytest.raises(ValueError):
        cell_order(3, 2)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        list(enumerate_valid(3, 3, budget=10))
    with pytest.raises(BudgetExceeded):
        sweep_valid(3, 3, budget=10)


def test_sample_valid_is_valid():
    rng = np.random.default_rng(0)
    for _ in range(20):
        A = sample_valid(4, 3, rng)
        assert not violations(A.table) and is_normalized_table(A.table)


@pytest.mark.parametrize("n,q,classes", [(1, 2, 1), (2, 2, 3), (2, 3, 3), (2, 5, 3), (3, 2, 6), (3, 3, 6)])
def test_class_counts(n, q, classes):
    recs = classify(n, q)
    assert len(recs) == classes
    # representatives pairwise non-isomorphic
    for r, s in itertools.combinations(recs, 2):
        assert isomorphic(r.representative, s.representative) is None


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_orbit_stabilizer_and_aut_order(n, q):
    recs = classify(n, q)
    for r in recs:
        assert r.aut_order * r.orbit_size == h_order(n, q)
        assert r.aut_order == len(automorphisms(r.representative))
    assert sum(r.delta_nonzero for r in recs) == etale_class_count_expected(n)


def test_representative_is_orbit_minimum():
    tables = sorted((A.table for A in enumerate_valid(3, 2)), key=lambda t: t.key())
    for r in classify(3, 2):
        rep = r.representative
        others = [t for t in tables if isomorphic(rep, type(rep)(t)) is not None]
        assert min(t.key() for t in others) == rep.table.key()
        assert len(others) == r.orbit_size


def test_full_sweep_agrees():
    a = classify(3, 2)
    b = classify(3, 2, full_sweep=True)
    c = classify(3, 2, seed_order=1)
    assert [r.representative.table.key() for r in a] == [r.representative.table.key() for r in b]
    assert [r.representative.table.key() for r in a] == [r.representative.table.key() for r in c]


def test_known_classes_present():
    recs = classify(3, 3)
    for B in (make_split(3, 3), make_bullet(3, 3), make_truncated_poly(3, 3)):
        assert sum(isomorphic(r.representative, B) is not None for r in recs) == 1


def test_record_fields():
    recs = classify(3, 2)
    for r in recs:
        A = r.representative
        assert r.delta_nonzero == is_etale(A)
        assert r.is_local == is_local(A)
        assert r.filtration == radical_filtration(A)
        assert sum(r.filtration) == 3
    by_filtration = {r.filtration for r in recs if r.is_local}
    assert (1, 2) in by_filtration and (1, 1, 1) in by_filtration


def test_census_and_csv():
    c = census(3, 2)
    assert (c.valid_tables, c.h_order, c.class_count, c.etale_class_count) == (64, 24, 6, 3)
    text = records_csv(list(c.classes)).splitlines()
    assert text[0].split(",") == CSV_HEADER
    assert len(text) == 7


def test_etale_class_count_expected():
    assert [etale_class_count_expected(n) for n in range(1, 8)] == [1, 2, 3, 5, 7, 11, 15]
