import functools
import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from oddlattice.bmw import (BmwPresentation, SearchFilters, canonical, count_tables_bruteforce, local_actions,
                            order_of_local_actions, relabel, search_involutive, validate)
from oddlattice.perm import equals_alternating


def brute_tables(m, n):
    cells = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
    for img in itertools.product(cells, repeat=len(cells)):
        T = dict(zip(cells, img))
        if all(T[(i2, j2)] == (i, j) and T[(i, j2)] == (i2, j) and T[(i2, j)] == (i, j2)
               for (i, j), (i2, j2) in T.items()):
            yield T


def test_direct_product_is_valid_with_trivial_actions():
    P = BmwPresentation.direct_product(3, 4)
    assert validate(P)["valid"]
    xi, al = local_actions(P)
    assert all(p.is_identity() for p in xi + al)


def test_conflicting_relations_rejected():
    with pytest.raises(ValueError, match="corner"):
        BmwPresentation.from_relations(2, 2, [(1, 1, 1, 1), (1, 1, 2, 2)])


def test_incomplete_table_is_invalid():
    P = BmwPresentation.from_relations(2, 2, [(1, 1, 1, 1)])
    rep = validate(P)
    assert not rep["valid"]
    assert any(e["problem"] == "no relation" for e in rep["errors"])


def test_inconsistent_table_is_invalid():
    # a raw table whose (1,1) corner does not close up into a square
    T = {(1, 1): (2, 2), (2, 2): (1, 1), (1, 2): (1, 2), (2, 1): (2, 1)}
    rep = validate(BmwPresentation(2, 2, tuple(sorted(T.items()))))
    assert not rep["valid"]


def test_one_by_one_is_forced():
    st_ = search_involutive(1, 1)
    assert st_.exhausted and len(st_.found) == 1
    assert st_.found[0].relations() == [(1, 1, 1, 1)]


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (1, 3), (2, 2), (2, 3), (3, 2)])
def test_search_count_matches_bruteforce(m, n):
    full = search_involutive(m, n, canonical_only=False)
    assert full.exhausted
    assert len(full.found) == count_tables_bruteforce(m, n)
    canon = {canonical(BmwPresentation(m, n, tuple(sorted(T.items())))) for T in brute_tables(m, n)}
    assert len(search_involutive(m, n).found) == len(canon)


def test_local_actions_are_involutions_at_4_3():
    st_ = search_involutive(4, 3, canonical_only=False)
    found = st_.found
    assert st_.exhausted and found
    for P in found:
        assert validate(P)["valid"]
        xi, al = local_actions(P)
        assert all((p * p).is_identity() for p in xi + al)
        # the table is recovered from the local actions
        for i in range(1, 5):
            for j in range(1, 4):
                assert P.opposite(i, j) == (al[j - 1](i), xi[i - 1](j))


def test_large_search_needs_seed():
    with pytest.raises(ValueError, match="seed"):
        search_involutive(5, 5)


def test_alternating_fixtures_recomputed(bmw_fixtures):
    assert len(bmw_fixtures) == 3
    assert len({P.table for P in bmw_fixtures}) == 3
    for P in bmw_fixtures:
        assert validate(P)["valid"]
        xi, al = local_actions(P)
        assert equals_alternating(al, P.m) and equals_alternating(xi, P.n)
        assert order_of_local_actions(P) == (60, 60)


def test_seeded_search_is_deterministic():
    f = SearchFilters(alternating_x=True, alternating_a=True, limit=1)
    a = search_involutive(5, 5, f, seed=7).found
    b = search_involutive(5, 5, f, seed=7).found
    assert a == b


def test_transitive_filters():
    f = SearchFilters(transitive_x=True, transitive_a=True)
    for P in search_involutive(3, 3, f).found:
        rep = validate(P)
        assert rep["x_side_transitive"] and rep["a_side_transitive"]


def test_json_roundtrip(bmw_fixtures):
    for P in bmw_fixtures:
        Q = BmwPresentation.from_json(json.loads(P.dumps()))
        assert Q == P


@functools.lru_cache(maxsize=None)
def three_by_three():
    return tuple(search_involutive(3, 3).found)


@settings(max_examples=40, deadline=None)
@given(st.permutations([1, 2, 3]), st.permutations([1, 2, 3]), st.integers(0, 2))
def test_relabel_preserves_validity_and_canonical_is_invariant(sx, sa, k):
    P = three_by_three()[k]
    Q = relabel(P, tuple(sx), tuple(sa))
    assert validate(Q)["valid"]
    assert canonical(Q) == canonical(P)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 2), st.integers(1, 2)), min_size=4, max_size=4))
def test_random_corner_map_valid_iff_closed(img):
    cells = [(1, 1), (1, 2), (2, 1), (2, 2)]
    T = dict(zip(cells, img))
    closed = all(T[(i2, j2)] == (i, j) and T[(i, j2)] == (i2, j) and T[(i2, j)] == (i, j2)
                 for (i, j), (i2, j2) in T.items())
    assert validate(BmwPresentation(2, 2, tuple(sorted(T.items()))))["valid"] == closed
