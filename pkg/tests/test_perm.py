import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from oddlattice.perm import (Permutation, PermutationGroup, compose, direct_product_order, equals_alternating,
                             equals_symmetric, group_order, is_primitive, parity_support, restricted_order,
                             sparse_direct_product_order)


def perms(n):
    return st.permutations(list(range(1, n + 1))).map(lambda xs: Permutation(tuple(xs)))


def closure_size(gens, n):
    """Naive BFS closure: the oracle for small groups."""
    e = Permutation.identity(n)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = compose(h, g)
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return len(seen)


def test_compose_identity_and_involution():
    p = Permutation.parse("(1 3 2)(4 5)", 5)
    assert compose(Permutation.identity(5), p) == p
    t = Permutation.parse("(1 2)", 5)
    assert compose(t, t).is_identity()


def test_compose_pointwise():
    p = Permutation.parse("(1 2)(3 4)", 4)
    q = Permutation.parse("(2 3)", 4)
    r = compose(p, q)
    assert [r(i) for i in range(1, 5)] == [p(q(i)) for i in range(1, 5)]


def test_compose_degree_mismatch():
    with pytest.raises(ValueError):
        compose(Permutation.identity(3), Permutation.identity(4))


@pytest.mark.parametrize("text,expected", [
    ("()", ("even", frozenset())),
    ("(1 2)(3 4)", ("even", frozenset({1, 2, 3, 4}))),
    ("(1 2)", ("odd", frozenset({1, 2}))),
    ("(1 2 3 4)", ("odd", frozenset({1, 2, 3, 4}))),
])
def test_parity_support(text, expected):
    assert parity_support(Permutation.parse(text, 6)) == expected


@pytest.mark.parametrize("text", ["(1 2", "(1 1)", "(0 1)", "abc"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        Permutation.parse(text, 4)


@pytest.mark.parametrize("gens,n,order", [
    (["(1 2)", "(1 2 3)"], 3, 6),
    ([], 5, 1),
    (["(1 2 3)", "(3 4 5)"], 5, 60),
    (["(1 2 3 4 5 6)", "(1 6)(2 5)(3 4)"], 6, 12),
    # Mathieu group M11 on 11 points
    (["(1 2 3 4 5 6 7 8 9 10 11)", "(3 7 11 8)(4 10 5 6)"], 11, 7920),
    # Mathieu group M12
    (["(1 2 3 4 5 6 7 8 9 10 11)", "(3 7 11 8)(4 10 5 6)", "(1 12)(2 11)(3 6)(4 8)(5 9)(7 10)"], 12, 95040),
])
def test_group_order_known(gens, n, order):
    assert group_order([Permutation.parse(g, n) for g in gens], n) == order


def test_symmetric_and_alternating_recognition():
    assert equals_alternating([Permutation.parse("(1 2 3)", 5), Permutation.parse("(3 4 5)", 5)], 5)
    t = [Permutation.parse("(1 2)", 2)]
    assert not equals_alternating(t, 2)
    assert equals_symmetric(t, 2)
    n = 9
    gens = [Permutation.parse("(1 2)", n), Permutation.from_cycles(n, [tuple(range(1, n + 1))])]
    assert group_order(gens, n) == math.factorial(n)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.just(n), st.lists(perms(n), min_size=1, max_size=3))))
def test_order_matches_closure(data):
    n, gens = data
    assert group_order(gens, n) == closure_size(gens, n)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.lists(perms(n), min_size=1, max_size=3), perms(n))))
def test_membership_matches_closure(data):
    gens, p = data
    n = p.degree
    G = PermutationGroup(gens, n)
    elems = set()
    frontier = [Permutation.identity(n)]
    elems.add(frontier[0])
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = compose(h, g)
                if k not in elems:
                    elems.add(k)
                    nxt.append(k)
        frontier = nxt
    assert G.contains(p) == (p in elems)
    assert G.verify_chain()


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(perms(n), perms(n), perms(n))))
def test_group_axioms(triple):
    p, q, r = triple
    assert compose(compose(p, q), r) == compose(p, compose(q, r))
    assert compose(p, p.inverse()).is_identity()
    assert (p * q).is_even() == (p.is_even() == q.is_even())
    assert p ** p.order() == Permutation.identity(p.degree)


def test_pointwise_stabilizer_orders():
    n = 7
    G = PermutationGroup([Permutation.parse("(1 2)", n), Permutation.from_cycles(n, [tuple(range(1, n + 1))])], n)
    for k in range(n):
        assert G.pointwise_stabilizer(range(1, k + 1)).order() == math.factorial(n - k)


def test_primitivity_examples():
    assert is_primitive([Permutation.parse("(1 2 3 4)", 4)], 4) == (False, [[1, 3], [2, 4]])
    assert is_primitive([Permutation.parse("(1 2)", 2)], 2) == (True, None)
    ok, blocks = is_primitive([Permutation.parse("(1 2)", 4)], 4)
    assert not ok and [1, 2] in blocks


def test_alt7_on_three_subsets_is_primitive():
    subsets = list(itertools.combinations(range(1, 8), 3))
    idx = {s: i for i, s in enumerate(subsets, 1)}

    def induced(p):
        return Permutation(tuple(idx[tuple(sorted(p(a) for a in s))] for s in subsets))

    gens = [Permutation.parse("(1 2 3)", 7), Permutation.parse("(1 2 3 4 5 6 7)", 7)]
    ind = [induced(g) for g in gens]
    assert group_order(ind, 35) == math.factorial(7) // 2
    assert is_primitive(ind, 35) == (True, None)


def test_direct_product_order_detects_overlap():
    n = 6
    a = [Permutation.parse("(1 2 3)", n)]
    b = [Permutation.parse("(4 5 6)", n)]
    assert direct_product_order([a, b], [{1}, {4}], n) == (9, [])
    c = [Permutation.parse("(3 4 5)", n)]
    order, problems = direct_product_order([a, c], [{1}, {5}], n)
    assert any(p[0] == "noncommuting" for p in problems)


def test_sparse_direct_product_matches_dense():
    f1 = [{"a": "b", "b": "c", "c": "a"}]
    f2 = [{"x": "y", "y": "x", "z": "w", "w": "z"}, {"x": "z", "z": "x", "y": "w", "w": "y"}]
    order, problems = sparse_direct_product_order([f1, f2], [{"a"}, {"x"}])
    assert problems == []
    assert order == 3 * 4


def test_restricted_order():
    n = 6
    g = [Permutation.parse("(1 2 3)(4 5)", n)]
    assert restricted_order(g, [1, 2, 3]) == 3
    assert restricted_order(g, [4, 5]) == 2
    with pytest.raises(ValueError):
        restricted_order(g, [1, 4])
