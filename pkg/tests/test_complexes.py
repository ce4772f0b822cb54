import itertools
import json
import math

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from oddlattice.complexes import (FlagComplex, SubsetVertex, automorphisms, build_odd, edgeless, fixator_report,
                                  girth, is_superstar_transitive, isomorphisms, join, neighbourhood,
                                  odd_automorphisms, odd_to_json, path_graph, point_permutation, whole)
from oddlattice.perm import Permutation


def to_nx(K):
    G = nx.Graph()
    G.add_nodes_from(range(len(K)))
    G.add_edges_from(K.edges())
    return G


def test_odd_2_is_triangle():
    K = build_odd(2)
    assert len(K) == 3 and len(K.edges()) == 3
    assert girth(K) == 3


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_odd_counts_and_regularity(d):
    K = build_odd(d)
    assert len(K) == math.comb(2 * d - 1, d - 1)
    assert all(K.degree(i) == d for i in range(len(K)))
    assert len(K.edges()) == len(K) * d // 2


def test_petersen():
    G = to_nx(build_odd(3))
    assert nx.is_isomorphic(G, nx.petersen_graph())


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_girth_against_networkx(d):
    K = build_odd(d)
    assert girth(K) == nx.girth(to_nx(K))


def test_girth_forest_is_infinite():
    assert girth(path_graph(4)) == math.inf


def test_subset_vertex_validation():
    with pytest.raises(ValueError):
        SubsetVertex.of(3, [1, 2, 3])
    with pytest.raises(ValueError):
        SubsetVertex.of(3, [1, 6])
    v = SubsetVertex.of(3, [2, 4])
    assert v.members == (2, 4) and str(v) == "{2,4}"
    assert v.apply(Permutation.parse("(2 5)", 5)).members == (4, 5)


@settings(max_examples=60, deadline=None)
@given(st.permutations(list(range(1, 8))))
def test_sym_acts_by_automorphisms(img):
    K = build_odd(4)
    p = Permutation(tuple(img))
    for a, b in K.edges()[:30]:
        assert K.vertices[a].apply(p).disjoint(K.vertices[b].apply(p))
    vimg = [K.index(v.apply(p)) for v in K.vertices]
    assert point_permutation(4, K, vimg) == p


def test_automorphisms_bruteforce_petersen():
    K = build_odd(3)
    auts = automorphisms(K)
    assert len(auts) == 120
    G = to_nx(K)
    gm = nx.algorithms.isomorphism.GraphMatcher(G, G)
    assert len(auts) == sum(1 for _ in gm.isomorphisms_iter())
    assert sorted(auts) == sorted(set(odd_automorphisms(3, K)))


def test_join_examples():
    sq = join(edgeless(["a", "b"]), edgeless(["c", "d"]))
    assert len(sq) == 4 and len(sq.edges()) == 4 and girth(sq) == 4
    J = join(edgeless(["z1", "z2", "z3"]), build_odd(3))
    assert len(J) == 13 and len(J.edges()) == 3 * 10 + 15
    K = build_odd(3)
    J0 = join(K, edgeless([]))
    assert len(J0) == len(K) and len(J0.edges()) == len(K.edges())


def test_flag_simplices_are_cliques():
    J = join(edgeless(["z1", "z2"]), build_odd(3))
    simp = J.simplices()
    assert max(len(s) for s in simp) == 3
    for s in simp:
        assert J.is_clique(s)
    # every triangle of the join is a z together with an edge of O_3
    tri = [s for s in simp if len(s) == 3]
    assert len(tri) == 2 * 15


def test_to_json_and_dot():
    obj = json.loads(odd_to_json(3))
    assert obj["d"] == 3
    assert len(obj["vertices"]) == 10 and len(obj["edges"]) == 15
    assert all(v == sorted(v) for v in obj["vertices"])
    dot = build_odd(3).to_dot()
    assert dot.count("--") == 15


@pytest.mark.parametrize("d", [3, 4])
def test_fixator_chain_matches_brute(d):
    for target in ("vertex", "edge", "star", "edge-star"):
        assert fixator_report(d, target, mode="chain").order == fixator_report(d, target, mode="brute").order


def test_fixator_brute_mode_refuses_large_d():
    with pytest.raises(ValueError, match="chain"):
        fixator_report(5, "vertex", mode="brute")


def test_fixator_chain_d5():
    d = 5
    f = math.factorial
    assert fixator_report(d, "vertex", mode="chain").order == f(d - 1) * f(d)
    assert fixator_report(d, "edge", mode="chain").order == f(d - 1) ** 2
    assert fixator_report(d, "star", mode="chain").order == f(d - 1)
    assert fixator_report(d, "edge-star", mode="chain").order == 1


def test_superstar_odd3():
    assert is_superstar_transitive(build_odd(3)).holds


@pytest.mark.parametrize("c", [1, 2, 4])
def test_superstar_join_when_sizes_differ(c):
    J = join(edgeless([f"z{i}" for i in range(1, c + 1)]), build_odd(3))
    assert is_superstar_transitive(J).holds


def test_join_with_c_equal_d_has_side_swapping_link():
    # In Z*O_3 with |Z| = 3 the star of an O_3 vertex D is the cone over K_{3,3}:
    # its three Z-neighbours and its three O_3-neighbours. Swapping the two sides
    # fixes D but no automorphism of the join does this, since Z-vertices have
    # degree 10 and O_3-vertices degree 6.
    J = join(edgeless(["z1", "z2", "z3"]), build_odd(3))
    D = 3
    star = neighbourhood(J, (D,))
    zs = [v for v in star.vertices if J.degree(v) == 10]
    ls = [v for v in star.vertices if J.degree(v) == 6 and v != D]
    assert len(zs) == 3 and len(ls) == 3
    swap = {D: D, **dict(zip(zs, ls)), **dict(zip(ls, zs))}
    isos = list(isomorphisms(star, star, {D: D}))
    assert any(all(phi[v] == swap[v] for v in star.vertices) for phi in isos)
    assert all(J.degree(g[v]) == J.degree(v) for g in automorphisms(J) for v in range(len(J)))


def test_superstar_reports_witness_on_failure():
    # a 5-cycle plus a pendant vertex: vertex stars of the cycle differ
    K = FlagComplex.from_edges(list(range(6)), [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)])
    rep = is_superstar_transitive(K)
    assert not rep.holds
    assert rep.case in (1, 2) and rep.sigma is not None


def test_superstar_size_cap():
    with pytest.raises(ValueError):
        is_superstar_transitive(build_odd(5), max_vertices=40)


def test_isomorphisms_of_whole_petersen_fixing_vertex():
    K = build_odd(3)
    W = whole(K)
    isos = list(isomorphisms(W, W, {0: 0}))
    assert len(isos) == 120 // 10
    for phi in isos:
        for a, b in K.edges():
            assert K.has_edge(phi[a], phi[b])


def test_neighbourhood_of_edge_in_odd4():
    K = build_odd(4)
    a, b = K.edges()[0]
    N = neighbourhood(K, (a, b))
    assert len(N.vertices) == 2 + 2 * 3
    assert sorted(N.vertices) == sorted({a, b} | K.adj[a] | K.adj[b])


def test_path_graph_shape():
    P = path_graph(3)
    assert len(P) == 3 and len(P.edges()) == 2
    assert sorted(P.degree(i) for i in range(3)) == [1, 1, 2]


def test_point_permutation_rejects_non_induced():
    K = build_odd(3)
    vimg = list(range(10))
    vimg[0], vimg[1] = vimg[1], vimg[0]
    assert point_permutation(3, K, vimg) is None


def test_all_three_subsets_of_seven():
    K = build_odd(4)
    assert sorted(v.members for v in K.vertices) == list(itertools.combinations(range(1, 8), 3))
