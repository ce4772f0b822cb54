import csv
import io

import pytest
from hypothesis import given, settings, strategies as st

from oddlattice.complexes import FlagComplex, build_odd
from oddlattice.coxeter import RacgPresentation, build_ball
from oddlattice.geometry import (InapplicableError, KingBall, act, classify_sphere, classify_vertex, enumerate_normal_paths,
                                 king_ball, lsup_metric, normal_path, sector_of, sphere_representatives,
                                 sphere_stats_csv, verify_sphere_claims)

from conftest import auts, explicit_king, presentation


def first_pair(P, commuting):
    for s in range(P.n):
        for t in range(s + 1, P.n):
            if P.commute(s, t) == commuting:
                return s, t


def test_king_sphere_sizes_odd3():
    assert explicit_king(3, 3).sphere_sizes() == [1, 25, 390, 5940]


def test_explicit_and_implicit_distances_agree():
    P = presentation(3)
    K = explicit_king(3, 3)
    imp = king_ball(P, 3, implicit=True)
    for w in K.vertices():
        assert imp.dist(w) == K.dist(w)
    # a vertex of graph length 7 is outside the l-infinity 3-ball
    s, t = first_pair(P, False)
    far = P.normalize((s, t) * 4)
    assert K.dist(far) is None and imp.dist(far) is None


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 9), max_size=12))
def test_height_bounds_graph_length(word):
    P = presentation(3)
    w = P.normalize(word)
    imp = KingBall(P, 99)
    h = imp.dist(w)
    assert (len(w) + 1) // 2 <= h <= len(w)


def test_lsup_metric_radius_guard():
    P = presentation(3)
    ball = build_ball(P, 4)
    K = lsup_metric(ball)
    assert K.radius == 2
    with pytest.raises(ValueError):
        lsup_metric(ball, radius=3)


def test_first_sphere_structure_odd3():
    S = classify_sphere(explicit_king(3, 2), 1)
    c = S.counts()
    assert c["vertices"] == 25
    assert c["partly_free"] == 10 and c["free"] == 15 and c["unclassified"] == 0
    assert c["blocks"] == 10 and c["max_block"] == 1
    # the partly-free vertices are the single letters, the free ones the square diagonals
    assert sorted(S.partly_free()) == [(s,) for s in range(10)]
    assert all(len(x) == 2 for x in S.free())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_classes_cover(n):
    S = classify_sphere(explicit_king(3, 3), n)
    c = S.counts()
    assert c["unclassified"] == 0
    assert c["partly_free"] + c["free"] == c["vertices"]
    assert c["max_block"] <= 2
    for b in S.blocks:
        assert len({S.sectors[x] for x in b}) == 1


def test_normal_path_examples():
    P = presentation(3)
    K = explicit_king(3, 3)
    s, t = first_pair(P, True)
    x = P.normalize((s, t))
    p = normal_path(K, (), x)
    assert len(p) == 1 and p.cubes[0][1] == (s, t)
    a, b = first_pair(P, False)
    x = P.normalize((a, b))
    p = normal_path(K, (), x)
    assert len(p) == 2 and p.vertices == [(), (a,), x]
    down = normal_path(K, (), x, "down")
    assert down.vertices == p.vertices


def test_normal_paths_unique_by_brute_force():
    P = presentation(3)
    K = explicit_king(3, 3)
    for x in K.sphere(2)[:40]:
        up = normal_path(K, (), x)
        allp = enumerate_normal_paths(P, (), x, 2, "up")
        assert [q.vertices for q in allp] == [up.vertices]


def test_normal_path_direction_and_range_errors():
    K = explicit_king(3, 2)
    with pytest.raises(ValueError):
        normal_path(K, (), (0,), "sideways")
    P = presentation(3)
    a, b = first_pair(P, False)
    with pytest.raises(ValueError):
        normal_path(K, (), P.normalize((a, b) * 3))


def test_classify_vertex_of_letter():
    K = explicit_king(3, 2)
    c = classify_vertex(K, (0,), 1)
    assert c.kind == "partly-free" and c.inner == ((), 0)


def test_sector_of_letter_is_itself():
    K = explicit_king(3, 2)
    assert sector_of(K, (4,)) == (4,)


def test_girth_four_link_is_inapplicable():
    square = FlagComplex.from_edges(list("abcd"), [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    K = king_ball(RacgPresentation(square), 2)
    with pytest.raises(InapplicableError):
        classify_sphere(K, 1)
    with pytest.raises(InapplicableError):
        verify_sphere_claims(K, 1)


def test_sphere_claims_odd3_radius2():
    rep = verify_sphere_claims(explicit_king(3, 2), 2)
    assert rep.ok, rep.failures
    assert rep.checked["S2.vertices"] == 390


def test_sphere_claims_rejects_wrong_sphere():
    with pytest.raises(ValueError):
        verify_sphere_claims(explicit_king(3, 2), 1, vertices=[()])


def test_representatives_meet_every_orbit():
    P = presentation(3)
    K = explicit_king(3, 2)
    levels = sphere_representatives(K, 2, auts(3))
    for k in (1, 2):
        covered = {act(P, phi, r) for r in levels[k] for phi in auts(3)}
        assert covered == set(K.sphere(k))


def test_stats_csv():
    K = explicit_king(3, 2)
    text = sphere_stats_csv(K, [classify_sphere(K, 1), classify_sphere(K, 2)])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["n"] for r in rows] == ["1", "2"]
    assert rows[0]["vertices"] == "25" and rows[1]["vertices"] == "390"


def test_odd4_first_sphere():
    P = RacgPresentation(build_odd(4))
    S = classify_sphere(king_ball(P, 1), 1)
    assert S.counts()["partly_free"] == 35 and S.counts()["free"] == 70
