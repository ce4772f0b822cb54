"""The l-infinity structure of Davis balls: normal paths, sphere classes, blocks, sectors."""

from __future__ import annotations

import csv
import io
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .complexes import girth
from .coxeter import CoxeterElement, DavisBall, RacgPresentation, build_ball


class InapplicableError(ValueError):
    """A claim's hypothesis does not hold for the given complex."""


class KingBall:
    """l-infinity ball of radius ``radius`` around ``base``.

    With a distance table the metric is whatever produced the table (king-graph
    BFS). Without one, distances are computed as the Foata height of
    ``base^-1 w``, which is the number of cube moves in a normal path.
    """

    def __init__(self, P: RacgPresentation, radius: int, table: dict | None = None,
                 base: CoxeterElement = ()):
        self.P = P
        self.radius = radius
        self.table = table
        self.base = tuple(base)
        self._binv = P.inverse(self.base)

    @property
    def implicit(self) -> bool:
        return self.table is None

    def rel(self, w) -> CoxeterElement:
        return self.P.multiply(self._binv, w) if self.base else tuple(w)

    def dist(self, w) -> int | None:
        w = tuple(w)
        if self.table is not None:
            return self.table.get(w)
        h = self.P.height(self.rel(w))
        return h if h <= self.radius else None

    def sphere(self, k: int) -> list[CoxeterElement]:
        if self.table is None:
            raise ValueError("implicit ball: spheres are not enumerated")
        return sorted((w for w, d in self.table.items() if d == k), key=lambda u: (len(u), u))

    def vertices(self) -> list[CoxeterElement]:
        if self.table is None:
            raise ValueError("implicit ball: vertices are not enumerated")
        return sorted(self.table, key=lambda u: (self.table[u], len(u), u))

    def sphere_sizes(self) -> list[int]:
        out = [0] * (self.radius + 1)
        for d in self.table.values():
            out[d] += 1
        return out

    # local structure of X -------------------------------------------------
    def edge_neighbors(self, x) -> list[tuple[CoxeterElement, int]]:
        return [(self.P.multiply(x, (s,)), s) for s in range(self.P.n)]

    def cube_neighbors(self, x) -> list[tuple[CoxeterElement, tuple[int, ...]]]:
        return [(self.P.multiply(x, c), c) for c in self.P.cliques()]


def lsup_metric(ball: DavisBall, v: CoxeterElement = (), radius: int | None = None) -> KingBall:
    """King-graph BFS distances from v inside a Davis ball."""
    P = ball.P
    v = tuple(v)
    if v not in ball.index:
        raise ValueError("base vertex not in ball")
    if ball.metric == "linf":
        if v != ():
            raise ValueError("an l-infinity ball can only be re-based at its own centre")
        limit = ball.radius
    else:
        limit = (ball.radius - ball.dist[ball.index[v]]) // 2
    if radius is None:
        radius = limit
    if radius > limit:
        raise ValueError(f"l-infinity radius {radius} exceeds the guaranteed radius {limit}")
    table = {v: 0}
    frontier = [v]
    for k in range(1, radius + 1):
        nxt = []
        for w in frontier:
            for c in P.cliques():
                u = P.multiply(w, c)
                if u in ball.index and u not in table:
                    table[u] = k
                    nxt.append(u)
        frontier = nxt
    return KingBall(P, radius, table, v)


def king_ball(P: RacgPresentation, radius: int, implicit: bool = False) -> KingBall:
    if implicit:
        return KingBall(P, radius, None)
    return lsup_metric(build_ball(P, radius, "linf"))


# ---------------------------------------------------------------------------
# normal paths


@dataclass
class NormalPath:
    vertices: list[CoxeterElement]
    cubes: list[tuple[CoxeterElement, tuple[int, ...]]]  # (corner v_{i-1}, spanning letters)
    direction: str

    def __len__(self):
        return len(self.cubes)

    def reversed(self) -> "NormalPath":
        verts = self.vertices[::-1]
        cubes = [(verts[i], self.cubes[len(self.cubes) - 1 - i][1]) for i in range(len(self.cubes))]
        other = {"up": "down", "down": "up"}[self.direction]
        return NormalPath(verts, cubes, other)


def cube_vertices(P: RacgPresentation, y, S: Sequence[int]) -> set[CoxeterElement]:
    out = set()
    for k in range(len(S) + 1):
        for A in itertools.combinations(S, k):
            out.add(P.multiply(y, A))
    return out


def star_vertices(P: RacgPresentation, y, S: Sequence[int]) -> set[CoxeterElement]:
    """Vertices of str(C): the union of the cubes containing the cube at y spanned by S."""
    S = set(S)
    out = set()
    for K in P.cliques():
        if S <= set(K):
            out |= cube_vertices(P, y, K)
    return out


def normal_condition(P: RacgPresentation, prev, cur, direction: str) -> bool:
    """Check the normal-path condition between consecutive cubes sharing v_{i-1}.

    ``prev`` and ``cur`` are (corner, letters) with the shared vertex as corner
    of ``cur``; ``prev`` must be given with the same corner.
    """
    y, S0 = prev
    _, S1 = cur
    c0 = cube_vertices(P, y, S0)
    c1 = cube_vertices(P, y, S1)
    if c0 & c1 != {y}:
        return False
    if direction == "up":
        return star_vertices(P, y, S0) & c1 == {y}
    return c0 & star_vertices(P, y, S1) == {y}


def _descent_cube(P: RacgPresentation, y, x) -> tuple[int, ...]:
    """Letters s whose edge at y strictly decreases the graph distance to x."""
    u = P.multiply(P.inverse(y), x)
    lu = len(u)
    S = tuple(s for s in range(P.n) if len(P.multiply((s,), u)) < lu)
    for a, b in itertools.combinations(S, 2):
        if not P.commute(a, b):
            raise AssertionError("descent letters do not span a cube")
    return S


def _up_path(P: RacgPresentation, v, x) -> NormalPath:
    v, x = tuple(v), tuple(x)
    verts = [v]
    cubes = []
    y = v
    while y != x:
        S = _descent_cube(P, y, x)
        cubes.append((y, S))
        y = P.multiply(y, S)
        verts.append(y)
    path = NormalPath(verts, cubes, "up")
    for i in range(1, len(cubes)):
        y = verts[i]
        if not normal_condition(P, (y, cubes[i - 1][1]), cubes[i], "up"):
            raise AssertionError(f"constructed path fails the normal condition at step {i}")
    return path


def normal_path(king: KingBall, v, x, direction: str = "up") -> NormalPath:
    """[v up x] or [v down x]; the latter is the reverse of [x up v]."""
    for w in (v, x):
        if king.dist(w) is None:
            raise ValueError(f"vertex {w} outside the computed radius")
    P = king.P
    if direction == "up":
        return _up_path(P, v, x)
    if direction == "down":
        path = _up_path(P, x, v).reversed()
        for i in range(1, len(path.cubes)):
            y = path.vertices[i]
            if not normal_condition(P, (y, path.cubes[i - 1][1]), path.cubes[i], "down"):
                raise AssertionError(f"reversed path fails the down condition at step {i}")
        return path
    raise ValueError(f"unknown direction {direction!r}")


def enumerate_normal_paths(P: RacgPresentation, v, x, k: int, direction: str = "up") -> list[NormalPath]:
    """Every cube path of length k from v to x satisfying the normal condition.

    Brute force: branch over all cubes at each vertex, pruning only by the bound
    graph distance <= (max cube dimension) * remaining steps.
    """
    v, x = tuple(v), tuple(x)
    dim = max(len(c) for c in P.cliques()) if P.n else 1
    xinv = P.inverse(x)
    found = []

    def gdist(y):
        return len(P.multiply(xinv, y))

    def rec(verts, cubes):
        i = len(cubes)
        y = verts[-1]
        if i == k:
            if y == x:
                found.append(NormalPath(list(verts), list(cubes), direction))
            return
        for S in P.cliques():
            y2 = P.multiply(y, S)
            if gdist(y2) > dim * (k - i - 1):
                continue
            if i > 0 and not normal_condition(P, (y, cubes[-1][1]), (y, S), direction):
                continue
            if y2 in verts:
                continue
            verts.append(y2)
            cubes.append((y, S))
            rec(verts, cubes)
            verts.pop()
            cubes.pop()

    rec([v], [])
    return found


# ---------------------------------------------------------------------------
# sphere classification


@dataclass
class VertexClass:
    kind: str                        # "free", "partly-free" or "unclassified"
    inner: tuple = ()                # pf: (y, label); free: the inner square-opposite vertex
    sphere_nbrs: tuple = ()          # edge-neighbours in the same sphere


def link_in_ball(king: KingBall, x, n: int):
    """Lk(x, B_n): labels of edges into B_n, and label pairs spanning squares inside B_n."""
    P = king.P
    verts = {}
    for y, s in king.edge_neighbors(x):
        d = king.dist(y)
        if d is not None and d <= n:
            verts[s] = (y, d)
    edges = set()
    for s, t in itertools.combinations(sorted(verts), 2):
        if P.commute(s, t):
            d = king.dist(P.multiply(x, (s, t)))
            if d is not None and d <= n:
                edges.add((s, t))
    return verts, edges


def classify_vertex(king: KingBall, x, n: int | None = None) -> VertexClass:
    P = king.P
    if n is None:
        n = king.dist(x)
    verts, edges = link_in_ball(king, x, n)
    inner = [(y, s) for s, (y, d) in verts.items() if d == n - 1]
    same = tuple(sorted(y for s, (y, d) in verts.items() if d == n))
    if len(inner) == 1:
        y, e = inner[0]
        star_v = {e} | {t for t in range(P.n) if P.commute(e, t)}
        star_e = {tuple(sorted((e, t))) for t in star_v if t != e}
        if set(verts) == star_v and edges == star_e:
            return VertexClass("partly-free", (y, e), same)
    if len(verts) == 2 and len(edges) == 1:
        s, t = next(iter(edges))
        opp = P.multiply(x, (s, t))
        return VertexClass("free", (opp,), same)
    return VertexClass("unclassified", tuple(inner), same)


def sector_of(king: KingBall, x) -> CoxeterElement:
    """The vertex of S_1(v) on [v down x]."""
    path = normal_path(king, king.base, x, "down")
    return path.vertices[1]


@dataclass
class SphereStructure:
    n: int
    classes: dict[CoxeterElement, VertexClass]
    blocks: list[list[CoxeterElement]]
    extended_blocks: list[list[CoxeterElement]]
    sectors: dict[CoxeterElement, CoxeterElement]

    def partly_free(self) -> list[CoxeterElement]:
        return [x for x, c in self.classes.items() if c.kind == "partly-free"]

    def free(self) -> list[CoxeterElement]:
        return [x for x, c in self.classes.items() if c.kind == "free"]

    def block_of(self) -> dict[CoxeterElement, int]:
        return {x: i for i, b in enumerate(self.blocks) for x in b}

    def counts(self) -> dict:
        return {"n": self.n, "vertices": len(self.classes), "partly_free": len(self.partly_free()),
                "free": len(self.free()),
                "unclassified": sum(c.kind == "unclassified" for c in self.classes.values()),
                "blocks": len(self.blocks),
                "max_block": max((len(b) for b in self.blocks), default=0)}


def _check_girth(king: KingBall):
    if king.P.L.edges() and girth(king.P.L) < 5:
        raise InapplicableError(f"link girth {girth(king.P.L)} < 5")


def block_containing(king: KingBall, x, n: int, classes: dict, limit: int = 3) -> list:
    """Partly-free component of x in S_n, explored until ``limit`` vertices are found."""
    seen = [x]
    q = deque([x])
    while q and len(seen) < limit:
        y = q.popleft()
        for z in classes_get(king, y, n, classes).sphere_nbrs:
            if z not in seen and classes_get(king, z, n, classes).kind == "partly-free":
                seen.append(z)
                q.append(z)
    return seen


def classes_get(king, x, n, classes):
    c = classes.get(x)
    if c is None:
        c = classes[x] = classify_vertex(king, x, n)
    return c


def classify_sphere(king: KingBall, n: int) -> SphereStructure:
    """Classify every vertex of S_n and group the partly-free ones into blocks and sectors."""
    _check_girth(king)
    if n < 1 or n > king.radius:
        raise ValueError(f"sphere {n} outside 1..{king.radius}")
    sphere = king.sphere(n)
    classes = {x: classify_vertex(king, x, n) for x in sphere}
    pf = [x for x in sphere if classes[x].kind == "partly-free"]
    pfset = set(pf)
    blocks = []
    seen = set()
    for x in pf:
        if x in seen:
            continue
        comp = []
        q = deque([x])
        seen.add(x)
        while q:
            y = q.popleft()
            comp.append(y)
            for z in classes[y].sphere_nbrs:
                if z in pfset and z not in seen:
                    seen.add(z)
                    q.append(z)
        blocks.append(sorted(comp, key=lambda u: (len(u), u)))
    ext = []
    for b in blocks:
        extra = sorted({z for y in b for z in classes[y].sphere_nbrs
                        if classes[z].kind == "free"}, key=lambda u: (len(u), u))
        ext.append(b + extra)
    sectors = {x: sector_of(king, x) for x in pf}
    return SphereStructure(n, classes, blocks, ext, sectors)


# ---------------------------------------------------------------------------
# claim checks


@dataclass
class ClaimReport:
    ok: bool = True
    checked: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def fail(self, claim: str, **witness):
        self.ok = False
        if len(self.failures) < 20:
            self.failures.append({"claim": claim, **{k: _jsonable(v) for k, v in witness.items()}})

    def count(self, key: str, k: int = 1):
        self.checked[key] = self.checked.get(key, 0) + k

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": dict(sorted(self.checked.items())), "failures": self.failures}


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def check_vertex_claims(king: KingBall, x, n: int, classes: dict, report: ClaimReport,
                        paths: bool = True) -> None:
    """All per-vertex checks for x in S_n (see verify_sphere_claims)."""
    P = king.P
    c = classes_get(king, x, n, classes)
    report.count(f"S{n}.vertices")
    if c.kind == "unclassified":
        report.fail("free-or-partly-free", n=n, x=x)
        return
    up = normal_path(king, king.base, x, "up")
    if len(up) != n:
        report.fail("normal-path-length", n=n, x=x, length=len(up))
    y = up.vertices[-2]
    if c.kind == "partly-free":
        report.count(f"S{n}.partly_free")
        if y != c.inner[0]:
            report.fail("penultimate-is-inner-neighbour", n=n, x=x, penultimate=y, inner=c.inner[0])
        block = block_containing(king, x, n, classes)
        if len(block) >= 3:
            report.fail("no-three-consecutive-partly-free", n=n, block=block)
        secs = {sector_of(king, z) for z in block}
        report.count(f"S{n}.block_sector_checks")
        if len(secs) != 1:
            report.fail("block-in-one-sector", n=n, block=block, sectors=sorted(secs))
    else:
        report.count(f"S{n}.free")
        if y != c.inner[0]:
            report.fail("penultimate-is-square-opposite", n=n, x=x, penultimate=y, opposite=c.inner[0])
        nb = c.sphere_nbrs
        if len(nb) != 2 or any(classes_get(king, z, n, classes).kind != "partly-free" for z in nb):
            report.fail("free-neighbours-partly-free", n=n, x=x, neighbours=nb)
        elif P.multiply(P.inverse(nb[0]), nb[1]) not in {P.normalize((s, t)) for s in range(P.n)
                                                           for t in range(P.n) if P.commute(s, t)}:
            report.fail("free-neighbours-in-one-square", n=n, x=x, neighbours=nb)
    if paths:
        check_paths(king, x, n, report)


def check_paths(king: KingBall, x, n: int, report: ClaimReport) -> None:
    P = king.P
    v = king.base
    up = normal_path(king, v, x, "up")
    down = normal_path(king, v, x, "down")
    report.count("path_pairs")
    if len(up) != len(down):
        report.fail("up-down-equal-length", x=x)
    ups = enumerate_normal_paths(P, v, x, n, "up")
    if len(ups) != 1 or ups[0].vertices != up.vertices:
        report.fail("unique-up-path", x=x, count=len(ups))
    downs = enumerate_normal_paths(P, v, x, n, "down")
    back = normal_path(king, x, v, "up").vertices[::-1]
    if len(downs) != 1 or downs[0].vertices != down.vertices or down.vertices != back:
        report.fail("down-is-reverse-up", x=x, count=len(downs))
    # concatenation at every intermediate vertex of [v up x]
    for u in up.vertices[1:-1]:
        a = normal_path(king, v, u, "up").vertices
        b = normal_path(king, u, x, "up").vertices
        if a + b[1:] != up.vertices:
            report.fail("path-concatenation", x=x, via=u)


def verify_sphere_claims(king: KingBall, n: int, vertices: Iterable | None = None,
                         paths: bool = True) -> ClaimReport:
    """Check the sphere claims on S_n (or on the given vertices of S_n).

    Per vertex: it is free or partly free; for partly-free x the penultimate
    vertex of [v up x] is its inner neighbour, its block has fewer than three
    vertices and lies in one sector; for free x both sphere-neighbours are
    partly free and span a square with x. With ``paths`` the normal paths to x
    are checked against brute-force enumeration.
    """
    _check_girth(king)
    if n < 1 or n > king.radius:
        raise ValueError(f"sphere {n} outside 1..{king.radius}")
    report = ClaimReport()
    classes: dict = {}
    if vertices is None:
        vertices = king.sphere(n)
    for x in vertices:
        if king.dist(x) != n:
            raise ValueError(f"{x} is not on sphere {n}")
        check_vertex_claims(king, x, n, classes, report, paths)
    return report


# ---------------------------------------------------------------------------
# symmetry


def act(P: RacgPresentation, phi: Sequence[int], w) -> CoxeterElement:
    """Letterwise image of w under a label automorphism phi (images of generator indices)."""
    return P.shortlex([phi[s] for s in w])


def sphere_representatives(king: KingBall, n: int, auts: Sequence[Sequence[int]]):
    """A list of S_k vertices meeting every orbit of the letterwise action, for k = 0..n.

    Built level by level: every x in S_k is r C for some r in S_{k-1} and cube C
    at r (the last cube of [v up x]); after moving r to a chosen representative,
    C only matters up to the stabiliser of that representative.
    """
    if king.base != ():
        raise ValueError("representatives are computed around the identity")
    P = king.P
    levels = [[()]]
    for k in range(1, n + 1):
        reps = []
        seen = set()
        for r in levels[-1]:
            stab = [phi for phi in auts if act(P, phi, r) == r]
            done = set()
            for C in P.cliques():
                if C in done:
                    continue
                orbit = {tuple(sorted(phi[c] for c in C)) for phi in stab}
                done |= orbit
                x = P.multiply(r, C)
                if king.dist(x) == k and x not in seen:
                    seen.add(x)
                    reps.append(x)
        levels.append(reps)
    return levels


# ---------------------------------------------------------------------------
# export


def sphere_stats_csv(king: KingBall, structures: Sequence[SphereStructure]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "vertices", "partly_free", "free", "unclassified", "blocks", "max_block"])
    for s in structures:
        c = s.counts()
        w.writerow([c["n"], c["vertices"], c["partly_free"], c["free"], c["unclassified"],
                    c["blocks"], c["max_block"]])
    return buf.getvalue()
