"""Right-angled Coxeter groups and finite balls of their Davis complexes.

Group elements are tuples of generator indices in ShortLex normal form. The
generator order is the vertex order of the defining graph.
"""

from __future__ import annotations

import io
import json
import struct
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complexes import FlagComplex

CoxeterElement = tuple  # ShortLex normal form, a tuple of generator indices

DEFAULT_CAP = 5_000_000


class RacgPresentation:
    """W_L: generators V(L), relations a^2 and [a, b] for edges {a, b}."""

    def __init__(self, L: FlagComplex):
        self.L = L
        self.n = len(L)
        self.comm = [0] * self.n
        for i in range(self.n):
            for j in L.adj[i]:
                self.comm[i] |= 1 << j
        self._cliques = None

    @property
    def labels(self) -> list:
        return self.L.vertices

    def commute(self, a: int, b: int) -> bool:
        return bool(self.comm[a] >> b & 1)

    def letter(self, x) -> int:
        if isinstance(x, int) and 0 <= x < self.n:
            return x
        try:
            return self.L.index(x)
        except KeyError:
            raise ValueError(f"unknown letter {x!r}") from None

    def cliques(self) -> list[tuple[int, ...]]:
        """Nonempty cliques of L: the cubes at a vertex of X_L."""
        if self._cliques is None:
            self._cliques = self.L.simplices()
        return self._cliques

    # word problem ---------------------------------------------------------
    def _push(self, u: list[int], s: int) -> None:
        """Right-multiply the reduced word u by s in place (reduced, not yet ShortLex)."""
        comm = self.comm
        for j in range(len(u) - 1, -1, -1):
            c = u[j]
            if c == s:
                del u[j]
                return
            if not comm[s] >> c & 1:
                break
        u.append(s)

    def shortlex(self, u: Sequence[int]) -> CoxeterElement:
        """Lexicographically least linearisation of the heap of a reduced word."""
        u = list(u)
        comm = self.comm
        out = []
        while u:
            best = None
            for p, c in enumerate(u):
                # c can be moved to the front iff it commutes with everything before it
                if best is None or c < u[best]:
                    ok = True
                    for q in range(p):
                        if not comm[c] >> u[q] & 1:
                            ok = False
                            break
                    if ok:
                        best = p
            out.append(u.pop(best))
        return tuple(out)

    def normalize(self, word: Iterable) -> CoxeterElement:
        u: list[int] = []
        for x in word:
            self._push(u, self.letter(x))
        return self.shortlex(u)

    def multiply(self, u: Sequence[int], v: Sequence[int]) -> CoxeterElement:
        w = list(u)
        for s in v:
            self._push(w, s)
        return self.shortlex(w)

    def inverse(self, u: Sequence[int]) -> CoxeterElement:
        return self.shortlex(list(reversed(u)))

    def length(self, u: Sequence[int]) -> int:
        return len(self.normalize(u))

    def left_descents(self, u: Sequence[int]) -> tuple[int, ...]:
        """Letters s with l(s u) < l(u), for u reduced."""
        comm = self.comm
        out = []
        for p, c in enumerate(u):
            if c in out:
                continue
            if all(comm[c] >> u[q] & 1 for q in range(p)):
                out.append(c)
        return tuple(sorted(out))

    def foata(self, u: Sequence[int]) -> list[tuple[int, ...]]:
        """Layers of the heap: each layer is the set of minimal letters of what remains."""
        u = list(u)
        layers = []
        comm = self.comm
        while u:
            # minimal elements of the heap: every earlier letter commutes with them
            idx = [p for p in range(len(u))
                   if all(comm[u[p]] >> u[q] & 1 for q in range(p))]
            layers.append(tuple(sorted(u[p] for p in idx)))
            u = [c for p, c in enumerate(u) if p not in idx]
        return layers

    def height(self, u: Sequence[int]) -> int:
        return len(self.foata(u))

    def word_str(self, u: Sequence[int]) -> str:
        return ".".join(str(self.labels[s]) for s in u) or "e"


# ---------------------------------------------------------------------------
# balls


@dataclass
class Wall:
    """The hyperplane dual to the edge (g, g s); reflection r = g s g^{-1}."""

    label: int
    edge: tuple[CoxeterElement, CoxeterElement]
    reflection: CoxeterElement

    def side(self, P: RacgPresentation, w: Sequence[int]) -> str:
        """``near`` if w is on the identity's side, else ``far``."""
        return "far" if len(P.multiply(self.reflection, w)) < len(w) else "near"


def wall_of_edge(P: RacgPresentation, g: Sequence[int], s: int) -> Wall:
    gs = P.multiply(g, (s,))
    r = P.multiply(P.multiply(g, (s,)), P.inverse(g))
    a, b = (tuple(g), gs) if len(g) < len(gs) else (gs, tuple(g))
    return Wall(s, (a, b), r)


class DavisBall:
    """A finite ball of X_L around the identity.

    ``metric="graph"`` collects all elements of word length <= radius;
    ``metric="linf"`` collects all elements reachable by <= radius cube moves
    (the l-infinity ball). Adjacency and squares are computed on demand.
    """

    def __init__(self, P: RacgPresentation, radius: int, metric: str,
                 vertices: list[CoxeterElement], dist: list[int]):
        self.P = P
        self.radius = radius
        self.metric = metric
        self.vertices = vertices
        self.dist = dist
        self.index = {w: i for i, w in enumerate(vertices)}
        self._nbrs: dict[int, list[tuple[int, int]]] = {}

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, w) -> bool:
        return tuple(w) in self.index

    def sphere_sizes(self) -> list[int]:
        out = [0] * (self.radius + 1)
        for k in self.dist:
            out[k] += 1
        return out

    def neighbors(self, i: int) -> list[tuple[int, int]]:
        """(j, s) for each generator s with w s inside the ball."""
        got = self._nbrs.get(i)
        if got is None:
            w = self.vertices[i]
            got = []
            for s in range(self.P.n):
                j = self.index.get(self.P.multiply(w, (s,)))
                if j is not None:
                    got.append((j, s))
            self._nbrs[i] = got
        return got

    def edges(self) -> list[tuple[int, int, int]]:
        out = []
        for i in range(len(self)):
            for j, s in self.neighbors(i):
                if i < j:
                    out.append((i, j, s))
        return out

    def squares_at(self, i: int) -> list[tuple[int, int, int, int, int, int]]:
        """Squares with a corner at i: (i, i s, i s t, i t, s, t) with s < t adjacent in L."""
        w = self.vertices[i]
        nb = {s: j for j, s in self.neighbors(i)}
        out = []
        for s in nb:
            for t in nb:
                if s < t and self.P.commute(s, t):
                    k = self.index.get(self.P.multiply(w, (s, t)))
                    if k is not None:
                        out.append((i, nb[s], k, nb[t], s, t))
        return out

    def squares(self) -> list[tuple[int, int, int, int, int, int]]:
        """Each square once, listed from its smallest vertex index."""
        out = []
        for i in range(len(self)):
            for sq in self.squares_at(i):
                if i == min(sq[:4]):
                    out.append(sq)
        return out

    def link_at(self, i: int) -> FlagComplex:
        """Link at i: the edges at i as vertices (by label), joined when they span a square."""
        labs = sorted(s for _, s in self.neighbors(i))
        edges = [(sq[4], sq[5]) for sq in self.squares_at(i)]
        return FlagComplex.from_edges(labs, edges)

    def walls(self) -> dict[CoxeterElement, Wall]:
        """Every wall crossing an edge of the ball, keyed by its reflection."""
        out: dict[CoxeterElement, Wall] = {}
        for i, j, s in self.edges():
            a = self.vertices[i] if self.dist[i] <= self.dist[j] else self.vertices[j]
            wl = wall_of_edge(self.P, a, s)
            out.setdefault(wl.reflection, wl)
        return out

    def wall_side(self, wall: Wall, w) -> str:
        w = tuple(w)
        if w not in self.index:
            raise ValueError("vertex outside the ball")
        return wall.side(self.P, w)

    # export ---------------------------------------------------------------
    def growth_json(self) -> str:
        return json.dumps({"metric": self.metric, "radius": self.radius,
                           "sphere_sizes": self.sphere_sizes()}, sort_keys=True)

    def to_dot(self) -> str:
        lines = ["graph X {"]
        for i, w in enumerate(self.vertices):
            lines.append(f'  v{i} [label="{self.P.word_str(w)}"];')
        for i, j, s in self.edges():
            lines.append(f'  v{i} -- v{j} [label="{self.P.labels[s]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _estimate_next(sizes: list[int]) -> int:
    if len(sizes) < 2 or sizes[-2] == 0:
        return sizes[-1] * 2
    return int(sizes[-1] * sizes[-1] / sizes[-2]) + 1


def build_ball(P: RacgPresentation, n: int, metric: str = "graph",
               cap: int = DEFAULT_CAP) -> DavisBall:
    """BFS ball of radius n around the identity (see DavisBall for the metrics)."""
    if n < 0:
        raise ValueError("radius must be non-negative")
    if metric == "graph":
        moves = [(s,) for s in range(P.n)]
    elif metric == "linf":
        moves = P.cliques()
    else:
        raise ValueError(f"unknown metric {metric!r}")
    vertices: list[CoxeterElement] = [()]
    dist = [0]
    seen = {(): 0}
    frontier = [()]
    sizes = [1]
    for k in range(1, n + 1):
        est = sum(sizes) + _estimate_next(sizes) if k > 1 else 1 + len(moves)
        if est > cap:
            raise ValueError(f"ball of radius {n} projected to exceed {cap} vertices "
                             f"(estimate {est} at level {k})")
        nxt = []
        for w in frontier:
            for m in moves:
                u = P.multiply(w, m)
                if u not in seen:
                    seen[u] = k
                    nxt.append(u)
        nxt.sort(key=lambda u: (len(u), u))
        vertices.extend(nxt)
        dist.extend([k] * len(nxt))
        sizes.append(len(nxt))
        frontier = nxt
    return DavisBall(P, n, metric, vertices, dist)


# ---------------------------------------------------------------------------
# binary cache

MAGIC = b"ODLB"
VERSION = 1


def save_ball(ball: DavisBall, fh) -> None:
    """Versioned binary dump: header, JSON metadata, vertex table, edges, squares."""
    meta = {"metric": ball.metric, "radius": ball.radius, "n_gens": ball.P.n,
            "labels": [str(x) for x in ball.P.labels],
            "L_edges": [list(e) for e in ball.P.L.edges()]}
    mb = json.dumps(meta, sort_keys=True).encode()
    lens = np.array([len(w) for w in ball.vertices], dtype=np.int32)
    flat = np.array([s for w in ball.vertices for s in w], dtype=np.int32)
    dist = np.array(ball.dist, dtype=np.int32)
    edges = np.array(ball.edges(), dtype=np.int32).reshape(-1, 3)
    squares = np.array(ball.squares(), dtype=np.int32).reshape(-1, 6)
    fh.write(MAGIC)
    fh.write(struct.pack("<HI", VERSION, len(mb)))
    fh.write(mb)
    for arr in (lens, flat, dist, edges, squares):
        b = arr.tobytes()
        fh.write(struct.pack("<Q", len(b)))
        fh.write(b)


def load_ball(fh, P: RacgPresentation):
    """Inverse of save_ball; returns (ball, edges, squares)."""
    if fh.read(4) != MAGIC:
        raise ValueError("not a ball cache file")
    version, mlen = struct.unpack("<HI", fh.read(6))
    if version != VERSION:
        raise ValueError(f"unsupported cache version {version}")
    meta = json.loads(fh.read(mlen))
    if meta["n_gens"] != P.n or [list(e) for e in P.L.edges()] != meta["L_edges"]:
        raise ValueError("cache was built for a different presentation")
    arrs = []
    for _ in range(5):
        (k,) = struct.unpack("<Q", fh.read(8))
        arrs.append(np.frombuffer(fh.read(k), dtype=np.int32))
    lens, flat, dist, edges, squares = arrs
    verts = []
    pos = 0
    for k in lens:
        verts.append(tuple(int(x) for x in flat[pos:pos + k]))
        pos += k
    ball = DavisBall(P, meta["radius"], meta["metric"], verts, [int(x) for x in dist])
    return ball, edges.reshape(-1, 3), squares.reshape(-1, 6)
