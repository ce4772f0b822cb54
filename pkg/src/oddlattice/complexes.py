"""Flag complexes, Odd graphs, joins, automorphisms and the superstar checker."""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .perm import Permutation, PermutationGroup

MAX_BITS = 64


@dataclass(frozen=True, order=True)
class SubsetVertex:
    """A (d-1)-subset of [2d-1], stored as a bit set (bit i-1 set iff i is a member)."""

    d: int
    mask: int

    def __post_init__(self):
        if 2 * self.d - 1 > MAX_BITS:
            raise ValueError(f"d={self.d} exceeds the {MAX_BITS}-bit width")
        if self.mask >> (2 * self.d - 1):
            raise ValueError("members outside [2d-1]")
        if bin(self.mask).count("1") != self.d - 1:
            raise ValueError(f"expected {self.d - 1} members, got {self.members}")

    @classmethod
    def of(cls, d: int, members: Iterable[int]) -> "SubsetVertex":
        mask = 0
        for a in members:
            if not 1 <= a <= 2 * d - 1:
                raise ValueError(f"member {a} outside [1, {2 * d - 1}]")
            mask |= 1 << (a - 1)
        return cls(d, mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(2 * self.d - 1) if self.mask >> i & 1)

    def disjoint(self, other: "SubsetVertex") -> bool:
        return not (self.mask & other.mask)

    def apply(self, p: Permutation) -> "SubsetVertex":
        return SubsetVertex.of(self.d, (p(a) for a in self.members))

    def __str__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass
class FlagComplex:
    """A flag simplicial complex given by its 1-skeleton.

    Vertices are arbitrary hashable labels; simplices are the cliques.
    """

    vertices: list
    adj: list[set[int]]
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise ValueError("duplicate vertex labels")

    @classmethod
    def from_edges(cls, vertices: Sequence, edges: Iterable[tuple]) -> "FlagComplex":
        vertices = list(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        adj = [set() for _ in vertices]
        for a, b in edges:
            i, j = index[a], index[b]
            if i == j:
                raise ValueError("loops are not allowed")
            adj[i].add(j)
            adj[j].add(i)
        return cls(vertices, adj, index)

    def __len__(self):
        return len(self.vertices)

    def index(self, v) -> int:
        return self._index[v]

    def degree(self, i: int) -> int:
        return len(self.adj[i])

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adj[i]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(len(self)) for j in sorted(self.adj[i]) if i < j]

    def is_clique(self, idx: Iterable[int]) -> bool:
        idx = list(idx)
        return all(b in self.adj[a] for a, b in itertools.combinations(idx, 2))

    def simplices(self, max_dim: int | None = None) -> list[tuple[int, ...]]:
        """All nonempty cliques, as sorted index tuples, by dimension then lexicographically."""
        out: list[tuple[int, ...]] = []

        def grow(clique, cands):
            out.append(clique)
            if max_dim is not None and len(clique) > max_dim:
                return
            for j in sorted(cands):
                if j > clique[-1]:
                    grow(clique + (j,), cands & self.adj[j])

        for i in range(len(self)):
            grow((i,), self.adj[i])
        out.sort(key=lambda s: (len(s), s))
        return out

    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices()), default=-1)

    def is_triangle_free(self) -> bool:
        return all(not (self.adj[i] & self.adj[j]) for i, j in self.edges())

    def is_regular(self) -> bool:
        return len({len(a) for a in self.adj}) <= 1

    def to_json(self) -> dict:
        def lab(v):
            return list(v.members) if isinstance(v, SubsetVertex) else v
        return {"vertices": [lab(v) for v in self.vertices],
                "edges": [[lab(self.vertices[i]), lab(self.vertices[j])] for i, j in self.edges()]}

    def to_dot(self, name: str = "L") -> str:
        lines = [f"graph {name} {{"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  n{i} [label="{v}"];')
        for i, j in self.edges():
            lines.append(f"  n{i} -- n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_odd(d: int) -> FlagComplex:
    """The Odd graph O_d: (d-1)-subsets of [2d-1], adjacent iff disjoint."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if 2 * d - 1 > MAX_BITS:
        raise ValueError(f"d={d} too large for {MAX_BITS}-bit subset vertices")
    verts = [SubsetVertex.of(d, c) for c in itertools.combinations(range(1, 2 * d), d - 1)]
    masks = [v.mask for v in verts]
    index = {m: i for i, m in enumerate(masks)}
    full = (1 << (2 * d - 1)) - 1
    adj = []
    for m in masks:
        rest = full & ~m
        # neighbours are the (d-1)-subsets of the d-element complement
        nb = set()
        r = rest
        while r:
            low = r & -r
            nb.add(index[rest & ~low])
            r ^= low
        adj.append(nb)
    return FlagComplex(verts, adj, {v: i for i, v in enumerate(verts)})


def edgeless(labels: Sequence) -> FlagComplex:
    return FlagComplex(list(labels), [set() for _ in labels])


def join(K1: FlagComplex, K2: FlagComplex) -> FlagComplex:
    """Join: disjoint union plus every cross edge. Colliding labels are tagged by side."""
    l1, l2 = list(K1.vertices), list(K2.vertices)
    if set(l1) & set(l2):
        l1 = [(1, v) for v in l1]
        l2 = [(2, v) for v in l2]
    n1 = len(l1)
    adj = [set(a) for a in K1.adj] + [{j + n1 for j in a} for a in K2.adj]
    for i in range(n1):
        for j in range(len(l2)):
            adj[i].add(n1 + j)
            adj[n1 + j].add(i)
    return FlagComplex(l1 + l2, adj)


def girth(G: FlagComplex) -> float:
    """Length of the shortest cycle of the 1-skeleton (``math.inf`` for forests)."""
    if not G.edges():
        raise ValueError("graph has no edges")
    best = math.inf
    for root in range(len(G)):
        dist = {root: 0}
        parent = {root: -1}
        q = deque([root])
        while q:
            u = q.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in G.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


# ---------------------------------------------------------------------------
# isomorphisms of finite complexes


@dataclass
class Subcomplex:
    """A finite simplicial complex on a subset of an ambient vertex set."""

    vertices: tuple[int, ...]
    simplices: frozenset[frozenset[int]]

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in self.vertices}
        for s in self.simplices:
            if len(s) == 2:
                a, b = tuple(s)
                adj[a].add(b)
                adj[b].add(a)
        return adj


def neighbourhood(K: FlagComplex, sigma: Iterable[int]) -> Subcomplex:
    """N_1(sigma): the union of the closed stars of the vertices of sigma."""
    sigma = tuple(sigma)
    simp = set()
    for s in K.simplices():
        ss = set(s)
        for u in sigma:
            if u in ss or ss <= K.adj[u]:
                simp.add(frozenset(ss))
                break
    verts = tuple(sorted({v for s in simp for v in s}))
    return Subcomplex(verts, frozenset(simp))


def isomorphisms(A: Subcomplex, B: Subcomplex, fixed: dict[int, int] | None = None):
    """Yield every simplicial isomorphism A -> B extending ``fixed`` as a dict."""
    if len(A.vertices) != len(B.vertices) or len(A.simplices) != len(B.simplices):
        return
    adjA, adjB = A.adjacency(), B.adjacency()
    fixed = dict(fixed or {})
    # order the vertices of A so that each one is adjacent to an earlier one when possible
    order = list(fixed)
    rest = [v for v in A.vertices if v not in fixed]
    while rest:
        rest.sort(key=lambda v: (-len(adjA[v] & set(order)), -len(adjA[v]), v))
        order.append(rest.pop(0))
    for a, b in fixed.items():
        if len(adjA[a]) != len(adjB[b]):
            return
    for a1, b1 in fixed.items():
        for a2, b2 in fixed.items():
            if (a2 in adjA[a1]) != (b2 in adjB[b1]):
                return
    start = len(fixed)
    phi = dict(fixed)
    used = set(phi.values())

    def rec(k):
        if k == len(order):
            if all(frozenset(phi[v] for v in s) in B.simplices for s in A.simplices):
                yield dict(phi)
            return
        a = order[k]
        mapped_nb = [phi[x] for x in adjA[a] if x in phi]
        mapped_non = [phi[x] for x in phi if x not in adjA[a] and x != a]
        for b in B.vertices:
            if b in used or len(adjB[b]) != len(adjA[a]):
                continue
            if any(y not in adjB[b] for y in mapped_nb):
                continue
            if any(y in adjB[b] for y in mapped_non):
                continue
            phi[a] = b
            used.add(b)
            yield from rec(k + 1)
            used.discard(b)
            del phi[a]

    yield from rec(start)


def whole(K: FlagComplex) -> Subcomplex:
    return Subcomplex(tuple(range(len(K))), frozenset(frozenset(s) for s in K.simplices()))


def automorphisms(K: FlagComplex) -> list[tuple[int, ...]]:
    """All automorphisms by backtracking, as image tuples over vertex indices."""
    W = whole(K)
    return [tuple(phi[i] for i in range(len(K))) for phi in isomorphisms(W, W)]


def odd_automorphisms(d: int, K: FlagComplex | None = None) -> list[tuple[int, ...]]:
    """Sym_{2d-1} acting on the vertices of O_d, as image tuples."""
    K = K or build_odd(d)
    out = []
    for img in itertools.permutations(range(1, 2 * d)):
        p = Permutation(img)
        out.append(tuple(K.index(v.apply(p)) for v in K.vertices))
    return out


def point_permutation(d: int, K: FlagComplex, vimg: Sequence[int]) -> Permutation | None:
    """Recover the permutation of [2d-1] inducing a vertex permutation of O_d, if any."""
    n = 2 * d - 1
    if d == 2:
        img = [K.vertices[vimg[K.index(SubsetVertex.of(2, [a]))]].members[0] for a in range(1, n + 1)]
        return Permutation(tuple(img))
    full = (1 << n) - 1
    img = []
    for a in range(1, n + 1):
        m = full
        for i, v in enumerate(K.vertices):
            if v.mask >> (a - 1) & 1:
                m &= K.vertices[vimg[i]].mask
        if bin(m).count("1") != 1:
            return None
        img.append(m.bit_length())
    try:
        p = Permutation(tuple(img))
    except ValueError:
        return None
    if any(K.index(v.apply(p)) != vimg[i] for i, v in enumerate(K.vertices)):
        return None
    return p


# ---------------------------------------------------------------------------
# fixators in Aut(O_d) = Sym_{2d-1}


@dataclass
class FixatorReport:
    d: int
    target: str
    points: tuple[int, ...]      # vertex indices fixed pointwise
    order: int
    group: PermutationGroup      # on [2d-1]
    mode: str


def _target_points(K: FlagComplex, d: int, target: str, A=None, e=None) -> list[int]:
    if target in ("vertex", "star"):
        A = A or SubsetVertex.of(d, range(1, d))
        a = K.index(A)
        return [a] if target == "vertex" else sorted({a} | K.adj[a])
    if target in ("edge", "edge-star"):
        if e is None:
            B = SubsetVertex.of(d, range(1, d))
            C = SubsetVertex.of(d, range(d, 2 * d - 1))
            e = (B, C)
        b, c = K.index(e[0]), K.index(e[1])
        if not K.has_edge(b, c):
            raise ValueError("not an edge of O_d")
        return [b, c] if target == "edge" else sorted({b, c} | K.adj[b] | K.adj[c])
    raise ValueError(f"unknown target {target!r}")


def fixator_report(d: int, target: str, A=None, e=None, mode: str = "brute") -> FixatorReport:
    """Pointwise fixator in Sym_{2d-1} of a vertex, edge, star N_1(A) or edge-star N_1(e).

    ``mode="brute"`` scans all of Sym_{2d-1} (d <= 4); ``mode="chain"`` uses a
    pointwise stabilizer in the action on V(O_d).
    """
    K = build_odd(d)
    pts = _target_points(K, d, target, A, e)
    n = 2 * d - 1
    if mode == "brute":
        if d > 4:
            raise ValueError(f"brute force over Sym_{n} is not supported for d={d}; use mode='chain'")
        masks = [K.vertices[i] for i in pts]
        elems = []
        for img in itertools.permutations(range(1, n + 1)):
            p = Permutation(img)
            if all(v.apply(p) == v for v in masks):
                elems.append(p)
        group = PermutationGroup(elems, n)
        if group.order() != len(elems):
            raise AssertionError("brute-force element list is not closed")
        return FixatorReport(d, target, tuple(pts), len(elems), group, mode)
    if mode == "chain":
        gens = [Permutation.from_cycles(n, [(1, 2)]), Permutation.from_cycles(n, [tuple(range(1, n + 1))])]
        vg = [Permutation(tuple(K.index(v.apply(g)) + 1 for v in K.vertices)) for g in gens]
        stab = PermutationGroup(vg, len(K)).pointwise_stabilizer([p + 1 for p in pts])
        back = []
        for g in stab.generators:
            p = point_permutation(d, K, [x - 1 for x in g.images])
            if p is None:
                raise AssertionError("vertex permutation not induced by Sym")
            back.append(p)
        group = PermutationGroup(back, n)
        return FixatorReport(d, target, tuple(pts), stab.order(), group, mode)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# superstar transitivity


@dataclass
class SuperstarReport:
    holds: bool
    case: int | None = None
    sigma: tuple | None = None
    sigma_prime: tuple | None = None
    isomorphism: dict | None = None
    checked: int = 0

    def to_json(self) -> dict:
        return {"holds": self.holds, "case": self.case,
                "sigma": list(self.sigma) if self.sigma else None,
                "sigma_prime": list(self.sigma_prime) if self.sigma_prime else None,
                "isomorphism": ({str(k): v for k, v in self.isomorphism.items()}
                                if self.isomorphism else None),
                "checked": self.checked}


def is_superstar_transitive(K: FlagComplex, auts: list[tuple[int, ...]] | None = None,
                            max_vertices: int = 40) -> SuperstarReport:
    """Two-case superstar check.

    (1) every isomorphism N_1(v) -> N_1(v') with v -> v' is the restriction of an
    automorphism; (2) for every simplex sigma, every automorphism of N_1(sigma)
    fixing sigma pointwise is the restriction of an automorphism.
    ``auts`` may supply Aut(K) (e.g. the Sym action on O_d).
    """
    if auts is None:
        if len(K) > max_vertices:
            raise ValueError(f"{len(K)} vertices exceeds the enumeration cap {max_vertices}")
        auts = automorphisms(K)
    checked = 0
    stars = {v: neighbourhood(K, (v,)) for v in range(len(K))}

    # case (1): restrictions of automorphisms, keyed by (v, image of v)
    restr: dict[tuple[int, int], set[tuple]] = {}
    for g in auts:
        for v in range(len(K)):
            restr.setdefault((v, g[v]), set()).add(tuple(g[u] for u in stars[v].vertices))
    for v in range(len(K)):
        for w in range(len(K)):
            have = restr.get((v, w), set())
            for phi in isomorphisms(stars[v], stars[w], {v: w}):
                checked += 1
                if tuple(phi[u] for u in stars[v].vertices) not in have:
                    return SuperstarReport(False, 1, (v,), (w,), phi, checked)

    # case (2)
    for sigma in K.simplices():
        if len(sigma) == 1:
            nb = stars[sigma[0]]
        else:
            nb = neighbourhood(K, sigma)
        have = {tuple(g[u] for u in nb.vertices) for g in auts
                if all(g[s] == s for s in sigma)}
        for phi in isomorphisms(nb, nb, {s: s for s in sigma}):
            checked += 1
            if tuple(phi[u] for u in nb.vertices) not in have:
                return SuperstarReport(False, 2, sigma, sigma, phi, checked)
    return SuperstarReport(True, checked=checked)


def path_graph(k: int) -> FlagComplex:
    return FlagComplex.from_edges(list(range(1, k + 1)), [(i, i + 1) for i in range(1, k)])


def odd_to_json(d: int, K: FlagComplex | None = None) -> str:
    K = K or build_odd(d)
    obj = {"d": d, **K.to_json()}
    return json.dumps(obj, sort_keys=True)
