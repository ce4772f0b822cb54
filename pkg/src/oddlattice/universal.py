"""Automorphisms of Davis balls, local actions, and restriction groups of the universal group."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .complexes import FlagComplex, SubsetVertex, build_odd, odd_automorphisms, point_permutation
from .coxeter import CoxeterElement, RacgPresentation, Wall, wall_of_edge
from .geometry import (KingBall, SphereStructure, act, classify_sphere, king_ball, normal_path,
                       sector_of, sphere_representatives)
from .perm import (Permutation, PermutationGroup, group_order, sparse_direct_product_order)


def odd_degree(L: FlagComplex) -> int | None:
    """d if L is an Odd graph built from SubsetVertex labels, else None."""
    v = L.vertices[0] if len(L) else None
    return v.d if isinstance(v, SubsetVertex) else None


def label_map(P: RacgPresentation, phi) -> tuple[int, ...]:
    """Images of generator indices under phi (a Permutation of [2d-1] or an index tuple)."""
    L = P.L
    if isinstance(phi, Permutation):
        if odd_degree(L) is None:
            raise ValueError("a point permutation needs subset labels")
        img = tuple(L.index(v.apply(phi)) for v in L.vertices)
    else:
        img = tuple(phi)
    if sorted(img) != list(range(P.n)):
        raise ValueError("not a bijection of the generators")
    for a in range(P.n):
        for b in L.adj[a]:
            if not P.commute(img[a], img[b]):
                raise ValueError(f"not an automorphism of L: edge {L.vertices[a]}-{L.vertices[b]} not preserved")
    for a, b in itertools.combinations(range(P.n), 2):
        if P.commute(img[a], img[b]) and not P.commute(a, b):
            raise ValueError("not an automorphism of L: a non-edge maps to an edge")
    return img


@dataclass
class BallAutomorphism:
    """A vertex map of X_L given by a rule; ``moved`` caches a sparse table when known."""

    P: RacgPresentation
    rule: Callable[[CoxeterElement], CoxeterElement]
    name: str = ""
    moved: dict | None = None

    def __call__(self, w) -> CoxeterElement:
        w = tuple(w)
        if self.moved is not None:
            return self.moved.get(w, w)
        return self.rule(w)

    @classmethod
    def identity(cls, P: RacgPresentation) -> "BallAutomorphism":
        return cls(P, lambda w: w, "id", {})

    @classmethod
    def translation(cls, P: RacgPresentation, g) -> "BallAutomorphism":
        g = tuple(g)
        return cls(P, lambda w: P.multiply(g, w), f"translate{g}")

    def then(self, other: "BallAutomorphism") -> "BallAutomorphism":
        """other after self."""
        return BallAutomorphism(self.P, lambda w: other(self(w)), f"{other.name}*{self.name}")

    def sparse(self, points: Iterable) -> "BallAutomorphism":
        """Tabulate on a finite set (assumed to contain every moved point of interest)."""
        moved = {}
        for w in points:
            w = tuple(w)
            u = self.rule(w)
            if u != w:
                moved[w] = u
        return BallAutomorphism(self.P, self.rule, self.name, moved)

    def as_permutation(self, points: Sequence, index: dict | None = None) -> Permutation:
        index = index or {p: i for i, p in enumerate(points, 1)}
        try:
            return Permutation(tuple(index[self(p)] for p in points))
        except KeyError as exc:
            raise ValueError(f"{self.name} does not preserve the point set: {exc}") from None


def label_action(g: BallAutomorphism, x) -> tuple[int, ...]:
    """The generator map s -> label of the edge g(x) g(xs)."""
    P = g.P
    gx = g(x)
    ginv = P.inverse(gx)
    out = []
    for s in range(P.n):
        u = P.multiply(ginv, g(P.multiply(x, (s,))))
        if len(u) != 1:
            raise ValueError(f"{g.name} does not map the edge at {x} with label {s} to an edge")
        out.append(u[0])
    return tuple(out)


def local_action(g: BallAutomorphism, x, king: KingBall | None = None):
    """D_x g; a Permutation of [2d-1] for Odd-graph links, else an index tuple."""
    x = tuple(x)
    if king is not None:
        dx = king.dist(x)
        if dx is None or dx >= king.radius:
            raise ValueError(f"{x} is not interior to the ball of radius {king.radius}")
    img = label_action(g, x)
    d = odd_degree(g.P.L)
    if d is None:
        return img
    p = point_permutation(d, g.P.L, img)
    if p is None:
        raise ValueError("local action is not induced by a point permutation")
    return p


def letterwise_extension(P: RacgPresentation, v, phi) -> BallAutomorphism:
    """Phi_{v,phi}: w -> v phi(v^-1 w), fixing v with local action phi everywhere."""
    img = label_map(P, phi)
    v = tuple(v)
    vinv = P.inverse(v)
    if v:
        rule = lambda w: P.multiply(v, P.shortlex([img[s] for s in P.multiply(vinv, w)]))
    else:
        rule = lambda w: P.shortlex([img[s] for s in w])
    return BallAutomorphism(P, rule, f"ext({v},{phi})")


def carrier(king: KingBall, wall: Wall) -> set[CoxeterElement]:
    """Vertices of the wall's carrier inside the king ball."""
    P = king.P
    g, s = wall.edge[0], wall.label
    nbrs = [t for t in range(P.n) if P.commute(s, t)]
    out = set()
    seen = {g}
    q = deque([g])
    while q:
        y = q.popleft()
        out.add(y)
        ys = P.multiply(y, (s,))
        if king.dist(ys) is not None:
            out.add(ys)
        for t in nbrs:
            u = P.multiply(y, (t,))
            if u not in seen and (king.dist(u) is not None or king.dist(P.multiply(u, (s,))) is not None):
                seen.add(u)
                q.append(u)
    return {w for w in out if king.dist(w) is not None}


def far_test(P: RacgPresentation, wall: Wall, base=()) -> Callable[[CoxeterElement], bool]:
    """Indicator of the halfspace of the wall not containing base."""
    r = wall.reflection
    base_far = len(P.multiply(r, base)) < len(tuple(base))
    return lambda w: (len(P.multiply(r, w)) < len(w)) != base_far


def halfspace_truncation(g: BallAutomorphism, wall: Wall, king: KingBall) -> BallAutomorphism:
    """g on the halfspace of the wall away from the ball's base, identity on the other side."""
    P = g.P
    for w in carrier(king, wall):
        if g(w) != w:
            raise ValueError(f"carrier vertex {w} is moved; truncation is not defined")
    far = far_test(P, wall, king.base)
    return BallAutomorphism(P, lambda w: g(w) if far(w) else w, f"trunc({g.name})")


def check_automorphism(g: BallAutomorphism, king: KingBall, points: Iterable) -> list:
    """Edges and squares at the given points that g fails to preserve (inside the ball)."""
    P = g.P
    problems = []
    for x in points:
        x = tuple(x)
        gx = g(x)
        if king.dist(gx) is None:
            problems.append(("leaves ball", x))
            continue
        ginv = P.inverse(gx)
        lab = {}
        for s in range(P.n):
            y = P.multiply(x, (s,))
            if king.dist(y) is None:
                continue
            u = P.multiply(ginv, g(y))
            if len(u) != 1:
                problems.append(("edge", x, s))
                continue
            lab[s] = u[0]
        for s, t in itertools.combinations(sorted(lab), 2):
            if not P.commute(s, t):
                continue
            y = P.multiply(x, (s, t))
            if king.dist(y) is None:
                continue
            if not P.commute(lab[s], lab[t]) or g(y) != P.multiply(gx, (lab[s], lab[t])):
                problems.append(("square", x, s, t))
    return problems


# ---------------------------------------------------------------------------
# restriction groups of U_v^n


def alt_generators(members: Sequence[int], degree: int) -> list[Permutation]:
    """3-cycles (y1 y2 yi) generating Alt on the given points."""
    ys = sorted(members)
    if len(ys) < 3:
        return []
    return [Permutation.from_cycles(degree, [(ys[0], ys[1], y)]) for y in ys[2:]]


@dataclass
class BlockFactor:
    block: list                        # partly-free vertices of the block
    label: int                         # generator index of the hyperplane separating it from B_{n-1}
    gens: list[dict]                   # sparse maps over B_{n+1}
    private: set                       # points of S_{n+1} joined to the block by an edge
    local: list[Permutation] = field(default_factory=list)   # D_x of each generator at block[0]


@dataclass
class RestrictionGroup:
    """U_v^n restricted to B_{n+1}(v), stored factor by factor."""

    d: int | None
    n: int
    structure: SphereStructure
    factors: list[BlockFactor]
    provenance: str
    _owners: dict | None = field(default=None, repr=False)

    def order(self) -> tuple[int, list]:
        return sparse_direct_product_order([f.gens for f in self.factors],
                                           [f.private for f in self.factors])

    def expected_order(self) -> int:
        return (math.factorial(self.d - 1) // 2) ** len(self.factors)

    def owners(self) -> dict:
        """point -> indices of the factors moving it."""
        if self._owners is None:
            own: dict = {}
            for i, f in enumerate(self.factors):
                for g in f.gens:
                    for p in g:
                        own.setdefault(p, set()).add(i)
            self._owners = own
        return self._owners

    def sub_order(self, idx: Iterable[int], fix: Iterable = (), restrict_to: Iterable | None = None) -> int:
        """Order of Fix(fix) inside the product of the chosen factors, optionally restricted."""
        idx = sorted(set(idx))
        gens = [g for i in idx for g in self.factors[i].gens]
        if not gens:
            return 1
        pts = sorted(set().union(*(g.keys() for g in gens)), key=repr)
        loc = {p: k for k, p in enumerate(pts, 1)}
        perms = [Permutation(tuple(loc[g.get(p, p)] for p in pts)) for g in gens]
        G = PermutationGroup(perms, len(pts))
        H = G.pointwise_stabilizer(loc[p] for p in fix if p in loc)
        if restrict_to is None:
            return H.order()
        R = [loc[p] for p in restrict_to if p in loc]
        if not R:
            return 1
        hs = H.strong_generators
        sub = sorted(R)
        sl = {p: k for k, p in enumerate(sub, 1)}
        try:
            rg = [Permutation(tuple(sl[h(p)] for p in sub)) for h in hs]
        except KeyError:
            raise ValueError("restriction set not invariant") from None
        return group_order(rg, len(sub)) if rg else 1


def _block_orbits(P: RacgPresentation, blocks: list[list], auts) -> list[tuple[int, tuple]]:
    """For each block, (index of its orbit representative, label map carrying rep to it)."""
    key = {frozenset(b): i for i, b in enumerate(blocks)}
    out: list = [None] * len(blocks)
    for i, b in enumerate(blocks):
        if out[i] is not None:
            continue
        for phi in auts:
            j = key.get(frozenset(act(P, phi, x) for x in b))
            if j is None:
                raise AssertionError("automorphism does not preserve the block system")
            if out[j] is None:
                out[j] = (i, tuple(phi))
    return out


def far_side(king: KingBall, start, far: Callable) -> set:
    seen = {start}
    q = deque([start])
    P = king.P
    while q:
        w = q.popleft()
        for s in range(P.n):
            u = P.multiply(w, (s,))
            if u not in seen and far(u) and king.dist(u) is not None:
                seen.add(u)
                q.append(u)
    return seen


def un_restriction_group(king: KingBall, n: int, structure: SphereStructure | None = None,
                         auts: Sequence[Sequence[int]] | None = None) -> RestrictionGroup:
    """Generators of U_v^n on B_{n+1}(v): per block, truncated letterwise 3-cycles on Y_b.

    ``king`` must reach radius n+1. ``structure`` is the classification of
    S_n (computed from ``king`` when omitted; an implicit ball needs it passed).
    With ``auts`` (label automorphisms fixing the base) the far halfspace of
    each block is computed once per orbit and transported.
    """
    P = king.P
    d = odd_degree(P.L)
    if n < 1 or n + 1 > king.radius:
        raise ValueError(f"n={n} needs a ball of radius {n + 1}")
    if king.base != ():
        raise ValueError("restriction groups are computed around the identity")
    if structure is None:
        structure = classify_sphere(king, n)
    blocks = structure.blocks
    orbit = _block_orbits(P, blocks, auts) if auts else [(i, None) for i in range(len(blocks))]
    far_cache: dict[int, set] = {}
    factors = []
    for i, b in enumerate(blocks):
        x = b[0]
        y, e = structure.classes[x].inner
        wall = wall_of_edge(P, y, e)
        far = far_test(P, wall)
        rep, phi = orbit[i]
        if rep == i or phi is None:
            if i not in far_cache:
                far_cache[i] = far_side(king, x, far)
            region = far_cache[i]
        else:
            region = {act(P, phi, w) for w in far_cache[rep]}
        members = P.L.vertices[e].members if d else ()
        gens, local = [], []
        xinv = P.inverse(x)
        for p in alt_generators(members, 2 * d - 1 if d else 0):
            img = label_map(P, p)
            moved = {}
            for w in region:
                u = P.multiply(x, P.shortlex([img[s] for s in P.multiply(xinv, w)]))
                if u != w:
                    moved[w] = u
            gens.append(moved)
            local.append(p)
        private = set()
        for z in b:
            for s in range(P.n):
                u = P.multiply(z, (s,))
                if king.dist(u) == n + 1:
                    private.add(u)
        factors.append(BlockFactor(list(b), e, gens, private, local))
    return RestrictionGroup(d, n, structure, factors, f"U_v^{n} on B_{n + 1}(v)")


def factor_map(P: RacgPresentation, G: RestrictionGroup, i: int, k: int) -> BallAutomorphism:
    moved = G.factors[i].gens[k]
    return BallAutomorphism(P, lambda w: moved.get(w, w), f"block{i}.{k}", moved)


def commuting_pairs(G: RestrictionGroup) -> tuple[int, list]:
    """Check that distinct block factors commute, generator by generator.

    Factors with disjoint supports commute trivially; the explicit check runs
    on every pair sharing a moved point. Returns (pairs checked explicitly, failures).
    """
    own = G.owners()
    cand = set()
    for idx in own.values():
        if len(idx) > 1:
            cand.update(itertools.combinations(sorted(idx), 2))
    bad = []
    for i, j in sorted(cand):
        for g in G.factors[i].gens:
            for h in G.factors[j].gens:
                pts = set(g) | set(h)
                if any(g.get(h.get(p, p), h.get(p, p)) != h.get(g.get(p, p), g.get(p, p)) for p in pts):
                    bad.append((i, j))
    return len(cand), bad


def ball1(king: KingBall, x) -> set:
    P = king.P
    out = {tuple(x)}
    for c in P.cliques():
        u = P.multiply(x, c)
        if king.dist(u) is not None:
            out.add(u)
    return out


def square_determination_check(G: RestrictionGroup, king: KingBall, square) -> bool:
    """Fix(B_1(x)) and Fix(B_1(z)) together force Fix(B_1(y)) for x, y, z consecutive in a square.

    Exact: only factors moving a point of B_1(y) can matter, and the pointwise
    stabiliser of B_1(x) u B_1(z) in their product is computed by a chain.
    """
    P = king.P
    x, y, z = (tuple(w) for w in square)
    u, w = P.multiply(P.inverse(y), x), P.multiply(P.inverse(y), z)
    if not (len(u) == 1 and len(w) == 1 and u != w and P.commute(u[0], w[0])):
        raise ValueError("x, y, z are not consecutive corners of a square")
    own = G.owners()
    by = ball1(king, y)
    touch_y = set().union(*(own.get(p, set()) for p in by))
    if not touch_y:
        return True
    fix = ball1(king, x) | ball1(king, z)
    touch = touch_y | set().union(*(own.get(p, set()) for p in fix))
    return G.sub_order(touch, fix, by) == 1


def free_vertex_check(G: RestrictionGroup, king: KingBall, y) -> tuple[bool, dict]:
    """The action on B_1(y) of a free vertex comes from the blocks of its two neighbours, isomorphically."""
    S = G.structure
    c = S.classes[y]
    bo = S.block_of()
    nb_blocks = {bo[z] for z in c.sphere_nbrs if z in bo}
    own = G.owners()
    by = ball1(king, y)
    touching = set().union(*(own.get(p, set()) for p in by))
    info = {"y": y, "neighbour_blocks": sorted(nb_blocks), "touching": sorted(touching)}
    if not touching <= nb_blocks:
        return False, info
    expected = 1
    for i in nb_blocks:
        expected *= G.sub_order([i])
    got = G.sub_order(nb_blocks, (), by)
    info.update(expected=expected, restricted=got)
    return got == expected, info


# ---------------------------------------------------------------------------
# sector witnesses and density


def sector_witness(king: KingBall, n: int, x, y) -> BallAutomorphism:
    """An element of U_v^{n-1} moving exactly one of two partly-free x, y in different sectors."""
    P = king.P
    d = odd_degree(P.L)
    if d is None:
        raise ValueError("sector witnesses need an Odd-graph link")
    if n < 1:
        raise ValueError("n must be positive")
    x, y = tuple(x), tuple(y)
    if sector_of(king, x) == sector_of(king, y):
        raise ValueError("x and y lie in the same sector")
    ell = 2 * d - 1
    if n == 1:
        if len(x) != 1 or len(y) != 1:
            raise ValueError("partly-free vertices of S_1 are edge-neighbours")
        sx, sy = P.L.vertices[x[0]], P.L.vertices[y[0]]
        for cyc in itertools.combinations(range(1, ell + 1), 3):
            for c in (cyc, (cyc[0], cyc[2], cyc[1])):
                phi = Permutation.from_cycles(ell, [c])
                if sx.apply(phi) == sx and sy.apply(phi) != sy:
                    return letterwise_extension(P, king.base, phi)
        raise AssertionError("no separating 3-cycle found")
    for a, b in ((x, y), (y, x)):
        g = _sector_witness_one_side(king, n, a, b, ell)
        if g is not None:
            return g
    raise AssertionError("no separating hyperplane found")


def _sector_witness_one_side(king, n, x, y, ell):
    P = king.P
    path_x = normal_path(king, king.base, x, "up").vertices
    path_y = normal_path(king, king.base, y, "up").vertices
    xp, yp = path_x[-2], path_y[-2]
    B = P.multiply(P.inverse(xp), x)
    if len(B) != 1:
        return None
    B = B[0]
    # hyperplanes separating x' from B_{n-2}: dual to edges at x' towards B_{n-1}
    for s in range(P.n):
        u = P.multiply(xp, (s,))
        du = king.dist(u)
        if du is None or du > n - 1:
            continue
        wall = wall_of_edge(P, xp, s)
        far = far_test(P, wall)
        if not far(xp) or far(yp):
            continue
        Aset, Bset = P.L.vertices[s], P.L.vertices[B]
        inter = [a for a in Aset.members if a in Bset.members]
        outside = [a for a in Aset.members if a not in Bset.members]
        if not inter or not outside or len(Aset.members) < 3:
            continue
        third = next(a for a in Aset.members if a not in (inter[0], outside[0]))
        phi = Permutation.from_cycles(ell, [(inter[0], outside[0], third)])
        ext = letterwise_extension(P, xp, phi)
        return halfspace_truncation(ext, wall, king)
    return None


def u_reference_order(d: int) -> int:
    """|Alt_{2d-1}| times |Alt_{d-1}| to the number of vertices of O_d."""
    return (math.factorial(2 * d - 1) // 2) * (math.factorial(d - 1) // 2) ** math.comb(2 * d - 1, d - 1)


def trichotomy(order: int, d: int) -> dict:
    """Place an order among 1, |Alt_{d-1}|, |Alt_{d-1}|^C(2d-1,d-1); the dichotomy needs d >= 6."""
    a = math.factorial(d - 1) // 2
    options = {"trivial": 1, "alt": a, "full": a ** math.comb(2 * d - 1, d - 1)}
    match = next((k for k, v in options.items() if v == order), None)
    return {"order": str(order), "class": match, "applicable": d >= 6}


def density_condition_check(gens: Sequence[BallAutomorphism], king: KingBall) -> dict:
    """Compare |<gens>| on the l-infinity 2-ball with the order of U_v there.

    ``king`` must be an explicit ball of radius >= 2 centred at the identity.
    Holds iff the orders agree and every local action on B_1 is even.
    """
    P = king.P
    d = odd_degree(P.L)
    if d is None:
        raise ValueError("density check needs an Odd-graph link")
    v = king.base
    points = [w for w in king.vertices() if king.dist(w) <= 2]
    index = {p: i for i, p in enumerate(points, 1)}
    perms = []
    witnesses = []
    for g in gens:
        if g(v) != v:
            raise ValueError(f"generator {g.name} does not fix the base vertex")
        perms.append(g.as_permutation(points, index))
    for g in gens:
        for x in ball1(king, v):
            if not local_action(g, x).is_even():
                witnesses.append({"generator": g.name, "vertex": list(x), "local_action": "odd"})
    prefix = [index[p] for p in points if king.dist(p) == 1]
    order_G = PermutationGroup(perms, len(points), base_prefix=prefix).order() if perms else 1
    order_U = u_reference_order(d)
    holds = order_G == order_U and not witnesses
    return {"d": d, "n": 2, "points": len(points), "order_G": str(order_G), "order_U": str(order_U),
            "holds": holds, "witnesses": witnesses}


def u_generators(king: KingBall, auts=None) -> list[BallAutomorphism]:
    """Generators of U_v on B_2(v): letterwise Alt_{2d-1} plus the U_v^1 block factors."""
    P = king.P
    d = odd_degree(P.L)
    ell = 2 * d - 1
    gens = [letterwise_extension(P, (), Permutation.from_cycles(ell, [(1, 2, 3)]))]
    long = tuple(range(1, ell + 1)) if ell % 2 else tuple(range(2, ell + 1))
    gens.append(letterwise_extension(P, (), Permutation.from_cycles(ell, [long])))
    G = un_restriction_group(king, 1, auts=auts)
    for i, f in enumerate(G.factors):
        for k in range(len(f.gens)):
            gens.append(factor_map(P, G, i, k))
    return gens


def square_triples(king: KingBall, n: int, centres: Iterable) -> list[tuple]:
    """(x, y, z) consecutive in a square with y a centre and all four corners in B_n."""
    P = king.P
    out = []
    for y in centres:
        y = tuple(y)
        for s, t in itertools.combinations(range(P.n), 2):
            if not P.commute(s, t):
                continue
            x, z, w = P.multiply(y, (s,)), P.multiply(y, (t,)), P.multiply(y, (s, t))
            if all(king.dist(u) is not None and king.dist(u) <= n for u in (y, x, z, w)):
                out.append((x, y, z))
    return out


def swap_branches(P: RacgPresentation, p: int, q: int, king: KingBall) -> BallAutomorphism:
    """Apply the letter swap p <-> q to words starting with p or q; fix everything else.

    An automorphism of X_L whenever p and q are isolated vertices of L: the
    two branches meet the rest only in the edges (1, p) and (1, q).
    """
    if P.comm[p] or P.comm[q]:
        raise ValueError("p and q must be isolated in L")
    img = list(range(P.n))
    img[p], img[q] = q, p

    def rule(w):
        if w and w[0] in (p, q):
            return P.shortlex([img[s] for s in w])
        return w

    return BallAutomorphism(P, rule, f"swap({p},{q})").sparse(king.vertices())


def single_factor_group(P: RacgPresentation, gens: Sequence[BallAutomorphism], n: int = 0,
                        provenance: str = "") -> RestrictionGroup:
    """Wrap tabulated automorphisms as a one-factor group for the fixator checks."""
    f = BlockFactor([], -1, [dict(g.moved) for g in gens], set())
    return RestrictionGroup(odd_degree(P.L), n, None, [f], provenance)


def product_structure_report(d: int, n: int, centres: str = "orbits", free_limit: int | None = None) -> dict:
    """Order, commutation, square determination and free-vertex checks for U_v^n on B_{n+1}(v).

    The group is invariant under the letterwise Sym_{2d-1} action, so with
    ``centres="orbits"`` squares are checked at one centre per orbit; ``"all"``
    visits every centre in B_n.
    """
    L = build_odd(d)
    P = RacgPresentation(L)
    auts = odd_automorphisms(d, L)
    small = king_ball(P, n)
    structure = classify_sphere(small, n)
    king = king_ball(P, n + 1, implicit=n >= 2)
    G = un_restriction_group(king, n, structure=structure, auts=auts)
    order, problems = G.order()
    checked, bad = commuting_pairs(G)
    if centres == "orbits":
        cs = [y for level in sphere_representatives(small, n, auts) for y in level]
    else:
        cs = small.vertices()
    sq = square_triples(king, n, cs)
    sq_bad = [list(map(list, t)) for t in sq if not square_determination_check(G, king, t)]
    free = structure.free()
    if free_limit is not None:
        free = free[:free_limit]
    fv_bad = []
    for y in free:
        ok, info = free_vertex_check(G, king, y)
        if not ok:
            fv_bad.append({"y": list(y), "touching": info["touching"]})
    rep = {"d": d, "n": n, "blocks": len(G.factors), "order": str(order), "expected": str(G.expected_order()),
           "order_problems": problems[:5], "commuting_checks": checked, "noncommuting": bad[:5],
           "squares_checked": len(sq), "centres": centres, "square_failures": sq_bad[:5],
           "free_checked": len(free), "free_failures": fv_bad[:5]}
    rep["ok"] = (order == G.expected_order() and not problems and not bad and not sq_bad and not fv_bad)
    return rep
