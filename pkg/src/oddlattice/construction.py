"""Scaffoldings, interlacing pairs, lattice presentations and their finite checks."""

from __future__ import annotations

import functools
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bmw import BmwPresentation, local_actions, validate
from .complexes import FlagComplex, SubsetVertex, build_odd
from .coxeter import RacgPresentation, build_ball
from .perm import Permutation, group_order
from .universal import BallAutomorphism


class ConstructionError(ValueError):
    """A construction step failed its own verification; ``report`` holds the witnesses."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


@functools.lru_cache(maxsize=4)
def odd_graph(d: int) -> FlagComplex:
    return build_odd(d)


def _res(x: int, mod: int) -> int:
    """Residue of x in [mod] = {1..mod}."""
    return (x - 1) % mod + 1


def _sv(d: int, members: Iterable[int]) -> SubsetVertex:
    return SubsetVertex.of(d, sorted(set(members)))


# ---------------------------------------------------------------------------
# scaffolding


@dataclass
class Scaffolding:
    n: int
    d: int
    k: int
    A_prime: SubsetVertex
    A: list[SubsetVertex]
    B: SubsetVertex
    upsilons: list[Permutation]
    C: list[SubsetVertex]

    @property
    def ell(self) -> int:
        return 2 * self.d - 1

    def family(self) -> list[SubsetVertex]:
        return list(self.A) + [self.B]

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "k": self.k, "A'": list(self.A_prime.members),
                "A_list": [list(a.members) for a in self.A], "B": list(self.B.members),
                "upsilons": [str(u) for u in self.upsilons], "C_list": [list(c.members) for c in self.C]}

    @classmethod
    def from_json(cls, obj: dict) -> "Scaffolding":
        d = obj["d"]
        ell = 2 * d - 1
        return cls(obj["n"], d, obj["k"], _sv(d, obj["A'"]), [_sv(d, a) for a in obj["A_list"]],
                   _sv(d, obj["B"]), [Permutation.parse(u, ell) for u in obj["upsilons"]],
                   [_sv(d, c) for c in obj["C_list"]])


def scaffolding_formulas(n: int, d: int | None = None) -> Scaffolding:
    """Evaluate the explicit scaffolding formulas (no verification)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    d = max(n + 1, 9) if d is None else d
    ell = 2 * d - 1
    k = ell
    Ap = {2 * i - 1 for i in range(3, d + 1)} | {6}
    A = []
    for i in range(1, n + 1):
        drop = i if i <= 4 else 2 * i
        A.append(set(range(1, ell + 1)) - Ap - {drop})
    B = {1, 2, 3, 4} | {2 * i - 2 for i in range(6, d + 1)}
    ups = [Permutation.from_cycles(ell, [(_res(i, ell), _res(i + 1, ell)), (_res(i + 2, ell), _res(i + 3, ell))])
           for i in range(1, k + 1)]
    C = []
    for i in range(1, k + 1):
        Cp = {_res(j, ell) for j in range(i, i + d - 2)}
        C.append(Cp | ({1} if 1 not in Cp else {d}))
    return Scaffolding(n, d, k, _sv(d, Ap), [_sv(d, a) for a in A], _sv(d, B), ups, [_sv(d, c) for c in C])


def verify_scaffolding(S: Scaffolding) -> dict:
    """E1-E4 with witnesses."""
    d, ell, k = S.d, S.ell, S.k
    rep = {}
    # E1
    e1 = []
    if d < max(S.n + 1, 6):
        e1.append({"d": d, "needed": max(S.n + 1, 6)})
    if k < 1 or len(S.upsilons) != k or len(S.C) != k:
        e1.append({"k": k, "upsilons": len(S.upsilons), "C": len(S.C)})
    rep["E1"] = {"ok": not e1, "witness": e1[:5]}
    # E2
    e2 = []
    fam = S.family()
    if len(S.A) != S.n:
        e2.append({"A_count": len(S.A), "n": S.n})
    if len(set(fam)) != len(fam):
        e2.append({"problem": "repeated member of the family"})
    for X in fam:
        if not X.disjoint(S.A_prime):
            e2.append({"not_adjacent_to_A'": list(X.members)})
    rep["E2"] = {"ok": not e2, "witness": e2[:5]}
    # E3
    e3 = []
    for i, u in enumerate(S.upsilons, 1):
        if u.degree != ell:
            e3.append({"upsilon": i, "degree": u.degree})
            continue
        if not u.is_even():
            e3.append({"upsilon": i, "parity": "odd", "perm": str(u)})
        if not (u * u).is_identity():
            e3.append({"upsilon": i, "problem": "not an involution", "perm": str(u)})
    if S.upsilons and not set(S.upsilons[0].support()) <= set(S.B.members):
        e3.append({"upsilon": 1, "support": sorted(S.upsilons[0].support()), "B": list(S.B.members)})
    order = group_order(S.upsilons, ell) if S.upsilons and not e3 else 0
    target = math.factorial(ell) // 2
    if order != target:
        e3.append({"generated_order": str(order), "alt_order": str(target)})
    rep["E3"] = {"ok": not e3, "witness": e3[:5], "order": str(order)}
    # E4
    e4 = []
    if len(set(S.C)) != len(S.C):
        e4.append({"problem": "C_i not distinct"})
    for c in S.C:
        if c in fam:
            e4.append({"C_in_family": list(c.members)})
    allv = fam + list(S.C)
    for a, b in itertools.combinations(range(len(allv)), 2):
        if allv[a].disjoint(allv[b]):
            e4.append({"edge": [list(allv[a].members), list(allv[b].members)]})
            break
    for i in range(1, k + 1):
        sup = set()
        for j in range(i, i + 4):
            sup |= set(S.upsilons[_res(j, k) - 1].support())
        if not sup <= set(S.C[i - 1].members):
            e4.append({"i": i, "support": sorted(sup), "C_i": list(S.C[i - 1].members)})
    rep["E4"] = {"ok": not e4, "witness": e4[:5]}
    rep["ok"] = all(rep[c]["ok"] for c in ("E1", "E2", "E3", "E4"))
    return rep


def build_scaffolding(n: int, d: int | None = None) -> Scaffolding:
    S = scaffolding_formulas(n, d)
    rep = verify_scaffolding(S)
    if not rep["ok"]:
        raise ConstructionError(f"scaffolding for n={n}, d={S.d} fails verification", rep)
    return S


def bar_map(S: Scaffolding) -> dict[int, int]:
    """j -> the element of [2d-1] outside A_j and A'."""
    out = {}
    for j, Aj in enumerate(S.A, 1):
        rest = set(range(1, S.ell + 1)) - set(Aj.members) - set(S.A_prime.members)
        if len(rest) != 1:
            raise ConstructionError(f"A_{j} is not a neighbour of A'")
        out[j] = rest.pop()
    return out


# ---------------------------------------------------------------------------
# interlacing pairs


@dataclass
class InterlacingPair:
    d: int
    Z: list[str]
    zeta: list[Permutation]                 # on [2d-1], one per z
    delta: dict[SubsetVertex, Permutation]  # on [|Z|] (z_i is point i+1); identity when absent
    m: int = 0
    k: int = 0
    roles: dict = field(default_factory=dict)   # D -> ("A", j) | ("B",) | ("C", i)

    @property
    def ell(self) -> int:
        return 2 * self.d - 1

    @property
    def c(self) -> int:
        return len(self.Z)

    def delta_of(self, D: SubsetVertex) -> Permutation:
        p = self.delta.get(D)
        return p if p is not None else Permutation.identity(self.c)

    def dz(self, D: SubsetVertex, z: int) -> int:
        """delta_D(z) on 0-based indices."""
        p = self.delta.get(D)
        return z if p is None else p(z + 1) - 1

    def to_json(self) -> dict:
        return {"d": self.d, "Z": list(self.Z), "X_size": self.m, "Y_size": self.k,
                "zeta": {z: str(p) for z, p in zip(self.Z, self.zeta)},
                "delta": {str(D): _zcycles(p, self.Z) for D, p in sorted(self.delta.items())
                          if not p.is_identity()},
                "roles": {str(D): list(r) for D, r in sorted(self.roles.items())}}

    @classmethod
    def from_json(cls, obj: dict) -> "InterlacingPair":
        d = obj["d"]
        Z = list(obj["Z"])
        zi = {z: i + 1 for i, z in enumerate(Z)}
        zeta = [Permutation.parse(obj["zeta"][z], 2 * d - 1) for z in Z]
        delta = {}
        for key, cyc in obj["delta"].items():
            D = _sv(d, (int(t) for t in key.strip("{}").split(",")))
            delta[D] = Permutation.from_cycles(len(Z), [[zi[z] for z in c] for c in cyc])
        roles = {_sv(d, (int(t) for t in key.strip("{}").split(","))): tuple(r)
                 for key, r in obj.get("roles", {}).items()}
        return cls(d, Z, zeta, delta, obj.get("X_size", 0), obj.get("Y_size", 0), roles)


def _zcycles(p: Permutation, Z: Sequence[str]) -> list[list[str]]:
    return [[Z[i - 1] for i in c] for c in p.cycles()]


def build_interlacing(G: BmwPresentation, S: Scaffolding, verify: bool = True) -> InterlacingPair:
    """The pair (zeta, delta) assembled from a BMW presentation and an n-scaffolding."""
    rep = validate(G)
    if not rep["valid"]:
        raise ConstructionError("BMW presentation is not valid", rep)
    if G.n != S.n:
        raise ConstructionError(f"scaffolding is for n={S.n}, presentation has n={G.n}")
    m, k, d, ell = G.m, S.k, S.d, S.ell
    if m < 3:
        raise ConstructionError("need m >= 3 (beta uses x_1, x_2, x_3)")
    if k == m:
        raise ConstructionError("need k != m")
    xi_p, al = local_actions(G)
    bar = bar_map(S)
    zeta = []
    for i in range(m):
        img = list(range(1, ell + 1))
        for j in range(1, G.n + 1):
            img[bar[j] - 1] = bar[xi_p[i](j)]
        p = Permutation(tuple(img))
        if not p.is_even():
            raise ConstructionError(f"xi_{i + 1} is odd: the BMW local action on the a-side is not alternating")
        zeta.append(p)
    zeta.extend(S.upsilons)
    c = m + k
    Z = [f"x{i}" for i in range(1, m + 1)] + [f"y{i}" for i in range(1, k + 1)]
    delta: dict = {}
    roles: dict = {}

    def put(D, p, role):
        if D in delta:
            raise ConstructionError(f"vertex {D} receives two delta values")
        delta[D] = p
        roles[D] = role

    for j, Aj in enumerate(S.A, 1):
        a = al[j - 1]
        put(Aj, Permutation(tuple(a(i) for i in range(1, m + 1)) + tuple(range(m + 1, c + 1))), ("A", j))
    put(S.B, Permutation.from_cycles(c, [(1, m + 1), (2, 3)]), ("B",))
    for i in range(1, k + 1):
        y = lambda t: m + _res(t, k)
        put(S.C[i - 1], Permutation.from_cycles(c, [(y(i), y(i + 1)), (y(i + 2), y(i + 3))]), ("C", i))
    pair = InterlacingPair(d, Z, zeta, delta, m, k, roles)
    if verify:
        r = verify_interlacing(pair)
        if not r["ok"]:
            raise ConstructionError("constructed pair is not interlacing", r)
    return pair


def verify_interlacing(pair: InterlacingPair, L: FlagComplex | None = None) -> dict:
    """D1-D5 with witnesses.

    D3-D5 are only non-vacuous at vertices D with delta_D != id or with
    zeta_z(D) such a vertex; the check visits exactly those.
    """
    d, ell, c = pair.d, pair.ell, pair.c
    L = L or odd_graph(d)
    rep = {}
    w1 = [{"z": pair.Z[i], "zeta": str(p)} for i, p in enumerate(pair.zeta)
          if p.degree != ell or not (p * p).is_identity()]
    rep["D1"] = {"ok": not w1 and len(pair.zeta) == c, "witness": w1[:5]}
    w2 = [{"D": str(D), "delta": str(p)} for D, p in pair.delta.items()
          if p.degree != c or not (p * p).is_identity()]
    rep["D2"] = {"ok": not w2, "witness": w2[:5]}
    S = [D for D, p in pair.delta.items() if not p.is_identity()]
    Sset = set(S)
    w3 = []
    for D in S:
        for j in L.adj[L.index(D)]:
            E = L.vertices[j]
            if E in Sset and D < E:
                w3.append({"edge": [str(D), str(E)]})
    rep["D3"] = {"ok": not w3, "witness": w3[:5]}
    w4 = []
    rest = lambda D: [a for a in range(1, ell + 1) if a not in D.members]
    for D in S:
        for z in range(c):
            z2 = pair.dz(D, z)
            if z2 == z:
                continue
            p, q = pair.zeta[z], pair.zeta[z2]
            if D.apply(p) != D.apply(q):
                w4.append({"D": str(D), "z": pair.Z[z], "z'": pair.Z[z2], "problem": "images of D differ"})
            elif any(p(a) != q(a) for a in rest(D)):
                w4.append({"D": str(D), "z": pair.Z[z], "z'": pair.Z[z2], "problem": "differ off D"})
    rep["D4"] = {"ok": not w4, "witness": w4[:5]}
    w5 = []
    for D in S:
        for z in range(c):
            D2 = D.apply(pair.zeta[z])
            if pair.dz(D, z) != pair.dz(D2, z):
                w5.append({"z": pair.Z[z], "D": str(D), "D'": str(D2),
                           "delta_D(z)": pair.Z[pair.dz(D, z)], "delta_D'(z)": pair.Z[pair.dz(D2, z)]})
    rep["D5"] = {"ok": not w5, "witness": w5[:5]}
    rep["ok"] = all(rep[f"D{i}"]["ok"] for i in range(1, 6))
    return rep


def trivial_pair(d: int, c: int, zeta: Sequence[Permutation] | None = None) -> InterlacingPair:
    """delta = id everywhere; zeta defaults to the identity."""
    ell = 2 * d - 1
    zs = list(zeta) if zeta is not None else [Permutation.identity(ell)] * c
    return InterlacingPair(d, [f"z{i}" for i in range(1, c + 1)], zs, {})


def hand_pair_d4() -> InterlacingPair:
    """A small nontrivial interlacing pair on O_4 with three tree letters."""
    d, ell = 4, 7
    zeta = [Permutation.from_cycles(ell, [(1, 2), (4, 5)]),
            Permutation.from_cycles(ell, [(1, 3), (4, 5)]),
            Permutation.from_cycles(ell, [(4, 5), (6, 7)])]
    delta = {_sv(d, (1, 2, 3)): Permutation.from_cycles(3, [(1, 2)])}
    return InterlacingPair(d, ["z1", "z2", "z3"], zeta, delta)


# ---------------------------------------------------------------------------
# lattice presentation


@dataclass
class LatticePresentation:
    d: int
    generators: list[str]                        # Z names, then V(O_d) in lex order
    c: int
    commutations: list[tuple[int, int]]
    squares: list[tuple[int, int, int, int]]     # z, D, delta_D(z), zeta_z(D) as generator indices

    @property
    def involutions(self) -> list[int]:
        return list(range(len(self.generators)))

    def counts(self) -> dict:
        return {"generators": len(self.generators), "involutions": len(self.generators),
                "commutations": len(self.commutations), "squares": len(self.squares)}

    def to_json(self) -> dict:
        g = self.generators
        return {"d": self.d, "Z": g[:self.c], "generators": g,
                "relations": {"involutions": [[x, x] for x in g],
                              "commutations": [[g[a], g[b]] for a, b in self.commutations],
                              "squares": [[g[t] for t in sq] for sq in self.squares]}}

    @classmethod
    def from_json(cls, obj: dict) -> "LatticePresentation":
        g = list(obj["generators"])
        idx = {x: i for i, x in enumerate(g)}
        rel = obj["relations"]
        return cls(obj["d"], g, len(obj["Z"]), [tuple(idx[x] for x in r) for r in rel["commutations"]],
                   [tuple(idx[x] for x in r) for r in rel["squares"]])

    def __eq__(self, other):
        return (isinstance(other, LatticePresentation) and self.d == other.d and self.c == other.c
                and self.generators == other.generators and self.commutations == other.commutations
                and self.squares == other.squares)


def emit_lattice(pair: InterlacingPair, check: bool = True) -> LatticePresentation:
    """Generators Z then V(L); involutions, commutations per edge, one square per (z, D)."""
    if check:
        r = verify_interlacing(pair)
        if not r["ok"]:
            raise ConstructionError("pair is not interlacing", r)
    L = odd_graph(pair.d)
    c = pair.c
    gens = list(pair.Z) + [str(v) for v in L.vertices]
    comm = sorted((c + a, c + b) for a, b in L.edges())
    zimg = [zeta_index(L, p) for p in pair.zeta]
    squares = []
    for z in range(c):
        zi = zimg[z]
        for D in range(len(L)):
            squares.append((z, c + D, pair.dz(L.vertices[D], z), c + int(zi[D])))
    return LatticePresentation(pair.d, gens, c, comm, squares)


def zeta_index(L: FlagComplex, p: Permutation) -> np.ndarray:
    """zeta as a permutation of vertex indices."""
    if p.is_identity():
        return np.arange(len(L))
    return np.array([L.index(v.apply(p)) for v in L.vertices], dtype=np.int64)


def check_link(pres: LatticePresentation, pair: InterlacingPair | None = None) -> dict:
    """The link at a vertex of the presentation complex, compared with Z * L.

    Vertices are generators, edges come from consecutive letters of relators,
    and each candidate triangle {z, D, D'} must bound a 3-cube whose six faces
    are relations: with delta_{D'}(z) = z these are [D, D'], the square of (z, D),
    the square of (z, D') read as z D' z zeta_z(D'), [zeta_z(D), zeta_z(D')], the
    square of (z', D') read as z' D' z' zeta_z(D'), and the square of (z, D) again
    at the far corner. The other orientation is tried when delta_{D'}(z) != z.
    Each square is also read from its other three corners: a link edge lying in
    two different squares makes the link non-simplicial.
    """
    d, c = pres.d, pres.c
    L = odd_graph(d)
    V = len(L)
    rep: dict = {"vertices": c + V}
    # square table from the presentation
    zopp = np.full((c, V), -1, dtype=np.int64)
    dopp = np.full((c, V), -1, dtype=np.int64)
    malformed = []
    for sq in pres.squares:
        z, D, z2, D2 = sq
        if not (z < c and D >= c and z2 < c and D2 >= c):
            malformed.append(list(sq))
            continue
        if zopp[z, D - c] != -1:
            malformed.append(list(sq))
        zopp[z, D - c] = z2
        dopp[z, D - c] = D2 - c
    missing_sq = int((zopp < 0).sum())
    # edges
    ledges = set()
    for a, b in pres.commutations:
        ledges.add((min(a, b), max(a, b)))
    expected = {(c + a, c + b) for a, b in L.edges()}
    zz_edges = []
    for sq in pres.squares:
        for a, b in zip(sq, sq[1:] + sq[:1]):
            if (a < c) == (b < c):
                zz_edges.append([pres.generators[a], pres.generators[b]])
    rep["edges_ok"] = ledges == expected and not zz_edges and not malformed and missing_sq == 0
    rep["edge_witness"] = {"extra": len(ledges - expected), "absent": len(expected - ledges),
                           "same_side": zz_edges[:3], "malformed": malformed[:3], "missing_squares": missing_sq}
    if missing_sq or malformed:
        rep.update(square_consistency=False, triangles_checked=0, missing_faces=[], flag=False,
                   isomorphic_to_join=False, ok=False)
        return rep
    # each Z-V link edge lies in exactly one square: the four corners of the
    # square z D z' D~ must read back the same square
    zc = np.arange(c)[:, None]
    dc = np.arange(V)[None, :]
    corners = {
        "(z', D)": (zopp[zopp, dc] == zc) & (dopp[zopp, dc] == dopp),
        "(z, D~)": (zopp[zc, dopp] == zopp) & (dopp[zc, dopp] == dc),
        "(z', D~)": (zopp[zopp, dopp] == zc) & (dopp[zopp, dopp] == dc),
    }
    g = pres.generators
    two_squares = []
    for name, okm in corners.items():
        for z, D in np.argwhere(~okm)[:3]:
            two_squares.append({"square": [g[z], g[c + D], g[zopp[z, D]], g[c + dopp[z, D]]], "corner": name})
    rep["square_consistency"] = not two_squares
    rep["second_square_witness"] = two_squares[:5]
    # triangles {z, D, D'}
    E = np.array(sorted(L.edges()), dtype=np.int64).reshape(-1, 2)
    comm_keys = np.array(sorted(min(a, b) * V + max(a, b) - c * V - c for a, b in ledges), dtype=np.int64) \
        if ledges else np.zeros(0, dtype=np.int64)

    def is_comm(a, b):
        kk = np.minimum(a, b) * V + np.maximum(a, b)
        pos = np.searchsorted(comm_keys, kk)
        pos = np.minimum(pos, len(comm_keys) - 1)
        return (len(comm_keys) > 0) & (comm_keys[pos] == kk)

    missing = []
    checked = 0
    a_all, b_all = E[:, 0], E[:, 1]
    base_comm = is_comm(a_all, b_all)
    for z in range(c):
        ok_any = np.zeros(len(E), dtype=bool)
        for D, Dp in ((a_all, b_all), (b_all, a_all)):
            z2 = zopp[z, D]
            Dt, Dtp = dopp[z, D], dopp[z, Dp]
            f3 = zopp[z, Dp] == z
            f4 = is_comm(Dt, Dtp)
            f5 = (zopp[z2, Dp] == z2) & (dopp[z2, Dp] == Dtp)
            ok_any |= base_comm & f3 & f4 & f5
        checked += len(E)
        bad = np.nonzero(~ok_any)[0]
        for t in bad[: max(0, 5 - len(missing))]:
            D, Dp = int(a_all[t]), int(b_all[t])
            face = ("[D,D']" if not base_comm[t] else
                    "z D' z zeta_z(D')" if zopp[z, Dp] != z and zopp[z, D] != z else
                    "z' D' z' zeta_z(D')")
            missing.append({"triangle": [pres.generators[z], str(L.vertices[D]), str(L.vertices[Dp])],
                            "absent_face": face})
        if len(bad) and len(missing) >= 5:
            rep.setdefault("more_missing", 0)
            rep["more_missing"] += int(len(bad))
    rep["triangles_checked"] = checked
    rep["missing_faces"] = missing
    rep["L_triangle_free"] = L.is_triangle_free()
    rep["flag"] = not missing and rep["L_triangle_free"]
    rep["isomorphic_to_join"] = rep["edges_ok"] and rep["square_consistency"] and rep["flag"]
    rep["isomorphism"] = "identity on generator names (Z -> Z, D -> D)"
    rep["ok"] = rep["isomorphic_to_join"]
    return rep


# ---------------------------------------------------------------------------
# development of the Cayley complex


@dataclass
class CornerComplex:
    generators: list[str]
    flips: dict                     # (p, q) -> (s, r): the path p q equals s r around a square
    conflicts: list
    classes: dict                   # canonical word -> frozenset of geodesic words
    dist: dict                      # canonical word -> distance from the base
    radius: int
    complete: bool

    def sphere_sizes(self) -> list[int]:
        out = [0] * (self.radius + 1)
        for k in self.dist.values():
            out[k] += 1
        return out

    def to_dot(self) -> str:
        lines = ["graph developed {"]
        name = {w: f"v{i}" for i, w in enumerate(sorted(self.dist, key=lambda u: (len(u), u)))}
        for w, nm in name.items():
            lines.append(f'  {nm} [label="{len(w)}"];')
        for w in self.dist:
            for g in range(len(self.generators)):
                u = step(self, w, g)
                if u is not None and u in name and name[w] < name[u]:
                    lines.append(f'  {name[w]} -- {name[u]} [label="{self.generators[g]}"];')
        lines.append("}")
        return "\n".join(lines)


def corner_table(pres: LatticePresentation) -> tuple[dict, list]:
    flips: dict = {}
    conflicts = []
    relators = [(a, b, a, b) for a, b in pres.commutations] + list(pres.squares)
    for rel in relators:
        for word in (rel, rel[::-1]):
            for r in range(4):
                p, q, s_, t = word[r:] + word[:r]
                key, val = (p, q), (t, s_)
                if flips.get(key, val) != val:
                    conflicts.append({"corner": [pres.generators[p], pres.generators[q]]})
                flips[key] = val
    return flips, conflicts


def _closure(flips: dict, word: tuple) -> frozenset:
    seen = {word}
    q = deque([word])
    while q:
        w = q.popleft()
        for i in range(len(w) - 1):
            f = flips.get((w[i], w[i + 1]))
            if f is not None:
                u = w[:i] + f + w[i + 2:]
                if u not in seen:
                    seen.add(u)
                    q.append(u)
    return frozenset(seen)


def develop_ball(pres: LatticePresentation, radius: int, budget: int = 2_000_000) -> CornerComplex:
    """BFS development from the base vertex; vertices are classes of geodesic words under square flips."""
    flips, conflicts = corner_table(pres)
    ng = len(pres.generators)
    classes = {(): frozenset({()})}
    dist = {(): 0}
    frontier = [()]
    complete = True
    for k in range(1, radius + 1):
        nxt = []
        for w in frontier:
            cls = classes[w]
            last = {u[-1] for u in cls if u}
            for g in range(ng):
                if g in last:
                    continue
                cl = _closure(flips, w + (g,))
                canon = min(cl)
                if canon in classes:
                    continue
                classes[canon] = cl
                dist[canon] = k
                nxt.append(canon)
                if len(classes) > budget:
                    complete = False
                    break
            if not complete:
                break
        frontier = nxt
        if not complete:
            radius = k
            break
    return CornerComplex(list(pres.generators), flips, conflicts, classes, dist, radius, complete)


def step(Y: CornerComplex, w: tuple, g: int) -> tuple | None:
    """Canonical word of the neighbour of w along g, or None outside the developed ball."""
    cls = Y.classes[w]
    for u in cls:
        if u and u[-1] == g:
            return _canon(Y, u[:-1])
    cl = _closure(Y.flips, w + (g,))
    canon = min(cl)
    return canon if canon in Y.classes else None


def _canon(Y: CornerComplex, word: tuple) -> tuple:
    return min(_closure(Y.flips, word))


def link_at(Y: CornerComplex, w: tuple, triangles: bool = True) -> dict:
    """Edges (and filled triangles) of the link at a developed vertex, from its 4-cycles and 3-cubes."""
    ng = len(Y.generators)
    nb = {g: step(Y, w, g) for g in range(ng)}
    if any(v is None for v in nb.values()):
        raise ValueError("vertex too close to the boundary of the development")
    second = {g: {step(Y, nb[g], h) for h in range(ng)} - {w} for g in range(ng)}
    if any(None in s for s in second.values()):
        raise ValueError("vertex too close to the boundary for its link")
    edges = set()
    diag = {}
    for g, h in itertools.combinations(range(ng), 2):
        common = second[g] & second[h]
        if common:
            edges.add((g, h))
            diag[(g, h)] = common
    tris = set()
    if triangles:
        adj = {g: set() for g in range(ng)}
        for g, h in edges:
            adj[g].add(h)
            adj[h].add(g)
        for g, h in edges:
            for t in adj[g] & adj[h]:
                if t <= h:
                    continue
                fs = [diag[(g, h)], diag[(g, t)], diag[(h, t)]]
                if any(len(f) != 1 for f in fs):
                    continue
                F = [next(iter(f)) for f in fs]
                tops = None
                for x in F:
                    nbx = {step(Y, x, s) for s in range(ng)}
                    if None in nbx:
                        raise ValueError("vertex too close to the boundary for its triangles")
                    tops = nbx if tops is None else tops & nbx
                tops -= set(nb.values())
                if tops:
                    tris.add((g, h, t))
    return {"edges": edges, "triangles": tris}


def join_link(pres: LatticePresentation) -> tuple[set, set]:
    """Edges and triangles of Z * L in generator indices."""
    L = odd_graph(pres.d)
    c = pres.c
    edges = {(z, c + D) for z in range(c) for D in range(len(L))}
    ledges = {(c + a, c + b) for a, b in L.edges()}
    edges |= ledges
    tris = {(z, a, b) for z in range(c) for a, b in ledges}
    return edges, tris


def product_sphere_sizes(c: int, d: int, radius: int) -> list[int]:
    """Sphere sizes (graph metric) in T_c x X_{O_d}: convolution of the two factors."""
    tree = [1] + [c * (c - 1) ** (k - 1) for k in range(1, radius + 1)]
    ball = build_ball(RacgPresentation(odd_graph(d)), radius, "graph")
    davis = ball.sphere_sizes()
    return [sum(tree[i] * davis[k - i] for i in range(k + 1)) for k in range(radius + 1)]


def development_report(pres: LatticePresentation, radius: int) -> dict:
    Y = develop_ball(pres, radius)
    counts = Y.sphere_sizes()
    oracle = product_sphere_sizes(pres.c, pres.d, radius)
    je, jt = join_link(pres)
    bad_links = []
    checked = 0
    tri_checked = 0
    for w, k in Y.dist.items():
        if k > radius - 2:
            continue
        lk = link_at(Y, w, triangles=k <= radius - 3)
        checked += 1
        ok = lk["edges"] == je and (k > radius - 3 or lk["triangles"] == jt)
        tri_checked += k <= radius - 3
        if not ok:
            bad_links.append([Y.generators[g] for g in w])
    return {"radius": radius, "counts": counts, "oracle": oracle, "counts_match": counts == oracle,
            "corner_conflicts": Y.conflicts[:5], "links_checked": checked, "triangle_links_checked": tri_checked,
            "bad_links": bad_links[:5], "ok": counts == oracle and not bad_links and not Y.conflicts,
            "complete": Y.complete}


# ---------------------------------------------------------------------------
# portage projections


def _zeta_maps(pair: InterlacingPair, P: RacgPresentation) -> list[tuple[int, ...]]:
    L = P.L
    return [tuple(L.index(v.apply(p)) for v in L.vertices) for p in pair.zeta]


def portage_rule(pair: InterlacingPair, P: RacgPresentation, z: int, zmaps=None):
    """Image of a word over V(L) under the X_L-projection of the tree letter z (as a raw word)."""
    L = P.L
    zmaps = zmaps or _zeta_maps(pair, P)

    def run(word):
        carried = z
        out = []
        for D in word:
            out.append(zmaps[carried][D])
            carried = pair.dz(L.vertices[D], carried)
        return out

    return run


def reduced_expressions(P: RacgPresentation, w: tuple, limit: int | None = None) -> list[tuple]:
    """Reduced words for w, obtained by swapping adjacent commuting letters."""
    seen = {tuple(w)}
    q = deque([tuple(w)])
    while q and (limit is None or len(seen) < limit):
        u = q.popleft()
        for i in range(len(u) - 1):
            if P.commute(u[i], u[i + 1]):
                v = u[:i] + (u[i + 1], u[i]) + u[i + 2:]
                if v not in seen:
                    seen.add(v)
                    q.append(v)
    return sorted(seen)


class PortageInconsistency(AssertionError):
    pass


def portage_projection(pair: InterlacingPair, word: Sequence[int], P: RacgPresentation,
                       full: bool = False) -> BallAutomorphism:
    """The X_L-projection of a word over Z as a vertex map of X_L.

    Each letter is evaluated letter by letter along the normal form, carrying
    the tree letter through delta. Every evaluation is compared with one other
    reduced expression of the same vertex (all of them with ``full``).
    """
    zmaps = _zeta_maps(pair, P)
    runs = [portage_rule(pair, P, z, zmaps) for z in word]

    def one(run, w):
        img = P.normalize(run(w))
        alts = reduced_expressions(P, w, None if full else 2)
        for u in alts:
            if u == w:
                continue
            other = P.normalize(run(u))
            if other != img:
                raise PortageInconsistency(f"projection differs on reduced expressions {w} and {u}")
        return img

    def rule(w):
        for run in reversed(runs):
            w = one(run, w)
        return w

    return BallAutomorphism(P, rule, "portage(" + ",".join(pair.Z[z] for z in word) + ")")


def tree_portage(pair: InterlacingPair, word_L: Sequence[int], tree_word: Sequence[int]) -> tuple:
    """X_Z-projection of a word over V(L) applied to a reduced tree word (letters are Z indices)."""
    L = odd_graph(pair.d)
    out = list(tree_word)
    for D0 in reversed(list(word_L)):
        carried = L.vertices[D0]
        res = []
        for y in out:
            y2 = pair.dz(carried, y)
            res.append(y2)
            carried = carried.apply(pair.zeta[y2])
        out = []
        for y in res:  # free reduction in W_Z
            if out and out[-1] == y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


# ---------------------------------------------------------------------------
# local actions and the embedding


def local_action_report(pair: InterlacingPair) -> dict:
    c, ell = pair.c, pair.ell
    deltas = [p for p in pair.delta.values() if not p.is_identity()]
    oz = group_order(deltas, c) if deltas else 1
    ol = group_order([p for p in pair.zeta if not p.is_identity()], ell) if any(
        not p.is_identity() for p in pair.zeta) else 1
    rep = {"order_Z": str(oz), "alt_Z": str(math.factorial(c) // 2),
           "order_L": str(ol), "alt_L": str(math.factorial(ell) // 2),
           "deltas_even": all(p.is_even() for p in deltas), "zetas_even": all(p.is_even() for p in pair.zeta)}
    rep["Z_side_alternating"] = oz == math.factorial(c) // 2 and rep["deltas_even"]
    rep["L_side_alternating"] = ol == math.factorial(ell) // 2 and rep["zetas_even"]
    m, k = pair.m, pair.k
    if m and k:
        alphas = [p for D, p in pair.delta.items() if pair.roles.get(D, ("",))[0] == "A"]
        gammas = [p for D, p in pair.delta.items() if pair.roles.get(D, ("",))[0] == "C"]
        Xr = [Permutation(tuple(a(i) for i in range(1, m + 1))) for a in alphas]
        Yr = [Permutation(tuple(g(i) - m for i in range(m + 1, m + k + 1))) for g in gammas]
        rep["order_alpha_on_X"] = str(group_order(Xr, m) if Xr else 1)
        rep["alt_X"] = str(math.factorial(m) // 2)
        rep["order_gamma_on_Y"] = str(group_order(Yr, k) if Yr else 1)
        rep["alt_Y"] = str(math.factorial(k) // 2)
        beta = next((p for D, p in pair.delta.items() if pair.roles.get(D) == ("B",)), None)
        rep["beta_mixes_X_and_Y"] = beta is not None and any((beta(i) <= m) != (i <= m) for i in range(1, c + 1))
    rep["ok"] = rep["Z_side_alternating"] and rep["L_side_alternating"]
    return rep


def check_embedding(G: BmwPresentation, pair: InterlacingPair, S: Scaffolding) -> dict:
    """Every BMW relation x_i a_j x_i' a_j' maps to the square x_i A_j x_i' A_j' of the lattice."""
    bad = []
    T = G.corners
    for (i, j), (i2, j2) in sorted(T.items()):
        Aj, Aj2 = S.A[j - 1], S.A[j2 - 1]
        got_z = pair.dz(Aj, i - 1)
        got_D = Aj.apply(pair.zeta[i - 1])
        if got_z != i2 - 1 or got_D != Aj2:
            bad.append({"relation": [f"x{i}", f"a{j}", f"x{i2}", f"a{j2}"],
                        "image": [pair.Z[i - 1], str(Aj), pair.Z[got_z], str(got_D)]})
    images = [f"x{i}" for i in range(1, G.m + 1)] + [str(a) for a in S.A]
    injective = len(set(images)) == len(images) and len(set(S.A)) == len(S.A)
    in_hyperplane = all(a.disjoint(S.A_prime) for a in S.A)
    return {"relations": len(T), "failures": bad[:5], "injective_on_generators": injective,
            "images_adjacent_to_A'": in_hyperplane,
            "ok": not bad and injective and in_hyperplane}


def pipeline(G: BmwPresentation, link: bool = True) -> dict:
    """Scaffolding, interlacing pair, lattice and every check for one BMW input."""
    S = build_scaffolding(G.n)
    pair = build_interlacing(G, S)
    rep = {"m": G.m, "n": G.n, "d": S.d, "k": S.k, "c": pair.c,
           "scaffolding": verify_scaffolding(S), "interlacing": verify_interlacing(pair)}
    pres = emit_lattice(pair)
    rep["lattice_counts"] = pres.counts()
    if link:
        rep["link"] = check_link(pres, pair)
    rep["local_actions"] = local_action_report(pair)
    rep["embedding"] = check_embedding(G, pair, S)
    rep["ok"] = all(v.get("ok", True) for v in rep.values() if isinstance(v, dict))
    return rep
