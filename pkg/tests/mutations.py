"""Targeted single-condition mutations for the negative suite."""

import copy
import itertools

from oddlattice.complexes import SubsetVertex
from oddlattice.construction import InterlacingPair, Scaffolding, odd_graph, verify_interlacing
from oddlattice.perm import Permutation

D_CONDS = ("D1", "D2", "D3", "D4", "D5")


def failing(rep, conds=D_CONDS):
    return {c for c in conds if not rep[c]["ok"]}


def scaffolding_mutations(S: Scaffolding) -> dict:
    out = {}
    m = copy.deepcopy(S)
    m.k = 0
    out["E1"] = m
    m = copy.deepcopy(S)
    m.A[0] = m.A[1]
    out["E2"] = m
    m = copy.deepcopy(S)
    m.upsilons[0] = Permutation.from_cycles(S.ell, [(1, 2)])
    out["E3"] = m
    # C_1 becomes a neighbour of B: an edge inside the family plus C
    m = copy.deepcopy(S)
    L = odd_graph(S.d)
    nb = sorted(L.vertices[j] for j in L.adj[L.index(S.B)])
    m.C[0] = next(v for v in nb if v not in S.C and v not in S.family())
    out["E4"] = m
    return out


def _with(pair, zeta=None, delta=None):
    m = copy.deepcopy(pair)
    if zeta:
        for z, p in zeta.items():
            m.zeta[z] = p
    if delta:
        for D, p in delta.items():
            m.delta[D] = p
    return m


def interlacing_mutations(pair: InterlacingPair, search_cap: int = 4000) -> dict:
    """One mutated pair per condition; where possible only the targeted condition fails."""
    L = odd_graph(pair.d)
    c, ell = pair.c, pair.ell
    S = sorted(D for D, p in pair.delta.items() if not p.is_identity())
    out = {}
    out["D1"] = _with(pair, zeta={0: Permutation.from_cycles(ell, [(1, 2, 3)])})
    out["D2"] = _with(pair, delta={S[0]: Permutation.from_cycles(c, [(1, 2, 3)])})
    transpositions = [Permutation.from_cycles(c, [(a, b)]) for a, b in itertools.combinations(range(1, c + 1), 2)]
    # D3: a nontrivial delta on a neighbour of a nontrivial delta
    best = None
    tried = 0
    for D in S:
        for j in sorted(L.adj[L.index(D)]):
            E = L.vertices[j]
            for t in transpositions:
                tried += 1
                m = _with(pair, delta={E: t})
                f = failing(verify_interlacing(m, L))
                if "D3" in f and (best is None or len(f) < best[0]):
                    best = (len(f), m)
                if best and best[0] == 1 or tried > search_cap:
                    break
            if best and best[0] == 1 or tried > search_cap:
                break
        if best and best[0] == 1 or tried > search_cap:
            break
    out["D3"] = best[1]
    # D3 with both deltas moving a common letter: no orientation of that cube exists
    D = S[0]
    moved = sorted(pair.delta[D].support())
    E = L.vertices[min(L.adj[L.index(D)])]
    other = next(a for a in range(1, c + 1) if a != moved[0])
    out["D3-shared"] = _with(pair, delta={E: Permutation.from_cycles(c, [(moved[0], other)])})
    # D4 / D5: a fresh delta_E = (z1 z2) away from the existing support.
    # D4 alone: both zetas fix E but differ off E.
    # D5 alone: the zetas agree off E but move E.
    Sset = set(pair.delta)
    near = Sset | {L.vertices[j] for D in Sset for j in L.adj[L.index(D)]}
    zpairs = list(itertools.combinations(range(c), 2))

    def off_agree(z1, z2, E):
        p, q = pair.zeta[z1], pair.zeta[z2]
        return all(p(a) == q(a) for a in range(1, ell + 1) if a not in E.members)

    want = {
        "D4": lambda z1, z2, E: (E.apply(pair.zeta[z1]) == E and E.apply(pair.zeta[z2]) == E
                                 and not off_agree(z1, z2, E)),
        "D5": lambda z1, z2, E: (off_agree(z1, z2, E) and E.apply(pair.zeta[z1]) != E
                                 and E.apply(pair.zeta[z1]) not in near),
    }
    for target, pred in want.items():
        found = None
        fallback = None
        for z1, z2 in zpairs:
            for E in L.vertices:
                if E in near:
                    continue
                if fallback is None or pred(z1, z2, E):
                    m = _with(pair, delta={E: Permutation.from_cycles(c, [(z1 + 1, z2 + 1)])})
                    f = failing(verify_interlacing(m, L))
                    if f == {target}:
                        found = m
                        break
                    if target in f and fallback is None:
                        fallback = m
            if found is not None:
                break
        if found is None and fallback is None:
            raise AssertionError(f"no mutation violating {target} found")
        out[target] = found if found is not None else fallback
    return out


def adjacent_delta_pair(d: int = 4) -> InterlacingPair:
    """zeta = id, delta nontrivial on both ends of an edge of O_d."""
    L = odd_graph(d)
    a, b = L.edges()[0]
    c = 3
    t = Permutation.from_cycles(c, [(1, 2)])
    return InterlacingPair(d, ["z1", "z2", "z3"], [Permutation.identity(2 * d - 1)] * c,
                           {L.vertices[a]: t, L.vertices[b]: t})


def subset(d, members):
    return SubsetVertex.of(d, members)
