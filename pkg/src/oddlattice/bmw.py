"""Involutive BMW presentations: corner tables, local actions and search."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterator

from .perm import Permutation, equals_alternating, group_order


@dataclass(frozen=True)
class BmwPresentation:
    """Generators x_1..x_m, a_1..a_n; ``table[(i, j)] = (i', j')`` for the relation x_i a_j x_i' a_j'."""

    m: int
    n: int
    table: tuple  # sorted tuple of ((i, j), (i', j')) over all corners
    tags: tuple = (("nrf", "external"),)

    @classmethod
    def from_relations(cls, m: int, n: int, relations, tags=None) -> "BmwPresentation":
        """Build from relations [i, j, i', j'] (one per square; missing corners are filled in)."""
        T: dict = {}
        for rel in relations:
            i, j, i2, j2 = (int(t) for t in rel)
            for corner, opp in (((i, j), (i2, j2)), ((i2, j2), (i, j)),
                                ((i, j2), (i2, j)), ((i2, j), (i, j2))):
                if T.get(corner, opp) != opp:
                    raise ValueError(f"corner {corner} claimed by two relations")
                T[corner] = opp
        return cls(m, n, tuple(sorted(T.items())), tuple(sorted((tags or {"nrf": "external"}).items())))

    @classmethod
    def direct_product(cls, m: int, n: int) -> "BmwPresentation":
        return cls.from_relations(m, n, [(i, j, i, j) for i in range(1, m + 1) for j in range(1, n + 1)])

    @property
    def corners(self) -> dict:
        return dict(self.table)

    def opposite(self, i: int, j: int) -> tuple[int, int]:
        return self.corners[(i, j)]

    def relations(self) -> list[tuple[int, int, int, int]]:
        """One relation per square, read from its lexicographically least corner."""
        out, seen = [], set()
        for (i, j), (i2, j2) in self.table:
            sq = frozenset({(i, j), (i2, j2), (i, j2), (i2, j)})
            if sq not in seen:
                seen.add(sq)
                out.append((i, j, i2, j2))
        return out

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "squares": [list(r) for r in self.relations()],
                "tags": dict(self.tags)}

    @classmethod
    def from_json(cls, obj: dict) -> "BmwPresentation":
        return cls.from_relations(obj["m"], obj["n"], obj["squares"], obj.get("tags"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def validate(P: BmwPresentation) -> dict:
    """Check that the corner data is a complete, involutive, corner-consistent square table."""
    errors = []
    T = P.corners
    for i in range(1, P.m + 1):
        for j in range(1, P.n + 1):
            if (i, j) not in T:
                errors.append({"corner": [i, j], "problem": "no relation"})
    for (i, j), (i2, j2) in T.items():
        if not (1 <= i <= P.m and 1 <= j <= P.n and 1 <= i2 <= P.m and 1 <= j2 <= P.n):
            errors.append({"corner": [i, j], "problem": "index out of range"})
            continue
        for corner, opp in (((i2, j2), (i, j)), ((i, j2), (i2, j)), ((i2, j), (i, j2))):
            if T.get(corner) != opp:
                errors.append({"corner": [i, j], "problem": f"corner {list(corner)} reads a different relation"})
    report = {"valid": not errors, "errors": errors[:20]}
    if not errors:
        xi, al = local_actions(P)
        report["x_side_transitive"] = len(_orbit(al, 1, P.m)) == P.m
        report["a_side_transitive"] = len(_orbit(xi, 1, P.n)) == P.n
    return report


def _orbit(gens, start, n):
    seen = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        for g in gens:
            b = g(a)
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return seen


def local_actions(P: BmwPresentation) -> tuple[list[Permutation], list[Permutation]]:
    """(xi'_1..xi'_m on [n], alpha_1..alpha_n on [m])."""
    T = P.corners
    xi = [Permutation(tuple(T[(i, j)][1] for j in range(1, P.n + 1))) for i in range(1, P.m + 1)]
    al = [Permutation(tuple(T[(i, j)][0] for i in range(1, P.m + 1))) for j in range(1, P.n + 1)]
    return xi, al


def relabel(P: BmwPresentation, sx: tuple, sa: tuple) -> BmwPresentation:
    """Rename x_i -> x_{sx[i-1]} and a_j -> a_{sa[j-1]}."""
    rels = [(sx[i - 1], sa[j - 1], sx[i2 - 1], sa[j2 - 1]) for (i, j, i2, j2) in P.relations()]
    return BmwPresentation.from_relations(P.m, P.n, rels, dict(P.tags))


def canonical(P: BmwPresentation) -> tuple:
    """Least table over simultaneous relabelling by Sym_m x Sym_n."""
    best = None
    for sx in itertools.permutations(range(1, P.m + 1)):
        for sa in itertools.permutations(range(1, P.n + 1)):
            t = relabel(P, sx, sa).table
            if best is None or t < best:
                best = t
    return best


@dataclass
class SearchFilters:
    transitive_x: bool = False
    transitive_a: bool = False
    alternating_x: bool = False   # <alpha_j> = Alt_m
    alternating_a: bool = False   # <xi'_i> = Alt_n
    limit: int | None = None


@dataclass
class SearchState:
    """Result of a bounded search: emitted presentations and whether the space was exhausted."""
    found: list = field(default_factory=list)
    exhausted: bool = False
    nodes: int = 0
    resume: int | None = None     # number of complete tables already visited


def _passes(P: BmwPresentation, f: SearchFilters) -> bool:
    xi, al = local_actions(P)
    if f.alternating_x and not equals_alternating(al, P.m):
        return False
    if f.alternating_a and not equals_alternating(xi, P.n):
        return False
    if f.transitive_x and len(_orbit(al, 1, P.m)) != P.m:
        return False
    if f.transitive_a and len(_orbit(xi, 1, P.n)) != P.n:
        return False
    return True


def _tables(m: int, n: int, rng: random.Random | None, f: SearchFilters) -> Iterator[dict]:
    """All corner tables by filling the first free cell; branches in lex or shuffled order.

    With an alternating filter a finished row (resp. the finished grid) is
    pruned as soon as a row permutation is odd, since Alt contains no odd element.
    """
    T: dict = {}
    cells = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]

    def row_even(i):
        perm = tuple(T[(i, j)][1] for j in range(1, n + 1))
        return Permutation(perm).is_even()

    def rec(pos):
        while pos < len(cells) and cells[pos] in T:
            pos += 1
        if pos == len(cells):
            yield T
            return
        i, j = cells[pos]
        options = []
        for i2 in range(i, m + 1):
            for j2 in range(1, n + 1):
                quad = {(i, j), (i2, j2), (i, j2), (i2, j)}
                if i2 == i and j2 < j:
                    continue
                if any(c in T for c in quad):
                    continue
                options.append((i2, j2))
        if rng is not None:
            rng.shuffle(options)
        for i2, j2 in options:
            entries = {(i, j): (i2, j2), (i2, j2): (i, j), (i, j2): (i2, j), (i2, j): (i, j2)}
            T.update(entries)
            ok = True
            if f.alternating_a:
                for r in {i, i2}:
                    if all((r, c) in T for c in range(1, n + 1)) and not row_even(r):
                        ok = False
            if ok:
                yield from rec(pos + 1)
            for c in entries:
                del T[c]

    yield from rec(0)


def search_involutive(m: int, n: int, filters: SearchFilters | None = None, *, canonical_only: bool = True,
                      seed: int | None = None, max_tables: int = 2_000_000, skip: int = 0,
                      allow_large: bool = False) -> SearchState:
    """Enumerate valid presentations passing the filters.

    Lexicographic order when ``seed`` is None, otherwise a seeded shuffled
    branch order (used above the exhaustive cap m*n <= 24). ``skip`` resumes a
    lexicographic search after that many complete tables.
    """
    f = filters or SearchFilters()
    if m * n > 24 and seed is None and not allow_large:
        raise ValueError("m*n > 24: pass a seed for a randomized search or allow_large=True")
    rng = random.Random(seed) if seed is not None else None
    st = SearchState()
    seen = set()
    count = 0
    for T in _tables(m, n, rng, f):
        count += 1
        if count <= skip:
            continue
        if count - skip > max_tables:
            st.resume = count - 1
            return st
        P = BmwPresentation(m, n, tuple(sorted(T.items())))
        if not _passes(P, f):
            continue
        if canonical_only:
            key = canonical(P) if m * n <= 24 else P.table
            if key in seen:
                continue
            seen.add(key)
            if m * n <= 24:
                P = BmwPresentation(m, n, key)
        st.found.append(P)
        if f.limit is not None and len(st.found) >= f.limit:
            st.resume = count
            return st
    st.exhausted = True
    st.nodes = count
    return st


def count_tables_bruteforce(m: int, n: int) -> int:
    """Independent count: involutions T of the grid with the rectangle closure property."""
    cells = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
    total = 0
    for img in itertools.product(cells, repeat=len(cells)):
        T = dict(zip(cells, img))
        ok = True
        for (i, j), (i2, j2) in T.items():
            if T[(i2, j2)] != (i, j) or T[(i, j2)] != (i2, j) or T[(i2, j)] != (i, j2):
                ok = False
                break
        total += ok
    return total


def order_of_local_actions(P: BmwPresentation) -> tuple[int, int]:
    xi, al = local_actions(P)
    return group_order(xi, P.n), group_order(al, P.m)
