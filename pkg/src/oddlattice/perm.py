"""Permutations on [n] and a deterministic stabilizer-chain engine.

Points are 1-based in the public API. Internally the chain works on 0-based
numpy arrays so that sifting can be done in batches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Permutation:
    """A bijection of [n]; ``images[i - 1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of [{n}]: {self.images}")

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(1, n + 1))
        seen: set[int] = set()
        for cyc in cycles:
            cyc = list(cyc)
            for a in cyc:
                if not 1 <= a <= n:
                    raise ValueError(f"point {a} outside [1, {n}]")
                if a in seen:
                    raise ValueError(f"point {a} repeated in cycle notation")
                seen.add(a)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b
        return cls(tuple(img))

    @classmethod
    def parse(cls, text: str, n: int) -> "Permutation":
        """Parse cycle notation such as ``"(1 2)(3 4)"``; ``"()"`` or ``"id"`` is the identity."""
        text = text.strip()
        if text in ("", "()", "id"):
            return cls.identity(n)
        if not re.fullmatch(r"(\(\s*\d+(?:[\s,]+\d+)*\s*\)\s*)+", text):
            raise ValueError(f"bad cycle notation: {text!r}")
        cycles = [[int(t) for t in re.split(r"[\s,]+", c.strip())]
                  for c in re.findall(r"\(([^)]*)\)", text)]
        return cls.from_cycles(n, cycles)

    @classmethod
    def from_array(cls, arr) -> "Permutation":
        """From a 0-based image array."""
        return cls(tuple(int(x) + 1 for x in arr))

    @classmethod
    def from_json(cls, obj: dict) -> "Permutation":
        p = cls(tuple(obj["images"]))
        if p.degree != obj["degree"]:
            raise ValueError("degree does not match image list")
        return p

    # arithmetic -------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images, 1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return all(j == i for i, j in enumerate(self.images, 1))

    def support(self) -> frozenset[int]:
        return frozenset(i for i, j in enumerate(self.images, 1) if i != j)

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point."""
        seen = set()
        out = []
        for i in range(1, self.degree + 1):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = self(i)
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def order(self) -> int:
        from math import lcm
        return lcm(1, *(len(c) for c in self.cycles()))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.images, dtype=np.int32) - 1

    def to_json(self) -> dict:
        return {"degree": self.degree, "images": list(self.images)}

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Permutation[{self.degree}]{self}"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``compose(p, q)(i) == p(q(i))``."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} vs {q.degree}")
    return Permutation(tuple(p.images[j - 1] for j in q.images))


def parity_support(p: Permutation) -> tuple[str, frozenset[int]]:
    return ("even" if p.is_even() else "odd"), p.support()


# ---------------------------------------------------------------------------
# stabilizer chain


def _first_moved(a: np.ndarray) -> int:
    moved = np.flatnonzero(a != np.arange(len(a), dtype=a.dtype))
    return int(moved[0]) if len(moved) else -1


class _Level:
    """Orbit of one base point with explicit transversal and inverse transversal."""

    __slots__ = ("point", "orbit", "index", "trans", "inv")

    def __init__(self, point: int, gens: list[np.ndarray], n: int):
        self.point = point
        ident = np.arange(n, dtype=np.int32)
        orbit = [point]
        index = {point: 0}
        reps = [ident]
        k = 0
        while k < len(orbit):
            beta = orbit[k]
            u = reps[k]
            for s in gens:
                gamma = int(s[beta])
                if gamma not in index:
                    index[gamma] = len(orbit)
                    orbit.append(gamma)
                    reps.append(s[u])
            k += 1
        self.orbit = orbit
        self.index = index
        self.trans = np.stack(reps)
        inv = np.empty_like(self.trans)
        rows = np.arange(len(orbit))[:, None]
        inv[rows, self.trans] = ident[None, :]
        self.inv = inv


class PermutationGroup:
    """A permutation group with a base and strong generating set.

    The chain is built by the deterministic Schreier-Sims algorithm. Base points
    are chosen as the smallest point moved by a strong generator, after an
    optional caller-supplied prefix (used for pointwise stabilizers).
    """

    def __init__(self, gens: Iterable[Permutation], degree: int | None = None,
                 base_prefix: Sequence[int] = ()):
        gens = list(gens)
        if degree is None:
            if not gens:
                raise ValueError("degree required for an empty generator list")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise ValueError(f"degree mismatch: {g.degree} vs {degree}")
        self.degree = degree
        self.generators = gens
        self._prefix = [b - 1 for b in base_prefix]
        self._levels: list[_Level] | None = None
        self._strong: list[np.ndarray] = []

    # chain construction ------------------------------------------------
    def _level_gens(self, i: int, base: list[int]) -> list[np.ndarray]:
        fixed = base[:i]
        return [s for s in self._strong if all(s[b] == b for b in fixed)]

    def _sift_batch(self, G: np.ndarray, levels: list[_Level], start: int):
        """Sift rows of G through levels[start:]; return residues and the
        level at which each row dropped out (len(levels) if it passed)."""
        drop = np.full(len(G), len(levels), dtype=np.int64)
        alive = np.arange(len(G))
        for lv in range(start, len(levels)):
            if not len(alive):
                break
            L = levels[lv]
            beta = G[alive, L.point]
            lookup = np.fromiter((L.index.get(int(b), -1) for b in beta),
                                 dtype=np.int64, count=len(beta))
            out = lookup < 0
            if out.any():
                drop[alive[out]] = lv
            keep = ~out
            alive = alive[keep]
            idx = lookup[keep]
            if len(alive):
                G[alive] = np.take_along_axis(L.inv[idx], G[alive], axis=1)
        return G, drop

    def _build(self):
        if self._levels is not None:
            return
        n = self.degree
        ident = np.arange(n, dtype=np.int32)
        strong = [g.to_array() for g in self.generators]
        strong = [s for s in strong if not np.array_equal(s, ident)]
        self._strong = strong
        base = list(self._prefix)
        for s in strong:
            if all(s[b] == b for b in base):
                base.append(_first_moved(s))
        levels = [_Level(b, self._level_gens(i, base), n) for i, b in enumerate(base)]

        i = len(base) - 1
        while i >= 0:
            L = levels[i]
            S = self._level_gens(i, base)
            found = None
            if S and len(L.orbit) > 0:
                # all Schreier generators of level i at once
                rows = []
                for k, beta in enumerate(L.orbit):
                    u = L.trans[k]
                    for s in S:
                        gamma = int(s[beta])
                        rows.append(L.inv[L.index[gamma]][s[u]])
                G = np.stack(rows)
                nontriv = ~np.all(G == ident[None, :], axis=1)
                G = G[nontriv]
                if len(G):
                    # chunk to bound memory
                    for c0 in range(0, len(G), 4096):
                        chunk = G[c0:c0 + 4096].copy()
                        res, drop = self._sift_batch(chunk, levels, i + 1)
                        bad = np.flatnonzero((drop < len(levels)) |
                                             ~np.all(res == ident[None, :], axis=1))
                        if len(bad):
                            r = int(bad[0])
                            found = (res[r].copy(), int(drop[r]))
                            break
            if found is None:
                i -= 1
                continue
            h, j = found
            self._strong.append(h)
            if j == len(levels):
                base.append(_first_moved(h))
                levels.append(None)  # placeholder, rebuilt below
            for l in range(i + 1, j + 1):
                levels[l] = _Level(base[l], self._level_gens(l, base), n)
            i = j
        self._levels = levels

    # queries -------------------------------------------------------------
    @property
    def base(self) -> list[int]:
        self._build()
        return [L.point + 1 for L in self._levels]

    @property
    def strong_generators(self) -> list[Permutation]:
        self._build()
        return [Permutation.from_array(s) for s in self._strong]

    def orbit_lengths(self) -> list[int]:
        self._build()
        return [len(L.orbit) for L in self._levels]

    def order(self) -> int:
        out = 1
        for k in self.orbit_lengths():
            out *= k
        return out

    def sift(self, p: Permutation) -> tuple[Permutation, int]:
        """Residue of p and the level it dropped out at (len(base) if it passed)."""
        self._build()
        G = p.to_array()[None, :].copy()
        res, drop = self._sift_batch(G, self._levels, 0)
        return Permutation.from_array(res[0]), int(drop[0])

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            return False
        res, drop = self.sift(p)
        return drop == len(self._levels) and res.is_identity()

    def pointwise_stabilizer(self, points: Iterable[int]) -> "PermutationGroup":
        """Fix_G(points) as a new group (chain rebuilt with the points as base prefix)."""
        pts = sorted(set(points))
        H = PermutationGroup(self.generators, self.degree, base_prefix=pts)
        H._build()
        k = len(pts)
        stab = [Permutation.from_array(s) for s in H._strong
                if all(s[p - 1] == p - 1 for p in pts)]
        return PermutationGroup(stab, self.degree)

    def orbits(self) -> list[list[int]]:
        return orbits(self.generators, self.degree)

    def is_transitive(self) -> bool:
        return len(self.orbits()) <= 1

    def verify_chain(self) -> bool:
        """Independent re-check: every Schreier generator sifts to the identity."""
        self._build()
        base = [L.point for L in self._levels]
        ident = np.arange(self.degree, dtype=np.int32)
        for i, L in enumerate(self._levels):
            S = self._level_gens(i, base)
            for k, beta in enumerate(L.orbit):
                for s in S:
                    g = L.inv[L.index[int(s[beta])]][s[L.trans[k]]]
                    res, drop = self._sift_batch(g[None, :].copy(), self._levels, i + 1)
                    if drop[0] != len(self._levels) or not np.array_equal(res[0], ident):
                        return False
        return True


def orbits(gens: Sequence[Permutation], degree: int) -> list[list[int]]:
    parent = list(range(degree + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in gens:
        for i, j in enumerate(g.images, 1):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(1, degree + 1):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def group_order(gens: Sequence[Permutation], degree: int | None = None) -> int:
    gens = list(gens)
    if not gens:
        return 1
    return PermutationGroup(gens, degree).order()


def equals_alternating(gens: Sequence[Permutation], n: int) -> bool:
    if any(g.degree != n for g in gens):
        raise ValueError("generator degree differs from n")
    if not all(g.is_even() for g in gens):
        return False
    return group_order(gens, n) == factorial(n) // 2


def equals_symmetric(gens: Sequence[Permutation], n: int) -> bool:
    if any(g.degree != n for g in gens):
        raise ValueError("generator degree differs from n")
    return group_order(gens, n) == factorial(n)


def _minimal_block(gens: Sequence[Permutation], n: int, a: int, b: int) -> list[list[int]]:
    """Finest invariant partition with a and b in the same part (union-find closure)."""
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.pop()
        for g in gens:
            gx, gy = find(g(x)), find(g(y))
            if gx != gy:
                parent[max(gx, gy)] = min(gx, gy)
                queue.append((g(x), g(y)))
    blocks: dict[int, list[int]] = {}
    for i in range(1, n + 1):
        blocks.setdefault(find(i), []).append(i)
    return sorted(blocks.values())


def is_primitive(gens: Sequence[Permutation], domain_size: int):
    """Return ``(True, None)`` or ``(False, witness)``.

    The witness is the orbit partition for intransitive groups, otherwise a
    nontrivial block system.
    """
    n = domain_size
    gens = list(gens) or [Permutation.identity(n)]
    orb = orbits(gens, n)
    if len(orb) > 1:
        return False, orb
    for b in range(2, n + 1):
        blocks = _minimal_block(gens, n, 1, b)
        if len(blocks) > 1:
            return False, blocks
    return True, None


def direct_product_order(factors: Sequence[Sequence[Permutation]],
                         private: Sequence[Iterable[int]], degree: int):
    """Order of the group generated by commuting factors with private points.

    ``factors[i]`` generates G_i and ``private[i]`` is a set of points moved by
    G_i only. If the G_i commute pairwise and each acts faithfully on its
    private set, then the generated group is the direct product and its order
    is the product of the |G_i|. Each hypothesis is checked; the return value is
    ``(order, problems)`` where ``problems`` lists any failed hypothesis.
    """
    problems = []
    supports = [set().union(*(g.support() for g in F)) if F else set() for F in factors]
    owner: dict[int, list[int]] = {}
    for i, sup in enumerate(supports):
        for p in sup:
            owner.setdefault(p, []).append(i)
    # commutation only needs checking where supports overlap
    pairs = set()
    for lst in owner.values():
        for x in range(len(lst)):
            for y in range(x + 1, len(lst)):
                pairs.add((lst[x], lst[y]))
    for i, j in sorted(pairs):
        for g in factors[i]:
            for h in factors[j]:
                if compose(g, h) != compose(h, g):
                    problems.append(("noncommuting", i, j))
                    break
            else:
                continue
            break
    total = 1
    for i, F in enumerate(factors):
        P = sorted(set(private[i]))
        for p in P:
            if owner.get(p, []) != [i]:
                problems.append(("not private", i, p))
                break
        if not F:
            continue
        R, pts = restrict(F, supports[i])
        Gi = PermutationGroup(R, len(pts))
        loc = {p: k for k, p in enumerate(pts, 1)}
        if Gi.pointwise_stabilizer(loc[p] for p in P if p in loc).order() != 1:
            problems.append(("not faithful on private points", i))
        total *= Gi.order()
    return total, problems


def restrict(gens: Sequence[Permutation], points: Iterable[int]) -> tuple[list[Permutation], list[int]]:
    """Restrict generators to an invariant point set, relabelled 1..k in sorted order."""
    pts = sorted(set(points))
    idx = {p: k for k, p in enumerate(pts, 1)}
    out = []
    for g in gens:
        try:
            out.append(Permutation(tuple(idx[g(p)] for p in pts)))
        except KeyError as exc:
            raise ValueError(f"point set not invariant: {exc}") from None
    return out, pts


def restricted_order(gens: Sequence[Permutation], points: Iterable[int]) -> int:
    """Order of the group induced on an invariant set of points."""
    pts = sorted(set(points))
    if not pts or not gens:
        return 1
    R, _ = restrict(gens, pts)
    return group_order(R, len(pts))


def sparse_direct_product_order(factors: Sequence[Sequence[dict]], private: Sequence[Iterable]):
    """direct_product_order for generators given as sparse maps {point: image}.

    Points may be any hashable labels; a point absent from a map is fixed.
    Each factor is relabelled onto its own support, so the ambient point set
    never has to be materialised.
    """
    problems = []
    supports = [set().union(*(g.keys() for g in F)) if F else set() for F in factors]
    owner: dict = {}
    for i, sup in enumerate(supports):
        for p in sup:
            owner.setdefault(p, []).append(i)
    pairs = set()
    for lst in owner.values():
        for x in range(len(lst)):
            for y in range(x + 1, len(lst)):
                pairs.add((lst[x], lst[y]))
    for i, j in sorted(pairs):
        pts = supports[i] | supports[j]
        bad = False
        for g in factors[i]:
            for h in factors[j]:
                if any(g.get(h.get(p, p), h.get(p, p)) != h.get(g.get(p, p), g.get(p, p)) for p in pts):
                    bad = True
                    break
            if bad:
                break
        if bad:
            problems.append(("noncommuting", i, j))
    total = 1
    for i, F in enumerate(factors):
        priv = set(private[i])
        for p in priv:
            if owner.get(p, [i]) != [i]:
                problems.append(("not private", i, p))
                break
        if not F:
            continue
        pts = sorted(supports[i], key=repr)
        loc = {p: k for k, p in enumerate(pts, 1)}
        try:
            gens = [Permutation(tuple(loc[g.get(p, p)] for p in pts)) for g in F]
        except KeyError as exc:
            raise ValueError(f"factor {i} does not preserve its support: {exc}") from None
        Gi = PermutationGroup(gens, len(pts))
        if Gi.pointwise_stabilizer(loc[p] for p in priv if p in loc).order() != 1:
            problems.append(("not faithful on private points", i))
        total *= Gi.order()
    return total, problems
