"""Finite posets stored as reachability bitsets.

Worlds are opaque hashable ids kept in a fixed order; internally world ``i``
is bit ``1 << i`` and ``up[i]`` is the bitmask of ``{j : i <= j}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Sequence

World = Hashable

DEFAULT_UPSET_CAP = 1 << 20


class PosetError(ValueError):
    """Raised for malformed orders, unknown worlds and exceeded caps."""


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Poset:
    """A finite partial order.

    ``leq`` must already be reflexive, transitive and antisymmetric; use
    :meth:`from_relation` or :meth:`from_covers` to build from generators.
    """

    __slots__ = ("worlds", "index", "up", "down", "root", "_hash", "_covers")

    def __init__(self, worlds: Sequence[World], leq: Iterable[tuple[World, World]],
                 root: World | None = None):
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise PosetError("duplicate world ids")
        up = [0] * len(worlds)
        for a, b in leq:
            if a not in index or b not in index:
                raise PosetError(f"unknown world in pair {(a, b)!r}")
            up[index[a]] |= 1 << index[b]
        for i, m in enumerate(up):
            if not m >> i & 1:
                raise PosetError(f"leq is not reflexive at {worlds[i]!r}")
            for j in bits(m):
                if up[j] & ~m:
                    raise PosetError("leq is not transitive")
                if j != i and up[j] >> i & 1:
                    raise PosetError(f"antisymmetry fails for {worlds[i]!r}, {worlds[j]!r}")
        self._init(worlds, index, tuple(up), root)

    def _init(self, worlds, index, up, root):
        self.worlds = worlds
        self.index = index
        self.up = up
        down = [0] * len(worlds)
        for i, m in enumerate(up):
            for j in bits(m):
                down[j] |= 1 << i
        self.down = tuple(down)
        self._hash = None
        self._covers = None
        full = (1 << len(worlds)) - 1
        if root is None:
            least = [i for i, m in enumerate(up) if m == full]
            self.root = worlds[least[0]] if least else None
        else:
            if root not in index:
                raise PosetError(f"unknown root {root!r}")
            if up[index[root]] != full:
                raise PosetError(f"root {root!r} is not below every world")
            self.root = root

    @classmethod
    def _raw(cls, worlds: Sequence[World], up: Sequence[int], root: World | None = None) -> "Poset":
        # Trusted constructor: up must already be a valid reachability table.
        P = cls.__new__(cls)
        worlds = tuple(worlds)
        P._init(worlds, {w: i for i, w in enumerate(worlds)}, tuple(up), root)
        return P

    @classmethod
    def from_relation(cls, worlds: Sequence[World], pairs: Iterable[tuple[World, World]],
                      root: World | None = None) -> "Poset":
        """Reflexive-transitive closure of ``pairs``; cycles are rejected."""
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise PosetError("duplicate world ids")
        up = [1 << i for i in range(len(worlds))]
        for a, b in pairs:
            if a not in index or b not in index:
                raise PosetError(f"unknown world in pair {(a, b)!r}")
            up[index[a]] |= 1 << index[b]
        changed = True
        while changed:
            changed = False
            for i in range(len(up)):
                m = up[i]
                for j in bits(m):
                    m |= up[j]
                if m != up[i]:
                    up[i] = m
                    changed = True
        for i, m in enumerate(up):
            for j in bits(m & ~(1 << i)):
                if up[j] >> i & 1:
                    raise PosetError(f"cycle through {worlds[i]!r} and {worlds[j]!r}")
        P = cls.__new__(cls)
        P._init(worlds, index, tuple(up), root)
        return P

    from_covers = from_relation

    @classmethod
    def chain(cls, n: int) -> "Poset":
        return cls._raw(range(n), [((1 << n) - 1) ^ ((1 << i) - 1) for i in range(n)])

    @classmethod
    def antichain(cls, n: int) -> "Poset":
        return cls._raw(range(n), [1 << i for i in range(n)])

    # -- basic access -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.worlds)

    def __iter__(self) -> Iterator[World]:
        return iter(self.worlds)

    def __contains__(self, w: World) -> bool:
        return w in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self.worlds == other.worlds and self.up == other.up

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.worlds, self.up))
        return self._hash

    def __repr__(self) -> str:
        return f"Poset({len(self)} worlds, covers={self.cover_pairs()!r})"

    @property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1

    def idx(self, w: World) -> int:
        try:
            return self.index[w]
        except KeyError:
            raise PosetError(f"unknown world {w!r}") from None

    def mask_of(self, ws: Iterable[World]) -> int:
        m = 0
        for w in ws:
            m |= 1 << self.idx(w)
        return m

    def worlds_of(self, mask: int) -> frozenset:
        return frozenset(self.worlds[i] for i in bits(mask))

    def leq(self, a: World, b: World) -> bool:
        return bool(self.up[self.idx(a)] >> self.idx(b) & 1)

    @property
    def root_index(self) -> int | None:
        return None if self.root is None else self.index[self.root]

    @property
    def is_rooted(self) -> bool:
        return self.root is not None

    @property
    def covers(self) -> tuple[int, ...]:
        """Bitmask of immediate successors of each world."""
        if self._covers is None:
            out = []
            for i, m in enumerate(self.up):
                strict = m & ~(1 << i)
                c = strict
                for j in bits(strict):
                    c &= ~(self.up[j] & ~(1 << j))
                out.append(c)
            self._covers = tuple(out)
        return self._covers

    def cover_pairs(self) -> list[tuple[World, World]]:
        return [(self.worlds[i], self.worlds[j])
                for i, c in enumerate(self.covers) for j in bits(c)]

    def maximal(self) -> int:
        return sum(1 << i for i, m in enumerate(self.up) if m == 1 << i)

    def minimal(self) -> int:
        return sum(1 << i for i, m in enumerate(self.down) if m == 1 << i)

    def topdown_order(self) -> list[int]:
        """Indices sorted so that every world comes after all worlds above it."""
        d = self.depths()
        return sorted(range(len(self)), key=lambda i: (d[i], i))

    # -- closures and substructures ----------------------------------------

    def up_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def down_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def is_upset_mask(self, mask: int) -> bool:
        return self.up_mask(mask) == mask

    def restrict(self, mask: int) -> "Poset":
        """Induced subposet on the worlds in ``mask`` (order of worlds kept)."""
        keep = list(bits(mask))
        pos = {i: k for k, i in enumerate(keep)}
        up = []
        for i in keep:
            m = 0
            for j in bits(self.up[i] & mask):
                m |= 1 << pos[j]
            up.append(m)
        return Poset._raw([self.worlds[i] for i in keep], up)

    def principal(self, w: World) -> "Poset":
        """The rooted upset generated by ``w``, rooted at ``w``."""
        return self.restrict(self.up[self.idx(w)])

    def relabel(self, mapping) -> "Poset":
        worlds = [mapping[w] for w in self.worlds]
        root = None if self.root is None else mapping[self.root]
        return Poset._raw(worlds, self.up, root)

    def standardize(self) -> "Poset":
        """Same order with worlds renamed ``0..n-1``."""
        return Poset._raw(range(len(self)), self.up)

    # -- numeric invariants -------------------------------------------------

    def depths(self) -> tuple[int, ...]:
        n = len(self)
        out = [0] * n
        order = sorted(range(n), key=lambda i: popcount(self.up[i]))
        for i in order:
            best = 0
            for j in bits(self.covers[i]):
                best = max(best, out[j])
            out[i] = best + 1
        return tuple(out)

    def depth_of(self, w: World) -> int:
        return self.depths()[self.idx(w)]

    def depth(self) -> int:
        return max(self.depths(), default=0)

    def width(self) -> int:
        """Max over worlds x of the largest antichain inside the upset of x."""
        return max((max_antichain(self, m) for m in set(self.up)), default=0)

    def cover_count(self) -> int:
        return sum(popcount(c) for c in self.covers)


def max_antichain(P: Poset, mask: int) -> int:
    """Size of a largest antichain within ``mask`` (Dilworth via matching)."""
    nodes = list(bits(mask))
    succ = {i: [j for j in bits(P.up[i] & mask) if j != i] for i in nodes}
    match_right: dict[int, int] = {}

    def augment(u: int, seen: set) -> bool:
        for v in succ[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    matched = sum(1 for u in nodes if augment(u, set()))
    return len(nodes) - matched


@dataclass(frozen=True)
class Upset:
    """An upward closed set of worlds of ``poset``."""

    poset: Poset
    mask: int

    def __post_init__(self):
        if not self.poset.is_upset_mask(self.mask):
            raise PosetError("set is not upward closed")

    @property
    def worlds(self) -> frozenset:
        return self.poset.worlds_of(self.mask)

    def __contains__(self, w: World) -> bool:
        return bool(self.mask >> self.poset.idx(w) & 1)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self) -> Iterator[World]:
        return (self.poset.worlds[i] for i in bits(self.mask))

    def __repr__(self) -> str:
        return "Upset({" + ", ".join(map(repr, self)) + "})"


def up_closure(P: Poset, S: Iterable[World]) -> Upset:
    return Upset(P, P.up_mask(P.mask_of(S)))


def upset_masks(P: Poset, cap: int = DEFAULT_UPSET_CAP) -> list[int]:
    """All upsets as bitmasks, ordered by (size, mask)."""
    order = P.topdown_order()
    strict = [P.up[i] & ~(1 << i) for i in range(len(P))]
    out: list[int] = []

    def rec(k: int, mask: int) -> None:
        if k == len(order):
            out.append(mask)
            if len(out) > cap:
                raise PosetError(f"more than {cap} upsets")
            return
        i = order[k]
        rec(k + 1, mask)
        if strict[i] & mask == strict[i]:
            rec(k + 1, mask | 1 << i)

    rec(0, 0)
    out.sort(key=lambda m: (popcount(m), m))
    return out


def all_upsets(P: Poset, cap: int = DEFAULT_UPSET_CAP) -> list[Upset]:
    return [Upset(P, m) for m in upset_masks(P, cap)]


def count_upsets(P: Poset, cap: int = DEFAULT_UPSET_CAP) -> int:
    return len(upset_masks(P, cap))


def rooted_upsets(P: Poset, dedup: bool = False) -> list[Poset]:
    out = [P.principal(w) for w in P.worlds]
    if not dedup:
        return out
    from .canon import canonical_form
    seen = set()
    uniq = []
    for Q in out:
        c = canonical_form(Q)
        if c not in seen:
            seen.add(c)
            uniq.append(Q)
    return uniq


def _tagged(P: Poset, Q: Poset) -> tuple[list, list]:
    if set(P.worlds).isdisjoint(Q.worlds):
        return list(P.worlds), list(Q.worlds)
    return [(0, w) for w in P.worlds], [(1, w) for w in Q.worlds]


def linear_sum(top: Poset, bottom: Poset) -> Poset:
    """Every world of ``bottom`` below every world of ``top``; ``top`` listed first."""
    tw, bw = _tagged(top, bottom)
    n = len(top)
    up = list(top.up) + [(m << n) | top.full for m in bottom.up]
    return Poset._raw(tw + bw, up)


def disjoint_union(P: Poset, Q: Poset) -> Poset:
    pw, qw = _tagged(P, Q)
    n = len(P)
    return Poset._raw(pw + qw, list(P.up) + [m << n for m in Q.up])


def is_partial_order(worlds: Sequence[World], leq: Iterable[tuple[World, World]]) -> bool:
    try:
        Poset(worlds, leq)
    except PosetError:
        return False
    return True


def antichains(P: Poset, mask: int | None = None) -> Iterator[tuple[int, ...]]:
    """Brute-force antichain enumeration (test oracle, small posets only)."""
    nodes = list(bits(P.full if mask is None else mask))
    for r in range(len(nodes) + 1):
        for combo in combinations(nodes, r):
            if all(not (P.up[a] >> b & 1 or P.up[b] >> a & 1) for a, b in combinations(combo, 2)):
                yield combo
