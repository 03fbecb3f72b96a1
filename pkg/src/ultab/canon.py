"""Canonical forms and isomorphism for (optionally colored) posets.

Partition refinement on order invariants, then individualization with
twin pruning; the certificate is the least encoding over all leaves.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Hashable, Sequence

from .poset import Poset, bits, popcount

Certificate = tuple


def _refine(P: Poset, cells: list[list[int]]) -> list[list[int]]:
    n = len(P)
    while True:
        cell_of = [0] * n
        for k, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = k
        sig = {}
        for v in range(n):
            ups = sorted(cell_of[u] for u in bits(P.up[v] & ~(1 << v)))
            downs = sorted(cell_of[u] for u in bits(P.down[v] & ~(1 << v)))
            sig[v] = (cell_of[v], tuple(ups), tuple(downs))
        new: list[list[int]] = []
        for cell in cells:
            if len(cell) == 1:
                new.append(cell)
                continue
            groups: dict = {}
            for v in cell:
                groups.setdefault(sig[v], []).append(v)
            for key in sorted(groups):
                new.append(groups[key])
        if len(new) == len(cells):
            return new
        cells = new


def _initial(P: Poset, colors: Sequence[Hashable]) -> list[list[int]]:
    depth = P.depths()
    height = [0] * len(P)
    for i in sorted(range(len(P)), key=lambda i: popcount(P.down[i])):
        height[i] = 1 + max((height[j] for j in bits(P.down[i] & ~(1 << i))), default=0)
    lower = [0] * len(P)
    for i, c in enumerate(P.covers):
        for j in bits(c):
            lower[j] += 1
    keys = {}
    for i in range(len(P)):
        k = (colors[i], depth[i], height[i], popcount(P.up[i]), popcount(P.down[i]),
             popcount(P.covers[i]), lower[i])
        keys.setdefault(k, []).append(i)
    return [keys[k] for k in sorted(keys)]


def _twin_reps(P: Poset, colors, cell: list[int]) -> list[int]:
    seen = set()
    reps = []
    for v in cell:
        key = (P.up[v] & ~(1 << v), P.down[v] & ~(1 << v), colors[v])
        if key not in seen:
            seen.add(key)
            reps.append(v)
    return reps


def _encode(P: Poset, colors, order: list[int]) -> tuple:
    pos = {v: k for k, v in enumerate(order)}
    ups = []
    for v in order:
        m = 0
        for u in bits(P.up[v]):
            m |= 1 << pos[u]
        ups.append(m)
    return (len(P), tuple(colors[v] for v in order), tuple(ups))


def canonical_labeling(P: Poset, colors: Sequence[Hashable] | None = None) -> tuple[Certificate, list[int]]:
    """Certificate plus the world-index order realizing it."""
    if colors is None:
        colors = (0,) * len(P)
    colors = tuple(colors)
    best: list = [None, None]

    def search(cells: list[list[int]]) -> None:
        cells = _refine(P, cells)
        for p, cell in enumerate(cells):
            if len(cell) > 1:
                break
        else:
            order = [c[0] for c in cells]
            enc = _encode(P, colors, order)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        for v in _twin_reps(P, colors, cell):
            rest = [u for u in cell if u != v]
            search(cells[:p] + [[v], rest] + cells[p + 1:])

    if len(P) == 0:
        return (0, (), ()), []
    search(_initial(P, colors))
    return best[0], best[1]


@lru_cache(maxsize=200_000)
def _cached(P: Poset, colors: tuple | None) -> Certificate:
    return canonical_labeling(P, colors)[0]


def canonical_form(P: Poset, colors: Sequence[Hashable] | None = None) -> Certificate:
    """Equal for exactly the isomorphic (color-preserving) posets."""
    return _cached(P, None if colors is None else tuple(colors))


def isomorphism(P: Poset, Q: Poset, colors_p=None, colors_q=None) -> dict | None:
    """An order isomorphism P -> Q (as a world map) or None."""
    if len(P) != len(Q):
        return None
    cp, op = canonical_labeling(P, colors_p)
    cq, oq = canonical_labeling(Q, colors_q)
    if cp != cq:
        return None
    return {P.worlds[a]: Q.worlds[b] for a, b in zip(op, oq)}


def is_isomorphic(P: Poset, Q: Poset) -> tuple[bool, dict | None]:
    f = isomorphism(P, Q)
    return f is not None, f


def dedup(posets, key=None):
    """Keep the first poset of each isomorphism class, preserving order."""
    seen = set()
    out = []
    for P in posets:
        c = canonical_form(P) if key is None else key(P)
        if c not in seen:
            seen.add(c)
            out.append(P)
    return out
