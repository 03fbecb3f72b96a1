"""The Heyting algebra of upsets and depth-stratified subalgebra generation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .poset import DEFAULT_UPSET_CAP, Poset, PosetError, Upset, disjoint_union


def implies_mask(P: Poset, u: int, v: int) -> int:
    # x is in u -> v iff no point above x lies in u but not in v
    return P.full & ~P.down_mask(u & ~v)


def heyting_implies(P: Poset, U: Upset, V: Upset) -> Upset:
    if U.poset != P or V.poset != P:
        raise PosetError("upsets belong to a different poset")
    return Upset(P, implies_mask(P, U.mask, V.mask))


def meet(U: Upset, V: Upset) -> Upset:
    return Upset(U.poset, U.mask & V.mask)


def join(U: Upset, V: Upset) -> Upset:
    return Upset(U.poset, U.mask | V.mask)


def lattice_closure(elems: Iterable[int], cap: int = DEFAULT_UPSET_CAP) -> set[int]:
    have = set(elems)
    todo = list(have)
    while todo:
        x = todo.pop()
        for y in list(have):
            for z in (x & y, x | y):
                if z not in have:
                    have.add(z)
                    todo.append(z)
                    if len(have) > cap:
                        raise PosetError(f"closure exceeds cap {cap}")
    return have


@dataclass(frozen=True)
class GenerationTrace:
    generators: tuple[Upset, ...]
    strata: tuple[frozenset, ...]
    stabilization_depth: int

    @property
    def subalgebra(self) -> frozenset:
        return self.strata[-1]


def _masks(P: Poset, gens: Sequence) -> list[int]:
    out = []
    for g in gens:
        if isinstance(g, Upset):
            if g.poset != P:
                raise PosetError("generator belongs to a different poset")
            out.append(g.mask)
        elif isinstance(g, int):
            if not P.is_upset_mask(g):
                raise PosetError("generator is not an upset")
            out.append(g)
        else:
            m = P.mask_of(g)
            if P.up_mask(m) != m:
                raise PosetError("generator is not an upset")
            out.append(m)
    return out


def generated_subalgebra(P: Poset, gens: Sequence, cap: int = DEFAULT_UPSET_CAP) -> GenerationTrace:
    """Strata D_0 ⊆ D_1 ⊆ ... where D_{i+1} adds all implications between
    members of D_i and closes under meet and join.

    Generators may be :class:`Upset` objects, bitmasks, or sets of worlds.
    """
    masks = _masks(P, gens)
    stratum = frozenset(lattice_closure(masks + [0, P.full], cap))
    strata = [stratum]
    while True:
        elems = list(stratum)
        new = {implies_mask(P, u, v) for u in elems for v in elems}
        nxt = frozenset(lattice_closure(stratum | new, cap))
        if nxt == stratum:
            break
        strata.append(nxt)
        stratum = nxt
    return GenerationTrace(tuple(Upset(P, m) for m in masks), tuple(strata), len(strata) - 1)


def generation_depth(P: Poset, gens: Sequence, cap: int = DEFAULT_UPSET_CAP) -> int:
    return generated_subalgebra(P, gens, cap).stabilization_depth


def product_generation_depths(P: Poset, Q: Poset, gens: Sequence[tuple], cap: int = DEFAULT_UPSET_CAP):
    """Depths over the disjoint union and over each component.

    ``gens`` is a sequence of pairs (generator on P, generator on Q); the
    upsets of the disjoint union are exactly such pairs.
    """
    PQ = disjoint_union(P, Q)
    left = _masks(P, [g for g, _ in gens])
    right = _masks(Q, [h for _, h in gens])
    joint = [a | (b << len(P)) for a, b in zip(left, right)]
    return (generation_depth(PQ, joint, cap), generation_depth(P, left, cap),
            generation_depth(Q, right, cap))


def product_generation_depth_check(P: Poset, Q: Poset, gens: Sequence[tuple],
                                   cap: int = DEFAULT_UPSET_CAP) -> bool:
    both, left, right = product_generation_depths(P, Q, gens, cap)
    return both == max(left, right)
