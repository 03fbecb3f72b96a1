"""p-morphisms, image enumeration and the semantic Jankov criterion."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .canon import canonical_form
from .formula import BW2_AXIOM, JANKOV_REGISTRY, KC_AXIOM, AxiomSet, Formula, bd, free_vars
from .poset import Poset, PosetError, bits, popcount
from .semantics import DEFAULT_VALIDITY_CAP, frame_validates

DEFAULT_MORPHISM_CAP = 16


@dataclass(frozen=True)
class PMorphism:
    source: Poset
    target: Poset
    map: Mapping

    def __call__(self, w):
        return self.map[w]


def check_pmorphism(f: Mapping, P: Poset, Q: Poset):
    """(True, None) or (False, witness) where the witness is one of
    ("undefined", x), ("not-a-world", x), ("order", x, y) for x <= y with
    f(x) not <= f(y), or ("back", x, v) for f(x) <= v with no x' >= x mapped
    to v."""
    for x in P.worlds:
        if x not in f:
            return False, ("undefined", x)
        if f[x] not in Q:
            return False, ("not-a-world", x)
    for i in range(len(P)):
        x = P.worlds[i]
        fx = Q.idx(f[x])
        image = 0
        for j in bits(P.up[i]):
            fy = Q.idx(f[P.worlds[j]])
            if not Q.up[fx] >> fy & 1:
                return False, ("order", x, P.worlds[j])
            image |= 1 << fy
        missing = Q.up[fx] & ~image
        if missing:
            return False, ("back", x, Q.worlds[(missing & -missing).bit_length() - 1])
    return True, None


def is_pmorphism(f: Mapping, P: Poset, Q: Poset) -> bool:
    return check_pmorphism(f, P, Q)[0]


def compose(g: Mapping, f: Mapping) -> dict:
    """g after f."""
    return {x: g[y] for x, y in f.items()}


def _check_cap(P: Poset, cap: int) -> None:
    if len(P) > cap:
        raise PosetError(f"{len(P)} worlds exceed the morphism cap {cap}")


def _search(P: Poset, Q: Poset, limit: int | None):
    """Top-down backtracking; f(up x) must equal up f(x) at every point."""
    order = P.topdown_order()
    n, m = len(P), len(Q)
    f = [-1] * n
    img = [0] * n
    out: list[list[int]] = []
    if n < m or P.depth() < Q.depth():
        return out
    qmax = Q.maximal()

    def rec(k: int, hit: int) -> bool:
        if popcount(Q.full & ~hit) > n - k:
            return False
        if k == n:
            out.append(list(f))
            return limit is not None and len(out) >= limit
        x = order[k]
        below = 0
        for c in bits(P.covers[x]):
            below |= img[c]
        for y in range(m):
            if below == 0 and not qmax >> y & 1:
                continue
            if below | 1 << y != Q.up[y]:
                continue
            f[x] = y
            img[x] = Q.up[y]
            if rec(k + 1, hit | 1 << y):
                return True
        f[x] = -1
        return False

    rec(0, 0)
    return out


def surjective_pmorphisms(P: Poset, Q: Poset, cap: int = DEFAULT_MORPHISM_CAP,
                          limit: int | None = None) -> list[PMorphism]:
    """All surjective p-morphisms P ->> Q in search order."""
    _check_cap(P, cap)
    return [PMorphism(P, Q, {P.worlds[i]: Q.worlds[y] for i, y in enumerate(f)})
            for f in _search(P, Q, limit)]


def has_surjective_pmorphism(P: Poset, Q: Poset, cap: int = DEFAULT_MORPHISM_CAP) -> PMorphism | None:
    found = surjective_pmorphisms(P, Q, cap, limit=1)
    return found[0] if found else None


# -- images ---------------------------------------------------------------------

def _kernels(P: Poset):
    """Partitions of P whose quotient map is a p-morphism, as block lists.

    A partition qualifies exactly when all members of a block see the same
    set of blocks; the induced order is then automatically antisymmetric.
    """
    order = P.topdown_order()
    n = len(P)
    block = [-1] * n
    sees = [0] * n  # bitmask of blocks visible from each assigned point
    block_sees: list[int] = []

    def rec(k: int):
        if k == n:
            yield list(block)
            return
        x = order[k]
        above = 0
        for c in bits(P.covers[x]):
            above |= sees[c]
        for b in range(len(block_sees)):
            if above | 1 << b == block_sees[b]:
                block[x], sees[x] = b, block_sees[b]
                yield from rec(k + 1)
        b = len(block_sees)
        block_sees.append(above | 1 << b)
        block[x], sees[x] = b, above | 1 << b
        yield from rec(k + 1)
        block_sees.pop()
        block[x] = -1

    yield from rec(0)


def quotient(P: Poset, block: list[int]) -> tuple[Poset, dict]:
    """Quotient poset (blocks named by their first world) and the map."""
    first: dict[int, int] = {}
    for i in range(len(P)):
        first.setdefault(block[i], i)
    name = {b: P.worlds[i] for b, i in first.items()}
    bs = sorted(first, key=first.get)
    pos = {b: k for k, b in enumerate(bs)}
    up = [0] * len(bs)
    for i in range(len(P)):
        for j in bits(P.up[i]):
            up[pos[block[i]]] |= 1 << pos[block[j]]
    Q = Poset._raw([name[b] for b in bs], up)
    return Q, {P.worlds[i]: name[block[i]] for i in range(len(P))}


def pmorphic_images(P: Poset, cap: int = DEFAULT_MORPHISM_CAP) -> list[Poset]:
    """All p-morphic images of P up to isomorphism, largest first."""
    _check_cap(P, cap)
    seen = set()
    out = []
    for block in _kernels(P):
        Q, _ = quotient(P, block)
        c = canonical_form(Q)
        if c not in seen:
            seen.add(c)
            out.append(Q)
    out.sort(key=lambda Q: (-len(Q), canonical_form(Q)))
    return out


# -- Jankov ---------------------------------------------------------------------

def jankov_refutes(P: Poset, Q: Poset, cap: int = DEFAULT_MORPHISM_CAP):
    """(True, (x, f)) when some upset generated by x maps onto Q, else (False, None)."""
    if not Q.is_rooted:
        raise PosetError("Jankov criterion needs a rooted Q")
    seen = set()
    for x in P.worlds:
        R = P.principal(x)
        if len(R) < len(Q):
            continue
        c = canonical_form(R)
        if c in seen:
            continue
        seen.add(c)
        _check_cap(R, cap)
        f = has_surjective_pmorphism(R, Q, cap)
        if f is not None:
            return True, (x, f)
    return False, None


def jankov_refutes_via_images(P: Poset, Q: Poset, cap: int = DEFAULT_MORPHISM_CAP) -> bool:
    """Q is isomorphic to a principal upset of some p-morphic image of P."""
    target = canonical_form(Q)
    for F in pmorphic_images(P, cap):
        for w in F.worlds:
            if canonical_form(F.principal(w)) == target:
                return True
    return False


# -- semantic checkers ------------------------------------------------------------

def is_kc_frame(P: Poset) -> bool:
    """Every principal upset has a single maximal point."""
    maxi = P.maximal()
    return all(popcount(m & maxi) == 1 for m in P.up)


def _bd_degree(f: Formula) -> int | None:
    n = len(free_vars(f)) - 1
    return n if n >= 1 and f == bd(n) else None


def semantic_checker(ax: Formula):
    """A (name, predicate) pair when the axiom has a dedicated frame test."""
    if ax in JANKOV_REGISTRY:
        Q = JANKOV_REGISTRY[ax]
        return "jankov", lambda P: not jankov_refutes(P, Q)[0]
    if ax == KC_AXIOM:
        return "kc", is_kc_frame
    if ax == BW2_AXIOM:
        return "width<=2", lambda P: P.width() <= 2
    n = _bd_degree(ax)
    if n is not None:
        return f"depth<={n}", lambda P: P.depth() <= n
    return None


def axiom_report(P: Poset, A: AxiomSet, cap: int = DEFAULT_VALIDITY_CAP) -> list[tuple[Formula, str, bool]]:
    out = []
    for ax in A.axioms:
        chk = semantic_checker(ax)
        if chk is None:
            out.append((ax, "valuations", frame_validates(P, ax, cap)[0]))
        else:
            out.append((ax, chk[0], chk[1](P)))
    return out


def validates_axiomset(P: Poset, A: AxiomSet, cap: int = DEFAULT_VALIDITY_CAP) -> bool:
    for ax in A.axioms:
        chk = semantic_checker(ax)
        ok = frame_validates(P, ax, cap)[0] if chk is None else chk[1](P)
        if not ok:
            return False
    return True

