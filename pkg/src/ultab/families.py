"""Constructors for the named posets and models, Boolean sums and poset enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .canon import canonical_form
from .poset import Poset, PosetError, bits, count_upsets, linear_sum, popcount, upset_masks
from .semantics import Model, ModelError, prefix_color


class FamilyError(ValueError):
    pass


def _covers(worlds, covers, root=None) -> Poset:
    return Poset.from_covers(worlds, covers, root)


def point() -> Poset:
    return Poset.chain(1)


def fork(n: int = 2) -> Poset:
    """A root with ``n`` maximal points above it."""
    return _covers(["r"] + [f"t{i}" for i in range(1, n + 1)],
                   [("r", f"t{i}") for i in range(1, n + 1)])


def with_top(P: Poset, name="top") -> Poset:
    if name in P:
        raise FamilyError(f"world {name!r} already present")
    return linear_sum(_covers([name], []), P)


# -- Rieger-Nishimura ladder ----------------------------------------------------
#
# Worlds "1", "0", "P1", "P2", ...; with P0 = "0" and P(-1) = "1" every Pj
# (j >= 2) covers P(j-2) and P(j-3), and P1 covers "1" alone.

def _rn_name(j: int) -> str:
    return {-1: "1", 0: "0"}.get(j, f"P{j}")


def rn_ladder(m: int) -> Poset:
    """The points 1, 0, P1..Pm of the ladder (not rooted)."""
    if m < 1:
        raise FamilyError("ladder needs m >= 1")
    worlds = ["1", "0"] + [f"P{j}" for j in range(1, m + 1)]
    covers = [("P1", "1")]
    for j in range(2, m + 1):
        covers += [(f"P{j}", _rn_name(j - 2)), (f"P{j}", _rn_name(j - 3))]
    return _covers(worlds, covers)


def rn_prefix(i: int) -> Poset:
    """The upset of the ladder generated by Pi."""
    if i < 1:
        raise FamilyError("rn_prefix needs i >= 1")
    return rn_ladder(i).principal(f"P{i}")


def rn_canonical_model(i: int) -> Model:
    P = rn_prefix(i)
    return Model(P, ("p",), {w: int(w == "1") for w in P.worlds})


def p_star(n: int) -> Poset:
    """The upset generated by P(2n) and P(2n-1)."""
    if n < 1:
        raise FamilyError("p_star needs n >= 1")
    L = rn_ladder(2 * n)
    return L.restrict(L.up_mask(L.mask_of([f"P{2 * n}", f"P{2 * n - 1}"])))


def p_prime(i: int) -> Poset:
    return with_top(rn_prefix(i))


# -- combs ------------------------------------------------------------------

def comb(n: int, teeth=None) -> Poset:
    """Spine x1 < ... < xn with tooth yi above xi (x_i <= y_j iff i <= j).

    ``teeth`` selects which teeth to keep; all of them by default.
    """
    if n < 1:
        raise FamilyError("comb needs n >= 1")
    teeth = range(1, n + 1) if teeth is None else sorted(teeth)
    worlds = [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in teeth]
    covers = [(f"x{i}", f"x{i + 1}") for i in range(1, n)] + [(f"x{i}", f"y{i}") for i in teeth]
    return _covers(worlds, covers)


def broken_combs(n: int) -> list[Poset]:
    """All 2^n broken n-combs, one per subset of teeth (not deduplicated)."""
    out = []
    for s in range(1 << n):
        out.append(comb(n, [i + 1 for i in range(n) if s >> i & 1]))
    return out


def is_broken_comb(P: Poset) -> bool:
    """Non-maximal points form a chain c1 < ... < cm and every maximal point
    sits over a prefix of it: at most one per proper prefix, one or two over
    the whole chain."""
    if not P.is_rooted:
        return False
    maxi = P.maximal()
    inner = P.full & ~maxi
    chain = sorted(bits(inner), key=lambda i: -popcount(P.up[i]))
    for a, b in zip(chain, chain[1:]):
        if not P.up[a] >> b & 1:
            return False
    if not chain:
        return len(P) == 1
    prefixes = [0]
    for c in chain:
        prefixes.append(prefixes[-1] | 1 << c)
    count = [0] * (len(chain) + 1)
    for y in bits(maxi):
        below = P.down[y] & ~(1 << y)
        if below not in prefixes[1:]:
            return False
        count[prefixes.index(below)] += 1
    m = len(chain)
    return all(c <= 1 for c in count[1:m]) and 1 <= count[m] <= 2


# -- Boolean sums -----------------------------------------------------------

@dataclass(frozen=True)
class StackProfile:
    level_sizes: tuple[int, ...]  # index 0 is depth 1 (the maximal points)
    stack_depth: int


def levels(P: Poset) -> list[int]:
    """Mask of the points of each depth, depth 1 first."""
    d = P.depths()
    out = [0] * (max(d, default=0))
    for i, k in enumerate(d):
        out[k - 1] |= 1 << i
    return out


def stack_profile(P: Poset) -> StackProfile:
    sizes = tuple(popcount(m) for m in levels(P))
    best = run = 0
    for c in sizes:
        run = run + 1 if c >= 2 else 0
        best = max(best, run)
    return StackProfile(sizes, best)


def stack_depth(P: Poset) -> int:
    return stack_profile(P).stack_depth


def is_boolean_sum(P: Poset) -> bool:
    """Rooted, and the immediate successors of each point of depth k+1 are
    exactly the points of depth k."""
    if not P.is_rooted:
        return False
    lv = levels(P)
    d = P.depths()
    return all(P.covers[i] == (lv[d[i] - 2] if d[i] > 1 else 0) for i in range(len(P)))


def boolean_sum(level_sizes) -> Poset:
    """The Boolean sum with the given level sizes (depth 1 first, last must be 1)."""
    sizes = list(level_sizes)
    if not sizes or sizes[-1] != 1 or min(sizes) < 1:
        raise FamilyError("level sizes must be positive and end with a single root")
    worlds = [f"d{k + 1}.{j}" for k, c in enumerate(sizes) for j in range(c)]
    covers = []
    for k in range(1, len(sizes)):
        for a in range(sizes[k]):
            for b in range(sizes[k - 1]):
                covers.append((f"d{k + 1}.{a}", f"d{k}.{b}"))
    return _covers(worlds, covers)


def boolean_sums(max_size: int, max_width: int | None = None,
                 max_stack: int | None = None, unique_top: bool = False) -> list[Poset]:
    """All Boolean sums up to ``max_size`` points (one per level profile)."""
    out = []

    def rec(prefix: list[int], used: int) -> None:
        if prefix:
            P = boolean_sum(prefix + [1])
            if max_stack is None or stack_depth(P) <= max_stack:
                if not unique_top or prefix[0] == 1:
                    out.append(P)
        for c in range(1, max_size - used + 1):
            if max_width is not None and c > max_width:
                break
            rec(prefix + [c], used + c)

    out.append(point())
    rec([], 1)
    return out


# -- the small named posets -----------------------------------------------------

_Q_COVERS = {
    1: ["r a", "a b", "r c"],
    2: ["r a", "r b", "a A", "a B", "b B"],
    3: ["r a", "a t", "r b", "b c", "c t"],
    4: ["r a", "r b", "a A", "a B", "b A", "b B"],
    5: ["r a", "r b", "a A", "a B", "b A", "b B", "A t", "B t"],
    6: ["r a", "r b", "a t", "b t"],
    7: ["r a", "a A", "r b", "b B"],
    8: ["r a", "r b", "r c"],
}


def q_poset(i: int) -> Poset:
    if i not in _Q_COVERS:
        raise FamilyError("q_poset index must be in 1..8")
    pairs = [tuple(e.split()) for e in _Q_COVERS[i]]
    worlds = list(dict.fromkeys(w for e in pairs for w in e))
    return _covers(worlds, pairs)


def _model(covers: list[str], colors: dict[str, str], vars) -> Model:
    pairs = [tuple(e.split()) for e in covers]
    P = _covers(list(colors), pairs)
    return Model(P, vars, colors)


def figure2_pair() -> tuple[Model, Model]:
    chain = _model(["r t"], {"r": "0", "t": "1"}, ("p",))
    fork_ = _model(["r t1", "r t0"], {"r": "0", "t1": "1", "t0": "0"}, ("p",))
    return chain, fork_


def figure4_pairs() -> list[tuple[Model, Model]]:
    """Five pairs of models that are 2-bisimilar but not bisimilar; the left
    frame of pair i is Q_i."""
    one, two, three = ("p",), ("p", "q"), ("p", "q", "s")
    fork_ = (["r t1", "r t0"], {"r": "0", "t1": "1", "t0": "0"})
    pairs = [
        (_model(["r a", "a b", "r c"], {"r": "0", "a": "0", "b": "1", "c": "0"}, one),
         _model(*fork_, one)),
        (_model(["r a", "r b", "a A", "a B", "b B"],
                {"r": "0", "a": "0", "b": "0", "A": "0", "B": "1"}, one),
         _model(*fork_, one)),
        (_model(["r a", "a t", "r b", "b c", "c t"],
                {"r": "00", "a": "00", "b": "00", "c": "10", "t": "11"}, two),
         _model(["r l", "r m", "l t", "m t"], {"r": "00", "l": "00", "m": "10", "t": "11"}, two)),
        (_model(["r a", "r b", "a A", "a B", "b A", "b B"],
                {"r": "00", "a": "10", "b": "00", "A": "11", "B": "10"}, two),
         _model(["r m", "m A", "m B"], {"r": "00", "m": "10", "A": "11", "B": "10"}, two)),
        (_model(["r a", "r b", "a A", "a B", "b A", "b B", "A t", "B t"],
                {"r": "000", "a": "100", "b": "000", "A": "110", "B": "100", "t": "111"}, three),
         _model(["r m", "m A", "m B", "A t", "B t"],
                {"r": "000", "m": "100", "A": "110", "B": "100", "t": "111"}, three)),
    ]
    return pairs


# -- layered models -------------------------------------------------------------

def _layered(n: int, k: int, root_ones: int) -> Model:
    vars = tuple(f"p{i}" for i in range(1, n + 1))
    worlds, covers, colors = [], [], {}
    for j in range(k + 1):
        worlds += [f"l{j}", f"r{j}"]
        colors[f"l{j}"] = prefix_color(n, n - j)
        colors[f"r{j}"] = prefix_color(n, n - j - 1)
        if j:
            covers += [(a, b) for a in (f"l{j}", f"r{j}") for b in (f"l{j - 1}", f"r{j - 1}")]
    worlds.append("root")
    colors["root"] = prefix_color(n, root_ones)
    covers += [("root", f"l{k}"), ("root", f"r{k}")]
    return Model(_covers(worlds, covers), vars, colors)


def m_model(n: int, k: int) -> Model:
    """k+1 two-point layers with the root colored 1^(n-k-1) 0^(k+1)."""
    if n <= 2 or k < 0 or k + 1 >= n:
        raise FamilyError("m_model needs n > 2 and 0 <= k < n - 1")
    return _layered(n, k, n - k - 1)


def n_model(n: int, k: int) -> Model:
    """Same layers as m_model with the root colored 1^(n-k-2) 0^(k+2)."""
    if n <= 2 or k < 0 or k + 2 > n:
        raise FamilyError("n_model needs n > 2 and 0 <= k <= n - 2")
    return _layered(n, k, n - k - 2)


def s_frame(n: int) -> Poset:
    if n < 3:
        raise FamilyError("s_frame needs n >= 3")
    return with_top(n_model(n, n - 2).frame)


# -- enumeration ----------------------------------------------------------------

def _extend_by_maximal(P: Poset) -> Iterator[Poset]:
    """Add one new maximal point over each downset of P."""
    n = len(P)
    for u in upset_masks(P):
        below = P.full & ~u
        up = [m | (1 << n if below >> i & 1 else 0) for i, m in enumerate(P.up)]
        up.append(1 << n)
        yield Poset._raw(range(n + 1), up)


def posets_of_size(n: int) -> list[Poset]:
    """All posets with n points up to isomorphism."""
    level = [Poset.chain(0)]
    for _ in range(n):
        seen, nxt = set(), []
        for P in level:
            for Q in _extend_by_maximal(P):
                c = canonical_form(Q)
                if c not in seen:
                    seen.add(c)
                    nxt.append(Q)
        level = nxt
    return level


def rooted_posets(max_size: int, min_size: int = 1) -> list[Poset]:
    """All rooted posets with min_size..max_size points up to isomorphism."""
    out = []
    for n in range(max(min_size, 1), max_size + 1):
        for P in posets_of_size(n - 1):
            out.append(linear_sum(P, point()).standardize())
    return out


def rooted_posets_by_upsets(max_upsets: int) -> list[Poset]:
    """All rooted posets P with |Up(P)| <= max_upsets up to isomorphism.

    Up(P) has one more element than Up(P minus its root), and adding a
    maximal point always adds upsets, so growth can be pruned by count.
    """
    out = []
    level = [Poset.chain(0)]
    while level:
        for P in level:
            if count_upsets(P) + 1 <= max_upsets:
                out.append(linear_sum(P, point()).standardize())
        seen, nxt = set(), []
        for P in level:
            for Q in _extend_by_maximal(P):
                if count_upsets(Q) + 1 > max_upsets:
                    continue
                c = canonical_form(Q)
                if c not in seen:
                    seen.add(c)
                    nxt.append(Q)
        level = nxt
    return out


def iter_rooted_posets_by_upsets(max_upsets: int):
    """Yield (|Up(P)|, P) for rooted P with |Up(P)| <= max_upsets, by increasing count.

    Removing a maximal point strictly lowers the upset count, so every
    poset of count c is generated before bucket c is read.
    """
    buckets: dict[int, list[Poset]] = {1: [Poset.chain(0)]}
    seen: dict[int, set] = {}
    for c in range(1, max_upsets):
        for P in buckets.pop(c, []):
            yield c + 1, linear_sum(P, point()).standardize()
            for Q in _extend_by_maximal(P):
                u = count_upsets(Q)
                if u + 1 > max_upsets:
                    continue
                key = canonical_form(Q)
                if key not in seen.setdefault(u, set()):
                    seen[u].add(key)
                    buckets.setdefault(u, []).append(Q)
        seen.pop(c, None)


FAMILIES = ("point", "chain", "fork", "rn", "p-star", "p-prime", "comb", "q", "m", "n",
            "s", "boolean-sum")
