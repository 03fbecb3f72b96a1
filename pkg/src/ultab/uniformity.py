"""Model classes over frame classes, n-uniformity certification and the
degree of uniformity.

Colorings are searched in one of two modes. In concrete mode colors are
bitmasks over ``v`` variables. In abstract mode (the default) a coloring is
a partition of the points into color classes whose induced order is
acyclic; every such pattern on a pair of frames with m points in total is
realizable with m variables, so abstract mode covers every variable count
at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterator, Sequence

from .bisim import FULL, level_matrix
from .canon import canonical_form
from .morphism import DEFAULT_MORPHISM_CAP, pmorphic_images
from .poset import Poset, PosetError, bits, popcount
from .semantics import Model, bisim_classes

DEFAULT_MODEL_CAP = 10 ** 6


class SearchCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class FrameClass:
    generators: tuple[Poset, ...]
    closure: tuple[Poset, ...]

    def __len__(self) -> int:
        return len(self.closure)

    @property
    def max_size(self) -> int:
        return max((len(F) for F in self.closure), default=0)


def frame_closure(K: Sequence[Poset], cap: int = DEFAULT_MORPHISM_CAP) -> FrameClass:
    """All rooted p-morphic images of principal upsets of members of K, up to
    isomorphism, smallest first."""
    seen: dict = {}
    done = set()
    for G in K:
        for w in G.worlds:
            R = G.principal(w)
            c = canonical_form(R)
            if c in done:
                continue
            done.add(c)
            for F in pmorphic_images(R, cap):
                cf = canonical_form(F)
                if cf not in seen:
                    seen[cf] = F.standardize()
    frames = sorted(seen.items(), key=lambda kv: (len(kv[1]), kv[0]))
    return FrameClass(tuple(K), tuple(F for _, F in frames))


def frame_class_of(frames: Sequence[Poset], cap: int = DEFAULT_MORPHISM_CAP) -> FrameClass:
    return frame_closure(list(frames), cap)


# -- coloring enumeration ---------------------------------------------------------

def _strict_up(P: Poset) -> list[int]:
    return [P.up[i] & ~(1 << i) for i in range(len(P))]


def _class_candidates(cov, col, reach, ncls, limit):
    """Class ids for a point whose immediate successors are ``cov``, keeping
    the class order acyclic; ``reach[k]`` is the mask of classes >= k."""
    above = 0
    for c in cov:
        above |= 1 << col[c]
    for k in range(limit):
        if k < ncls:
            # no class above the point may already sit at or below k
            if any(reach[j] >> k & 1 for j in bits(above & ~(1 << k))):
                continue
            new_reach = list(reach)
        else:
            new_reach = reach + [1 << k]
        add = above
        for j in bits(above):
            add |= new_reach[j]
        if add & ~new_reach[k]:
            grow = new_reach[k] | add
            for i in range(len(new_reach)):
                if new_reach[i] >> k & 1:
                    new_reach[i] |= grow
        yield k, new_reach, max(ncls, k + 1)


def _colorings(P: Poset, v: int | None) -> Iterator[tuple[list[int], list[int], int]]:
    """Colorings of P with no alpha or beta redundancy, top-down.

    Yields (colors, reach, nclasses); in abstract mode (v is None) ``reach``
    lists, per class, the mask of classes above or equal to it.
    """
    n = len(P)
    order = P.topdown_order()
    covers = [list(bits(c)) for c in P.covers]
    strict = _strict_up(P)
    col = [-1] * n
    seen: dict = {}
    full_colors = (1 << v) - 1 if v is not None else 0

    def candidates(x, reach, ncls):
        cov = covers[x]
        if v is not None:
            meet = full_colors
            for c in cov:
                meet &= col[c]
            sub = meet
            while True:
                yield sub, reach, ncls
                if sub == 0:
                    return
                sub = (sub - 1) & meet
        yield from _class_candidates(cov, col, reach, ncls, ncls + 1)

    def rec(t, reach, ncls):
        if t == n:
            yield list(col), reach, ncls
            return
        x = order[t]
        cov = covers[x]
        for k, new_reach, new_ncls in candidates(x, reach, ncls):
            if len(cov) == 1 and col[cov[0]] == k:
                continue
            key = (strict[x], k)
            if key in seen:
                continue
            col[x] = k
            seen[key] = x
            yield from rec(t + 1, new_reach, new_ncls)
            del seen[key]
        col[x] = -1

    yield from rec(0, [], 0)


def _is_reduced(P: Poset, colors: Sequence[int]) -> bool:
    return len(set(bisim_classes(P, colors))) == len(P)


def _concretize(P: Poset, colors, Q: Poset | None = None, colors_q=None, reach=None, ncls=None):
    """Turn abstract classes into variable colorings (class c becomes the set
    of classes at or below it)."""
    down = [0] * ncls
    for k in range(ncls):
        for j in range(ncls):
            if reach[j] >> k & 1:
                down[k] |= 1 << j
    vars = tuple(f"c{k}" for k in range(ncls))
    M = Model(P, vars, [down[c] for c in colors])
    if Q is None:
        return M
    return M, Model(Q, vars, [down[c] for c in colors_q])


# -- model classes ----------------------------------------------------------------

@dataclass(frozen=True)
class ModelClass:
    frame_class: FrameClass
    var_count: int
    models: tuple[Model, ...]

    def __len__(self) -> int:
        return len(self.models)


def enumerate_models(FC: FrameClass, v: int, cap: int = DEFAULT_MODEL_CAP) -> ModelClass:
    """All reduced models over the closure frames with ``v`` variables, up to
    colored isomorphism."""
    vars = tuple(f"p{i}" for i in range(1, v + 1)) if v != 1 else ("p",)
    out = []
    for F in FC.closure:
        seen = set()
        for colors, _, _ in _colorings(F, v):
            if not _is_reduced(F, colors):
                continue
            c = canonical_form(F, colors)
            if c in seen:
                continue
            seen.add(c)
            out.append(Model(F, vars, colors))
            if len(out) > cap:
                raise SearchCapExceeded(f"more than {cap} models")
    return ModelClass(FC, v, tuple(out))


# -- pair search --------------------------------------------------------------------

@dataclass(frozen=True)
class UniformityReport:
    n: int
    certified: bool
    witness: tuple[Model, Model] | None
    witness_level: int | None
    frames: int
    pairs: int
    max_frame_size: int
    v_max: int | None
    searched: dict = field(default_factory=dict, compare=False)

    @property
    def verdict(self) -> str:
        return f"certified({self.n})" if self.certified else f"refuted({self.n})"

    @property
    def envelope(self) -> str:
        vs = "any variable count" if self.v_max is None else f"at most {self.v_max} variables"
        return (f"{self.frames} closure frames of at most {self.max_frame_size} points, "
                f"{self.pairs} frame pairs, {vs}")


def _pair_witness(P: Poset, Q: Poset, n: int, v: int | None):
    """Colorings of P and Q making both models reduced with roots
    n-bisimilar but not bisimilar, or None."""
    rp, rq = P.root_index, Q.root_index
    Qorder = Q.topdown_order()
    Qcovers = [list(bits(c)) for c in Q.covers]
    Qstrict = _strict_up(Q)
    Pup = P.up
    nq = len(Q)
    for cm, reach, ncls in _colorings(P, v):
        if not _is_reduced(P, cm):
            continue
        if v is None:
            allowed = None if n == 0 else (1 << ncls) - 1
        else:
            allowed = None if n == 0 else set(cm)
        found = _search_partner(P, cm, Q, Qorder, Qcovers, Qstrict, Pup, nq, n, v,
                                allowed, reach, ncls, rp, rq)
        if found is not None:
            cn, reach2, ncls2 = found
            return cm, cn, reach2, ncls2
    return None


def _search_partner(P, cm, Q, Qorder, Qcovers, Qstrict, Pup, nq, n, v, allowed, reach, ncls, rp, rq):
    """Top-down coloring of Q with level bookkeeping against the fixed
    coloring ``cm`` of P."""
    npts = len(P)
    by_color: dict[int, int] = {}
    for a in range(npts):
        by_color[cm[a]] = by_color.get(cm[a], 0) | 1 << a
    col = [-1] * nq
    # ge[b][t] = mask of points a of P with lev(a, b) >= t, for t = 0..n
    ge: list = [None] * nq
    seen: dict = {}
    full_colors = (1 << v) - 1 if v is not None else 0

    def row_levels(b: int, color: int) -> list[int]:
        masks = [by_color.get(color, 0)]
        cov_above = list(bits(Qstrict[b]))
        for t in range(1, n + 1):
            prev = masks[-1]
            if not prev:
                masks.append(0)
                continue
            union = prev
            for y in cov_above:
                union |= ge[y][t - 1]
            cur = 0
            for a in bits(prev):
                ua = Pup[a]
                if ua & ~union:
                    continue
                if all(ge[y][t - 1] & ua for y in cov_above):
                    cur |= 1 << a
            masks.append(cur)
        return masks

    def candidates(x, reach, ncls):
        cov = Qcovers[x]
        if v is not None:
            meet = full_colors
            for c in cov:
                meet &= col[c]
            sub = meet
            while True:
                if allowed is None or sub in allowed:
                    yield sub, reach, ncls
                if sub == 0:
                    return
                sub = (sub - 1) & meet
        yield from _class_candidates(cov, col, reach, ncls, ncls if n > 0 else ncls + 1)

    def rec(t, reach, ncls):
        if t == nq:
            if not ge[rq][n] >> rp & 1:
                return None
            if not _is_reduced(Q, col):
                return None
            lev = level_matrix(P, cm, Q, col)
            if lev[rp][rq] == FULL:
                return None
            return list(col), reach, ncls
        x = Qorder[t]
        cov = Qcovers[x]
        for k, new_reach, new_ncls in candidates(x, reach, ncls):
            if len(cov) == 1 and col[cov[0]] == k:
                continue
            key = (Qstrict[x], k)
            if key in seen:
                continue
            masks = row_levels(x, k)
            if n > 0 and not masks[n - 1]:
                continue
            if x == rq and not masks[n] >> rp & 1:
                continue
            col[x], ge[x] = k, masks
            seen[key] = x
            got = rec(t + 1, new_reach, new_ncls)
            del seen[key]
            if got is not None:
                return got
        col[x], ge[x] = -1, None
        return None

    return rec(0, list(reach), ncls)


def _pairs(frames: Sequence[Poset]):
    """Unordered pairs, the smaller frame first (its colorings are enumerated
    in full, the partner's are constrained)."""
    for F, G in combinations_with_replacement(frames, 2):
        yield (F, G) if len(F) <= len(G) else (G, F)


def certify_n_uniform(FC: FrameClass, n: int, v_max: int | None = None) -> UniformityReport:
    """Search for reduced models over FC whose roots are n-bisimilar but not
    bisimilar. Certified when none exists among the closure frames; the
    claim is bounded by the frames searched."""
    frames = FC.closure
    count = 0
    for P, Q in _pairs(frames):
        count += 1
        got = _pair_witness(P, Q, n, v_max)
        if got is None:
            continue
        cm, cn, reach, ncls = got
        if v_max is None:
            M, N = _concretize(P, cm, Q, cn, reach, ncls)
        else:
            vars = tuple(f"p{i}" for i in range(1, v_max + 1)) if v_max != 1 else ("p",)
            M, N = Model(P, vars, cm), Model(Q, vars, cn)
        lev = level_matrix(P, M.colors, Q, N.colors)[P.root_index][Q.root_index]
        return UniformityReport(n, False, (M, N), int(lev), len(frames), count,
                                FC.max_size, v_max)
    return UniformityReport(n, True, None, None, len(frames), count, FC.max_size, v_max)


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    certificate: UniformityReport
    refutation: UniformityReport | None


def degree_of_frame_class(FC: FrameClass, v_max: int | None = None, n_max: int = 12) -> DegreeReport:
    """Least n such that n-bisimilar reduced models over FC are bisimilar.

    A refutation at n with a witness of level L rules out every n <= L, so
    the search jumps to L + 1.
    """
    n = 0
    refutation = None
    while n <= n_max:
        rep = certify_n_uniform(FC, n, v_max)
        if rep.certified:
            return DegreeReport(n, rep, refutation)
        refutation = rep
        n = rep.witness_level + 1
    raise SearchCapExceeded(f"no certificate up to n = {n_max}")


def degree_of_uniformity(P: Poset, v_max: int | None = None, cap: int = DEFAULT_MORPHISM_CAP,
                         n_max: int = 12) -> DegreeReport:
    """Degree of the logic of P (for a non-rooted P, of its rooted upsets)."""
    return degree_of_frame_class(frame_closure([P], cap), v_max, n_max)


def stack_bound_uniformity_check(k: int, width_cap: int = 2, size_cap: int = 7,
                                 v_max: int | None = None, n: int | None = None) -> UniformityReport:
    """Certify (k+1)-uniformity over Boolean sums with a unique top, width at
    most ``width_cap`` and stack depth at most k, up to ``size_cap`` points."""
    from .families import boolean_sums

    gens = boolean_sums(size_cap, max_width=width_cap, max_stack=k, unique_top=True)
    return certify_n_uniform(frame_closure(gens), k + 1 if n is None else n, v_max)
