"""Colored Kripke models, truth sets, frame validity and reduction."""
from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Sequence

from .formula import And, Bot, Formula, Imp, Or, Top, Var, conjuncts, free_vars
from .poset import Poset, Upset, bits, upset_masks

DEFAULT_VALIDITY_CAP = 10 ** 7


class ModelError(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


class Model:
    """A rooted poset with a monotone coloring.

    ``colors[i]`` is a bitmask over ``vars``: bit ``j`` is set iff ``vars[j]``
    holds at world ``i``.
    """

    __slots__ = ("frame", "vars", "colors", "_hash")

    def __init__(self, frame: Poset, vars: Sequence[str], colors):
        if not frame.is_rooted:
            raise ModelError("model frame must be rooted")
        self.frame = frame
        self.vars = tuple(vars)
        if isinstance(colors, Mapping):
            colors = [colors[w] for w in frame.worlds]
        cols = tuple(_as_mask(c, self.vars) for c in colors)
        if len(cols) != len(frame):
            raise ModelError("one color per world required")
        limit = 1 << len(self.vars)
        for i, c in enumerate(cols):
            if not 0 <= c < limit:
                raise ModelError(f"color of {frame.worlds[i]!r} uses unknown variables")
            for j in bits(frame.up[i]):
                if c & ~cols[j]:
                    raise ModelError(f"coloring not monotone: {frame.worlds[i]!r} <= {frame.worlds[j]!r}")
        self.colors = cols
        self._hash = None

    @property
    def root(self):
        return self.frame.root

    @property
    def worlds(self):
        return self.frame.worlds

    def __len__(self) -> int:
        return len(self.frame)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (self.frame, self.vars, self.colors) == (other.frame, other.vars, other.colors)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.frame, self.vars, self.colors))
        return self._hash

    def color(self, w) -> int:
        return self.colors[self.frame.idx(w)]

    def color_str(self, w) -> str:
        c = self.color(w)
        return "".join("1" if c >> j & 1 else "0" for j in range(len(self.vars)))

    def valuation(self) -> dict[str, int]:
        return {v: sum(1 << i for i, c in enumerate(self.colors) if c >> j & 1)
                for j, v in enumerate(self.vars)}

    def at(self, w) -> "Model":
        """The submodel generated by ``w``."""
        i = self.frame.idx(w)
        sub = self.frame.restrict(self.frame.up[i])
        return Model(sub, self.vars, [self.colors[j] for j in bits(self.frame.up[i])])

    def __repr__(self) -> str:
        cols = ", ".join(f"{w!r}:{self.color_str(w)}" for w in self.worlds)
        return f"Model(vars={list(self.vars)}, covers={self.frame.cover_pairs()}, colors={{{cols}}})"


def _as_mask(c, vars: tuple[str, ...]) -> int:
    if isinstance(c, bool):
        raise ModelError("colors must be bitmasks, bitstrings or variable sets")
    if isinstance(c, int):
        return c
    if isinstance(c, str):
        if len(c) != len(vars) or set(c) - {"0", "1"}:
            raise ModelError(f"bad color bitstring {c!r}")
        return sum(1 << j for j, ch in enumerate(c) if ch == "1")
    out = 0
    for name in c:
        if name not in vars:
            raise ModelError(f"unknown variable {name!r}")
        out |= 1 << vars.index(name)
    return out


def prefix_color(n: int, ones: int) -> int:
    """The color 1^ones 0^(n-ones): the first ``ones`` variables true."""
    if not 0 <= ones <= n:
        raise ModelError("bad color prefix")
    return (1 << ones) - 1


# -- evaluation -------------------------------------------------------------

def compile_formula(f: Formula):
    """Flatten into (ops, var_names); op k is (kind, a, b) over earlier slots."""
    slots: dict[Formula, int] = {}
    ops: list[tuple] = []
    names: dict[str, None] = {}

    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if g in slots:
            continue
        if isinstance(g, Var):
            names.setdefault(g.name)
            slots[g] = len(ops)
            ops.append(("var", g.name, None))
        elif isinstance(g, Bot):
            slots[g] = len(ops)
            ops.append(("bot", None, None))
        elif isinstance(g, Top):
            slots[g] = len(ops)
            ops.append(("top", None, None))
        elif done:
            kind = "and" if isinstance(g, And) else "or" if isinstance(g, Or) else "imp"
            slots[g] = len(ops)
            ops.append((kind, slots[g.left], slots[g.right]))
        else:
            stack.append((g, True))
            stack.append((g.right, False))
            stack.append((g.left, False))
    return ops, list(names)


def run_ops(P: Poset, ops, val: Mapping[str, int]) -> int:
    out = [0] * len(ops)
    full = P.full
    for k, (kind, a, b) in enumerate(ops):
        if kind == "var":
            out[k] = val[a]
        elif kind == "and":
            out[k] = out[a] & out[b]
        elif kind == "or":
            out[k] = out[a] | out[b]
        elif kind == "imp":
            out[k] = full & ~P.down_mask(out[a] & ~out[b])
        elif kind == "top":
            out[k] = full
    return out[-1]


def truth_mask(P: Poset, f: Formula, val: Mapping[str, int]) -> int:
    ops, _ = compile_formula(f)
    return run_ops(P, ops, val)


def eval_formula(M: Model, f: Formula) -> Upset:
    """The truth set of ``f`` in ``M``."""
    missing = set(free_vars(f)) - set(M.vars)
    if missing:
        raise ModelError(f"unbound variables {sorted(missing)}")
    return Upset(M.frame, truth_mask(M.frame, f, M.valuation()))


def satisfies(M: Model, f: Formula, w=None) -> bool:
    w = M.root if w is None else w
    return w in eval_formula(M, f)


# -- frame validity -----------------------------------------------------------

def _definitions(cs: list[Formula]):
    """Pairs (x, psi) with both x -> psi and psi -> x among the conjuncts."""
    present = set(cs)
    out = []
    for c in cs:
        if isinstance(c, Imp) and isinstance(c.left, Var) and Imp(c.right, c.left) in present:
            out.append((c.left.name, c.right))
    return out


def frame_validates(P: Poset, f: Formula, cap: int = DEFAULT_VALIDITY_CAP):
    """(True, None) if every valuation makes ``f`` true everywhere, otherwise
    (False, countervaluation) with the countervaluation as upsets of P."""
    if isinstance(f, Imp):
        defs = _definitions(conjuncts(f.left))
        if defs:
            return _validates_by_points(P, f, defs)
    names = free_vars(f)
    ups = upset_masks(P, cap)
    if len(ups) ** len(names) > cap:
        raise CapExceeded(f"{len(ups)}^{len(names)} valuations exceed cap {cap}")
    ops, _ = compile_formula(f)
    full = P.full
    for combo in product(ups, repeat=len(names)):
        val = dict(zip(names, combo))
        if run_ops(P, ops, val) != full:
            return False, {v: Upset(P, m) for v, m in val.items()}
    return True, None


def _validates_by_points(P: Poset, f: Imp, defs):
    """Search a world y and a valuation on the upset of y making every
    conjunct of the antecedent true at y and the consequent false at y.

    A biconditional conjunct x <-> psi true at y pins the value of x on the
    upset of y to the truth set of psi, which drives propagation.
    """
    cs = conjuncts(f.left)
    compiled = [compile_formula(c) for c in cs]
    cons_ops, cons_vars = compile_formula(f.right)
    all_vars = list(dict.fromkeys([v for _, vs in compiled for v in vs] + cons_vars))
    dcomp = [(x, compile_formula(psi)) for x, psi in defs]

    done_shapes = set()
    from .canon import canonical_form
    for y in P.worlds:
        R = P.principal(y)
        shape = canonical_form(R)
        if shape in done_shapes:
            continue
        done_shapes.add(shape)
        ups = upset_masks(R)
        hit = _search_point(R, ups, all_vars, compiled, dcomp, cons_ops, cons_vars)
        if hit is not None:
            back = {}
            for v, m in hit.items():
                back[v] = Upset(P, P.mask_of(R.worlds_of(m)))
            return False, back
    return True, None


def _search_point(R: Poset, ups, all_vars, compiled, dcomp, cons_ops, cons_vars):
    full = R.full

    def consistent(val, checked) -> frozenset | None:
        # conjuncts already true stay true: values only grow along a branch
        done = set(checked)
        for i, (ops, vs) in enumerate(compiled):
            if i not in done and all(v in val for v in vs):
                if run_ops(R, ops, val) != full:
                    return None
                done.add(i)
        return frozenset(done)

    def propagate(val):
        val = dict(val)
        changed = True
        while changed:
            changed = False
            for x, (ops, vs) in dcomp:
                if x not in val and all(v in val for v in vs):
                    val[x] = run_ops(R, ops, val)
                    changed = True
        return val

    def rec(val, checked):
        val = propagate(val)
        checked = consistent(val, checked)
        if checked is None:
            return None
        if all(v in val for v in cons_vars) and run_ops(R, cons_ops, val) == full:
            return None
        free = [v for v in all_vars if v not in val]
        if not free:
            return val
        best = max(free, key=lambda v: sum(1 for x, (_, vs) in dcomp
                                           if x not in val and v in vs
                                           and all(u in val or u == v for u in vs)))
        for m in ups:
            val[best] = m
            got = rec(val, checked)
            if got is not None:
                return got
            del val[best]
        return None

    return rec({}, frozenset())


# -- bisimulation quotient ------------------------------------------------------

def bisim_classes(P: Poset, colors: Sequence[int]) -> list[int]:
    """Class id per world for the greatest auto-bisimulation."""
    cls = list(colors)
    n = len(P)
    while True:
        sig = [(cls[i], frozenset(cls[j] for j in bits(P.up[i]))) for i in range(n)]
        ids: dict = {}
        new = [ids.setdefault(s, len(ids)) for s in sig]
        if len(ids) == len(set(cls)):
            return new
        cls = new


def is_reduced(M: Model) -> bool:
    return len(set(bisim_classes(M.frame, M.colors))) == len(M)


def _name_key(w):
    return (0, w, "") if isinstance(w, int) else (1, 0, str(w))


def reduce_with_map(M: Model) -> tuple[Model, dict]:
    """Quotient by the greatest auto-bisimulation; each class is named by
    its least member (integers before strings, then lexicographic)."""
    P = M.frame
    cls = bisim_classes(P, M.colors)
    rep: dict[int, int] = {}
    for i, c in enumerate(cls):
        if c not in rep or _name_key(P.worlds[i]) < _name_key(P.worlds[rep[c]]):
            rep[c] = i
    reps = sorted(rep.values())
    worlds = [P.worlds[i] for i in reps]
    pairs = []
    for i in range(len(P)):
        for j in bits(P.up[i]):
            pairs.append((P.worlds[rep[cls[i]]], P.worlds[rep[cls[j]]]))
    Q = Poset.from_relation(worlds, set(pairs))
    colors = {P.worlds[i]: M.colors[i] for i in reps}
    mapping = {P.worlds[i]: P.worlds[rep[cls[i]]] for i in range(len(P))}
    return Model(Q, M.vars, colors), mapping


def reduce(M: Model) -> Model:
    return reduce_with_map(M)[0]


def alpha_beta_reduced(M: Model) -> bool:
    """No world with a single immediate successor of its own color, and no
    two worlds of equal color with equal strict upsets."""
    P = M.frame
    seen = {}
    for i in range(len(P)):
        c = P.covers[i]
        if c and c & (c - 1) == 0 and M.colors[c.bit_length() - 1] == M.colors[i]:
            return False
        key = (P.up[i] & ~(1 << i), M.colors[i])
        if key in seen:
            return False
        seen[key] = i
    return True


def valuations(P: Poset, names: Iterable[str]):
    names = list(names)
    ups = upset_masks(P)
    for combo in product(ups, repeat=len(names)):
        yield dict(zip(names, combo))
