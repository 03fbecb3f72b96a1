"""Propositional formulas over ∧, ∨, →, ⊥, ⊤.

Grammar (loosest first)::

    iff   := imp ('<->' iff)?
    imp   := or ('->' imp)?
    or    := and ('|' and)*
    and   := unary ('&' unary)*
    unary := '~' unary | atom
    atom  := NAME | 'bot' | 'top' | '(' iff ')'

``~a`` is read as ``a -> bot`` and ``a <-> b`` as ``(a -> b) & (b -> a)``.
The Unicode connectives ¬ ∧ ∨ → ↔ ⊥ ⊤ are accepted as well.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence


class Formula:
    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Imp(self, other)

    def __invert__(self) -> "Formula":
        return Imp(self, BOT)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    left: Formula
    right: Formula


BOT = Bot()
TOP = Top()


def neg(a: Formula) -> Formula:
    return Imp(a, BOT)


def iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def conj(parts: Sequence[Formula]) -> Formula:
    return reduce(And, parts) if parts else TOP


def disj(parts: Sequence[Formula]) -> Formula:
    return reduce(Or, parts) if parts else BOT


# -- parsing ----------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(<->|↔)|(->|→)|([&∧])|([|∨])|([~¬])|(\()|(\))|(⊥)|(⊤)|([A-Za-z_][A-Za-z0-9_']*))")
_KINDS = ("IFF", "IMP", "AND", "OR", "NOT", "LP", "RP", "BOT", "TOP", "NAME")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = _KINDS[m.lastindex - 1]
        val = m.group(m.lastindex)
        start = m.start(m.lastindex)
        if kind == "NAME" and val in ("bot", "top"):
            kind = val.upper()
        out.append((kind, val, start))
        pos = m.end()
    out.append(("EOF", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self) -> str:
        return self.toks[self.k][0]

    def take(self, kind: str):
        tok = self.toks[self.k]
        if tok[0] != kind:
            what = tok[1] or "end of input"
            raise FormulaSyntaxError(f"expected {kind}, found {what!r}", tok[2])
        self.k += 1
        return tok

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek() == "IFF":
            self.k += 1
            return iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "IMP":
            self.k += 1
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek() == "OR":
            self.k += 1
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() == "AND":
            self.k += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.peek() == "NOT":
            self.k += 1
            return neg(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.toks[self.k]
        if kind == "NAME":
            self.k += 1
            return Var(val)
        if kind == "BOT":
            self.k += 1
            return BOT
        if kind == "TOP":
            self.k += 1
            return TOP
        if kind == "LP":
            self.k += 1
            f = self.iff()
            self.take("RP")
            return f
        raise FormulaSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.iff()
    p.take("EOF")
    return f


# -- printing ---------------------------------------------------------------

_PREC = {Imp: 1, Or: 2, And: 3}


def _prec(f: Formula) -> int:
    if isinstance(f, Imp) and f.right == BOT:
        return 4
    return _PREC.get(type(f), 5)


def to_text(f: Formula, unicode: bool = False) -> str:
    sym = {"imp": " → ", "or": " ∨ ", "and": " ∧ ", "not": "¬", "bot": "⊥", "top": "⊤"} if unicode \
        else {"imp": " -> ", "or": " | ", "and": " & ", "not": "~", "bot": "bot", "top": "top"}

    def wrap(g: Formula, ok: bool) -> str:
        s = go(g)
        return s if ok else f"({s})"

    def go(g: Formula) -> str:
        if isinstance(g, Var):
            return g.name
        if isinstance(g, Bot):
            return sym["bot"]
        if isinstance(g, Top):
            return sym["top"]
        p = _prec(g)
        if p == 4:
            return sym["not"] + wrap(g.left, _prec(g.left) >= 4)
        if isinstance(g, Imp):
            return wrap(g.left, _prec(g.left) > 1) + sym["imp"] + wrap(g.right, _prec(g.right) >= 1)
        op = sym["and"] if isinstance(g, And) else sym["or"]
        return wrap(g.left, _prec(g.left) >= p) + op + wrap(g.right, _prec(g.right) > p)

    return go(f)


# -- structure --------------------------------------------------------------

def impl_depth(f: Formula) -> int:
    if isinstance(f, (Var, Bot, Top)):
        return 0
    d = max(impl_depth(f.left), impl_depth(f.right))
    return d + 1 if isinstance(f, Imp) else d


def size(f: Formula) -> int:
    if isinstance(f, (Var, Bot, Top)):
        return 1
    return 1 + size(f.left) + size(f.right)


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (And, Or, Imp)):
            stack.append(g.right)
            stack.append(g.left)


def free_vars(f: Formula) -> list[str]:
    """Variable names in order of first occurrence."""
    out: dict[str, None] = {}
    for g in _walk(f):
        if isinstance(g, Var):
            out.setdefault(g.name)
    return list(out)


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


# -- named axioms -----------------------------------------------------------

@dataclass(frozen=True)
class AxiomSet:
    name: str
    axioms: tuple[Formula, ...]

    def __post_init__(self):
        if not self.name:
            raise ValueError("axiom set needs a name")

    def __add__(self, other: "AxiomSet") -> "AxiomSet":
        return AxiomSet(f"{self.name}+{other.name}", self.axioms + other.axioms)


p, q = Var("p"), Var("q")

LC_AXIOM = Or(Imp(p, q), Imp(q, p))
WPL_AXIOM = parse("(q->p) | (((p->q)->p)->p)")
KC_AXIOM = Or(neg(p), neg(neg(p)))


def bd(n: int) -> Formula:
    """bd_0 = p0, bd_k = p_k | (p_k -> bd_(k-1)); valid exactly on frames of
    depth at most n (for n >= 1)."""
    if n < 0:
        raise ValueError("bd_n needs n >= 0")
    f: Formula = Var("p0")
    for k in range(1, n + 1):
        pk = Var(f"p{k}")
        f = Or(pk, Imp(pk, f))
    return f


def bw(n: int) -> Formula:
    """Bounded width n: OR_i (p_i -> OR_{j != i} p_j), i = 0..n."""
    ps = [Var(f"p{i}") for i in range(n + 1)]
    return disj([Imp(ps[i], disj([ps[j] for j in range(n + 1) if j != i])) for i in range(n + 1)])


BW2_AXIOM = bw(2)


def named_axiom(name: str) -> AxiomSet:
    from .families import q_poset

    if name == "LC":
        return AxiomSet("LC", (LC_AXIOM,))
    if name == "wPL":
        return AxiomSet("wPL", (WPL_AXIOM,))
    if name == "KC":
        return AxiomSet("KC", (KC_AXIOM,))
    if name == "BW2":
        return AxiomSet("BW2", (BW2_AXIOM,))
    m = re.fullmatch(r"BD(\d+)", name)
    if m:
        return AxiomSet(name, (bd(int(m.group(1))),))
    if name == "2Uni":
        return AxiomSet("2Uni", (WPL_AXIOM, jankov_syntactic(q_poset(4)), jankov_syntactic(q_poset(5))))
    if name == "LFC":
        return AxiomSet("LFC", tuple(jankov_syntactic(q_poset(i)) for i in (2, 4, 5, 6, 7, 8)))
    if name == "Box":
        return AxiomSet("Box", (WPL_AXIOM, BW2_AXIOM, KC_AXIOM))
    raise KeyError(f"unknown axiom set {name!r}")


AXIOM_NAMES = ("LC", "wPL", "KC", "BW2", "BDn", "2Uni", "LFC", "Box")


# -- Jankov formulas ----------------------------------------------------------

# formula -> the rooted frame it characterizes
JANKOV_REGISTRY: dict[Formula, object] = {}


def jankov_syntactic(Q, cap: int = 1 << 12) -> Formula:
    """Diagram formula of Up(Q): one variable per upset, conjunction of the
    equivalences describing meets, joins, implications and the bounds,
    implying the variable of the coatom Q minus its root."""
    from .heyting import implies_mask
    from .poset import PosetError, upset_masks

    if not Q.is_rooted:
        raise PosetError("Jankov formula needs a rooted frame")
    ups = upset_masks(Q, cap)
    pos = {u: k for k, u in enumerate(ups)}
    v = [Var(f"j{k}") for k in range(len(ups))]
    parts: list[Formula] = [iff(v[pos[0]], BOT), iff(v[pos[Q.full]], TOP)]
    for a in range(len(ups)):
        for b in range(a + 1, len(ups)):
            parts.append(iff(v[pos[ups[a] & ups[b]]], And(v[a], v[b])))
            parts.append(iff(v[pos[ups[a] | ups[b]]], Or(v[a], v[b])))
    for a in range(len(ups)):
        for b in range(len(ups)):
            parts.append(iff(v[pos[implies_mask(Q, ups[a], ups[b])]], Imp(v[a], v[b])))
    s = Q.full & ~(1 << Q.root_index)
    f = Imp(conj(parts), v[pos[s]])
    JANKOV_REGISTRY[f] = Q
    return f
