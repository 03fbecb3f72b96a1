"""Bisimulation, layered k-bisimulation, the bisimulation game and
distinguishing formulas."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .formula import BOT, TOP, And, Formula, Imp, Or, Var, impl_depth, size
from .poset import Poset, bits
from .semantics import Model, ModelError

FULL = float("inf")
DEFAULT_BUDGET = 10 ** 6


class BudgetExceeded(RuntimeError):
    pass


def _check_vars(M: Model, N: Model) -> None:
    if M.vars != N.vars:
        raise ModelError(f"variable lists differ: {M.vars} vs {N.vars}")


def level_rows(P: Poset, cp: Sequence, Q: Poset, cq: Sequence, cutoff: int | None = None):
    """Layered refinement on raw frames and colorings.

    Returns (layers, stable): layers[j][a] is the bitmask of worlds b of Q
    with (a, b) in S_j; ``stable`` is True when the last layer is a fixpoint
    (hence the greatest bisimulation).
    """
    n, m = len(P), len(Q)
    by_color: dict = {}
    for b in range(m):
        by_color[cq[b]] = by_color.get(cq[b], 0) | 1 << b
    cur = [by_color.get(cp[a], 0) for a in range(n)]
    layers = [cur]
    while cutoff is None or len(layers) <= cutoff:
        col = [0] * m
        for a in range(n):
            for b in bits(cur[a]):
                col[b] |= 1 << a
        nxt = []
        for a in range(n):
            row = 0
            for b in bits(cur[a]):
                if all(cur[x] & Q.up[b] for x in bits(P.up[a])) and \
                        all(col[y] & P.up[a] for y in bits(Q.up[b])):
                    row |= 1 << b
            nxt.append(row)
        if nxt == cur:
            return layers, True
        layers.append(nxt)
        cur = nxt
    return layers, False


def level_matrix(P: Poset, cp, Q: Poset, cq, cutoff: int | None = None) -> list[list[float]]:
    """lev[a][b]: the largest j with (a, b) in S_j, FULL when bisimilar, -1
    when the colors differ (or the cutoff is reached and capped)."""
    layers, stable = level_rows(P, cp, Q, cq, cutoff)
    lev = [[-1] * len(Q) for _ in range(len(P))]
    for j, rows in enumerate(layers):
        for a, row in enumerate(rows):
            for b in bits(row):
                lev[a][b] = j
    if stable:
        for a, row in enumerate(layers[-1]):
            for b in bits(row):
                lev[a][b] = FULL
    return lev


@dataclass(frozen=True)
class LayeredBisim:
    """levels[j] is S_j as a frozenset of world pairs; S_0 ⊇ S_1 ⊇ ... ⊇ S_k."""

    left: Model
    right: Model
    levels: tuple[frozenset, ...]

    @property
    def k(self) -> int:
        return len(self.levels) - 1

    def related(self, a, b, j: int | None = None) -> bool:
        return (a, b) in self.levels[self.k if j is None else j]


def _pairs(M: Model, N: Model, rows) -> frozenset:
    return frozenset((M.worlds[a], N.worlds[b]) for a, row in enumerate(rows) for b in bits(row))


def layers(M: Model, N: Model, k: int) -> LayeredBisim:
    """The greatest layered family S_0 ⊇ ... ⊇ S_k (it may not relate the roots)."""
    _check_vars(M, N)
    if k < 0:
        raise ValueError("k must be >= 0")
    rows, _ = level_rows(M.frame, M.colors, N.frame, N.colors, k)
    rows = rows + [rows[-1]] * (k + 1 - len(rows))
    return LayeredBisim(M, N, tuple(_pairs(M, N, r) for r in rows))


def k_bisim(M: Model, N: Model, k: int) -> LayeredBisim | None:
    L = layers(M, N, k)
    return L if L.related(M.root, N.root) else None


def full_bisim(M: Model, N: Model) -> frozenset | None:
    """The greatest bisimulation, if it relates the roots."""
    _check_vars(M, N)
    rows, _ = level_rows(M.frame, M.colors, N.frame, N.colors)
    rel = _pairs(M, N, rows[-1])
    return rel if (M.root, N.root) in rel else None


def leq_k(M: Model, N: Model, k: int) -> bool:
    """Some z above the root of M is k-bisimilar to the root of N."""
    _check_vars(M, N)
    rows, _ = level_rows(M.frame, M.colors, N.frame, N.colors, k)
    last = rows[-1]
    r = N.frame.root_index
    return any(last[a] >> r & 1 for a in bits(M.frame.up[M.frame.root_index]))


def max_bisim_level(M: Model, N: Model, cutoff: int | None = None) -> float:
    """FULL when bisimilar, otherwise the largest k (capped at ``cutoff``)
    with the roots k-bisimilar; -1 when the root colors differ."""
    _check_vars(M, N)
    lev = level_matrix(M.frame, M.colors, N.frame, N.colors, cutoff)
    return lev[M.frame.root_index][N.frame.root_index]


def format_level(x: float) -> str:
    return "full" if x == FULL else str(int(x))


# -- the game -------------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    player: str   # "I" or "II"
    side: str     # "M" or "N"
    world: object


@dataclass(frozen=True)
class GameTranscript:
    rounds: int
    moves: tuple[Move, ...]
    winner: str

    def positions(self):
        return [(self.moves[i], self.moves[i + 1]) for i in range(0, len(self.moves), 2)]


StrategyI = Callable[[Model, Model, object, object, int], tuple[str, object]]
StrategyII = Callable[[Model, Model, object, object, str, object, int], object]


def optimal_strategies(M: Model, N: Model) -> tuple[StrategyI, StrategyII]:
    """Strategies read off the level matrix: Player I moves to a point whose
    best answer has a lower level, Player II answers with the highest level."""
    lev = level_matrix(M.frame, M.colors, N.frame, N.colors)
    P, Q = M.frame, N.frame

    def best_answer_level(side: str, z: int, other: int) -> float:
        if side == "M":
            return max((lev[z][y] for y in bits(Q.up[other])), default=-1)
        return max((lev[x][z] for x in bits(P.up[other])), default=-1)

    def player_one(M_, N_, a, b, left):
        i, j = P.idx(a), Q.idx(b)
        cur = lev[i][j]
        if cur < left:
            for x in bits(P.up[i]):
                if best_answer_level("M", x, j) < cur:
                    return "M", P.worlds[x]
            for y in bits(Q.up[j]):
                if best_answer_level("N", y, i) < cur:
                    return "N", Q.worlds[y]
        return "M", a

    def player_two(M_, N_, a, b, side, z, left):
        if side == "M":
            x = P.idx(z)
            y = max(bits(Q.up[Q.idx(b)]), key=lambda y: (lev[x][y], -y))
            return Q.worlds[y]
        y = Q.idx(z)
        x = max(bits(P.up[P.idx(a)]), key=lambda x: (lev[x][y], -x))
        return P.worlds[x]

    return player_one, player_two


def play_game(M: Model, N: Model, k: int, strategy_one: StrategyI | None = None,
              strategy_two: StrategyII | None = None) -> GameTranscript:
    """Play k rounds from the roots. Player I picks a side and a point above
    the current one there; Player II answers above the current point on the
    other side. Player I wins as soon as the current points differ in color."""
    _check_vars(M, N)
    if strategy_one is None or strategy_two is None:
        s1, s2 = optimal_strategies(M, N)
        strategy_one = strategy_one or s1
        strategy_two = strategy_two or s2
    a, b = M.root, N.root
    moves: list[Move] = []
    for left in range(k, -1, -1):
        if M.color(a) != N.color(b):
            return GameTranscript(k, tuple(moves), "I")
        if left == 0:
            break
        side, z = strategy_one(M, N, a, b, left)
        if side == "M":
            if not M.frame.leq(a, z):
                raise ValueError(f"Player I must move upward in M, got {z!r}")
            w = strategy_two(M, N, a, b, side, z, left)
            if not N.frame.leq(b, w):
                raise ValueError(f"Player II must move upward in N, got {w!r}")
            moves += [Move("I", "M", z), Move("II", "N", w)]
            a, b = z, w
        else:
            if not N.frame.leq(b, z):
                raise ValueError(f"Player I must move upward in N, got {z!r}")
            w = strategy_two(M, N, a, b, side, z, left)
            if not M.frame.leq(a, w):
                raise ValueError(f"Player II must move upward in M, got {w!r}")
            moves += [Move("I", "N", z), Move("II", "M", w)]
            a, b = w, z
    return GameTranscript(k, tuple(moves), "II")


# -- distinguishing formulas -------------------------------------------------------

def distinguishing_formula(M: Model, N: Model, k: int, budget: int = DEFAULT_BUDGET) -> Formula | None:
    """A formula of implication depth <= k true at the root of M and false at
    the root of N, or None when there is none.

    None is immediate when some point above the root of M is k-bisimilar to
    the root of N. The converse fails: the fork and chain of the Figure 2
    pair are not related that way at k = 2, yet no depth-2 formula holds at
    the fork root and fails at the chain root.

    Formulas are generated depth by depth, keeping one representative (the
    smallest found) per pair of truth sets, so the search is exhaustive.
    """
    _check_vars(M, N)
    if leq_k(M, N, k):
        return None
    P, Q = M.frame, N.frame
    vm, vn = M.valuation(), N.valuation()
    rm, rn = 1 << P.root_index, 1 << Q.root_index
    reps: dict[tuple[int, int], Formula] = {}
    order: list[tuple[int, int]] = []
    spent = [0]

    def add(key, f) -> bool:
        spent[0] += 1
        if spent[0] > budget:
            raise BudgetExceeded(f"formula search exceeded {budget} states")
        old = reps.get(key)
        if old is None:
            reps[key] = f
            order.append(key)
            return True
        if size(f) < size(old) and impl_depth(f) <= impl_depth(old):
            reps[key] = f
        return False

    def close(start: int) -> None:
        i = start
        while i < len(order):
            x = order[i]
            for y in order[:i + 1]:
                add((x[0] & y[0], x[1] & y[1]), And(reps[y], reps[x]) if y != x else reps[x])
                add((x[0] | y[0], x[1] | y[1]), Or(reps[y], reps[x]) if y != x else reps[x])
            i += 1

    def winner():
        hits = [key for key in order if key[0] & rm and not key[1] & rn]
        if not hits:
            return None
        return min((reps[key] for key in hits), key=size)

    add((0, 0), BOT)
    add((P.full, Q.full), TOP)
    for v in M.vars:
        add((vm[v], vn[v]), Var(v))
    close(0)
    for depth in range(k + 1):
        got = winner()
        if got is not None:
            assert impl_depth(got) <= depth
            return got
        if depth == k:
            break
        current = list(order)
        start = len(order)
        for x in current:
            for y in current:
                um = P.full & ~P.down_mask(x[0] & ~y[0])
                un = Q.full & ~Q.down_mask(x[1] & ~y[1])
                add((um, un), Imp(reps[x], reps[y]))
        close(start)
    return None
