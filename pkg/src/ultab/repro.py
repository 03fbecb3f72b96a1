"""Bounded re-derivation suites, one target per claim.

Each runner returns a ReproResult whose ``evidence`` is plain JSON data;
a failing run always carries a counterexample there.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from . import bisim, families, fileio
from .canon import canonical_form, is_isomorphic
from .formula import WPL_AXIOM, jankov_syntactic, named_axiom, to_text
from .heyting import implies_mask, product_generation_depths
from .morphism import jankov_refutes, pmorphic_images, validates_axiomset
from .poset import Poset, count_upsets, upset_masks
from .semantics import Model, frame_validates, is_reduced, satisfies
from .uniformity import (certify_n_uniform, degree_of_uniformity, enumerate_models,
                         frame_closure, stack_bound_uniformity_check)


@dataclass(frozen=True)
class ReproResult:
    target: str
    passed: bool
    summary: str
    evidence: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return f"[{self.status}] {self.target}: {self.summary} ({self.seconds:.1f}s)"

    def as_dict(self) -> dict:
        return {"target": self.target, "status": self.status, "summary": self.summary,
                "evidence": self.evidence, "seconds": round(self.seconds, 3)}


@dataclass(frozen=True)
class ReproTarget:
    id: str
    description: str
    runner: Callable[..., tuple[bool, str, dict]]
    params: tuple[str, ...] = ()


def _lev(x) -> int | str:
    return bisim.format_level(x) if x == bisim.FULL else int(x)


def _pair(M: Model, N: Model) -> dict:
    return {"left": fileio.model_to_dict(M), "right": fileio.model_to_dict(N)}


def _iso_models(M: Model, N: Model) -> bool:
    return (M.vars == N.vars and len(M) == len(N)
            and canonical_form(M.frame, M.colors) == canonical_form(N.frame, N.colors))


# -- the targets --------------------------------------------------------------------

def figure2() -> tuple[bool, str, dict]:
    M, N = families.figure2_pair()
    level = bisim.max_bisim_level(M, N)
    one = bisim.k_bisim(M, N, 1) is not None
    two = bisim.k_bisim(M, N, 2) is not None
    full = bisim.full_bisim(M, N) is not None
    phi = bisim.distinguishing_formula(M, N, 2)
    ok = level == 1 and one and not two and not full and phi is not None \
        and satisfies(M, phi) and not satisfies(N, phi)
    ev = {"max_level": _lev(level), "1-bisimilar": one, "2-bisimilar": two,
          "bisimilar": full, "distinguishing_formula": phi and to_text(phi)}
    return ok, f"max level {_lev(level)}, separated by {phi and to_text(phi)}", ev


def figure4() -> tuple[bool, str, dict]:
    rows, bad = [], []
    for i, (M, N) in enumerate(families.figure4_pairs(), 1):
        Q = families.q_poset(i)
        level = bisim.max_bisim_level(M, N)
        left_is_q = is_isomorphic(M.frame, Q)[0]
        images = {canonical_form(F) for F in pmorphic_images(Q)}
        right_image = canonical_form(N.frame) in images
        full = bisim.full_bisim(M, N) is not None
        row = {"i": i, "max_level": _lev(level), "bisimilar": full,
               "left_is_Q": left_is_q, "right_is_image_of_Q": right_image}
        rows.append(row)
        if level != 2 or full or not left_is_q or not right_image:
            bad.append(dict(row, **_pair(M, N)))
    ev = {"pairs": rows}
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, f"levels {[r['max_level'] for r in rows]}", ev


def lemma_mn(n: int | None = None, k: int | None = None) -> tuple[bool, str, dict]:
    ns = [n] if n is not None else [3, 4, 5]
    rows, bad = [], []
    for nn in ns:
        ks = [k] if k is not None else range(1, nn - 1)
        for kk in ks:
            M, N = families.m_model(nn, kk), families.n_model(nn, kk - 1)
            level = bisim.max_bisim_level(M, N)
            rows.append({"n": nn, "k": kk, "max_level": _lev(level)})
            if level != kk:
                bad.append(dict(rows[-1], **_pair(M, N)))
    ev = {"cases": rows}
    if bad:
        ev["counterexample"] = bad[0]
    levels = ", ".join(f"M({r['n']},{r['k']})/N({r['n']},{r['k'] - 1}) -> {r['max_level']}" for r in rows)
    return not bad, f"max level {levels}", ev


def rn_lemma(max_k: int = 2, ladder: int = 9) -> tuple[bool, str, dict]:
    FC = frame_closure([families.rn_prefix(ladder)])
    models = enumerate_models(FC, 1).models
    rows, bad = [], []
    for kk in range(max_k + 1):
        for i, level in ((2 * kk + 1, 2 * kk + 2), (2 * kk + 2, 2 * kk + 3)):
            C = families.rn_canonical_model(i)
            hits = [M for M in models if bisim.max_bisim_level(M, C) >= level]
            iso = [M for M in hits if _iso_models(M, C)]
            rows.append({"i": i, "level": level, "hits": len(hits), "isomorphic": len(iso)})
            if len(iso) != 1 or len(hits) != 1:
                others = [M for M in hits if not _iso_models(M, C)]
                bad.append(dict(rows[-1], canonical=fileio.model_to_dict(C),
                                other=fileio.model_to_dict(others[0]) if others else None))
    ev = {"frames": len(FC), "models": len(models), "cases": rows}
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, f"{len(rows)} cases over {len(models)} reduced models on {len(FC)} frames", ev


def degree(n: int | None = None) -> tuple[bool, str, dict]:
    cases = [("2-chain", Poset.chain(2), 1), ("2-fork", families.fork(2), 2),
             ("P*1", families.p_star(1), 2), ("P*2", families.p_star(2), 4)]
    if n is not None:
        cases = [(f"P*{n}", families.p_star(n), 2 * n)]
    rows, bad = [], []
    for name, P, want in cases:
        rep = degree_of_uniformity(P)
        row = {"frame": name, "degree": rep.degree, "expected": want,
               "envelope": rep.certificate.envelope}
        if rep.refutation is not None:
            row["refuted_at"] = rep.refutation.n
            row["witness_level"] = rep.refutation.witness_level
        rows.append(row)
        if rep.degree != want:
            bad.append(dict(row, frame_file=fileio.poset_to_dict(P)))
    ev = {"cases": rows}
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, ", ".join(f"{r['frame']} -> {r['degree']}" for r in rows), ev


@lru_cache(maxsize=None)
def _jankov_q(i: int):
    return jankov_syntactic(families.q_poset(i))


def _jankov_validates(P: Poset, idx) -> bool:
    return all(frame_validates(P, _jankov_q(i))[0] for i in idx)


def wpl_frames(max: int = 6) -> tuple[bool, str, dict]:
    posets = families.rooted_posets(max)
    bad, sums = [], 0
    for P in posets:
        valid = _jankov_validates(P, (1, 2, 3))
        bs = families.is_boolean_sum(P)
        sums += bs
        if valid != bs:
            bad.append({"frame": fileio.poset_to_dict(P), "validates": valid, "boolean_sum": bs})
    ev = {"rooted_posets": len(posets), "boolean_sums": sums, "mismatches": len(bad)}
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, f"{len(posets)} rooted posets, {sums} Boolean sums, {len(bad)} mismatches", ev


def stack_lemma(max: int = 8) -> tuple[bool, str, dict]:
    sums = families.boolean_sums(max)
    bad, low = [], 0
    for P in sums:
        valid = _jankov_validates(P, (4, 5))
        shallow = families.stack_depth(P) <= 1
        low += shallow
        if valid != shallow:
            bad.append({"frame": fileio.poset_to_dict(P), "validates": valid,
                        "stack_depth": families.stack_depth(P)})
    ev = {"boolean_sums": len(sums), "stack_depth_le_1": low, "mismatches": len(bad)}
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, f"{len(sums)} Boolean sums, {low} of stack depth <= 1, {len(bad)} mismatches", ev


def _report(rep) -> dict:
    d = {"n": rep.n, "verdict": rep.verdict, "envelope": rep.envelope}
    if rep.witness is not None:
        d["witness"] = _pair(*rep.witness)
        d["witness_level"] = rep.witness_level
    return d


def two_uni(max: int = 6) -> tuple[bool, str, dict]:
    FC = frame_closure(families.boolean_sums(max, max_stack=1))
    hi = certify_n_uniform(FC, 2)
    lo = certify_n_uniform(FC, 1)
    ok = hi.certified and not lo.certified and lo.witness_level is not None and lo.witness_level >= 1
    ev = {"frames": len(FC), "n=2": _report(hi), "n=1": _report(lo)}
    if not hi.certified:
        ev["counterexample"] = ev["n=2"]
    return ok, f"{hi.verdict}, {lo.verdict} over {len(FC)} frames", ev


def combs(max_teeth: int = 4, max_size: int = 7, class_size: int = 8) -> tuple[bool, str, dict]:
    ev: dict = {}
    bad = []
    counts = []
    broken: dict = {}
    for n in range(1, max_teeth + 1):
        for B in families.broken_combs(n):
            broken.setdefault(canonical_form(B), B)
        imgs = pmorphic_images(families.comb(n))
        counts.append(len(imgs))
        got = {canonical_form(F) for F in imgs}
        for F in imgs:
            if not families.is_broken_comb(F):
                bad.append({"part": "images", "comb": n, "image": fileio.poset_to_dict(F)})
        for c in set(broken) - got:
            bad.append({"part": "images", "comb": n, "missing": fileio.poset_to_dict(broken[c])})
        if got - set(broken):
            bad.append({"part": "images", "comb": n, "extra": len(got - set(broken))})
    ev["image_counts"] = counts

    lfc = named_axiom("LFC")
    posets = families.rooted_posets(max_size)
    lfc_bad = 0
    for P in posets:
        v = validates_axiomset(P, lfc)
        if v != families.is_broken_comb(P):
            lfc_bad += 1
            bad.append({"part": "LFC", "frame": fileio.poset_to_dict(P), "validates": v})
    ev["lfc"] = {"rooted_posets": len(posets), "mismatches": lfc_bad}

    gens = [P for P in families.rooted_posets(class_size) if families.is_broken_comb(P)]
    FC = frame_closure(gens)
    three = certify_n_uniform(FC, 3)
    two = certify_n_uniform(FC, 2)
    q1_pattern = False
    if two.witness is not None:
        frames = {canonical_form(M.frame) for M in two.witness}
        q1_pattern = frames == {canonical_form(families.q_poset(1)), canonical_form(families.fork(2))}
    ev["class"] = {"frames": len(FC), "n=3": _report(three), "n=2": _report(two),
                   "witness_on_Q1_and_fork": q1_pattern}
    if not three.certified:
        bad.append({"part": "3-uniform", **_report(three)})
    if two.certified or not q1_pattern:
        bad.append({"part": "2-uniform refutation", **_report(two)})
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, (f"images {counts} all broken, LFC {lfc_bad} mismatches, "
                     f"{three.verdict}, {two.verdict}"), ev


def wpl_nonuniform(max_n: int = 5) -> tuple[bool, str, dict]:
    rows, bad = [], []
    for n in range(max_n + 1):
        k = max(n, 1)
        M, N = families.m_model(k + 2, k), families.n_model(k + 2, k - 1)
        level = bisim.max_bisim_level(M, N)
        frames_ok = all(frame_validates(F, WPL_AXIOM)[0] for F in (M.frame, N.frame))
        reduced = is_reduced(M) and is_reduced(N)
        ok = level != bisim.FULL and level >= n and frames_ok and reduced
        rows.append({"n": n, "max_level": _lev(level), "wpl_frames": frames_ok,
                     "reduced": reduced, "status": "PASS" if ok else "FAIL"})
        if not ok:
            bad.append(dict(rows[-1], **_pair(M, N)))
    ev = {"cases": rows}
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, " ".join(f"n={r['n']}:{r['status']}" for r in rows), ev


def box(max_n: int = 5, sizes: tuple = (7, 9)) -> tuple[bool, str, dict]:
    A = named_axiom("Box")
    rows, bad = [], []
    for n in range(3, max_n + 1):
        S = families.s_frame(n)
        ok = validates_axiomset(S, A)
        rows.append({"n": n, "size": len(S), "validates_box": ok})
        if not ok:
            bad.append({"part": "s_frame", "frame": fileio.poset_to_dict(S)})
    checks = []
    for k, size in zip((1, 2), sizes):
        rep = stack_bound_uniformity_check(k, size_cap=size)
        checks.append({"k": k, "size_cap": size, **_report(rep)})
        if not rep.certified:
            bad.append({"part": "stack bound", **checks[-1]})
    ev = {"s_frames": rows, "stack_bound": checks}
    if bad:
        ev["counterexample"] = bad[0]
    return not bad, (f"S_3..S_{max_n} validate Box; "
                     + ", ".join(f"k={c['k']} {c['verdict']}" for c in checks)), ev


def yankov(max_upsets: int = 32, budget: float = 270.0, sample: int = 1500,
           seed: int = 7) -> tuple[bool, str, dict]:
    """Exhaustive sweep by increasing |Up(P)| under a time budget.

    Passes only when every frame up to ``max_upsets`` was checked. A seeded
    sample above the last completed count is reported alongside.
    """
    targets = [("1-point", Poset.chain(1)), ("2-chain", Poset.chain(2)),
               ("2-fork", families.fork(2))]
    formulas = [(name, Q, jankov_syntactic(Q)) for name, Q in targets]
    bad = []

    def check(P):
        for name, Q, f in formulas:
            syn = not frame_validates(P, f)[0]
            # |Up(P)| <= max_upsets bounds |P| by max_upsets - 1
            sem = jankov_refutes(P, Q, cap=max_upsets)[0]
            if syn != sem:
                bad.append({"frame": fileio.poset_to_dict(P), "Q": name,
                            "syntactic_refutes": syn, "semantic_refutes": sem})

    deadline = time.monotonic() + budget
    done, current, checked, timed_out = 1, 1, 0, False
    for u, P in families.iter_rooted_posets_by_upsets(max_upsets):
        if u != current:
            done, current = current, u
        if time.monotonic() > deadline:
            timed_out = True
            break
        check(P)
        checked += 1
    if not timed_out:
        done = max_upsets
    sampled = _sample_by_upsets(done + 1, max_upsets, sample, seed) if done < max_upsets else []
    for P in sampled:
        check(P)
    complete = done >= max_upsets
    ev = {"upset_bound": max_upsets, "exhaustive_through": done, "exhaustive_frames": checked,
          "budget_seconds": budget, "complete": complete, "sampled_frames": len(sampled),
          "sample_upset_range": [done + 1, max_upsets], "seed": seed, "disagreements": len(bad)}
    if bad:
        ev["counterexample"] = bad[0]
    summary = f"{checked} frames checked, exhaustive through |Up| <= {done}"
    if not complete:
        summary += (f" of {max_upsets} before the {budget:g}s budget ran out; "
                    f"{len(sampled)} sampled above")
    return complete and not bad, summary + f", {len(bad)} disagreements", ev


def _sample_by_upsets(lo: int, hi: int, count: int, seed: int) -> list[Poset]:
    """Distinct random rooted posets with lo <= |Up| <= hi."""
    rng = random.Random(seed)
    seen, out = set(), []
    tries = 0
    while len(out) < count and tries < 200 * count:
        tries += 1
        n = rng.randint(4, 9)
        # random order on 1..n-1 (edges respect the index order), plus a root 0
        density = rng.choice((0.2, 0.35, 0.5, 0.7))
        pairs = [(0, j) for j in range(1, n)]
        pairs += [(i, j) for i in range(1, n) for j in range(i + 1, n) if rng.random() < density]
        P = Poset.from_relation(range(n), pairs)
        if not lo <= count_upsets(P) <= hi:
            continue
        c = canonical_form(P)
        if c in seen:
            continue
        seen.add(c)
        out.append(P.standardize())
    return out


def properties(seed: int = 11, samples: int = 300) -> tuple[bool, str, dict]:
    rng = random.Random(seed)
    small = families.rooted_posets(5)
    checks: dict[str, dict] = {}

    def record(name, failures, tried):
        checks[name] = {"checked": tried, "failures": len(failures)}
        if failures:
            checks[name]["counterexample"] = failures[0]

    # residuation: W <= U -> V iff W & U <= V
    fails, tried = [], 0
    for P in families.rooted_posets(4):
        ups = upset_masks(P)
        for u in ups:
            for v in ups:
                imp = implies_mask(P, u, v)
                for w in ups:
                    tried += 1
                    if (w & ~imp == 0) != (w & u & ~v == 0):
                        fails.append({"frame": fileio.poset_to_dict(P), "U": u, "V": v, "W": w})
    record("residuation", fails, tried)

    # layered relations shrink and stabilize
    fails, tried = [], 0
    for _ in range(samples):
        M, N = _random_model(rng, small), _random_model(rng, small)
        layers, stable = bisim.level_rows(M.frame, M.colors, N.frame, N.colors)
        longer, _ = bisim.level_rows(M.frame, M.colors, N.frame, N.colors, len(layers) + 2)
        tried += 1
        shrinking = all(a & ~b == 0 for x, y in zip(layers[1:], layers) for a, b in zip(x, y))
        if not (shrinking and stable and longer == layers):
            fails.append(_pair(M, N))
    record("antitone_stabilization", fails, tried)

    # reduced and bisimilar implies isomorphic; bisimilar models agree on
    # the root color and on the set of colors used, so only such pairs are compared
    fails, tried = [], 0
    buckets: dict = {}
    for vars, pool in ((("p",), small), (("p", "q"), families.rooted_posets(4))):
        for P in pool:
            for cols in _monotone_colorings(P, len(vars)):
                M = Model(P, vars, cols)
                if is_reduced(M):
                    key = (vars, cols[P.root_index], frozenset(cols))
                    buckets.setdefault(key, []).append(M)
    for group in buckets.values():
        for i, M in enumerate(group):
            for N in group[i + 1:]:
                tried += 1
                if bisim.full_bisim(M, N) is not None and not _iso_models(M, N):
                    fails.append(_pair(M, N))
    record("reduced_bisimilar_isomorphic", fails, tried)

    # degree <= 2 * depth - 1
    fails, tried = [], 0
    for P in families.rooted_posets(6):
        tried += 1
        d = degree_of_uniformity(P).degree
        if d > max(2 * P.depth() - 1, 0):
            fails.append({"frame": fileio.poset_to_dict(P), "degree": d, "depth": P.depth()})
    record("degree_bound", fails, tried)

    # generation depth of a product equals the larger component depth
    fails, tried = [], 0
    pool = families.rooted_posets(4)
    for _ in range(samples):
        P, Q = rng.choice(pool), rng.choice(pool)
        up, uq = upset_masks(P), upset_masks(Q)
        gens = [(rng.choice(up), rng.choice(uq)) for _ in range(rng.choice((1, 2)))]
        tried += 1
        both, left, right = product_generation_depths(P, Q, gens)
        if both != max(left, right):
            fails.append({"left": fileio.poset_to_dict(P), "right": fileio.poset_to_dict(Q),
                          "generators": [list(g) for g in gens], "product_depth": both,
                          "left_depth": left, "right_depth": right})
    record("product_generation_depth", fails, tried)

    ok = all(c["failures"] == 0 for c in checks.values())
    ev = {"checks": checks}
    failed = [k for k, c in checks.items() if c["failures"]]
    if failed:
        ev["counterexample"] = {failed[0]: checks[failed[0]]["counterexample"]}
    summary = ", ".join(f"{k} {c['failures']}/{c['checked']} failures" for k, c in checks.items())
    return ok, summary, ev


def _monotone_colorings(P: Poset, v: int):
    from itertools import product

    ups = upset_masks(P)
    for combo in product(ups, repeat=v):
        yield [sum(1 << j for j, u in enumerate(combo) if u >> i & 1) for i in range(len(P))]


def _random_model(rng: random.Random, pool, vars=("p", "q")) -> Model:
    P = rng.choice(pool)
    ups = upset_masks(P)
    combo = [rng.choice(ups) for _ in vars]
    return Model(P, vars, [sum(1 << j for j, u in enumerate(combo) if u >> i & 1)
                           for i in range(len(P))])


TARGETS: dict[str, ReproTarget] = {t.id: t for t in (
    ReproTarget("figure2", "Figure 2 pair is 1-bisimilar, not 2-bisimilar", figure2),
    ReproTarget("figure4", "Figure 4 pairs have max level 2 and come from Q_1..Q_5", figure4),
    ReproTarget("lemma-mn", "M_n^k and N_n^(k-1) have max level k", lemma_mn, ("n", "k")),
    ReproTarget("rn-lemma", "ladder models at high levels are the canonical ones", rn_lemma),
    ReproTarget("degree", "degrees of the 2-chain, 2-fork, P*_1 and P*_2", degree, ("n",)),
    ReproTarget("wpl-frames", "J(Q_1..Q_3) frames are the Boolean sums", wpl_frames, ("max",)),
    ReproTarget("stack-lemma", "J(Q_4), J(Q_5) on Boolean sums mean stack depth <= 1",
                stack_lemma, ("max",)),
    ReproTarget("2uni", "stack-depth-1 Boolean sums are 2-uniform, not 1-uniform", two_uni, ("max",)),
    ReproTarget("combs", "comb images, LFC frames, 3-uniformity of broken combs", combs),
    ReproTarget("wpl-nonuniform", "n-bisimilar non-bisimilar wPL models for each n",
                wpl_nonuniform, ("max",)),
    ReproTarget("box", "S_n validates Box; stack bound gives (k+1)-uniformity", box),
    ReproTarget("yankov", "syntactic and semantic Jankov tests agree", yankov, ("max",)),
    ReproTarget("properties", "algebraic and bisimulation property suites", properties),
)}

_PARAM_ALIASES = {"yankov": {"max": "max_upsets"}, "wpl-nonuniform": {"max": "max_n"}}


def run(target: str, **params) -> ReproResult:
    if target not in TARGETS:
        raise KeyError(f"unknown repro target {target!r}; known: {', '.join(TARGETS)}")
    t = TARGETS[target]
    kwargs = {}
    for key, value in params.items():
        if value is None:
            continue
        if key not in t.params:
            raise ValueError(f"target {target!r} takes no --{key}")
        kwargs[_PARAM_ALIASES.get(target, {}).get(key, key)] = value
    start = time.perf_counter()
    ok, summary, evidence = t.runner(**kwargs)
    return ReproResult(target, ok, summary, evidence, time.perf_counter() - start)
