"""Command-line interface.

Exit codes: 0 success, 1 a repro check failed, 2 usage or input error.
Caps can be raised with ULTAB_VALIDITY_CAP and ULTAB_MORPHISM_CAP.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import bisim, families, fileio, repro
from .formula import AXIOM_NAMES, FormulaSyntaxError, jankov_syntactic, named_axiom, parse, to_text
from .morphism import DEFAULT_MORPHISM_CAP, jankov_refutes
from .poset import Poset, PosetError, all_upsets
from .semantics import DEFAULT_VALIDITY_CAP, CapExceeded, Model, ModelError, eval_formula, frame_validates, reduce
from .uniformity import (SearchCapExceeded, certify_n_uniform, degree_of_frame_class, frame_closure)


class UsageError(Exception):
    pass


def _cap(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if not raw:
        return default
    try:
        return int(float(raw))
    except ValueError:
        raise UsageError(f"{name} must be a number, got {raw!r}") from None


def _read(path: str):
    if path == "-":
        if sys.stdin.isatty():
            raise UsageError("expected a poset or model file (or JSON on stdin)")
        return fileio.loads(sys.stdin.read(), "<stdin>")
    return fileio.load(path)


def _frame(obj) -> Poset:
    return obj.frame if isinstance(obj, Model) else obj


def _model(obj, what: str) -> Model:
    if not isinstance(obj, Model):
        raise UsageError(f"{what} must be a model file (with vars and colors)")
    return obj


def _emit(args, data, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def _names(ws) -> list:
    return sorted((fileio._world_out(w) for w in ws), key=lambda w: (isinstance(w, str), str(w)))


# -- family construction ----------------------------------------------------------

def build_family(name: str, n=None, k=None, i=None, sizes=None, teeth=None):
    def need(value, flag):
        if value is None:
            raise UsageError(f"family {name} needs --{flag}")
        return value

    if name == "point":
        return families.point()
    if name == "chain":
        return Poset.chain(need(n, "n"))
    if name == "fork":
        return families.fork(n if n is not None else 2)
    if name == "rn":
        return families.rn_prefix(need(i, "i"))
    if name == "p-star":
        return families.p_star(need(n, "n"))
    if name == "p-prime":
        return families.p_prime(need(i, "i"))
    if name == "comb":
        return families.comb(need(n, "n"), None if teeth is None else [int(t) for t in teeth.split(",") if t])
    if name == "q":
        return families.q_poset(need(i, "i"))
    if name == "m":
        return families.m_model(need(n, "n"), need(k, "k"))
    if name == "n":
        return families.n_model(need(n, "n"), need(k, "k"))
    if name == "s":
        return families.s_frame(need(n, "n"))
    if name == "boolean-sum":
        return families.boolean_sum([int(x) for x in need(sizes, "sizes").split(",")])
    raise UsageError(f"unknown family {name!r}")


def _family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--sizes", help="level sizes, maximal level first, e.g. 2,2,1")
    p.add_argument("--teeth", help="comma-separated tooth indices for comb")


def _family_from(args):
    return build_family(args.family, args.n, args.k, args.i, args.sizes, args.teeth)


# -- commands -------------------------------------------------------------------

def cmd_family(args) -> int:
    obj = _family_from(args)
    print(fileio.to_dot(obj, args.family) if args.dot else fileio.dumps(obj))
    return 0


def cmd_poset(args) -> int:
    P = _frame(_read(args.file))
    if args.action == "depth":
        _emit(args, {"depth": P.depth()}, str(P.depth()))
    elif args.action == "width":
        _emit(args, {"width": P.width()}, str(P.width()))
    elif args.action == "upsets":
        ups = [_names(U.worlds) for U in all_upsets(P, _cap("ULTAB_VALIDITY_CAP", 1 << 20))]
        _emit(args, {"count": len(ups), "upsets": ups},
              "\n".join("{" + ", ".join(map(str, u)) + "}" for u in ups))
    elif args.action == "dot":
        print(fileio.to_dot(P), end="")
    else:
        info = {"size": len(P), "root": fileio._world_out(P.root) if P.root is not None else None,
                "depth": P.depth(), "width": P.width(), "covers": P.cover_count(),
                "poset": fileio.poset_to_dict(P)}
        rows = [f"size   {len(P)}", f"root   {info['root']}", f"depth  {P.depth()}",
                f"width  {P.width()}", "covers " + " ".join(f"{a}<{b}" for a, b in P.cover_pairs())]
        _emit(args, info, "\n".join(rows))
    return 0


def cmd_validity(args) -> int:
    if args.axiom and args.formula and args.file == "-":
        args.file, args.formula = args.formula, None
    obj = _read(args.file)
    if args.axiom:
        formulas = list(named_axiom(args.axiom).axioms)
    elif args.formula:
        formulas = [parse(args.formula)]
    else:
        raise UsageError("give a formula or --axiom")
    results = []
    for f in formulas:
        if isinstance(obj, Model):
            truth = eval_formula(obj, f)
            results.append({"formula": to_text(f), "root": obj.root in truth,
                            "truth_set": _names(truth.worlds)})
        else:
            ok, counter = frame_validates(obj, f, _cap("ULTAB_VALIDITY_CAP", DEFAULT_VALIDITY_CAP))
            row = {"formula": to_text(f), "valid": ok}
            if counter is not None:
                row["countervaluation"] = {v: _names(U.worlds) for v, U in counter.items()}
            results.append(row)
    lines = []
    for r in results:
        if "valid" in r:
            lines.append(("valid" if r["valid"] else "refuted") + f"  {r['formula']}")
            if "countervaluation" in r:
                lines += [f"  {v} = {{{', '.join(map(str, ws))}}}" for v, ws in r["countervaluation"].items()]
        else:
            lines.append(("true" if r["root"] else "false") + f" at root  {r['formula']}")
    _emit(args, {"results": results}, "\n".join(lines))
    return 0


def cmd_jankov(args) -> int:
    P, Q = _frame(_read(args.frame)), _frame(_read(args.q))
    cap = _cap("ULTAB_MORPHISM_CAP", DEFAULT_MORPHISM_CAP)
    refuted, how = jankov_refutes(P, Q, cap)
    data = {"refutes": refuted}
    text = "J(Q) refuted" if refuted else "J(Q) valid"
    if how is not None:
        x, f = how
        data["point"] = fileio._world_out(x)
        data["map"] = {str(fileio._world_out(a)): fileio._world_out(b) for a, b in f.map.items()}
        text += f": the upset of {x} maps onto Q via " + ", ".join(f"{a}->{b}" for a, b in f.map.items())
    if args.syntactic:
        syn = not frame_validates(P, jankov_syntactic(Q), _cap("ULTAB_VALIDITY_CAP", DEFAULT_VALIDITY_CAP))[0]
        data["syntactic_refutes"] = syn
        text += f"\nsyntactic check {'agrees' if syn == refuted else 'DISAGREES'}"
    _emit(args, data, text)
    return 0


def cmd_bisim(args) -> int:
    M, N = _model(_read(args.left), "left"), _model(_read(args.right), "right")
    if args.k is None:
        rel = bisim.full_bisim(M, N)
        data = {"bisimilar": rel is not None}
        if rel is not None:
            data["relation"] = sorted([str(a), str(b)] for a, b in rel)
        _emit(args, data, "bisimilar" if rel is not None else "not bisimilar")
        return 0
    L = bisim.k_bisim(M, N, args.k)
    data = {"k": args.k, "bisimilar": L is not None}
    text = f"{args.k}-bisimilar" if L is not None else f"not {args.k}-bisimilar"
    if L is None:
        for a, b, side in ((M, N, "left"), (N, M, "right")):
            phi = bisim.distinguishing_formula(a, b, args.k)
            if phi is not None:
                data["distinguishing_formula"] = {"formula": to_text(phi), "true_in": side}
                text += f"; {to_text(phi)} holds at the {side} root only"
                break
    _emit(args, data, text)
    return 0


def cmd_maxlevel(args) -> int:
    M, N = _model(_read(args.left), "left"), _model(_read(args.right), "right")
    lev = bisim.max_bisim_level(M, N)
    out = bisim.format_level(lev) if lev == bisim.FULL else int(lev)
    _emit(args, {"max_level": out}, str(out))
    return 0


def cmd_reduce(args) -> int:
    M = _model(_read(args.file), "input")
    print(fileio.dumps(reduce(M)))
    return 0


def _frames_for(args) -> list[Poset]:
    if getattr(args, "family", None):
        return [_frame(_family_from(args))]
    if not args.files:
        return [_frame(_read("-"))]
    return [_frame(_read(f)) for f in args.files]


def cmd_degree(args) -> int:
    FC = frame_closure(_frames_for(args), _cap("ULTAB_MORPHISM_CAP", DEFAULT_MORPHISM_CAP))
    rep = degree_of_frame_class(FC, args.v_max, args.n_max)
    data = {"degree": rep.degree, "envelope": rep.certificate.envelope}
    if rep.refutation is not None:
        data["refuted_at"] = rep.refutation.n
        data["witness_level"] = rep.refutation.witness_level
    _emit(args, data, str(rep.degree))
    return 0


def cmd_certify(args) -> int:
    if args.cls == "broken-combs":
        frames = [P for P in families.rooted_posets(args.max_size) if families.is_broken_comb(P)]
    elif args.cls == "boolean-sums":
        frames = families.boolean_sums(args.max_size, max_stack=args.max_stack)
    else:
        frames = _frames_for(args)
    FC = frame_closure(frames, _cap("ULTAB_MORPHISM_CAP", DEFAULT_MORPHISM_CAP))
    rep = certify_n_uniform(FC, args.n, args.v_max)
    data = {"n": args.n, "verdict": rep.verdict, "envelope": rep.envelope}
    text = f"{rep.verdict} over {rep.envelope}"
    if rep.witness is not None:
        M, N = rep.witness
        data["witness"] = {"left": fileio.model_to_dict(M), "right": fileio.model_to_dict(N),
                           "level": rep.witness_level}
        text += f"\nwitness at level {rep.witness_level}:\n  {M}\n  {N}"
    _emit(args, data, text)
    return 0


def cmd_repro(args) -> int:
    ids = list(repro.TARGETS) if args.target == "all" else [args.target]
    if args.target != "all" and args.target not in repro.TARGETS:
        raise UsageError(f"unknown target {args.target!r}; known: all, {', '.join(repro.TARGETS)}")
    params = {"n": args.n, "k": args.k, "max": args.max}
    results = []
    for t in ids:
        given = {k: v for k, v in params.items() if v is not None and k in repro.TARGETS[t].params}
        if args.target != "all":
            extra = [k for k, v in params.items() if v is not None and k not in repro.TARGETS[t].params]
            if extra:
                raise UsageError(f"target {t} takes no --{extra[0]}")
        r = repro.run(t, **given)
        results.append(r)
        if not args.json:
            print(r.line(), flush=True)
    if args.json:
        print(json.dumps([r.as_dict() for r in results], indent=2, sort_keys=True))
    return 0 if all(r.passed for r in results) else 1


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    ap = argparse.ArgumentParser(prog="ultab", description="Finite posets, models and uniform local tabularity.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poset", parents=[common], help="inspect a poset file")
    p.add_argument("action", choices=["show", "upsets", "depth", "width", "dot"])
    p.add_argument("file", nargs="?", default="-")
    p.set_defaults(func=cmd_poset)

    p = sub.add_parser("validity", parents=[common], help="frame validity, or truth in a model")
    p.add_argument("formula", nargs="?")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--axiom", choices=[a for a in AXIOM_NAMES if a != "BDn"] + ["BD1", "BD2", "BD3", "BD4"])
    p.set_defaults(func=cmd_validity)

    p = sub.add_parser("jankov", parents=[common], help="is J(Q) refuted on a frame")
    p.add_argument("frame")
    p.add_argument("q")
    p.add_argument("--syntactic", action="store_true", help="also check the formula itself")
    p.set_defaults(func=cmd_jankov)

    for name, func, hlp in (("bisim", cmd_bisim, "(k-)bisimilarity of two models"),
                            ("maxlevel", cmd_maxlevel, "largest k with the roots k-bisimilar")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("left")
        p.add_argument("right")
        if name == "bisim":
            p.add_argument("--k", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("reduce", parents=[common], help="bisimulation quotient of a model")
    p.add_argument("file", nargs="?", default="-")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("degree", parents=[common], help="degree of uniformity of the logic of frames")
    p.add_argument("files", nargs="*")
    p.add_argument("--family", choices=families.FAMILIES)
    _family_args(p)
    p.add_argument("--v-max", type=int, help="concrete variable bound (default: any)")
    p.add_argument("--n-max", type=int, default=12)
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("certify", parents=[common], help="search for n-bisimilar, non-bisimilar models")
    p.add_argument("files", nargs="*")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="cls", choices=["broken-combs", "boolean-sums"])
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--max-stack", type=int)
    p.add_argument("--v-max", type=int)
    p.set_defaults(func=cmd_certify, family=None)

    p = sub.add_parser("family", parents=[common], help="emit a named poset or model")
    p.add_argument("family", choices=families.FAMILIES)
    _family_args(p)
    p.add_argument("--dot", action="store_true", help="Graphviz output instead of JSON")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("repro", parents=[common], help="re-derive a claim (or all)")
    p.add_argument("target", help="all, " + ", ".join(repro.TARGETS))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--max", type=int)
    p.set_defaults(func=cmd_repro)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (UsageError, fileio.SchemaError, FormulaSyntaxError, PosetError, ModelError,
            families.FamilyError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"ultab: error: {msg}", file=sys.stderr)
        return 2
    except (CapExceeded, SearchCapExceeded, bisim.BudgetExceeded) as exc:
        print(f"ultab: cap reached: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
