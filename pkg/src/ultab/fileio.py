"""JSON files for posets and models, and DOT export of Hasse diagrams.

Poset file: {"worlds": [...], "covers": [[a, b], ...], "root": optional}
where each pair a, b says b covers a. A model file adds "vars" and
"colors" (world -> bitstring, character i for vars[i]).
"""
from __future__ import annotations

import json
from typing import Any

from .poset import Poset, PosetError
from .semantics import Model, ModelError


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _world_out(w):
    return w if isinstance(w, (str, int)) and not isinstance(w, bool) else str(w)


def poset_to_dict(P: Poset) -> dict:
    d: dict[str, Any] = {
        "worlds": [_world_out(w) for w in P.worlds],
        "covers": [[_world_out(a), _world_out(b)] for a, b in P.cover_pairs()],
    }
    if P.root is not None:
        d["root"] = _world_out(P.root)
    return d


def model_to_dict(M: Model) -> dict:
    d = poset_to_dict(M.frame)
    d["vars"] = list(M.vars)
    d["colors"] = {str(_world_out(w)): M.color_str(w) for w in M.worlds}
    return d


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaError(path, message)


def poset_from_dict(d: Any, path: str = "$") -> Poset:
    _expect(isinstance(d, dict), path, "expected an object")
    extra = set(d) - {"worlds", "covers", "root", "vars", "colors"}
    _expect(not extra, path, f"unknown keys {sorted(extra)}")
    worlds = d.get("worlds")
    _expect(isinstance(worlds, list), f"{path}.worlds", "expected a list")
    for i, w in enumerate(worlds):
        _expect(isinstance(w, (str, int)) and not isinstance(w, bool),
                f"{path}.worlds[{i}]", "world names must be strings or integers")
    _expect(len(set(worlds)) == len(worlds), f"{path}.worlds", "duplicate world names")
    known = set(worlds)
    covers = d.get("covers", [])
    _expect(isinstance(covers, list), f"{path}.covers", "expected a list")
    pairs = []
    for i, e in enumerate(covers):
        p = f"{path}.covers[{i}]"
        _expect(isinstance(e, list) and len(e) == 2, p, "expected a pair [lower, upper]")
        for k, w in enumerate(e):
            _expect(w in known, f"{p}[{k}]", f"unknown world {w!r}")
        pairs.append((e[0], e[1]))
    root = d.get("root")
    if root is not None:
        _expect(root in known, f"{path}.root", f"unknown world {root!r}")
    try:
        return Poset.from_covers(worlds, pairs, root)
    except PosetError as exc:
        raise SchemaError(f"{path}.covers", str(exc)) from None


def model_from_dict(d: Any, path: str = "$") -> Model:
    P = poset_from_dict(d, path)
    vars = d.get("vars")
    _expect(isinstance(vars, list) and all(isinstance(v, str) for v in vars),
            f"{path}.vars", "expected a list of variable names")
    colors = d.get("colors")
    _expect(isinstance(colors, dict), f"{path}.colors", "expected an object")
    by_name = {str(w): w for w in P.worlds}
    cols = {}
    for key, c in colors.items():
        p = f"{path}.colors.{key}"
        _expect(key in by_name, p, "unknown world")
        _expect(isinstance(c, str) and len(c) == len(vars) and set(c) <= {"0", "1"}, p,
                f"expected a bitstring of length {len(vars)}")
        cols[by_name[key]] = c
    missing = [str(w) for w in P.worlds if w not in cols]
    _expect(not missing, f"{path}.colors", f"missing colors for {missing}")
    try:
        return Model(P, vars, cols)
    except ModelError as exc:
        raise SchemaError(f"{path}.colors", str(exc)) from None


def is_model_dict(d: Any) -> bool:
    return isinstance(d, dict) and ("colors" in d or "vars" in d)


def from_dict(d: Any, path: str = "$"):
    return model_from_dict(d, path) if is_model_dict(d) else poset_from_dict(d, path)


def loads(text: str, path: str = "$"):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    return from_dict(d, path)


def load(filename: str):
    with open(filename, encoding="utf-8") as fh:
        return loads(fh.read(), filename)


def dumps(obj) -> str:
    d = model_to_dict(obj) if isinstance(obj, Model) else poset_to_dict(obj)
    return json.dumps(d, indent=2, sort_keys=True)


def save(obj, filename: str) -> None:
    with open(filename, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj) + "\n")


def _quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(obj, name: str = "P") -> str:
    """Hasse diagram with the maximal points on top and one rank per depth."""
    M = obj if isinstance(obj, Model) else None
    P = M.frame if M else obj
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for w in P.worlds:
        label = _quote(w)[:-1] + (f"\\n{M.color_str(w)}" if M and M.vars else "") + '"'
        lines.append(f"  {_quote(w)} [label={label}];")
    ranks: dict[int, list] = {}
    for w, d in zip(P.worlds, P.depths()):
        ranks.setdefault(d, []).append(w)
    for d in sorted(ranks):
        lines.append("  { rank=same; " + " ".join(_quote(w) + ";" for w in ranks[d]) + " }")
    for a, b in P.cover_pairs():
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
