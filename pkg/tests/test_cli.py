import io
import json

import pytest

from ultab.cli import main
from ultab.fileio import loads


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    made = {}
    for key, argv in {
        "fork": ["family", "fork", "--n", "2"],
        "chain": ["family", "chain", "--n", "2"],
        "q8": ["family", "q", "--i", "8"],
        "m": ["family", "m", "--n", "4", "--k", "2"],
        "n": ["family", "n", "--n", "4", "--k", "1"],
    }.items():
        code, out, _ = run(capsys, *argv)
        assert code == 0
        path = tmp_path / f"{key}.json"
        path.write_text(out)
        made[key] = str(path)
    return made


def test_family_piped_into_width(capsys, monkeypatch):
    code, out, _ = run(capsys, "family", "q", "--i", "8")
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(out))
    code, out, _ = run(capsys, "poset", "width")
    assert code == 0 and out.strip() == "3"


def test_poset_json(capsys, files):
    code, out, _ = run(capsys, "poset", "depth", files["q8"], "--json")
    assert code == 0 and json.loads(out) == {"depth": 2}
    code, out, _ = run(capsys, "poset", "upsets", files["fork"], "--json")
    assert len(json.loads(out)["upsets"]) == 5


def test_dot(capsys, files):
    code, out, _ = run(capsys, "poset", "dot", files["q8"])
    assert code == 0 and out.count("->") == 3


def test_family_output_loads(capsys):
    code, out, _ = run(capsys, "family", "boolean-sum", "--sizes", "2,2,1")
    assert code == 0 and len(loads(out)) == 5


def test_validity(capsys, files):
    code, out, _ = run(capsys, "validity", "--axiom", "LC", files["chain"])
    assert code == 0 and out.startswith("valid")
    code, out, _ = run(capsys, "validity", "p | ~p", files["fork"], "--json")
    assert code == 0 and json.loads(out)["results"][0]["valid"] is False


def test_jankov(capsys, files):
    code, out, _ = run(capsys, "jankov", files["fork"], files["chain"], "--json")
    assert code == 0 and json.loads(out)["refutes"] is True
    code, out, _ = run(capsys, "jankov", files["chain"], files["fork"], "--json")
    assert json.loads(out)["refutes"] is False


def test_bisim_and_maxlevel(capsys, files):
    code, out, _ = run(capsys, "maxlevel", files["m"], files["n"], "--json")
    assert code == 0 and json.loads(out)["max_level"] == 2
    code, out, _ = run(capsys, "bisim", files["m"], files["n"], "--k", "2", "--json")
    assert json.loads(out)["bisimilar"] is True
    code, out, _ = run(capsys, "bisim", files["m"], files["n"], "--k", "3")
    assert code == 0 and "not" in out


def test_reduce(capsys, files):
    code, out, _ = run(capsys, "reduce", files["m"])
    assert code == 0 and len(loads(out)) == 7


def test_degree(capsys):
    code, out, _ = run(capsys, "degree", "--family", "p-star", "--n", "1")
    assert code == 0 and out.split()[0] == "2"
    code, out, _ = run(capsys, "degree", "--family", "fork", "--n", "2", "--json")
    assert json.loads(out)["degree"] == 2


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--class", "broken-combs", "--max-size", "6", "--n", "3")
    assert code == 0 and "certified(3)" in out


def test_repro_lemma(capsys):
    code, out, _ = run(capsys, "repro", "lemma-mn", "--n", "4", "--k", "2")
    assert code == 0 and out.startswith("[PASS]") and out.rstrip().split(" (")[0].endswith("-> 2")


def test_repro_json_is_stable(capsys):
    _, a, _ = run(capsys, "repro", "figure2", "--json")
    _, b, _ = run(capsys, "repro", "figure2", "--json")
    da, db = json.loads(a), json.loads(b)
    for d in (da, db):
        for r in d:
            r.pop("seconds", None)
    assert da == db


class TestExitCodes:
    def test_usage(self, capsys):
        assert main([]) == 2
        assert main(["nosuch"]) == 2
        capsys.readouterr()

    def test_unknown_target(self, capsys):
        code, _, err = run(capsys, "repro", "nosuch")
        assert code == 2 and "unknown target" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "poset", "show", "/nonexistent/x.json")
        assert code == 2 and err

    def test_schema_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"worlds": ["a", "b"], "covers": [["a", "b"], ["b", "a"]]}')
        code, _, err = run(capsys, "poset", "show", str(bad))
        assert code == 2 and ".covers: cycle" in err

    def test_help(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()


def test_failing_repro_exits_1(capsys, monkeypatch):
    from ultab import repro
    broken = repro.ReproTarget("broken", "always fails", lambda: (False, "nope", {"counterexample": 1}))
    monkeypatch.setitem(repro.TARGETS, "broken", broken)
    code, out, _ = run(capsys, "repro", "broken", "--json")
    assert code == 1 and json.loads(out)[0]["evidence"]["counterexample"] == 1
