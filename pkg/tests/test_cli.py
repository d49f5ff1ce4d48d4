import io
import json

import pytest

from causalacc import corpus, evaluate
from causalacc.model import format_value
from causalacc.cli import run
from causalacc.semantics import contexts

CTX = "U_U=false,U_V=false,U_D=false"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def cli_json(*argv):
    code, out, _ = cli(*argv, "--json")
    doc = json.loads(out)
    assert doc["exit_code"] == code
    return doc


def test_eval_human():
    code, out, _ = cli("eval", "-m", "uber-a", "-c", CTX)
    assert code == 0
    assert "P = true" in out and "T = false" in out


def test_intervene():
    doc = cli_json("intervene", "-m", "uber-a", "-c", CTX, "--do", "U=true")
    assert doc["result"]["assignment"]["P"] == "false"


def test_cause_human_and_json():
    code, out, _ = cli("cause", "-m", "uber-a", "-c", CTX, "--candidate", "U=false",
                       "--phi", "P=true")
    assert code == 0
    assert out.splitlines()[0] == "U=false is an actual cause of P=true"
    doc = cli_json("cause", "-m", "uber-a", "-c", CTX, "--candidate", "U=false",
                   "--phi", "P=true")
    assert doc["result"]["is_cause"] is True
    assert doc["result"]["witness"] == {"W": {}, "x_prime": {"U": "true"}}


def test_causes_uber_c():
    doc = cli_json("causes", "-m", "uber-c", "-c", CTX, "--phi", "P=true",
                   "--among", "U,V,D", "--max-size", "3")
    assert [c["candidate"] for c in doc["result"]["causes"]] == [{"U": "false"},
                                                                 {"V": "false"}]


def test_butfor_alice_bob():
    doc = cli_json("butfor", "-m", "alice-bob", "-c", "U_a=true,U_b=true",
                   "--candidate", "AT=true", "--phi", "AH=true")
    assert doc["result"]["but_for"] is False


def test_backdoor_enumerates_and_checks():
    doc = cli_json("backdoor", "-m", "uber-c", "-x", "S", "-y", "T")
    assert doc["result"]["sets"] == [["E"], ["U"]]
    code, out, _ = cli("backdoor", "-m", "uber-c", "-x", "S", "-y", "T", "-z", "")
    assert code == 0 and "S <- U -> E -> T" in out


def test_dsep_and_frontdoor():
    doc = cli_json("dsep", "-m", "uber-c", "-x", "S", "-y", "T", "-z", "U,E")
    assert doc["result"]["separated"] is False
    assert cli("frontdoor", "-m", "uber-c", "-x", "S", "-y", "P", "-z", "T")[0] == 0


def test_match_and_check():
    doc = cli_json("match", "-m", "uber-a", "--pattern", "lindberg", "--effect", "P",
                   "--agent", "D")
    assert doc["result"]["verdict"] == "matched-with-obligations"
    doc = cli_json("check", "-m", "uber-c", "--pattern", "lindberg")
    assert doc["result"]["status"] == "resolved"
    assert doc["result"]["candidates"] == ["U"]


def test_exclude_project_compare():
    doc = cli_json("exclude", "-m", "uber-c", "--agent", "D", "--effect", "P")
    assert doc["result"]["excluded"] is True
    code, out, _ = cli("project", "-m", "fig12b", "--keep", "A,C")
    assert code == 0 and "B" not in out.replace("fig12b", "")
    doc = cli_json("compare", "-m", "fig13a", "-m", "fig13b", "--shared", "A,C")
    assert doc["result"]["equivalent"] is False


def test_validate():
    assert cli("validate", "-m", "uber-a")[0] == 0


def test_dot_to_file(tmp_path):
    target = tmp_path / "g.dot"
    code, out, _ = cli("dot", "-m", "uber-a", "--dot", str(target))
    assert code == 0
    text = target.read_text()
    assert text.startswith('digraph "uber-a"') and '"S" -> "T";' in text


def test_usage_errors():
    assert cli()[0] == 1
    assert cli("eval")[0] == 1
    assert cli("compare", "-m", "fig12a", "--shared", "A")[0] == 1
    assert cli("bogus", "-m", "uber-a")[0] == 1
    doc = cli_json("compare", "-m", "fig12a", "--shared", "A")
    assert doc["exit_code"] == 1 and doc["result"] is None and doc["error"]


def test_model_errors(tmp_path):
    bad = tmp_path / "bad.scm"
    bad.write_text('model "b" { var X : bool = ; }')
    code, _, err = cli("validate", "-m", str(bad))
    assert code == 2 and "error" in err
    doc = cli_json("validate", "-m", str(bad))
    assert doc["diagnostics"] and doc["diagnostics"][0]["span"]["line"] == 1
    assert cli("eval", "-m", "no-such-model")[0] == 1
    assert cli("cause", "-m", "uber-a", "-c", CTX, "--candidate", "Q=true",
               "--phi", "P=true")[0] == 2


def test_search_cap_exit(tmp_path):
    lines = ['model "long" {', "  exogenous U : bool;", "  var X0 : bool = U;"]
    lines += [f"  var X{i} : bool = X{i - 1};" for i in range(1, 18)]
    lines.append("}")
    big = tmp_path / "long.scm"
    big.write_text("\n".join(lines) + "\n")
    code, _, err = cli("cause", "-m", str(big), "-c", "U=true", "--candidate", "X0=true",
                       "--phi", "X17=true")
    assert code == 3 and "search cap" in err


def test_json_is_canonical_and_stable():
    argv = ("check", "-m", "uber-a", "--pattern", "lindberg", "--json")
    a, b = cli(*argv), cli(*argv)
    assert a == b
    doc = json.loads(a[1])
    assert json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n" == a[1]
    assert set(doc) == {"command", "inputs", "result", "diagnostics", "exit_code"}


def test_no_color(monkeypatch):
    class Tty(io.StringIO):
        def isatty(self):
            return True

    monkeypatch.setenv("NO_COLOR", "1")
    out = Tty()
    run(["cause", "-m", "uber-a", "-c", CTX, "--candidate", "U=false", "--phi", "P=true"],
        out, io.StringIO())
    assert "\x1b[" not in out.getvalue()
    monkeypatch.delenv("NO_COLOR")
    out = Tty()
    run(["cause", "-m", "uber-a", "-c", CTX, "--candidate", "U=false", "--phi", "P=true"],
        out, io.StringIO())
    assert "\x1b[" in out.getvalue()


@pytest.mark.parametrize("name", [n for n in corpus.NAMES if corpus.load(n).effects])
def test_human_and_json_verdicts_agree(name):
    m = corpus.load(name)
    eff = m.effects[0]
    for u in contexts(m):
        ctx = ",".join(f"{k}={format_value(v)}" for k, v in u.items())
        actual = evaluate(m, u)
        for a in m.agents:
            argv = ("cause", "-m", name, "-c", ctx,
                    "--candidate", f"{a}={format_value(actual[a])}",
                    "--phi", f"{eff}={format_value(actual[eff])}")
            code, out, _ = cli(*argv)
            human = "is an actual cause" in out.splitlines()[0]
            assert cli_json(*argv)["result"]["is_cause"] is human
            assert code == 0
