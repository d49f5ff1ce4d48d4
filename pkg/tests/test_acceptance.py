"""Acceptance criteria, one test each.

Run with pytest (a PASS/FAIL line per criterion is printed in the summary)
or directly: ``python3 tests/test_acceptance.py``.
"""

import io
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from causalacc import corpus, evaluate, intervene
from causalacc.actual import exclude_agent, find_actual_causes, is_actual_cause
from causalacc.cli import run
from causalacc.dsl import parse_formula, parse_model, serialize
from causalacc.graph import CausalGraph, backdoor_sets, check_backdoor, d_separated
from causalacc.patterns import equivalent, match_pattern

from properties_run import run_property_suite

ALL_FALSE = {"U_U": False, "U_V": False, "U_D": False}

CRITERIA = {
    "test_criterion_1_uber_derivation_one":
        "1 uber-a all-false context: E=S=T=false, P=true",
    "test_criterion_2_uber_derivation_two":
        "2 uber-a [U<-true]: S=T=true, P=false; U=false is an actual cause with W={}",
    "test_criterion_3_uber_variant_c":
        "3 uber-c: [D<-true] keeps P=true; D excluded over 8 contexts; causes {U=false}, {V=false}",
    "test_criterion_4_backdoor":
        "4 back-door: uber-c (S,T) sets [{E},{U}]; Z={} fails via S <- U -> E -> T",
    "test_criterion_5_dsep_truth_table":
        "5 d-separation truth table for chain, fork and collider",
    "test_criterion_6_patterns":
        "6 patterns: RACI fails on uber-a/b/c; Lindberg D in uber-a via D -> [T] -> P, ambiguity {U,V}; fails on uber-c",
    "test_criterion_7_equivalence":
        "7 equivalence: fig12a ~ fig12b on {A,C}; fig13a !~ fig13b, distinguished at A=true",
    "test_criterion_8_property_suites":
        "8 property suites over 1000 random models (fixed seed), zero violations",
    "test_criterion_9_round_trip_and_stable_json":
        "9 DSL round-trip on the corpus; byte-stable JSON across runs",
}


def test_criterion_1_uber_derivation_one():
    a = evaluate(corpus.load("uber-a"), ALL_FALSE)
    assert (a["E"], a["S"], a["T"], a["P"]) == (False, False, False, True)


def test_criterion_2_uber_derivation_two():
    m = corpus.load("uber-a")
    a = evaluate(intervene(m, {"U": True}), ALL_FALSE)
    assert (a["S"], a["T"], a["P"]) == (True, True, False)
    v = is_actual_cause(m, ALL_FALSE, {"U": False}, parse_formula("P=true", m))
    assert v.is_cause
    assert dict(v.witness.frozen) == {}
    assert dict(v.witness.setting) == {"U": True}


def test_criterion_3_uber_variant_c():
    m = corpus.load("uber-c")
    assert evaluate(intervene(m, {"D": True}), ALL_FALSE)["P"] is True
    ex = exclude_agent(m, "D", "P")
    assert ex.excluded and ex.contexts_examined == 8 and ex.value_pairs == 1
    causes = find_actual_causes(m, ALL_FALSE, parse_formula("P=true", m), max_size=3,
                                candidates={"U", "V", "D"})
    assert [dict(c.candidate) for c in causes] == [{"U": False}, {"V": False}]


def test_criterion_4_backdoor():
    m = corpus.load("uber-c")
    assert backdoor_sets(m, "S", "T") == [frozenset({"E"}), frozenset({"U"})]
    v = check_backdoor(m, "S", "T", set())
    assert not v.satisfied
    assert str(v.witness) == "S <- U -> E -> T"


def test_criterion_5_dsep_truth_table():
    chain = CausalGraph([("X", "Z"), ("Z", "Y")])
    fork = CausalGraph([("X", "Y"), ("X", "Z")])
    collider = CausalGraph([("X", "Z"), ("Y", "Z")])
    assert not d_separated(chain, {"X"}, {"Y"}, set()).separated
    assert d_separated(chain, {"X"}, {"Y"}, {"Z"}).separated
    assert not d_separated(fork, {"Y"}, {"Z"}, set()).separated
    assert d_separated(fork, {"Y"}, {"Z"}, {"X"}).separated
    assert d_separated(collider, {"X"}, {"Y"}, set()).separated
    assert not d_separated(collider, {"X"}, {"Y"}, {"Z"}).separated


def test_criterion_6_patterns():
    for name in ("uber-a", "uber-b", "uber-c"):
        r = match_pattern(corpus.load(name), "raci", "P")
        assert r.verdict == "not-matched"
        assert any("missing required roles" in m for m in r.missing)
    r = match_pattern(corpus.load("uber-a"), "lindberg", "P", "D")
    assert r.matched
    assert r.chain_text() == "D -> [T] -> P"
    assert set(r.ambiguity) == {"U", "V"}
    assert not match_pattern(corpus.load("uber-c"), "lindberg", "P", "D").matched


def test_criterion_7_equivalence():
    assert equivalent(corpus.load("fig12a"), corpus.load("fig12b"), {"A", "C"}).equivalent
    r = equivalent(corpus.load("fig13a"), corpus.load("fig13b"), {"A", "C"})
    assert not r.equivalent
    m = corpus.load("fig13a")
    a_true = [d for d in r.differences if evaluate(m, d.context)["A"] is True]
    assert a_true and a_true[0].variable == "C"


def test_criterion_8_property_suites():
    violations = run_property_suite(n_models=1000, seed=20240611)
    assert violations == {k: 0 for k in violations}, violations


def _cli(argv):
    buf = io.StringIO()
    code = run(argv, stdout=buf, stderr=io.StringIO())
    return code, buf.getvalue()


def test_criterion_9_round_trip_and_stable_json():
    for name in corpus.NAMES:
        m = corpus.load(name)
        assert parse_model(serialize(m)) == m, name
    argvs = [
        ["eval", "-m", "uber-a", "-c", "U_U=false,U_V=false,U_D=false", "--json"],
        ["check", "-m", "uber-c", "--pattern", "lindberg", "--json"],
        ["causes", "-m", "uber-a", "-c", "U_U=false,U_V=false,U_D=false", "--phi", "P=true",
         "--max-size", "2", "--json"],
    ]
    for argv in argvs:
        first, second = _cli(argv), _cli(argv)
        assert first == second
        assert first[0] == 0
        doc = json.loads(first[1])
        assert json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n" == first[1]


if __name__ == "__main__":
    failed = 0
    for name, title in CRITERIA.items():
        try:
            globals()[name]()
            print(f"PASS  {title}")
        except AssertionError as e:
            failed += 1
            print(f"FAIL  {title}: {e}")
    sys.exit(1 if failed else 0)
