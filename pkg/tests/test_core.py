import pytest

from causalacc import (BOOL, CausalModel, Domain, ModelError, Variable, contexts, evaluate,
                       functionally_influences, intervene, satisfies, topological_order,
                       validate)
from causalacc import corpus
from causalacc.dsl import parse, parse_formula, parse_model
from causalacc.expr import And, Const, Eq, Not, Var
from causalacc.model import ENDOGENOUS, EXOGENOUS
from causalacc.semantics import MAX_CONTEXTS, SearchCapExceeded, count_contexts

ALL_FALSE = {"U_U": False, "U_V": False, "U_D": False}


def codes(diags):
    return [d.code for d in diags]


def test_uber_a_is_valid():
    assert validate(corpus.load("uber-a")) == []


def test_cycle_reported():
    m = CausalModel("c", [Variable("X", ENDOGENOUS), Variable("Y", ENDOGENOUS)],
                    {"X": Var("Y"), "Y": Var("X")})
    diags = validate(m)
    assert codes(diags) == ["cycle"]
    assert set(diags[0].variables) == {"X", "Y"}


def test_undefined_reference_reported():
    m = CausalModel("q", [Variable("X", ENDOGENOUS)], {"X": Var("Q")})
    diags = validate(m)
    assert codes(diags) == ["undefined-ref"]
    assert "Q" in diags[0].variables


def test_missing_equation():
    m = CausalModel("m", [Variable("X", ENDOGENOUS)], {})
    assert codes(validate(m)) == ["missing-equation"]


def test_domain_mismatch():
    lvl = Domain("lvl", ("lo", "hi"))
    m = CausalModel("m", [Variable("Y", ENDOGENOUS, "lvl")], {"Y": Const(True)}, [lvl])
    assert codes(validate(m)) == ["domain-mismatch"]


def test_isolated_exogenous_is_only_a_warning():
    m = CausalModel("w", [Variable("U", EXOGENOUS), Variable("X", ENDOGENOUS)],
                    {"X": Const(True)})
    assert validate(m) == []
    assert codes(validate(m, include_warnings=True)) == ["isolated-exogenous"]


def test_evaluate_uber_a_all_false():
    a = evaluate(corpus.load("uber-a"), ALL_FALSE)
    assert (a["E"], a["S"], a["T"], a["P"]) == (False, False, False, True)


def test_evaluate_uber_a_uber_acts():
    a = evaluate(corpus.load("uber-a"), {"U_U": True, "U_V": False, "U_D": False})
    assert (a["S"], a["E"], a["T"], a["P"]) == (True, False, True, False)


def test_evaluate_identity():
    m = parse_model("model m { exogenous U_X : bool; var X : bool = U_X; }")
    for v in (False, True):
        assert evaluate(m, {"U_X": v})["X"] is v


@pytest.mark.parametrize("ctx", [{}, {"U_U": False, "U_V": False},
                                 {"U_U": False, "U_V": False, "U_D": False, "Q": True},
                                 {"U_U": "yes", "U_V": False, "U_D": False}])
def test_evaluate_rejects_bad_context(ctx):
    with pytest.raises(ModelError):
        evaluate(corpus.load("uber-a"), ctx)


def test_intervene_uber_a():
    a = evaluate(intervene(corpus.load("uber-a"), {"U": True}), ALL_FALSE)
    assert a["T"] is True and a["P"] is False


def test_intervene_uber_c_driver_powerless():
    a = evaluate(intervene(corpus.load("uber-c"), {"D": True}), ALL_FALSE)
    assert a["T"] is False and a["P"] is True


def test_intervened_variable_has_no_parents():
    m = intervene(corpus.load("uber-a"), {"T": True})
    assert m.parents("T") == ()
    assert corpus.load("uber-a").equation("E") == m.equation("E")


def test_intervene_on_exogenous_refused():
    with pytest.raises(ModelError, match="different context"):
        intervene(corpus.load("uber-a"), {"U_U": True})


def test_null_intervention():
    m = corpus.load("uber-a")
    for u in contexts(m):
        a = evaluate(m, u)
        for x in m.endogenous:
            assert evaluate(intervene(m, {x: a[x]}), u) == a


def test_satisfies():
    a = corpus.load("uber-a")
    assert satisfies(a, ALL_FALSE, parse_formula("P=true", a))
    assert not satisfies(a, ALL_FALSE, parse_formula("P=true & !(P=true)", a))
    b = corpus.load("uber-b")
    assert satisfies(b, ALL_FALSE, parse_formula("T=false & P=true", b))


def test_satisfies_rejects_non_formula():
    a = corpus.load("uber-a")
    with pytest.raises(ModelError):
        satisfies(a, ALL_FALSE, Var("P"))
    with pytest.raises(ModelError):
        satisfies(a, ALL_FALSE, Eq("U_U", True))


def test_topological_order_examples():
    assert topological_order(corpus.load("uber-a")) == ["D", "U", "V", "E", "S", "T", "P"]
    chain = parse_model("model c { var C : bool = B; var B : bool = A; var A : bool = true; }")
    assert topological_order(chain) == ["A", "B", "C"]
    indep = parse_model("model i { var Y : bool = true; var X : bool = false; }")
    assert topological_order(indep) == ["X", "Y"]


def test_topological_order_parents_first_on_corpus():
    for name in corpus.NAMES:
        m = corpus.load(name)
        order = topological_order(m)
        pos = {n: i for i, n in enumerate(order)}
        for p, c in m.edges:
            if p in pos:
                assert pos[p] < pos[c]


def test_functional_influence():
    inf = functionally_influences(corpus.load("uber-c"), "D", "T")
    assert not inf.influences and inf.witness is None
    inf = functionally_influences(corpus.load("uber-a"), "D", "T")
    assert inf.influences
    u, a1, a2 = inf.witness
    a = evaluate(corpus.load("uber-a"), u)
    assert a["S"] is False and a["E"] is False
    assert {a1, a2} == {False, True}


def test_influence_requires_distinct_endogenous():
    m = corpus.load("uber-a")
    with pytest.raises(ModelError):
        functionally_influences(m, "D", "D")
    with pytest.raises(ModelError):
        functionally_influences(m, "U_D", "T")


def test_contexts_canonical_order():
    m = corpus.load("uber-a")
    cs = list(contexts(m))
    assert len(cs) == 8 == count_contexts(m)
    assert dict(cs[0]) == ALL_FALSE
    assert dict(cs[1]) == {"U_D": False, "U_U": False, "U_V": True}


def test_context_cap_is_explicit():
    m = corpus.load("uber-a")
    with pytest.raises(SearchCapExceeded):
        list(contexts(m, limit=4))
    assert MAX_CONTEXTS == 2 ** 24


def test_enum_domain_and_case():
    m = parse_model("""
    model light {
      domain Light { red, yellow, green }
      exogenous U_L : Light;
      var L : Light = U_L;
      var Go : bool = case L { green => true, _ => false };
    }""")
    assert [evaluate(m, {"U_L": v})["Go"] for v in ("red", "yellow", "green")] == \
        [False, False, True]


def test_domain_invariants():
    with pytest.raises(ValueError):
        Domain("empty", ())
    with pytest.raises(ValueError):
        Domain("dup", ("a", "a"))
    assert True in BOOL and 1 not in BOOL


def test_model_is_immutable_value():
    m = corpus.load("uber-a")
    eqs = m.equations
    eqs["P"] = Const(False)
    assert m.equation("P") != Const(False)
    assert m == corpus.load("uber-a") and hash(m) == hash(corpus.load("uber-a"))
