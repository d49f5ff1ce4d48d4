import pytest

from causalacc import corpus
from causalacc.actual import (Candidate, SearchCapExceeded, but_for, exclude_agent,
                              find_actual_causes, is_actual_cause)
from causalacc.model import ModelError
from causalacc.semantics import functionally_influences

from oracles import oracle_causes

ALL_FALSE = {"U_U": False, "U_V": False, "U_D": False}
BOTH = {"U_a": True, "U_b": True}


def test_uber_a_u_is_cause():
    v = is_actual_cause(corpus.load("uber-a"), ALL_FALSE, "U=false", "P=true")
    assert v.is_cause and v.failed_condition is None
    assert v.witness.intervention == {"U": True}


def test_candidate_rendering():
    assert str(Candidate({"U": False, "D": False})) == "D=false & U=false"


def test_ac1_fails_when_candidate_false():
    v = is_actual_cause(corpus.load("uber-a"), ALL_FALSE, "U=true", "P=true")
    assert not v and v.failed_condition == "AC1"
    v = is_actual_cause(corpus.load("uber-a"), ALL_FALSE, "U=false", "P=false")
    assert v.failed_condition == "AC1"


def test_ac3_reports_subset():
    m = corpus.load("uber-a")
    v = is_actual_cause(m, ALL_FALSE, {"U": False, "D": False}, "P=true")
    assert v.failed_condition == "AC3"
    assert len(v.subset) == 1 and set(v.subset) <= {"U", "D"}


def test_uber_a_causes():
    m = corpus.load("uber-a")
    found = find_actual_causes(m, ALL_FALSE, "P=true", candidates={"D", "U", "V"})
    assert [dict(c.candidate) for c in found] == [{"D": False}, {"U": False}, {"V": False}]


def test_uber_c_d_is_not_a_cause():
    m = corpus.load("uber-c")
    v = is_actual_cause(m, ALL_FALSE, "D=false", "P=true")
    assert v.failed_condition == "AC2"


def test_alice_bob_preemption():
    m = corpus.load("alice-bob")
    assert not but_for(m, BOTH, "AT=true", "AH=true")
    v = is_actual_cause(m, BOTH, "AT=true", "AH=true")
    assert v.is_cause and dict(v.witness.frozen) == {"BR_hits": False}
    assert not is_actual_cause(m, BOTH, "BR=true", "AH=true")


def test_all_witnesses_lists_each_once_in_order():
    m = corpus.load("alice-bob")
    v = is_actual_cause(m, BOTH, "AT=true", "AH=true", all_witnesses=True)
    assert v.witnesses[0] == v.witness
    assert len(set(v.witnesses)) == len(v.witnesses)
    sizes = [len(w.frozen) for w in v.witnesses]
    assert sizes == sorted(sizes)
    for w in v.witnesses:
        assert "BR_hits" in w.frozen


def test_search_cap():
    m = corpus.load("uber-a")
    with pytest.raises(SearchCapExceeded):
        is_actual_cause(m, ALL_FALSE, "U=false", "P=true", max_endogenous=3)
    with pytest.raises(SearchCapExceeded):
        find_actual_causes(m, ALL_FALSE, "P=true", max_endogenous=3)


def test_bad_inputs():
    m = corpus.load("uber-a")
    with pytest.raises(ModelError):
        is_actual_cause(m, ALL_FALSE, {"U_U": False}, "P=true")
    with pytest.raises(ModelError):
        is_actual_cause(m, ALL_FALSE, {}, "P=true")
    with pytest.raises(ModelError):
        but_for(m, ALL_FALSE, {"U": False, "D": False}, "P=true")
    with pytest.raises(ValueError):
        find_actual_causes(m, ALL_FALSE, "P=true", max_size=0)


def test_exclusion_uber_c():
    ex = exclude_agent(corpus.load("uber-c"), "D", "P")
    assert ex.excluded and (ex.contexts_examined, ex.value_pairs) == (8, 1)
    assert ex.counterexample is None


def test_exclusion_counterexample():
    ex = exclude_agent(corpus.load("uber-a"), "D", "P")
    assert not ex.excluded
    u, a1, a2 = ex.counterexample
    assert a1 != a2
    assert ex.to_dict()["counterexample"]["values"] == ["false", "true"]


def test_exclusion_requires_agent():
    with pytest.raises(ModelError):
        exclude_agent(corpus.load("uber-a"), "T", "P")


def test_exclusion_no_path():
    from causalacc.dsl import parse_model
    m = parse_model('model "m" { exogenous U : bool; var A : bool = U; @agent\n'
                    'var E : bool = U; @effect }')
    assert exclude_agent(m, "A", "E").excluded


@pytest.mark.parametrize("name", corpus.NAMES)
def test_exclusion_agrees_with_causes(name):
    # an excluded agent is never an actual cause of any value of the effect
    from causalacc.expr import Eq
    from causalacc.semantics import contexts, solve
    m = corpus.load(name)
    for eff in m.effects:
        for a in m.agents:
            if a == eff or not exclude_agent(m, a, eff):
                continue
            for u in contexts(m):
                actual = solve(m, u)
                assert not is_actual_cause(m, u, {a: actual[a]}, Eq(eff, actual[eff]))


@pytest.mark.parametrize("name", ["uber-a", "uber-c", "alice-bob", "texting"])
def test_causes_match_oracle_on_corpus(name):
    from causalacc.expr import Eq
    from causalacc.semantics import contexts, solve
    m = corpus.load(name)
    for eff in m.effects:
        for u in contexts(m):
            phi = Eq(eff, solve(m, u)[eff])
            got = [dict(c.candidate) for c in find_actual_causes(m, u, phi, max_size=2)]
            assert got == oracle_causes(m, u, phi, 2, m.endogenous)
