"""Actual causation under the modified Halpern-Pearl definition.

A candidate ``X = x`` is an actual cause of ``phi`` in ``(M, u)`` when

* AC1: both ``X = x`` and ``phi`` hold in ``(M, u)``;
* AC2: for some set ``W`` of other endogenous variables, with ``w`` their
  actual values, and some setting ``x'`` of ``X``,
  ``(M, u) |= [X <- x', W <- w] !phi``;
* AC3: no proper nonempty part of ``X = x`` satisfies AC1 and AC2.

Searches are exhaustive and run in a canonical order: ``W`` by size then
name, ``x'`` by domain order.  Nothing is truncated silently; a model that is
too large raises :class:`SearchCapExceeded`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .expr import Eq, Expr, compile_expr
from .model import CausalModel, ModelError, format_value
from .semantics import (FrozenMap, Influence, SearchCapExceeded, check_context,
                        check_formula, functionally_influences, solve)

#: Exhaustive mode refuses models with more endogenous variables than this.
MAX_ENDOGENOUS = 16


class Candidate(FrozenMap):
    """A conjunction of primitive events over distinct endogenous variables."""

    def __str__(self) -> str:
        return " & ".join(f"{k}={format_value(v)}" for k, v in self.items())


@dataclass(frozen=True)
class Witness:
    """``W`` frozen at its actual values, together with the alternative ``x'``."""

    frozen: FrozenMap
    setting: FrozenMap

    @property
    def intervention(self) -> Dict[str, object]:
        out = dict(self.frozen)
        out.update(self.setting)
        return out

    def to_dict(self) -> dict:
        return {"W": self.frozen.to_dict(), "x_prime": self.setting.to_dict()}


@dataclass(frozen=True)
class CauseVerdict:
    is_cause: bool
    candidate: Candidate
    failed_condition: Optional[str] = None   # "AC1", "AC2" or "AC3"
    witness: Optional[Witness] = None
    reason: str = ""
    # the smaller conjunction that already passes AC2 when AC3 fails
    subset: Optional[Candidate] = None
    witnesses: Tuple[Witness, ...] = ()

    def __bool__(self) -> bool:
        return self.is_cause

    def to_dict(self) -> dict:
        out = {"candidate": self.candidate.to_dict(), "is_cause": self.is_cause,
               "failed_condition": self.failed_condition,
               "witness": self.witness.to_dict() if self.witness else None,
               "reason": self.reason}
        if self.subset is not None:
            out["subset"] = self.subset.to_dict()
        if self.witnesses:
            out["witnesses"] = [w.to_dict() for w in self.witnesses]
        return out


@dataclass(frozen=True)
class Cause:
    candidate: Candidate
    witness: Witness

    def to_dict(self) -> dict:
        return {"candidate": self.candidate.to_dict(), "witness": self.witness.to_dict()}


def _formula(model: CausalModel, formula: Union[str, Expr]) -> Expr:
    if isinstance(formula, str):
        from .dsl.parser import parse_formula
        formula = parse_formula(formula, model)
    check_formula(model, formula)
    return formula


def _candidate(model: CausalModel, candidate) -> Candidate:
    if isinstance(candidate, str):
        from .dsl.parser import parse_pairs
        candidate = parse_pairs(candidate, model)
    if isinstance(candidate, Eq):
        candidate = {candidate.var: candidate.value}
    if not candidate:
        raise ModelError("a candidate cause needs at least one primitive event")
    for name, value in candidate.items():
        if model.variable(name).exogenous:
            raise ModelError(f"candidate variable {name} is exogenous")
        if value not in model.domain_of(name):
            raise ModelError(f"value {format_value(value)} is not in the domain of {name}")
    return candidate if isinstance(candidate, Candidate) else Candidate(candidate)


def _check_size(model: CausalModel, cap: int) -> None:
    n = len(model.endogenous)
    if n > cap:
        raise SearchCapExceeded(f"{n} endogenous variables exceed the exhaustive-search "
                                f"cap of {cap}")


def _ac2_witnesses(model: CausalModel, u, actual: Mapping, xs: Sequence[str],
                   phi) -> Iterator[Witness]:
    """AC2 witnesses for the variables ``xs`` in canonical order."""
    xs = sorted(xs)
    others = [n for n in model.endogenous if n not in xs]
    natural = tuple(actual[x] for x in xs)
    settings = [s for s in itertools.product(*(model.domain_of(x).values for x in xs))
                if s != natural]
    for size in range(len(others) + 1):
        for ws in itertools.combinations(others, size):
            frozen = {w: actual[w] for w in ws}
            for s in settings:
                fixed = dict(frozen)
                fixed.update(zip(xs, s))
                if not phi(solve(model, u, fixed)):
                    yield Witness(FrozenMap(frozen), FrozenMap(zip(xs, s)))


def _first(it):
    return next(iter(it), None)


def is_actual_cause(model: CausalModel, context, candidate, formula,
                    all_witnesses: bool = False,
                    max_endogenous: int = MAX_ENDOGENOUS) -> CauseVerdict:
    """Decide whether ``candidate`` is an actual cause of ``formula`` at ``context``.

    The reported witness uses the smallest ``W`` (then name order, then domain
    order for ``x'``).  With ``all_witnesses`` every AC2 witness is listed.
    """
    model.require_valid()
    u = check_context(model, context)
    cand = _candidate(model, candidate)
    phi_expr = _formula(model, formula)
    _check_size(model, max_endogenous)
    phi = compile_expr(phi_expr)
    actual = solve(model, u)

    if any(actual[k] != v for k, v in cand.items()):
        wrong = [k for k, v in cand.items() if actual[k] != v]
        return CauseVerdict(False, cand, "AC1", reason=(
            "candidate does not hold: " + ", ".join(
                f"{k}={format_value(actual[k])}" for k in wrong)))
    if not phi(actual):
        return CauseVerdict(False, cand, "AC1", reason="the formula does not hold in this context")

    found = _ac2_witnesses(model, u, actual, list(cand), phi)
    if all_witnesses:
        witnesses = tuple(found)
        witness = witnesses[0] if witnesses else None
    else:
        witnesses = ()
        witness = _first(found)
    if witness is None:
        return CauseVerdict(False, cand, "AC2", reason=(
            "no setting of the candidate flips the formula, whatever is held fixed"))

    names = list(cand)
    for size in range(1, len(names)):
        for sub in itertools.combinations(names, size):
            if _first(_ac2_witnesses(model, u, actual, sub, phi)) is not None:
                part = Candidate({k: cand[k] for k in sub})
                return CauseVerdict(False, cand, "AC3", subset=part, reason=(
                    f"the smaller conjunction {part} already satisfies AC1 and AC2"))
    return CauseVerdict(True, cand, None, witness, "AC1, AC2 and AC3 hold",
                        witnesses=witnesses)


def find_actual_causes(model: CausalModel, context, formula, max_size: int = 1,
                       candidates: Optional[Iterable[str]] = None,
                       max_endogenous: int = MAX_ENDOGENOUS) -> List[Cause]:
    """All minimal actual causes of ``formula`` with at most ``max_size`` conjuncts.

    Candidates are drawn from ``candidates`` (default every endogenous
    variable) at their actual values, ordered by size and then by name.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    model.require_valid()
    u = check_context(model, context)
    phi_expr = _formula(model, formula)
    _check_size(model, max_endogenous)
    if candidates is None:
        pool = list(model.endogenous)
    else:
        pool = sorted(set(candidates))
        for name in pool:
            if model.variable(name).exogenous:
                raise ModelError(f"candidate variable {name} is exogenous")
    phi = compile_expr(phi_expr)
    actual = solve(model, u)
    if not phi(actual):
        return []
    out: List[Cause] = []
    for size in range(1, min(max_size, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            # a superset of a cause fails AC3 and so does any superset of a
            # smaller AC2 set, which always contains a cause found earlier
            if any(set(c.candidate) <= set(combo) for c in out):
                continue
            w = _first(_ac2_witnesses(model, u, actual, combo, phi))
            if w is not None:
                out.append(Cause(Candidate({k: actual[k] for k in combo}), w))
    return out


def but_for(model: CausalModel, context, candidate, formula) -> bool:
    """The simple counterfactual test: AC2 with ``W`` empty, for one event."""
    model.require_valid()
    u = check_context(model, context)
    cand = _candidate(model, candidate)
    if len(cand) != 1:
        raise ModelError("the but-for test takes a single primitive event")
    phi = compile_expr(_formula(model, formula))
    actual = solve(model, u)
    (name, value), = cand.items()
    if actual[name] != value or not phi(actual):
        return False
    return any(not phi(solve(model, u, {name: alt}))
               for alt in model.domain_of(name).values if alt != value)


@dataclass(frozen=True)
class Exclusion:
    """Outcome of trying to rule an agent out as a cause of an effect.

    ``excluded`` is backed either by the exhaustive check record
    (``contexts_examined`` x ``value_pairs``) or refuted by ``counterexample``.
    """

    excluded: bool
    agent: str
    effect: str
    contexts_examined: int
    value_pairs: int
    counterexample: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.excluded

    @classmethod
    def from_influence(cls, inf: Influence) -> "Exclusion":
        return cls(not inf.influences, inf.source, inf.target, inf.contexts_examined,
                   inf.value_pairs, inf.witness)

    def to_dict(self) -> dict:
        out = {"excluded": self.excluded, "agent": self.agent, "effect": self.effect,
               "contexts_examined": self.contexts_examined,
               "value_pairs": self.value_pairs, "counterexample": None}
        if self.counterexample is not None:
            u, a1, a2 = self.counterexample
            out["counterexample"] = {"context": u.to_dict(),
                                     "values": [format_value(a1), format_value(a2)]}
        return out


def exclude_agent(model: CausalModel, agent: str, effect: str) -> Exclusion:
    """Prove that ``agent`` cannot influence ``effect``, or give a counterexample."""
    model.require_valid()
    if not model.variable(agent).is_agent:
        raise ModelError(f"{agent} is not annotated @agent")
    return Exclusion.from_influence(functionally_influences(model, agent, effect))
