"""The four-step accountability guideline.

1. fix the effect for which accountability is desired;
2. identify the valid agents;
3. choose the accountability definition (a pattern);
4. check the pattern for every agent, collecting exclusions, ambiguity
   and remediation hints.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from ..actual import Exclusion, exclude_agent
from ..expr import Case, Eq, Expr, If, Not, Var
from ..model import CausalModel, ModelError, format_value
from ..semantics import contexts, solve
from .match import NOT_MATCHED, MatchReport, _resolve_pattern, match_pattern
from .definitions import Pattern

# overall outcomes
UNAMBIGUOUS = "unambiguous"        # exactly one agent influences the effect and matches
RESOLVED = "resolved"              # several influence it, but only one is ungated
AMBIGUOUS = "ambiguous"
IMPOSSIBLE = "impossible"          # the pattern cannot be found for any agent
NO_AGENT = "no-accountable-agent"


@dataclass(frozen=True)
class Condition:
    """A value another agent always has whenever ``agent`` influences the effect."""

    agent: str
    variable: str
    value: object

    def __str__(self) -> str:
        return f"{self.variable}={format_value(self.value)}"


@dataclass(frozen=True)
class AgentFinding:
    agent: str
    match: MatchReport
    exclusion: Exclusion
    conditions: Tuple[Condition, ...] = ()
    gated_by: Tuple[str, ...] = ()

    @property
    def influences(self) -> bool:
        return not self.exclusion.excluded

    def to_dict(self) -> dict:
        return {"agent": self.agent, "verdict": self.match.verdict,
                "influences": self.influences,
                "conditions": [str(c) for c in self.conditions],
                "gated_by": list(self.gated_by),
                "match": self.match.to_dict(), "exclusion": self.exclusion.to_dict()}


@dataclass(frozen=True)
class Step:
    number: int
    title: str
    lines: Tuple[str, ...]

    def to_dict(self) -> dict:
        return {"step": self.number, "title": self.title, "lines": list(self.lines)}


@dataclass(frozen=True)
class AccountabilityReport:
    pattern: str
    effect: str
    agents: Tuple[str, ...]
    status: str
    findings: Tuple[AgentFinding, ...]
    candidates: Tuple[str, ...]          # agents the analysis points to
    influencing: Tuple[str, ...]
    excluded: Tuple[str, ...]
    hints: Tuple[str, ...]
    steps: Tuple[Step, ...]

    def finding(self, agent: str) -> AgentFinding:
        for f in self.findings:
            if f.agent == agent:
                return f
        raise KeyError(agent)

    def to_dict(self) -> dict:
        return {"pattern": self.pattern, "effect": self.effect, "agents": list(self.agents),
                "status": self.status, "candidates": list(self.candidates),
                "influencing": list(self.influencing), "excluded": list(self.excluded),
                "hints": list(self.hints),
                "findings": [f.to_dict() for f in self.findings],
                "steps": [s.to_dict() for s in self.steps]}


def influence_conditions(model: CausalModel, agent: str, effect: str,
                         others: Iterable[str]) -> Tuple[Condition, ...]:
    """Single-literal conditions on the other agents under which ``agent`` matters.

    A condition ``B=b`` is reported when ``B`` naturally takes value ``b`` in
    every context where ``agent`` influences ``effect``, while taking some
    other value elsewhere.
    """
    values = model.domain_of(agent).values
    seen: Dict[str, set] = {o: set() for o in others}
    when: Dict[str, set] = {o: set() for o in others}
    any_ctx = False
    for u in contexts(model):
        natural = solve(model, u)
        for o in seen:
            seen[o].add(natural[o])
        outcomes = {solve(model, u, {agent: a})[effect] for a in values}
        if len(outcomes) > 1:
            any_ctx = True
            for o in when:
                when[o].add(natural[o])
    if not any_ctx:
        return ()
    return tuple(Condition(agent, o, next(iter(when[o]))) for o in sorted(seen)
                 if len(when[o]) == 1 and len(seen[o]) > 1)


def _gates(model: CausalModel, gate: str, agent: str, effect: str,
           conditions: Tuple[Condition, ...]) -> bool:
    """Whether ``gate`` decides if ``agent`` gets a say at all.

    Every child of ``agent`` that leads to the effect must use ``agent`` only
    inside a branch selected by ``gate`` (an ``if`` on ``gate`` or a ``case``
    over it), and functionally ``agent`` must matter for one value of
    ``gate`` only.  A symmetric combination such as ``S = U | D`` gates
    neither side.
    """
    if not any(c.variable == gate for c in conditions):
        return False
    route = [c for c in model.children(agent)
             if c == effect or _reaches(model, c, effect)]
    return bool(route) and all(gate in (_guards(model.equation(c), agent) or ())
                               for c in route)


def _guards(e: Expr, name: str) -> Optional[FrozenSet[str]]:
    """Variables selecting a branch around every occurrence of ``name`` in ``e``.

    None when ``name`` does not occur.
    """
    if name not in e.variables():
        return None
    if isinstance(e, (Var, Eq)):
        return frozenset()
    if isinstance(e, If):
        sel = e.cond.variables()
        parts = [_guards(e.cond, name)]
        for branch in (e.then, e.orelse):
            g = _guards(branch, name)
            parts.append(None if g is None else g | sel)
        return _meet(parts)
    if isinstance(e, Case):
        if e.var == name:
            return frozenset()
        arms = [a for _, a in e.arms] + ([e.default] if e.default is not None else [])
        return _meet([None if g is None else g | {e.var}
                      for g in (_guards(a, name) for a in arms)])
    if isinstance(e, Not):
        return _guards(e.operand, name)
    return _meet([_guards(o, name) for o in e.operands])


def _meet(parts) -> Optional[FrozenSet[str]]:
    present = [p for p in parts if p is not None]
    if not present:
        return None
    out = present[0]
    for p in present[1:]:
        out = out & p
    return frozenset(out)


def _reaches(model: CausalModel, src: str, dst: str) -> bool:
    stack, seen = [src], set()
    while stack:
        n = stack.pop()
        if n == dst:
            return True
        if n in seen:
            continue
        seen.add(n)
        stack.extend(model.children(n))
    return False


def _pick_effect(model: CausalModel, effect: Optional[str]) -> str:
    if effect is not None:
        if model.variable(effect).exogenous:
            raise ModelError(f"effect {effect} must be endogenous")
        return effect
    effects = model.effects
    if len(effects) != 1:
        raise ModelError("identify the event: pass an effect explicitly "
                         f"(model declares {len(effects)} @effect variables)")
    return effects[0]


def check_accountability(model: CausalModel, pattern: Union[str, Pattern],
                         effect: Optional[str] = None,
                         agents: Optional[Iterable[str]] = None) -> AccountabilityReport:
    model.require_valid()
    pat = _resolve_pattern(pattern)
    eff = _pick_effect(model, effect)
    steps: List[Step] = [Step(1, "Identify the event for which accountability is desired",
                              (f"effect: {eff}",))]

    if agents is None:
        chosen = tuple(a for a in model.agents if a != eff)
        source = "@agent variables"
    else:
        chosen = tuple(sorted(set(agents)))
        source = "supplied"
        for a in chosen:
            if model.variable(a).exogenous:
                raise ModelError(f"agent {a} must be endogenous")
    if not chosen:
        raise ModelError("identify valid agents: the model has no @agent variables and "
                         "none were supplied")
    labels = [a + (f" ({model.variable(a).agent_label})" if model.variable(a).agent_label
                   else "") for a in chosen]
    steps.append(Step(2, "Identify valid agents", (f"{source}: " + ", ".join(labels),)))
    steps.append(Step(3, "Choose the desired definition of accountability",
                      (f"pattern: {pat.name}",) + ((pat.description,) if pat.description
                                                   else ())))

    exclusions = {a: exclude_agent_any(model, a, eff) for a in chosen}
    influencing = tuple(a for a in chosen if not exclusions[a].excluded)
    findings: List[AgentFinding] = []
    conds: Dict[str, Tuple[Condition, ...]] = {}
    for a in chosen:
        others = [o for o in chosen if o != a]
        conds[a] = (influence_conditions(model, a, eff, others)
                    if a in influencing else ())
    for a in chosen:
        gated = tuple(g for g in influencing if g != a and a in influencing
                      and _gates(model, g, a, eff, conds[a]))
        findings.append(AgentFinding(a, match_pattern(model, pat, eff, a), exclusions[a],
                                     conds[a], gated))

    matched = [f for f in findings if f.match.verdict != NOT_MATCHED]
    ungated = [f.agent for f in findings if f.influences and not f.gated_by]
    hints: List[str] = []
    if not matched:
        for f in findings:
            for h in f.match.hints:
                if h not in hints:
                    hints.append(h)
    if not matched and any(m.startswith("missing required roles")
                           for f in findings for m in f.match.missing):
        status, candidates = IMPOSSIBLE, ()
    elif not influencing or not matched:
        status, candidates = NO_AGENT, ()
    elif len(influencing) == 1:
        status, candidates = UNAMBIGUOUS, influencing
    elif len(ungated) == 1:
        status, candidates = RESOLVED, tuple(ungated)
    else:
        status, candidates = AMBIGUOUS, influencing

    lines = []
    for f in findings:
        line = f"{f.agent}: {f.match.verdict}"
        if f.match.matched and f.match.chain:
            line += f", chain {f.match.chain_text()}"
        if f.exclusion.excluded:
            line += (f"; excluded, no influence on {eff} in "
                     f"{f.exclusion.contexts_examined} contexts x "
                     f"{f.exclusion.value_pairs} value pairs")
        if f.conditions:
            line += "; influences only if " + " & ".join(str(c) for c in f.conditions)
        if f.gated_by:
            line += "; gated by " + ", ".join(f.gated_by)
        for m in f.match.missing:
            line += f"; {m}"
        lines.append(line)
    lines.append(_summary(status, candidates, influencing, eff))
    for o in dict.fromkeys(o for f in matched for o in f.match.obligations):
        lines.append(f"obligation: {o}")
    for h in hints:
        lines.append(f"hint: {h}")
    steps.append(Step(4, "Check if the pattern is fulfilled for the desired agents",
                      tuple(lines)))
    return AccountabilityReport(pat.name, eff, chosen, status, tuple(findings), candidates,
                                influencing,
                                tuple(a for a in chosen if exclusions[a].excluded),
                                tuple(hints), tuple(steps))


def exclude_agent_any(model: CausalModel, agent: str, effect: str) -> Exclusion:
    """exclude_agent without the @agent requirement, for supplied agent sets."""
    if model.variable(agent).is_agent:
        return exclude_agent(model, agent, effect)
    from ..semantics import functionally_influences
    return Exclusion.from_influence(functionally_influences(model, agent, effect))


def _summary(status, candidates, influencing, effect) -> str:
    if status == IMPOSSIBLE:
        return "impossible with the current model: required roles are missing"
    if status == NO_AGENT:
        return f"no agent fulfils the pattern for {effect}"
    if status == UNAMBIGUOUS:
        return f"accountable candidate: {candidates[0]} (sole agent influencing {effect})"
    if status == RESOLVED:
        return (f"accountable candidate: {candidates[0]}; the other influencing agents "
                "act only through mechanisms it controls")
    return "ambiguous between " + ", ".join(influencing)
