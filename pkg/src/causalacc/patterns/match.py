"""Matching accountability patterns against system models.

Matching works on two levels.  Structurally, pattern nodes are bound to
model variables by role, and contractible edges (including the edges
around a Mediator) may bind to directed paths whose interior variables are
not agents.  Functionally, the agent must actually influence the effect,
and any other agent that also does is reported as an ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..model import CausalModel, ModelError
from ..semantics import Influence, functionally_influences
from .definitions import ACTOR_ROLES, Pattern, PatternEdge, PatternNode, Role, get_pattern

MATCHED = "matched"
MATCHED_WITH_OBLIGATIONS = "matched-with-obligations"
NOT_MATCHED = "not-matched"


@dataclass(frozen=True)
class Binding:
    """A pattern node bound to one variable, or a Mediator bound to a chain."""

    node: str
    role: Role
    variables: Tuple[str, ...]

    @property
    def is_chain(self) -> bool:
        return self.role is Role.MEDIATOR

    def text(self) -> str:
        if self.is_chain:
            return "[" + ", ".join(self.variables) + "]"
        return self.variables[0]

    def to_dict(self) -> dict:
        return {"node": self.node, "role": self.role.value, "variables": list(self.variables)}


@dataclass(frozen=True)
class MatchReport:
    pattern: str
    effect: str
    agent: Optional[str]
    verdict: str
    bindings: Tuple[Binding, ...] = ()
    chain: Tuple[str, ...] = ()            # agent .. effect through the bound mediators
    ambiguity: Tuple[str, ...] = ()        # other agents that also influence the effect
    missing: Tuple[str, ...] = ()
    obligations: Tuple[str, ...] = ()
    hints: Tuple[str, ...] = ()
    influence: Optional[Influence] = None

    @property
    def matched(self) -> bool:
        return self.verdict != NOT_MATCHED

    def binding(self, node: str) -> Optional[Binding]:
        for b in self.bindings:
            if b.node == node:
                return b
        return None

    def chain_text(self) -> str:
        """The matched causal chain, e.g. ``D -> [T] -> P``."""
        if not self.bindings:
            return ""
        by = {b.node: b for b in self.bindings}
        parts = []
        for name in self.chain:
            b = by.get(name)
            parts.append(name if b is None else b.text())
        return " -> ".join(parts)

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern, "effect": self.effect, "agent": self.agent,
            "verdict": self.verdict,
            "bindings": {b.node: b.to_dict() for b in self.bindings},
            "chain": list(self.chain),
            "ambiguity": list(self.ambiguity), "missing": list(self.missing),
            "obligations": list(self.obligations), "hints": list(self.hints),
            "influence": None if self.influence is None else self.influence.to_dict(),
        }


def _resolve_pattern(pattern: Union[str, Pattern]) -> Pattern:
    return pattern if isinstance(pattern, Pattern) else get_pattern(pattern)


def _directed_chains(model: CausalModel, src: str, dst: str) -> List[Tuple[str, ...]]:
    """Interiors of directed paths src -> ... -> dst avoiding agent variables.

    Shortest first, then by names.
    """
    agents = set(model.agents)
    out: List[Tuple[str, ...]] = []
    path = [src]

    def dfs(n):
        for c in model.children(n):
            if c == dst:
                out.append(tuple(path[1:]))
            elif c not in path and c not in agents and not model.variable(c).exogenous:
                path.append(c)
                dfs(c)
                path.pop()

    dfs(src)
    return sorted(out, key=lambda t: (len(t), t))


def _satisfies(model: CausalModel, node: PatternNode, var: str) -> List[str]:
    """Unmet requirements of ``node`` for variable ``var``."""
    v = model.variable(var)
    problems = [f"{var} is not annotated @{a}" for a in sorted(node.requires - v.annotations)]
    if node.sink and model.children(var):
        problems.append(f"{var} has outgoing edges but {node.name} must be a sink")
    if v.exogenous:
        problems.append(f"{var} is exogenous")
    return problems


def _node_hint(pattern: Pattern, node: PatternNode) -> str:
    reqs = " ".join(f"@{a}" for a in sorted(node.requires))
    edges = [str(e) for e in pattern.edges_of(node.name) if not e.optional]
    text = f"add a variable for {node.role.value} {node.name}"
    if reqs:
        text += f" annotated {reqs}"
    if edges:
        text += " with edges " + ", ".join(edges)
    return text


def _edge_ok(model: CausalModel, e: PatternEdge, src: str, dst: str) -> bool:
    if dst in model.children(src):
        return True
    return e.contractible and bool(_directed_chains(model, src, dst))


def match_pattern(model: CausalModel, pattern: Union[str, Pattern], effect: str,
                  agent: Optional[str] = None) -> MatchReport:
    """Try to find ``pattern`` in ``model`` for ``effect`` and ``agent``.

    Without ``agent``, every @agent variable is tried in name order and the
    first match (or the last failure) is reported.
    """
    model.require_valid()
    pattern = _resolve_pattern(pattern)
    if model.variable(effect).exogenous:
        raise ModelError(f"effect {effect} must be endogenous")
    if agent is not None:
        model.variable(agent)
        if agent == effect:
            raise ModelError("agent and effect must differ")
        return _match_one(model, pattern, effect, agent)
    pool = [a for a in model.agents if a != effect]
    if not pool:
        return _match_one(model, pattern, effect, None)
    first = None
    for a in pool:
        report = _match_one(model, pattern, effect, a)
        if report.matched:
            return report
        first = first or report
    return first


def _match_one(model: CausalModel, pattern: Pattern, effect: str,
               agent: Optional[str]) -> MatchReport:
    actor = pattern.actor
    eff = pattern.effect
    missing: List[str] = []
    hints: List[str] = []
    obligations: List[str] = []
    missing_roles: List[PatternNode] = []

    fixed: Dict[str, str] = {eff.name: effect}
    problems = _satisfies(model, eff, effect)
    missing += problems
    if agent is None:
        missing_roles.append(actor)
    else:
        fixed[actor.name] = agent
        problems = _satisfies(model, actor, agent)
        missing += problems
        for a in sorted(actor.requires - model.variable(agent).annotations):
            hints.append(f"annotate {agent} @{a}")

    free = [n for n in pattern.nodes
            if n.name not in fixed and n.role is not Role.MEDIATOR]
    candidates: Dict[str, List[str]] = {}
    unbound_principals: List[PatternNode] = []
    for n in free:
        cands = [v for v in model.endogenous
                 if v not in fixed.values() and not _satisfies(model, n, v)]
        if not cands and n.role is Role.PRINCIPAL:
            unbound_principals.append(n)
        elif not cands:
            missing_roles.append(n)
        else:
            candidates[n.name] = cands
    if missing_roles:
        roles = ", ".join(n.describe() for n in missing_roles)
        missing.insert(0, f"missing required roles: {roles}")
        hints += [_node_hint(pattern, n) for n in missing_roles]
        needed = sorted({a for n in missing_roles for a in n.requires})
        if needed:
            hints.append("add " + "/".join(f"@{a}" for a in needed) + " roles")

    base = dict(agent=agent, effect=effect, pattern=pattern.name)
    if missing:
        return MatchReport(verdict=NOT_MATCHED, missing=tuple(missing),
                           hints=tuple(hints), **base)

    # bind the remaining point nodes consistently with the required edges
    point_edges = [e for e in pattern.edges if not e.optional
                   and pattern.node(e.source).role is not Role.MEDIATOR
                   and pattern.node(e.target).role is not Role.MEDIATOR]
    skipped = {n.name for n in unbound_principals}
    order = [n.name for n in free if n.name in candidates]
    binding = _search(model, point_edges, skipped, dict(fixed), order, candidates)
    if binding is None:
        broken = [str(e) for e in point_edges if e.source not in skipped
                  and e.target not in skipped]
        return MatchReport(verdict=NOT_MATCHED, missing=(
            "no binding satisfies the required edges " + ", ".join(broken),),
            hints=tuple(f"add the edge {e}" for e in broken), **base)

    inf = functionally_influences(model, agent, effect)
    chain = _chain(pattern, actor.name, eff.name)
    bindings: Dict[str, Binding] = {}
    for name, var in binding.items():
        bindings[name] = Binding(name, pattern.node(name).role, (var,))

    # mediators: bind to the interior of a directed path
    gaps = []
    for n in pattern.nodes:
        if n.role is not Role.MEDIATOR:
            continue
        ein = next(e for e in pattern.edges if e.target == n.name and not e.optional)
        eout = next(e for e in pattern.edges if e.source == n.name and not e.optional)
        src, dst = binding.get(ein.source), binding.get(eout.target)
        if src is None or dst is None:
            continue
        chains = _directed_chains(model, src, dst)
        if chains:
            bindings[n.name] = Binding(n.name, n.role, chains[0])
        else:
            gaps.append((src, dst))
    ordered = tuple(bindings[n.name] for n in pattern.nodes if n.name in bindings)

    if not inf or gaps:
        missing = []
        hints = []
        if not inf:
            missing.append(f"no functional influence of {agent} on {effect} "
                           f"({inf.contexts_examined} contexts x {inf.value_pairs} "
                           "value pairs examined)")
            hints.append(f"{agent} cannot be held accountable for {effect}; give it a "
                         f"causal influence on {effect} or choose another agent")
        for src, dst in gaps:
            missing.append(f"no directed path from {src} to {dst} through non-agent "
                           "variables")
            hints.append(f"connect {src} to {dst}, directly or through a mediator")
        return MatchReport(verdict=NOT_MATCHED, bindings=ordered, chain=chain,
                           missing=tuple(missing), hints=tuple(hints), influence=inf,
                           **base)

    for p in unbound_principals:
        edges = ", ".join(str(e) for e in pattern.edges_of(p.name) if not e.optional)
        obligations.append(
            f"principal outside model: no variable can serve as {p.describe()}; "
            f"identify who {agent} is accountable to and make sure they receive the "
            f"evidence the edges {edges} would carry")
    obligations += list(pattern.obligations)

    ambiguity = tuple(a for a in model.agents if a not in (agent, effect)
                      and functionally_influences(model, a, effect))
    verdict = MATCHED_WITH_OBLIGATIONS if obligations else MATCHED
    return MatchReport(
        verdict=verdict,
        bindings=ordered, chain=chain, ambiguity=ambiguity, obligations=tuple(obligations),
        influence=inf, **base)


def _chain(pattern: Pattern, start: str, end: str) -> Tuple[str, ...]:
    """Pattern nodes on the required path from the actor to the effect."""
    succ: Dict[str, List[str]] = {}
    for e in pattern.edges:
        if not e.optional:
            succ.setdefault(e.source, []).append(e.target)
    best: Tuple[str, ...] = ()

    def dfs(n, path):
        nonlocal best
        if n == end:
            if len(path) > len(best):
                best = tuple(path)
            return
        for m in succ.get(n, ()):
            dfs(m, path + [m])

    dfs(start, [start])
    return best


def _search(model, edges, skipped, bound, order, candidates):
    """Backtracking assignment of pattern nodes in ``order``."""
    def consistent(b):
        for e in edges:
            if e.source in skipped or e.target in skipped:
                continue
            if e.source in b and e.target in b and not _edge_ok(model, e, b[e.source],
                                                                 b[e.target]):
                return False
        return True

    if not consistent(bound):
        return None

    def go(i, b):
        if i == len(order):
            return dict(b)
        name = order[i]
        for var in candidates[name]:
            if var in b.values():
                continue
            b[name] = var
            if consistent(b):
                found = go(i + 1, b)
                if found is not None:
                    return found
            del b[name]
        return None

    return go(0, bound)
