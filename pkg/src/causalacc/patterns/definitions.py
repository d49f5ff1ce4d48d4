"""Role-typed accountability patterns."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from ..model import ANNOTATIONS


class PatternError(ValueError):
    pass


class Role(enum.Enum):
    AGENT = "Agent"
    MEDIATOR = "Mediator"
    EFFECT = "Effect"
    PRINCIPAL = "Principal"
    ACCOUNTABLE_AGENT = "AccountableAgent"
    RESPONSIBLE_AGENT = "ResponsibleAgent"
    CONSULTED = "Consulted"
    DISCUSSION = "Discussion"
    INFORMED = "Informed"


# roles whose binding is the agent under examination
ACTOR_ROLES = frozenset({Role.AGENT, Role.RESPONSIBLE_AGENT})


@dataclass(frozen=True)
class PatternNode:
    name: str
    role: Role
    requires: FrozenSet[str] = frozenset()   # annotations the bound variable must carry
    sink: bool = False                       # bound variable must have no children

    def describe(self) -> str:
        reqs = "".join(f" @{a}" for a in sorted(self.requires))
        return f"{self.name} ({self.role.value}{reqs})"


@dataclass(frozen=True)
class PatternEdge:
    source: str
    target: str
    contractible: bool = False   # may bind to a directed path of non-agent variables
    optional: bool = False

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class Pattern:
    name: str
    nodes: Tuple[PatternNode, ...]
    edges: Tuple[PatternEdge, ...]
    obligations: Tuple[str, ...] = ()
    description: str = ""

    def __post_init__(self):
        _check_pattern(self)

    def node(self, name: str) -> PatternNode:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    @property
    def effect(self) -> PatternNode:
        return next(n for n in self.nodes if n.role is Role.EFFECT)

    @property
    def actor(self) -> PatternNode:
        return next(n for n in self.nodes if n.role in ACTOR_ROLES)

    @property
    def roles(self) -> FrozenSet[Role]:
        return frozenset(n.role for n in self.nodes)

    @property
    def required_annotations(self) -> FrozenSet[str]:
        out = set()
        for n in self.nodes:
            out |= n.requires
        return frozenset(out)

    def graph(self):
        """Role-labelled edge structure, for comparing patterns."""
        roles = {n.name: n.role for n in self.nodes}
        return (frozenset((e.source, e.target, roles[e.source], roles[e.target],
                           e.contractible, e.optional) for e in self.edges),
                frozenset((n.name, n.role, n.sink) for n in self.nodes))

    def edges_of(self, name: str):
        return [e for e in self.edges if name in (e.source, e.target)]


def _check_pattern(p: Pattern) -> None:
    names = [n.name for n in p.nodes]
    if len(set(names)) != len(names):
        raise PatternError(f"pattern {p.name}: duplicate node names")
    known = set(names)
    for n in p.nodes:
        bad = n.requires - ANNOTATIONS
        if bad:
            raise PatternError(f"pattern {p.name}: unknown annotation "
                               + ", ".join(sorted(bad)))
    for e in p.edges:
        for end in (e.source, e.target):
            if end not in known:
                raise PatternError(f"pattern {p.name}: edge {e} refers to unknown node {end}")
        if e.source == e.target:
            raise PatternError(f"pattern {p.name}: self loop on {e.source}")
    if sum(n.role is Role.EFFECT for n in p.nodes) != 1:
        raise PatternError(f"pattern {p.name}: needs exactly one Effect node")
    if sum(n.role in ACTOR_ROLES for n in p.nodes) != 1:
        raise PatternError(f"pattern {p.name}: needs exactly one Agent or "
                           "ResponsibleAgent node")
    roles = {n.name: n.role for n in p.nodes}
    for n in p.nodes:
        if n.role is not Role.MEDIATOR:
            continue
        ins = [e for e in p.edges if e.target == n.name and not e.optional]
        outs = [e for e in p.edges if e.source == n.name and not e.optional]
        if len(ins) != 1 or len(outs) != 1:
            raise PatternError(f"pattern {p.name}: mediator {n.name} needs exactly one "
                               "required incoming and one required outgoing edge")
        for e in ins + outs:
            other = e.source if e.target == n.name else e.target
            if roles[other] is Role.MEDIATOR:
                raise PatternError(f"pattern {p.name}: adjacent mediators are not supported")
            if not e.contractible:
                raise PatternError(f"pattern {p.name}: mediator edge {e} must be contractible")
    for e in p.edges:
        if p.node(e.source).sink and not e.optional:
            raise PatternError(f"pattern {p.name}: sink node {e.source} has an outgoing edge")
    # acyclicity
    succ: Dict[str, list] = {n: [] for n in known}
    for e in p.edges:
        succ[e.source].append(e.target)
    state: Dict[str, int] = {}

    def visit(n):
        state[n] = 1
        for m in succ[n]:
            if state.get(m) == 1:
                raise PatternError(f"pattern {p.name}: edges form a cycle")
            if m not in state:
                visit(m)
        state[n] = 2

    for n in sorted(known):
        if n not in state:
            visit(n)


def _node(name, role, requires=(), sink=False):
    return PatternNode(name, role, frozenset(requires), sink)


def _lindberg_shape(name: str, obligations, description: str) -> Pattern:
    return Pattern(
        name,
        (_node("A", Role.AGENT, ["agent"]),
         _node("M", Role.MEDIATOR),
         _node("E", Role.EFFECT),
         _node("P", Role.PRINCIPAL, ["principal"], sink=True)),
        (PatternEdge("A", "M", contractible=True),
         PatternEdge("M", "E", contractible=True),
         PatternEdge("A", "P"),
         PatternEdge("M", "P", optional=True),
         PatternEdge("E", "P")),
        tuple(obligations), description)


LINDBERG = _lindberg_shape(
    "lindberg",
    ["the principal must be able to demand an account from the agent on request "
     "and to sanction it"],
    "An agent A causes an effect E, possibly through a mediator M, and a "
    "principal P who is affected by A (and possibly by M and E) can demand "
    "information and sanction.  P has no outgoing edges.")

BOVENS = _lindberg_shape(
    "bovens",
    ["regular reporting: the actor must regularly inform the forum about its conduct",
     "the forum must be able to pass judgement and the actor may face consequences"],
    "Same causal structure as Lindberg's pattern (actor, forum); differs in "
    "that the actor reports regularly instead of on demand.")

HALL = Pattern(
    "hall",
    (_node("A", Role.AGENT, ["agent", "believes_evaluated"]),
     _node("E", Role.EFFECT)),
    (PatternEdge("A", "E", contractible=True),),
    ("the agent must keep believing that its conduct may be evaluated by a third "
     "party; no technical link to an evaluator is required",),
    "An agent A affects an effect E and believes its conduct will potentially "
    "be evaluated.  Whether an evaluator exists in the model does not matter.")

RACI = Pattern(
    "raci",
    (_node("AA", Role.ACCOUNTABLE_AGENT, ["accountable"]),
     _node("A", Role.RESPONSIBLE_AGENT, ["responsible"]),
     _node("M", Role.MEDIATOR),
     _node("E", Role.EFFECT),
     _node("C", Role.CONSULTED, ["consulted"]),
     _node("D", Role.DISCUSSION),
     _node("I", Role.INFORMED, ["informed"])),
    (PatternEdge("AA", "A"),
     PatternEdge("A", "M", contractible=True),
     PatternEdge("M", "E", contractible=True),
     PatternEdge("C", "D"),
     PatternEdge("D", "A"),
     PatternEdge("E", "I")),
    (),
    "An accountable agent AA instructs the responsible agent A, whose action "
    "reaches E through M.  Consulted parties C feed a discussion node D that "
    "informs A, and informed parties I observe E.  No principal is needed.  "
    "The C -> D -> A and E -> I edges are an interpretation of the prose.")


_BUILTINS = {p.name: p for p in (LINDBERG, BOVENS, HALL, RACI)}


def builtin_patterns() -> Dict[str, Pattern]:
    return dict(_BUILTINS)


def get_pattern(name: str) -> Pattern:
    try:
        return _BUILTINS[name.lower()]
    except KeyError:
        raise PatternError(f"unknown pattern {name!r}; built-ins are "
                           + ", ".join(sorted(_BUILTINS))) from None
