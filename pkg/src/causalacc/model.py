"""Discrete structural causal models: signature, equations and well-formedness."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .expr import And, Case, Const, Eq, Expr, If, Not, Or, Value, Var, compile_expr

EXOGENOUS = "exogenous"
ENDOGENOUS = "endogenous"

ANNOTATIONS = frozenset({
    "agent", "principal", "effect", "accountable", "responsible",
    "consulted", "informed", "believes_evaluated",
})


class ModelError(ValueError):
    """Raised when an operation receives an ill-formed model or input."""

    def __init__(self, message: str, diagnostics: Sequence["Diagnostic"] = ()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


@dataclass(frozen=True)
class Domain:
    name: str
    values: Tuple[Value, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError(f"domain {self.name} is empty")
        if len(set(self.values)) != len(self.values):
            raise ValueError(f"domain {self.name} has duplicate values")

    def __contains__(self, value) -> bool:
        # bool is a subclass of int; keep True from matching 1 and vice versa
        return any(type(v) is type(value) and v == value for v in self.values)

    def index(self, value) -> int:
        for i, v in enumerate(self.values):
            if type(v) is type(value) and v == value:
                return i
        raise ValueError(f"{value!r} not in domain {self.name}")


BOOL = Domain("bool", (False, True))


def format_value(value: Value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str
    domain: str = "bool"
    annotations: frozenset = frozenset()
    agent_label: Optional[str] = None

    @property
    def exogenous(self) -> bool:
        return self.kind == EXOGENOUS

    @property
    def is_agent(self) -> bool:
        return "agent" in self.annotations


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    variables: Tuple[str, ...] = ()
    severity: str = "error"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message,
                "severity": self.severity, "variables": list(self.variables)}


class CausalModel:
    """A signature of exogenous and endogenous variables plus equations.

    Construction is cheap and does not validate; :func:`validate` reports
    problems and every semantic operation refuses an invalid model.
    Instances are immutable.
    """

    def __init__(self, name: str, variables: Iterable[Variable],
                 equations: Mapping[str, Expr],
                 domains: Iterable[Domain] = ()):
        self._name = name
        self._variables = tuple(variables)
        self._equations = dict(equations)
        doms = {BOOL.name: BOOL}
        self._extra_domains = tuple(domains)
        for d in self._extra_domains:
            doms.setdefault(d.name, d)
        self._domains = doms

    # -- signature -------------------------------------------------------
    @property
    def name(self) -> str:
        return self._name

    @property
    def domains(self) -> Mapping[str, Domain]:
        return dict(self._domains)

    @property
    def declared_domains(self) -> Tuple[Domain, ...]:
        return tuple(d for d in self._extra_domains if d.name != BOOL.name)

    @property
    def variables(self) -> Tuple[Variable, ...]:
        return self._variables

    @property
    def equations(self) -> Mapping[str, Expr]:
        return dict(self._equations)

    @cached_property
    def _by_name(self) -> Dict[str, Variable]:
        return {v.name: v for v in self._variables}

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def domain_of(self, name: str) -> Domain:
        return self._domains[self.variable(name).domain]

    def equation(self, name: str) -> Expr:
        return self._equations[name]

    @cached_property
    def exogenous(self) -> Tuple[str, ...]:
        """Exogenous variable names, sorted."""
        return tuple(sorted(v.name for v in self._variables if v.exogenous))

    @cached_property
    def endogenous(self) -> Tuple[str, ...]:
        """Endogenous variable names, sorted."""
        return tuple(sorted(v.name for v in self._variables if not v.exogenous))

    def annotated(self, annotation: str) -> Tuple[str, ...]:
        return tuple(sorted(v.name for v in self._variables if annotation in v.annotations))

    @property
    def agents(self) -> Tuple[str, ...]:
        return self.annotated("agent")

    @property
    def effects(self) -> Tuple[str, ...]:
        return self.annotated("effect")

    # -- graph -----------------------------------------------------------
    def parents(self, name: str) -> Tuple[str, ...]:
        eq = self._equations.get(name)
        if eq is None:
            return ()
        return tuple(sorted(eq.variables()))

    @cached_property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        """All (parent, child) pairs, sorted."""
        out = []
        for child in self._equations:
            for p in self.parents(child):
                out.append((p, child))
        return tuple(sorted(out))

    def children(self, name: str) -> Tuple[str, ...]:
        return tuple(sorted(c for p, c in self.edges if p == name))

    @cached_property
    def _order(self) -> Tuple[str, ...]:
        return _layered_order(self)

    @cached_property
    def _compiled(self):
        return {n: compile_expr(e) for n, e in self._equations.items()}

    # -- structural equality ---------------------------------------------
    def _key(self):
        doms = tuple(sorted((d.name, d.values) for d in self._domains.values()))
        vars_ = tuple(sorted(
            (v.name, v.kind, v.domain, tuple(sorted(v.annotations)), v.agent_label or "")
            for v in self._variables))
        eqs = tuple(sorted(self._equations.items(), key=lambda kv: kv[0]))
        return (self._name, doms, vars_, eqs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CausalModel):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (f"CausalModel({self._name!r}, exogenous={list(self.exogenous)}, "
                f"endogenous={list(self.endogenous)})")

    def replace(self, *, name=None, variables=None, equations=None) -> "CausalModel":
        return CausalModel(
            self._name if name is None else name,
            self._variables if variables is None else variables,
            self._equations if equations is None else equations,
            self._extra_domains,
        )

    @cached_property
    def _diagnostics(self) -> Tuple[Diagnostic, ...]:
        return tuple(_validate(self))

    def require_valid(self) -> None:
        errors = [d for d in self._diagnostics if d.severity == "error"]
        if errors:
            raise ModelError(
                f"model {self._name!r} is not well-formed: "
                + "; ".join(d.message for d in errors), errors)


# ---------------------------------------------------------------------------
# validation

def validate(model: CausalModel, include_warnings: bool = False) -> List[Diagnostic]:
    """Well-formedness diagnostics; an empty list means the model is valid.

    Warnings (isolated exogenous variables) are only returned when asked for.
    """
    return [d for d in model._diagnostics
            if include_warnings or d.severity == "error"]


def _validate(model: CausalModel) -> List[Diagnostic]:
    diags: List[Diagnostic] = []
    seen = set()
    for v in model.variables:
        if v.name in seen:
            diags.append(Diagnostic("duplicate-declaration",
                                    f"variable {v.name} declared twice", (v.name,)))
        seen.add(v.name)
        if v.domain not in model._domains:
            diags.append(Diagnostic("undefined-domain",
                                    f"variable {v.name} uses undefined domain {v.domain}",
                                    (v.name,)))
        bad = set(v.annotations) - ANNOTATIONS
        if bad:
            diags.append(Diagnostic("bad-annotation",
                                    f"variable {v.name} has unknown annotations {sorted(bad)}",
                                    (v.name,)))
        if v.agent_label is not None and not v.agent_label:
            diags.append(Diagnostic("bad-annotation",
                                    f"agent label of {v.name} is empty", (v.name,)))
        if v.exogenous and v.name in model._equations:
            diags.append(Diagnostic("exogenous-equation",
                                    f"exogenous variable {v.name} has an equation", (v.name,)))
        if not v.exogenous and v.name not in model._equations:
            diags.append(Diagnostic("missing-equation",
                                    f"endogenous variable {v.name} has no equation", (v.name,)))
    for name in model._equations:
        if name not in seen:
            diags.append(Diagnostic("undefined-ref",
                                    f"equation for undeclared variable {name}", (name,)))
    if diags:
        return diags

    for v in model.variables:
        if v.exogenous:
            continue
        _check_expr(model, v.name, model._equations[v.name],
                    model._domains[v.domain], diags)
    if any(d.code == "undefined-ref" for d in diags):
        return diags

    for comp in _cycles(model):
        diags.append(Diagnostic("cycle", "cyclic dependency among "
                                + ", ".join(comp), tuple(comp)))

    used = {p for p, _ in model.edges}
    for name in model.exogenous:
        if name not in used:
            diags.append(Diagnostic("isolated-exogenous",
                                    f"exogenous variable {name} is not used by any equation",
                                    (name,), severity="warning"))
    return diags


def _check_expr(model: CausalModel, owner: str, e: Expr, expected: Domain,
                diags: List[Diagnostic]) -> None:
    def mismatch(msg):
        diags.append(Diagnostic("domain-mismatch", f"in equation of {owner}: {msg}", (owner,)))

    def lookup(name) -> Optional[Domain]:
        if name not in model:
            diags.append(Diagnostic("undefined-ref",
                                    f"equation of {owner} references undeclared {name}",
                                    (owner, name)))
            return None
        return model._domains.get(model.variable(name).domain)

    if isinstance(e, Const):
        if e.value not in expected:
            mismatch(f"value {format_value(e.value)} is not in domain {expected.name}")
    elif isinstance(e, Var):
        dom = lookup(e.name)
        if dom is not None and dom != expected:
            mismatch(f"{e.name} has domain {dom.name}, expected {expected.name}")
    elif isinstance(e, (Not, And, Or)):
        if expected != BOOL:
            mismatch(f"boolean connective used where {expected.name} is expected")
        for op in ([e.operand] if isinstance(e, Not) else e.operands):
            _check_expr(model, owner, op, BOOL, diags)
    elif isinstance(e, Eq):
        if expected != BOOL:
            mismatch(f"equality test used where {expected.name} is expected")
        dom = lookup(e.var)
        if dom is not None and e.value not in dom:
            mismatch(f"value {format_value(e.value)} is not in domain {dom.name} of {e.var}")
    elif isinstance(e, If):
        _check_expr(model, owner, e.cond, BOOL, diags)
        _check_expr(model, owner, e.then, expected, diags)
        _check_expr(model, owner, e.orelse, expected, diags)
    elif isinstance(e, Case):
        dom = lookup(e.var)
        covered = []
        for value, arm in e.arms:
            if dom is not None and value not in dom:
                mismatch(f"case arm {format_value(value)} is not in domain {dom.name}")
            if any(type(c) is type(value) and c == value for c in covered):
                mismatch(f"duplicate case arm {format_value(value)}")
            covered.append(value)
            _check_expr(model, owner, arm, expected, diags)
        if e.default is not None:
            _check_expr(model, owner, e.default, expected, diags)
        elif dom is not None and any(
                not any(type(c) is type(v) and c == v for c in covered)
                for v in dom.values):
            diags.append(Diagnostic("non-exhaustive-case",
                                    f"case over {e.var} in equation of {owner} "
                                    "does not cover every value", (owner, e.var)))
    else:
        mismatch(f"unknown expression node {e!r}")


def _cycles(model: CausalModel) -> List[List[str]]:
    """Strongly connected components that contain a cycle (Tarjan)."""
    index: Dict[str, int] = {}
    low: Dict[str, int] = {}
    stack: List[str] = []
    on: set = set()
    out: List[List[str]] = []
    counter = [0]
    succ = {n: [] for n in model.endogenous}
    for p, c in model.edges:
        if p in succ:
            succ[p].append(c)

    def visit(n):
        index[n] = low[n] = counter[0]
        counter[0] += 1
        stack.append(n)
        on.add(n)
        for m in succ[n]:
            if m not in index:
                visit(m)
                low[n] = min(low[n], low[m])
            elif m in on:
                low[n] = min(low[n], index[m])
        if low[n] == index[n]:
            comp = []
            while True:
                m = stack.pop()
                on.discard(m)
                comp.append(m)
                if m == n:
                    break
            if len(comp) > 1 or n in succ[n]:
                out.append(sorted(comp))

    for n in model.endogenous:
        if n not in index:
            visit(n)
    return sorted(out)


def topological_order(model: CausalModel) -> List[str]:
    """Endogenous variables, parents first.

    Variables are layered by the length of the longest chain of endogenous
    ancestors above them; within a layer they are sorted by name.
    """
    model.require_valid()
    return list(_layered_order(model))


def _layered_order(model: CausalModel) -> Tuple[str, ...]:
    depth: Dict[str, int] = {}

    def d(n):
        if n not in depth:
            ps = [p for p in model.parents(n) if not model.variable(p).exogenous]
            depth[n] = 1 + max((d(p) for p in ps), default=-1)
        return depth[n]

    return tuple(sorted(model.endogenous, key=lambda n: (d(n), n)))
