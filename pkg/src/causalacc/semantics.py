"""Evaluation, intervention and functional influence for causal models."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Tuple

from .expr import Const, Eq, Expr, Not, Value, compile_expr, is_formula
from .model import CausalModel, ModelError, format_value

#: Hard limit on the number of contexts enumerated by exhaustive checks.
MAX_CONTEXTS = 2 ** 24


class SearchCapExceeded(RuntimeError):
    """An exhaustive search would exceed its configured limit."""


class FrozenMap(Mapping):
    """Immutable, hashable mapping with name-sorted iteration."""

    __slots__ = ("_data", "_hash")

    def __init__(self, data=()):
        d = dict(data)
        self._data = {k: d[k] for k in sorted(d)}
        self._hash = None

    def __getitem__(self, key):
        return self._data[key]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((k, type(v).__name__, v) for k, v in self._data.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return dict(self._data) == dict(other)
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"{k}={format_value(v)}" for k, v in self._data.items())
        return f"{type(self).__name__}({inner})"

    def to_dict(self) -> Dict[str, str]:
        return {k: format_value(v) for k, v in self._data.items()}


class Context(FrozenMap):
    """Total assignment to the exogenous variables of a model."""


class Assignment(FrozenMap):
    """Values of every variable in the unique solution of a model."""


class Intervention(FrozenMap):
    """Endogenous variables fixed to constants, ``[X <- x, ...]``."""


def check_context(model: CausalModel, context: Mapping[str, Value]) -> Context:
    expected = set(model.exogenous)
    got = set(context)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        parts = []
        if missing:
            parts.append("missing " + ", ".join(missing))
        if extra:
            parts.append("not exogenous: " + ", ".join(extra))
        raise ModelError("invalid context (" + "; ".join(parts) + ")")
    for name, value in context.items():
        if value not in model.domain_of(name):
            raise ModelError(f"context value {format_value(value)} for {name} is not in "
                             f"domain {model.domain_of(name).name}")
    return context if isinstance(context, Context) else Context(context)


def check_intervention(model: CausalModel, intervention: Mapping[str, Value]) -> Intervention:
    for name, value in intervention.items():
        var = model.variable(name)
        if var.exogenous:
            raise ModelError(f"cannot intervene on exogenous variable {name}; "
                             "choose a different context instead")
        if value not in model.domain_of(name):
            raise ModelError(f"intervention value {format_value(value)} for {name} is not "
                             f"in domain {model.domain_of(name).name}")
    if isinstance(intervention, Intervention):
        return intervention
    return Intervention(intervention)


def solve(model: CausalModel, context: Mapping[str, Value],
          fixed: Optional[Mapping[str, Value]] = None) -> Dict[str, Value]:
    """Unchecked solver: ``context`` plus ``fixed`` overrides, in topological order.

    Callers are responsible for validating their inputs; the search routines
    use this directly to avoid building intervened models.
    """
    env = dict(context)
    compiled = model._compiled
    if fixed:
        for name in model._order:
            if name in fixed:
                env[name] = fixed[name]
            else:
                env[name] = compiled[name](env)
    else:
        for name in model._order:
            env[name] = compiled[name](env)
    return env


def evaluate(model: CausalModel, context: Mapping[str, Value]) -> Assignment:
    """The unique solution of ``model`` in ``context``."""
    model.require_valid()
    ctx = check_context(model, context)
    return Assignment(solve(model, ctx))


def intervene(model: CausalModel, intervention: Mapping[str, Value]) -> CausalModel:
    """The model ``M[X <- x]``: each intervened equation becomes a constant."""
    model.require_valid()
    iv = check_intervention(model, intervention)
    if not iv:
        return model
    eqs = model.equations
    for name, value in iv.items():
        eqs[name] = Const(value)
    return model.replace(equations=eqs)


def satisfies(model: CausalModel, context: Mapping[str, Value], formula: Expr) -> bool:
    """``(M, u) |= formula``."""
    check_formula(model, formula)
    return bool(compile_expr(formula)(evaluate(model, context)))


def check_formula(model: CausalModel, formula: Expr) -> None:
    if not is_formula(formula):
        raise ModelError("a causal formula may only combine primitive events "
                         "with !, & and |")
    for name in formula.variables():
        if model.variable(name).exogenous:
            raise ModelError(f"formula refers to exogenous variable {name}")

    def walk(e):
        if isinstance(e, Eq):
            if e.value not in model.domain_of(e.var):
                raise ModelError(f"value {format_value(e.value)} is not in the domain of {e.var}")
        elif isinstance(e, Not):
            walk(e.operand)
        else:
            for op in e.operands:
                walk(op)
    walk(formula)


def count_contexts(model: CausalModel) -> int:
    n = 1
    for name in model.exogenous:
        n *= len(model.domain_of(name).values)
    return n


def contexts(model: CausalModel, limit: int = MAX_CONTEXTS) -> Iterator[Context]:
    """All contexts in canonical order.

    Exogenous variables are taken by name; the last one varies fastest and
    values follow declared domain order.
    """
    total = count_contexts(model)
    if total > limit:
        raise SearchCapExceeded(f"{total} contexts exceed the limit of {limit}")
    names = model.exogenous
    for values in itertools.product(*(model.domain_of(n).values for n in names)):
        yield Context(zip(names, values))


@dataclass(frozen=True)
class Influence:
    """Result of an exhaustive functional-influence check."""

    influences: bool
    source: str
    target: str
    contexts_examined: int
    value_pairs: int
    witness: Optional[Tuple[Context, Value, Value]] = None

    def __bool__(self) -> bool:
        return self.influences

    def to_dict(self) -> dict:
        out = {"influences": self.influences, "source": self.source,
               "target": self.target, "contexts_examined": self.contexts_examined,
               "value_pairs": self.value_pairs, "witness": None}
        if self.witness is not None:
            u, a1, a2 = self.witness
            out["witness"] = {"context": u.to_dict(), "values": [format_value(a1),
                                                                 format_value(a2)]}
        return out


def functionally_influences(model: CausalModel, source: str, target: str,
                            limit: int = MAX_CONTEXTS) -> Influence:
    """Whether setting ``source`` to different values can change ``target``.

    Every context and every unordered pair of source values is tried; the
    witness is the first (context, a1, a2) in canonical order.
    """
    model.require_valid()
    if source == target:
        raise ModelError("source and target must differ")
    for name in (source, target):
        if model.variable(name).exogenous:
            raise ModelError(f"{name} is exogenous; influence is defined between "
                             "endogenous variables")
    values = model.domain_of(source).values
    pairs = list(itertools.combinations(values, 2))
    examined = 0
    for u in contexts(model, limit):
        examined += 1
        outcomes = {a: solve(model, u, {source: a})[target] for a in values}
        for a1, a2 in pairs:
            if outcomes[a1] != outcomes[a2]:
                return Influence(True, source, target, examined, len(pairs), (u, a1, a2))
    return Influence(False, source, target, examined, len(pairs))
