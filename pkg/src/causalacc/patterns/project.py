"""Projection onto a subset of variables and functional equivalence."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from ..expr import Expr, substitute
from ..model import CausalModel, ModelError, format_value, topological_order
from ..semantics import Context, contexts, solve


class SignatureError(ModelError):
    """Two models cannot be compared because their contexts do not line up."""


def project(model: CausalModel, keep: Iterable[str],
            order: Optional[Iterable[str]] = None) -> CausalModel:
    """Eliminate every endogenous variable outside ``keep`` by substitution.

    All exogenous variables are retained.  ``order`` fixes the elimination
    order (any order gives the same semantics on the kept variables; the
    default is topological).
    """
    model.require_valid()
    keep = set(keep)
    for name in keep:
        if model.variable(name).exogenous:
            raise ModelError(f"{name} is exogenous; projection keeps only endogenous "
                             "variables (exogenous ones are always retained)")
    drop = [n for n in model.endogenous if n not in keep]
    if not drop:
        return model
    if order is None:
        order = [n for n in topological_order(model) if n in drop]
    else:
        order = list(order)
        if sorted(order) != sorted(drop):
            raise ModelError("elimination order must list exactly the dropped variables")
    eqs: Dict[str, Expr] = dict(model.equations)
    for name in order:
        repl = {name: eqs.pop(name)}
        for other, e in eqs.items():
            if name in e.variables():
                eqs[other] = substitute(e, repl)
    variables = [v for v in model.variables if v.exogenous or v.name in keep]
    return model.replace(variables=variables, equations=eqs)


@dataclass(frozen=True)
class Difference:
    context: Context
    variable: str
    value_a: object
    value_b: object

    def to_dict(self) -> dict:
        return {"context": self.context.to_dict(), "variable": self.variable,
                "values": [format_value(self.value_a), format_value(self.value_b)]}


@dataclass(frozen=True)
class Equivalence:
    """``differences`` holds one entry per distinguishing context, in canonical order."""

    equivalent: bool
    shared: Tuple[str, ...]
    contexts_examined: int
    differences: Tuple[Difference, ...] = ()

    def __bool__(self) -> bool:
        return self.equivalent

    @property
    def context(self) -> Optional[Context]:
        return self.differences[0].context if self.differences else None

    @property
    def variable(self) -> Optional[str]:
        return self.differences[0].variable if self.differences else None

    def to_dict(self) -> dict:
        return {"equivalent": self.equivalent, "shared": list(self.shared),
                "contexts_examined": self.contexts_examined,
                "distinguishing": [d.to_dict() for d in self.differences]}


def _check_alignable(a: CausalModel, b: CausalModel, shared) -> None:
    if a.exogenous != b.exogenous:
        raise SignatureError(
            f"exogenous variables differ: {', '.join(a.exogenous) or '(none)'} vs "
            f"{', '.join(b.exogenous) or '(none)'}")
    for name in a.exogenous:
        if a.domain_of(name).values != b.domain_of(name).values:
            raise SignatureError(f"exogenous variable {name} has different domains")
    for name in shared:
        for m in (a, b):
            if name not in m:
                raise SignatureError(f"shared variable {name} is missing from {m.name!r}")
            if m.variable(name).exogenous:
                raise SignatureError(f"shared variable {name} is exogenous in {m.name!r}")
        if a.domain_of(name).values != b.domain_of(name).values:
            raise SignatureError(f"shared variable {name} has different domains")


def equivalent(model_a: CausalModel, model_b: CausalModel,
               shared: Iterable[str]) -> Equivalence:
    """Whether both models agree on ``shared`` in every context.

    Both are projected onto ``shared`` first, so intermediate variables the
    models do not have in common are irrelevant.
    """
    model_a.require_valid()
    model_b.require_valid()
    names = tuple(sorted(set(shared)))
    _check_alignable(model_a, model_b, names)
    pa, pb = project(model_a, names), project(model_b, names)
    diffs: List[Difference] = []
    n = 0
    for u in contexts(pa):
        n += 1
        ea, eb = solve(pa, u), solve(pb, u)
        for name in names:
            if ea[name] != eb[name]:
                diffs.append(Difference(u, name, ea[name], eb[name]))
                break
    return Equivalence(not diffs, names, n, tuple(diffs))
