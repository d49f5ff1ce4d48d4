"""Canonical ``.scm`` text and Graphviz DOT output."""

from __future__ import annotations

from typing import List

from ..expr import And, Case, Const, Eq, Expr, If, Not, Or, Var
from ..model import CausalModel, format_value, topological_order
from .lexer import quote

# binding strength; an operand weaker than its slot is parenthesized
_IF, _OR, _AND, _NOT, _ATOM = range(5)


def format_expr(e: Expr, slot: int = _IF) -> str:
    text, level = _fmt(e)
    return f"({text})" if level < slot else text


def _fmt(e: Expr):
    if isinstance(e, Const):
        return format_value(e.value), _ATOM
    if isinstance(e, Var):
        return e.name, _ATOM
    if isinstance(e, Eq):
        return f"{e.var} == {format_value(e.value)}", _ATOM
    if isinstance(e, Not):
        return "!" + format_expr(e.operand, _NOT), _NOT
    if isinstance(e, And):
        return " & ".join(format_expr(o, _NOT) for o in e.operands), _AND
    if isinstance(e, Or):
        return " | ".join(format_expr(o, _AND) for o in e.operands), _OR
    if isinstance(e, If):
        return (f"if {format_expr(e.cond)} then {format_expr(e.then)} "
                f"else {format_expr(e.orelse)}"), _IF
    if isinstance(e, Case):
        arms = [f"{format_value(v)} => {format_expr(a)}" for v, a in e.arms]
        if e.default is not None:
            arms.append(f"_ => {format_expr(e.default)}")
        return f"case {e.var} {{ {', '.join(arms)} }}", _ATOM
    raise TypeError(e)


def _annotations(v) -> str:
    parts = []
    for ann in sorted(v.annotations):
        if ann == "agent" and v.agent_label is not None:
            parts.append(f"@agent {quote(v.agent_label)}")
        else:
            parts.append(f"@{ann}")
    return (" " + " ".join(parts)) if parts else ""


def serialize(model: CausalModel) -> str:
    """Canonical text: domains, exogenous variables, then equations in topological order."""
    lines: List[str] = [f"model {quote(model.name)} {{"]
    for d in sorted(model.declared_domains, key=lambda d: d.name):
        lines.append(f"  domain {d.name} {{ {', '.join(format_value(v) for v in d.values)} }}")
    for name in model.exogenous:
        v = model.variable(name)
        lines.append(f"  exogenous {name} : {v.domain};{_annotations(v)}")
    for name in topological_order(model):
        v = model.variable(name)
        lines.append(f"  var {name} : {v.domain} = {format_expr(model.equation(name))};"
                     f"{_annotations(v)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(model: CausalModel) -> str:
    """Graphviz digraph of the model.

    Exogenous variables are dashed ellipses, endogenous variables boxes, and
    agents rounded boxes.  Effects get a double border.
    """
    model.require_valid()
    order = list(model.exogenous) + topological_order(model)
    lines = [f"digraph {quote(model.name)} {{", "  rankdir=LR;"]
    for name in order:
        v = model.variable(name)
        if v.exogenous:
            attrs = ["shape=ellipse", "style=dashed"]
        elif v.is_agent:
            attrs = ["shape=box", "style=rounded"]
        else:
            attrs = ["shape=box"]
        if "effect" in v.annotations:
            attrs.append("peripheries=2")
        label = quote(name)
        if v.agent_label is not None:
            label = label[:-1] + "\\n" + quote(v.agent_label)[1:]
        attrs.insert(0, f"label={label}")
        lines.append(f"  {quote(name)} [{', '.join(attrs)}];")
    rank = {n: i for i, n in enumerate(order)}
    for parent, child in sorted(model.edges, key=lambda pc: (rank[pc[1]], rank[pc[0]])):
        lines.append(f"  {quote(parent)} -> {quote(child)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
