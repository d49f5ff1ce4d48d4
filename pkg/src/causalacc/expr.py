"""Expression trees for structural equations and causal formulas.

Every node is an immutable dataclass.  Boolean values are Python ``bool``;
values of enumerated domains are plain ``str`` symbols.  A causal formula is
an expression built only from :class:`Eq`, :class:`Not`, :class:`And` and
:class:`Or` nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Tuple, Union

Value = Union[bool, str]


class Expr:
    """Base class of expression nodes."""

    __slots__ = ()

    def variables(self) -> frozenset:
        """Names of all variables referenced by this expression."""
        out: set = set()
        _collect(self, out)
        return frozenset(out)

    def evaluate(self, env: Mapping[str, Value]) -> Value:
        return compile_expr(self)(env)


@dataclass(frozen=True)
class Const(Expr):
    value: Value


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Not(Expr):
    operand: Expr


@dataclass(frozen=True)
class And(Expr):
    operands: Tuple[Expr, ...]


@dataclass(frozen=True)
class Or(Expr):
    operands: Tuple[Expr, ...]


@dataclass(frozen=True)
class Eq(Expr):
    """Equality test ``var = value``; also the primitive event of a formula."""

    var: str
    value: Value


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class Case(Expr):
    """Case analysis over the value of a variable.

    ``arms`` maps values of ``var`` to result expressions, in source order.
    ``default`` covers every value without an explicit arm.
    """

    var: str
    arms: Tuple[Tuple[Value, Expr], ...]
    default: Optional[Expr] = None


def _collect(e: Expr, out: set) -> None:
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, Eq):
        out.add(e.var)
    elif isinstance(e, Not):
        _collect(e.operand, out)
    elif isinstance(e, (And, Or)):
        for op in e.operands:
            _collect(op, out)
    elif isinstance(e, If):
        _collect(e.cond, out)
        _collect(e.then, out)
        _collect(e.orelse, out)
    elif isinstance(e, Case):
        out.add(e.var)
        for _, arm in e.arms:
            _collect(arm, out)
        if e.default is not None:
            _collect(e.default, out)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variable references by expressions.

    ``Eq`` and ``Case`` refer to a variable by name; when that variable is
    substituted by something other than a plain variable they are rewritten
    into equivalent forms over the replacement expression.
    """
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Not):
        return Not(substitute(e.operand, mapping))
    if isinstance(e, And):
        return And(tuple(substitute(o, mapping) for o in e.operands))
    if isinstance(e, Or):
        return Or(tuple(substitute(o, mapping) for o in e.operands))
    if isinstance(e, If):
        return If(substitute(e.cond, mapping), substitute(e.then, mapping),
                  substitute(e.orelse, mapping))
    if isinstance(e, Eq):
        if e.var not in mapping:
            return e
        repl = mapping[e.var]
        if isinstance(repl, Var):
            return Eq(repl.name, e.value)
        return _value_test(repl, e.value)
    if isinstance(e, Case):
        arms = tuple((v, substitute(a, mapping)) for v, a in e.arms)
        default = None if e.default is None else substitute(e.default, mapping)
        if e.var not in mapping:
            return Case(e.var, arms, default)
        repl = mapping[e.var]
        if isinstance(repl, Var):
            return Case(repl.name, arms, default)
        # unfold into a conditional chain over the replacement expression
        out = default
        for value, arm in reversed(arms):
            out = arm if out is None else If(_value_test(repl, value), arm, out)
        return out
    raise TypeError(f"not an expression: {e!r}")


def _value_test(e: Expr, value: Value) -> Expr:
    """Boolean expression that is true iff ``e`` evaluates to ``value``."""
    if isinstance(e, Const):
        return Const(e.value == value)
    if isinstance(e, Var):
        return Eq(e.name, value)
    if value is True:
        return e
    if value is False:
        return Not(e)
    if isinstance(e, If):
        return If(e.cond, _value_test(e.then, value), _value_test(e.orelse, value))
    if isinstance(e, Case):
        arms = tuple((v, _value_test(a, value)) for v, a in e.arms)
        default = None if e.default is None else _value_test(e.default, value)
        return Case(e.var, arms, default)
    raise TypeError(f"cannot test {e!r} against {value!r}")


Compiled = Callable[[Mapping[str, Value]], Value]


def compile_expr(e: Expr) -> Compiled:
    """Turn an expression into a closure over an environment mapping."""
    if isinstance(e, Const):
        v = e.value
        return lambda env: v
    if isinstance(e, Var):
        name = e.name
        return lambda env: env[name]
    if isinstance(e, Not):
        f = compile_expr(e.operand)
        return lambda env: not f(env)
    if isinstance(e, And):
        fs = tuple(compile_expr(o) for o in e.operands)
        return lambda env: all(f(env) for f in fs)
    if isinstance(e, Or):
        fs = tuple(compile_expr(o) for o in e.operands)
        return lambda env: any(f(env) for f in fs)
    if isinstance(e, Eq):
        name, value = e.var, e.value
        return lambda env: env[name] == value
    if isinstance(e, If):
        c, t, o = compile_expr(e.cond), compile_expr(e.then), compile_expr(e.orelse)
        return lambda env: t(env) if c(env) else o(env)
    if isinstance(e, Case):
        name = e.var
        table = {v: compile_expr(a) for v, a in e.arms}
        default = None if e.default is None else compile_expr(e.default)

        def case(env):
            arm = table.get(env[name], default)
            if arm is None:
                raise KeyError(f"case over {name} has no arm for {env[name]!r}")
            return arm(env)
        return case
    raise TypeError(f"not an expression: {e!r}")


def is_formula(e: Expr) -> bool:
    """True if ``e`` only uses primitive events and boolean connectives."""
    if isinstance(e, Eq):
        return True
    if isinstance(e, Not):
        return is_formula(e.operand)
    if isinstance(e, (And, Or)):
        return all(is_formula(o) for o in e.operands)
    return False


def negate(e: Expr) -> Expr:
    return e.operand if isinstance(e, Not) else Not(e)
