"""Discrete structural causal models for accountability analysis."""

from .expr import And, Case, Const, Eq, Expr, If, Not, Or, Var
from .model import (BOOL, CausalModel, Diagnostic, Domain, ModelError, Variable,
                    topological_order, validate)
from .semantics import (Assignment, Context, Influence, Intervention, SearchCapExceeded,
                        contexts, evaluate, functionally_influences, intervene, satisfies)

__version__ = "0.1.0"
