"""Recursive-descent parser for ``.scm`` model files.

Parsing happens in two passes.  The first builds declarations whose
equations are a raw tree in which bare identifiers are still unresolved; the
second resolves each identifier either to a variable or to a value of the
domain expected at that position, and checks domains along the way.  Every
diagnostic carries a source span.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..expr import And, Case, Const, Eq, Expr, If, Not, Or, Value, Var, is_formula
from ..model import (ANNOTATIONS, BOOL, ENDOGENOUS, EXOGENOUS, CausalModel, Domain,
                     ModelError, Variable, format_value, validate)
from .lexer import LexError, ParseDiagnostic, SourceSpan, Token, tokenize


class ParseError(ModelError):
    """Raised by :func:`load` and friends when the input has errors."""

    def __init__(self, diagnostics: Sequence[ParseDiagnostic]):
        errors = [d for d in diagnostics if d.severity == "error"]
        super().__init__("; ".join(str(d) for d in errors) or "parse error")
        self.parse_diagnostics = list(diagnostics)


class _Syntax(Exception):
    def __init__(self, diagnostic: ParseDiagnostic):
        self.diagnostic = diagnostic


# -- raw tree ----------------------------------------------------------------

@dataclass
class RName:
    text: str
    span: SourceSpan


@dataclass
class RBool:
    value: bool
    span: SourceSpan


@dataclass
class RUnary:
    operand: object
    span: SourceSpan


@dataclass
class RNary:
    op: str          # "&" or "|"
    operands: list
    span: SourceSpan


@dataclass
class REq:
    name: RName
    value: object    # RName or RBool
    span: SourceSpan


@dataclass
class RIf:
    cond: object
    then: object
    orelse: object
    span: SourceSpan


@dataclass
class RCase:
    name: RName
    arms: list       # (RName | RBool | None for default, raw expr)
    span: SourceSpan


@dataclass
class _Decl:
    name: str
    span: SourceSpan
    kind: str
    type_name: str = "bool"
    type_span: Optional[SourceSpan] = None
    expr: object = None
    annotations: list = field(default_factory=list)   # (name, label, span)


@dataclass
class _DomainDecl:
    name: str
    span: SourceSpan
    values: List[Tuple[str, SourceSpan]]


@dataclass
class ParseResult:
    model: Optional[CausalModel]
    diagnostics: List[ParseDiagnostic]
    spans: Dict[str, SourceSpan] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.model is not None

    @property
    def errors(self) -> List[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def warnings(self) -> List[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity == "warning"]


# -- syntax --------------------------------------------------------------------

class TokenStream:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str, kind: Optional[str] = None) -> bool:
        tok = self.peek
        return tok.text == text and tok.kind in ((kind,) if kind else ("kw", "punct", "ident"))

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str, what: Optional[str] = None) -> Token:
        if self.at(text):
            return self.next()
        raise self.error(f"expected {what or repr(text)}")

    def ident(self, what: str = "identifier") -> Token:
        tok = self.peek
        if tok.kind == "ident":
            return self.next()
        raise self.error(f"expected {what}")

    def error(self, message: str, code: str = "syntax-error") -> _Syntax:
        tok = self.peek
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return _Syntax(ParseDiagnostic("error", code, f"{message}, found {found}", tok.span))


class ExprParser:
    """Expression grammar shared by equations and command-line formulas."""

    def __init__(self, ts: TokenStream):
        self.ts = ts

    def expr(self):
        ts = self.ts
        if ts.at("if", "kw"):
            start = ts.next().span
            cond = self.expr()
            ts.expect("then", "'then'")
            then = self.expr()
            ts.expect("else", "'else'")
            orelse = self.expr()
            return RIf(cond, then, orelse, start)
        return self.disjunction()

    def disjunction(self):
        first = self.conjunction()
        ops = [first]
        while self.ts.accept("|"):
            ops.append(self.conjunction())
        return first if len(ops) == 1 else RNary("|", ops, _span_of(first))

    def conjunction(self):
        first = self.unary()
        ops = [first]
        while self.ts.accept("&"):
            ops.append(self.unary())
        return first if len(ops) == 1 else RNary("&", ops, _span_of(first))

    def unary(self):
        tok = self.ts.accept("!")
        if tok:
            return RUnary(self.unary(), tok.span)
        return self.test()

    def test(self):
        prim = self.primary()
        if self.ts.at("==") or self.ts.at("="):
            op = self.ts.next()
            if not isinstance(prim, RName):
                raise _Syntax(ParseDiagnostic(
                    "error", "syntax-error",
                    "left side of an equality test must be a variable name", op.span))
            return REq(prim, self.value(), prim.span)
        return prim

    def value(self):
        tok = self.ts.peek
        if tok.kind == "kw" and tok.text in ("true", "false"):
            self.ts.next()
            return RBool(tok.text == "true", tok.span)
        if tok.kind == "ident":
            self.ts.next()
            return RName(tok.text, tok.span)
        raise self.ts.error("expected a value")

    def primary(self):
        ts = self.ts
        tok = ts.peek
        if ts.accept("("):
            inner = self.expr()
            ts.expect(")", "')'")
            return inner
        if tok.kind == "kw" and tok.text in ("true", "false"):
            ts.next()
            return RBool(tok.text == "true", tok.span)
        if tok.kind == "kw" and tok.text == "if":
            return self.expr()
        if tok.kind == "kw" and tok.text == "case":
            return self.case()
        if tok.kind == "ident":
            ts.next()
            return RName(tok.text, tok.span)
        raise ts.error("expected an expression")

    def case(self):
        ts = self.ts
        start = ts.expect("case").span
        name = ts.ident("variable name after 'case'")
        ts.expect("{", "'{'")
        arms = []
        while True:
            if ts.peek.kind == "ident" and ts.peek.text == "_":
                ts.next()
                label = None
            else:
                label = self.value()
            ts.expect("=>", "'=>'")
            arms.append((label, self.expr()))
            if not ts.accept(","):
                break
            if ts.at("}"):
                break
        ts.expect("}", "'}' or ','")
        return RCase(RName(name.text, name.span), arms, start)


def _span_of(raw) -> SourceSpan:
    return raw.span


class ModelParser:
    def __init__(self, text: str, filename: str):
        self.filename = filename
        self.ts = TokenStream(tokenize(text, filename))
        self.exprs = ExprParser(self.ts)

    def parse(self):
        ts = self.ts
        ts.expect("model", "'model'")
        tok = ts.peek
        if tok.kind == "string":
            ts.next()
            name = tok.value
        elif tok.kind == "ident":
            ts.next()
            name = tok.text
        else:
            raise ts.error("expected a model name")
        name_span = tok.span
        ts.expect("{", "'{'")
        domains, decls = [], []
        while not ts.at("}"):
            if ts.at("domain", "kw"):
                domains.append(self.domain())
            elif ts.at("exogenous", "kw"):
                decls.append(self.declaration(EXOGENOUS))
            elif ts.at("var", "kw"):
                decls.append(self.declaration(ENDOGENOUS))
            else:
                raise ts.error("expected 'domain', 'exogenous', 'var' or '}'")
        ts.expect("}")
        if ts.peek.kind != "eof":
            raise ts.error("expected end of input after the model block")
        return name, name_span, domains, decls

    def domain(self) -> _DomainDecl:
        ts = self.ts
        ts.expect("domain")
        name = ts.ident("domain name")
        ts.expect("{", "'{'")
        values = []
        while True:
            v = ts.ident("domain value")
            values.append((v.text, v.span))
            if not ts.accept(","):
                break
            if ts.at("}"):
                break
        ts.expect("}", "'}' or ','")
        ts.accept(";")
        return _DomainDecl(name.text, name.span, values)

    def declaration(self, kind: str) -> _Decl:
        ts = self.ts
        ts.next()
        name = ts.ident("variable name")
        ts.expect(":", "':'")
        typ = ts.ident("domain name")
        decl = _Decl(name.text, name.span, kind, typ.text, typ.span)
        eq = ts.accept("=")
        if eq is not None:
            if kind == EXOGENOUS:
                raise _Syntax(ParseDiagnostic("error", "exogenous-equation",
                                              f"exogenous variable {name.text} cannot have an "
                                              "equation", eq.span))
            decl.expr = self.exprs.expr()
        elif kind == ENDOGENOUS:
            raise ts.error(f"expected '=' and an equation for {name.text}", "missing-equation")
        ts.expect(";", "';'")
        while ts.at("@"):
            at = ts.next()
            ann = ts.ident("annotation name")
            label = None
            if ts.peek.kind == "string":
                label = ts.next().value
            decl.annotations.append((ann.text, label, ann.span if ann else at.span))
        return decl


# -- resolution ----------------------------------------------------------------

class _Resolver:
    def __init__(self, domains: Dict[str, Domain], decls: Dict[str, _Decl],
                 diags: List[ParseDiagnostic]):
        self.domains = domains
        self.decls = decls
        self.diags = diags
        # value symbol -> names of the domains that contain it
        self.symbols: Dict[str, List[str]] = {}
        for d in domains.values():
            for v in d.values:
                if isinstance(v, str):
                    self.symbols.setdefault(v, []).append(d.name)

    def error(self, code, message, span):
        self.diags.append(ParseDiagnostic("error", code, message, span))

    def domain_of(self, name: str) -> Optional[Domain]:
        return self.domains.get(self.decls[name].type_name)

    def value(self, raw, domain: Optional[Domain]) -> Optional[Value]:
        if isinstance(raw, RBool):
            value = raw.value
        else:
            value = raw.text
        if domain is not None and value not in domain:
            self.error("domain-mismatch",
                       f"value {format_value(value)} is not in domain {domain.name}", raw.span)
            return None
        return value

    def expr(self, raw, expected: Optional[Domain]) -> Expr:
        if isinstance(raw, RBool):
            if expected is not None and expected != BOOL:
                self.error("domain-mismatch",
                           f"boolean literal where domain {expected.name} is expected", raw.span)
            return Const(raw.value)
        if isinstance(raw, RName):
            if raw.text in self.decls:
                dom = self.domain_of(raw.text)
                if expected is not None and dom is not None and dom != expected:
                    self.error("domain-mismatch",
                               f"{raw.text} has domain {dom.name} where {expected.name} "
                               "is expected", raw.span)
                return Var(raw.text)
            if expected is not None and raw.text in expected:
                return Const(raw.text)
            if raw.text in self.symbols:
                if expected is not None:
                    self.error("domain-mismatch",
                               f"value {raw.text} is not in domain {expected.name}", raw.span)
                return Const(raw.text)
            self.error("undefined-ref", f"undefined variable {raw.text}", raw.span)
            return Var(raw.text)
        if isinstance(raw, RUnary):
            self._want_bool(expected, raw.span, "'!'")
            return Not(self.expr(raw.operand, BOOL))
        if isinstance(raw, RNary):
            self._want_bool(expected, raw.span, repr(raw.op))
            ops = tuple(self.expr(o, BOOL) for o in raw.operands)
            return And(ops) if raw.op == "&" else Or(ops)
        if isinstance(raw, REq):
            self._want_bool(expected, raw.span, "an equality test")
            if raw.name.text not in self.decls:
                self.error("undefined-ref", f"undefined variable {raw.name.text}", raw.name.span)
                return Eq(raw.name.text, raw.value.value if isinstance(raw.value, RBool)
                          else raw.value.text)
            value = self.value(raw.value, self.domain_of(raw.name.text))
            return Eq(raw.name.text, value)
        if isinstance(raw, RIf):
            return If(self.expr(raw.cond, BOOL), self.expr(raw.then, expected),
                      self.expr(raw.orelse, expected))
        if isinstance(raw, RCase):
            name = raw.name.text
            dom = None
            if name not in self.decls:
                self.error("undefined-ref", f"undefined variable {name}", raw.name.span)
            else:
                dom = self.domain_of(name)
            arms, default, seen = [], None, []
            for label, body in raw.arms:
                result = self.expr(body, expected)
                if label is None:
                    if default is not None:
                        self.error("syntax-error", "more than one default arm", raw.span)
                    default = result
                    continue
                value = self.value(label, dom)
                if value is None:
                    continue
                if any(type(s) is type(value) and s == value for s in seen):
                    self.error("duplicate-declaration",
                               f"duplicate case arm {format_value(value)}", label.span)
                    continue
                seen.append(value)
                arms.append((value, result))
            if default is None and dom is not None and len(seen) < len(dom.values):
                missing = [format_value(v) for v in dom.values
                           if not any(type(s) is type(v) and s == v for s in seen)]
                self.error("non-exhaustive-case",
                           f"case over {name} misses {', '.join(missing)} and has no default arm",
                           raw.span)
            return Case(name, tuple(arms), default)
        raise TypeError(raw)

    def _want_bool(self, expected, span, what):
        if expected is not None and expected != BOOL:
            self.error("domain-mismatch",
                       f"{what} yields a boolean where domain {expected.name} is expected", span)


def parse(text: str, filename: str = "<input>") -> ParseResult:
    """Parse ``.scm`` source into a model plus diagnostics.

    ``result.model`` is ``None`` whenever an error was reported.
    """
    diags: List[ParseDiagnostic] = []
    try:
        name, name_span, raw_domains, raw_decls = ModelParser(text, filename).parse()
    except LexError as e:
        return ParseResult(None, [e.diagnostic])
    except _Syntax as e:
        return ParseResult(None, [e.diagnostic])

    domains: Dict[str, Domain] = {BOOL.name: BOOL}
    declared: List[Domain] = []
    for d in raw_domains:
        if d.name in domains:
            diags.append(ParseDiagnostic("error", "duplicate-declaration",
                                         f"domain {d.name} declared twice", d.span))
            continue
        names = []
        for v, span in d.values:
            if v in names:
                diags.append(ParseDiagnostic("error", "duplicate-declaration",
                                             f"value {v} repeated in domain {d.name}", span))
            else:
                names.append(v)
        dom = Domain(d.name, tuple(names))
        domains[d.name] = dom
        declared.append(dom)

    decls: Dict[str, _Decl] = {}
    spans: Dict[str, SourceSpan] = {}
    for d in raw_decls:
        if d.name in decls:
            diags.append(ParseDiagnostic("error", "duplicate-declaration",
                                         f"variable {d.name} declared twice", d.span))
            continue
        decls[d.name] = d
        spans[d.name] = d.span
        if d.type_name not in domains:
            diags.append(ParseDiagnostic("error", "undefined-domain",
                                         f"undefined domain {d.type_name}", d.type_span))
        for dom in declared:
            if d.name in dom.values:
                diags.append(ParseDiagnostic(
                    "error", "ambiguous-name",
                    f"variable {d.name} has the same name as a value of domain {dom.name}",
                    d.span))

    resolver = _Resolver(domains, decls, diags)
    variables, equations = [], {}
    for d in decls.values():
        anns, label = set(), None
        for ann, ann_label, span in d.annotations:
            if ann not in ANNOTATIONS:
                diags.append(ParseDiagnostic("error", "unknown-annotation",
                                             f"unknown annotation @{ann}", span))
                continue
            if ann_label is not None:
                if ann != "agent":
                    diags.append(ParseDiagnostic("error", "syntax-error",
                                                 f"@{ann} does not take a label", span))
                elif not ann_label:
                    diags.append(ParseDiagnostic("error", "bad-annotation",
                                                 "agent label must not be empty", span))
                else:
                    label = ann_label
            anns.add(ann)
        variables.append(Variable(d.name, d.kind, d.type_name, frozenset(anns), label))
        if d.kind == ENDOGENOUS:
            equations[d.name] = resolver.expr(d.expr, domains.get(d.type_name))

    if any(x.severity == "error" for x in diags):
        return ParseResult(None, diags, spans)

    model = CausalModel(name, variables, equations, declared)
    for problem in validate(model, include_warnings=True):
        span = spans.get(problem.variables[0]) if problem.variables else name_span
        diags.append(ParseDiagnostic(problem.severity, problem.code, problem.message,
                                     span or name_span))
    if not model.effects:
        diags.append(ParseDiagnostic("warning", "no-effect-declared",
                                     "no variable is annotated @effect", name_span))
    if not model.agents:
        diags.append(ParseDiagnostic("warning", "no-agent-declared",
                                     "no variable is annotated @agent", name_span))
    if any(x.severity == "error" for x in diags):
        return ParseResult(None, diags, spans)
    return ParseResult(model, diags, spans)


def parse_model(text: str, filename: str = "<input>") -> CausalModel:
    """Like :func:`parse` but raises :class:`ParseError` on errors."""
    result = parse(text, filename)
    if result.model is None:
        raise ParseError(result.diagnostics)
    return result.model


def load(path) -> CausalModel:
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), str(path))


# -- command-line fragments ----------------------------------------------------

def _fragment_stream(text: str, what: str) -> TokenStream:
    try:
        return TokenStream(tokenize(text, f"<{what}>"))
    except LexError as e:
        raise ParseError([e.diagnostic]) from None


def parse_formula(text: str, model: CausalModel) -> Expr:
    """Parse a causal formula such as ``T=false & !(P=true)`` against ``model``."""
    ts = _fragment_stream(text, "formula")
    try:
        raw = ExprParser(ts).expr()
        if ts.peek.kind != "eof":
            raise ts.error("unexpected input after formula")
    except _Syntax as e:
        raise ParseError([e.diagnostic]) from None
    diags: List[ParseDiagnostic] = []
    decls = {v.name: _Decl(v.name, None, v.kind, v.domain) for v in model.variables}
    formula = _Resolver(dict(model.domains), decls, diags).expr(raw, BOOL)
    if diags:
        raise ParseError(diags)
    if not is_formula(formula):
        raise ModelError("a formula combines primitive events X=x with !, & and |")
    return formula


def parse_pairs(text: str, model: CausalModel) -> Dict[str, Value]:
    """Parse ``X=x,Y=y`` pairs, resolving each value in the variable's domain."""
    out: Dict[str, Value] = {}
    if not text.strip():
        return out
    for item in text.split(","):
        if "=" not in item:
            raise ModelError(f"expected Var=value, got {item.strip()!r}")
        name, raw = (s.strip() for s in item.split("=", 1))
        dom = model.domain_of(name)
        if raw in ("true", "false") and dom == BOOL:
            value: Value = raw == "true"
        else:
            value = raw
        if value not in dom:
            raise ModelError(f"{raw} is not a value of {name} (domain {dom.name})")
        if name in out:
            raise ModelError(f"{name} given twice")
        out[name] = value
    return out
