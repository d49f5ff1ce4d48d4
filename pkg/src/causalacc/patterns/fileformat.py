"""Reader and writer for ``.pattern`` files.

    pattern "lindberg" {
      node A : Agent @agent;
      node P : Principal @principal sink;
      edge A -> M contractible;
      edge M -> P optional;
      obligation "P can sanction A";
    }
"""

from __future__ import annotations

from pathlib import Path
from typing import List

from ..dsl.lexer import LexError, ParseDiagnostic, quote, tokenize
from ..dsl.parser import ParseError, TokenStream, _Syntax
from .definitions import Pattern, PatternEdge, PatternError, PatternNode, Role

_ROLES = {r.value: r for r in Role}


def parse_pattern(text: str, filename: str = "<pattern>") -> Pattern:
    try:
        ts = TokenStream(tokenize(text, filename))
        return _PatternParser(ts).pattern()
    except LexError as e:
        raise ParseError([e.diagnostic]) from None
    except _Syntax as e:
        raise ParseError([e.diagnostic]) from None


def load_pattern(path) -> Pattern:
    path = Path(path)
    return parse_pattern(path.read_text(encoding="utf-8"), str(path))


class _PatternParser:
    def __init__(self, ts: TokenStream):
        self.ts = ts

    def string(self, what: str) -> str:
        tok = self.ts.peek
        if tok.kind != "string":
            raise self.ts.error(f"expected {what}")
        self.ts.next()
        return tok.value

    def pattern(self) -> Pattern:
        ts = self.ts
        ts.expect("pattern", "'pattern'")
        name = self.string("pattern name string")
        ts.expect("{")
        nodes: List[PatternNode] = []
        edges: List[PatternEdge] = []
        obligations: List[str] = []
        description = ""
        start = ts.peek
        while not ts.at("}"):
            if ts.accept("node"):
                nodes.append(self.node())
            elif ts.accept("edge"):
                edges.append(self.edge())
            elif ts.accept("obligation"):
                obligations.append(self.string("obligation text"))
            elif ts.accept("description"):
                description = self.string("description text")
            else:
                raise ts.error("expected node, edge, obligation or description")
            ts.expect(";")
        ts.expect("}")
        if ts.peek.kind != "eof":
            raise ts.error("unexpected input after pattern")
        try:
            return Pattern(name, tuple(nodes), tuple(edges), tuple(obligations), description)
        except PatternError as e:
            raise _Syntax(_diag(start, str(e), "invalid-pattern")) from None

    def node(self) -> PatternNode:
        ts = self.ts
        name = ts.ident("node name").text
        ts.expect(":")
        tok = ts.ident("role")
        if tok.text not in _ROLES:
            raise _Syntax(_diag(tok, f"unknown role {tok.text!r}; expected one of "
                                + ", ".join(sorted(_ROLES)), "unknown-role"))
        requires = set()
        sink = False
        while True:
            if ts.accept("@"):
                requires.add(ts.ident("annotation").text)
            elif ts.accept("sink"):
                sink = True
            else:
                break
        return PatternNode(name, _ROLES[tok.text], frozenset(requires), sink)

    def edge(self) -> PatternEdge:
        ts = self.ts
        src = ts.ident("edge source").text
        ts.expect("->")
        dst = ts.ident("edge target").text
        contractible = optional = False
        while True:
            if ts.accept("contractible"):
                contractible = True
            elif ts.accept("optional"):
                optional = True
            else:
                break
        return PatternEdge(src, dst, contractible, optional)


def _diag(tok, message: str, code: str):
    return ParseDiagnostic("error", code, message, tok.span)


def format_pattern(p: Pattern) -> str:
    lines = [f"pattern {quote(p.name)} {{"]
    if p.description:
        lines.append(f"  description {quote(p.description)};")
    for n in p.nodes:
        extra = "".join(f" @{a}" for a in sorted(n.requires)) + (" sink" if n.sink else "")
        lines.append(f"  node {n.name} : {n.role.value}{extra};")
    for e in p.edges:
        flags = (" contractible" if e.contractible else "") + (" optional" if e.optional else "")
        lines.append(f"  edge {e.source} -> {e.target}{flags};")
    for o in p.obligations:
        lines.append(f"  obligation {quote(o)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
