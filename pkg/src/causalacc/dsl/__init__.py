"""Textual model format: parsing, canonical serialization and DOT export."""

from .lexer import ParseDiagnostic, SourceSpan
from .parser import (ParseError, ParseResult, load, parse, parse_formula, parse_model,
                     parse_pairs)
from .serialize import export_dot, format_expr, serialize

__all__ = [
    "ParseDiagnostic", "ParseError", "ParseResult", "SourceSpan", "export_dot",
    "format_expr", "load", "parse", "parse_formula", "parse_model", "parse_pairs",
    "serialize",
]
