"""Tokenizer shared by the ``.scm`` and ``.pattern`` formats."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

KEYWORDS = frozenset({
    "model", "domain", "exogenous", "var", "if", "then", "else", "case",
    "true", "false",
})

# longest operators first
PUNCT = ("=>", "==", "->", "{", "}", "(", ")", ";", ":", ",", "=", "|", "&", "!", "@")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1
    offset: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    def to_dict(self) -> dict:
        return {"file": self.file, "line": self.line, "column": self.column,
                "length": self.length}


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    code: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: {self.message} [{self.code}]"

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code,
                "message": self.message, "span": self.span.to_dict()}


@dataclass(frozen=True)
class Token:
    kind: str      # "ident", "string", "kw", "punct", "eof"
    text: str
    span: SourceSpan
    value: Optional[str] = None   # decoded contents of a string literal


class LexError(Exception):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


class Lexer:
    def __init__(self, text: str, filename: str = "<input>"):
        self.text = text
        self.filename = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def span(self, start: int, line: int, col: int, length: int) -> SourceSpan:
        return SourceSpan(self.filename, line, col, max(1, length), start)

    def _advance(self, n: int) -> None:
        for ch in self.text[self.pos:self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def _error(self, code: str, message: str, length: int = 1) -> LexError:
        return LexError(ParseDiagnostic("error", code, message,
                                        self.span(self.pos, self.line, self.col, length)))

    def tokens(self) -> List[Token]:
        out = []
        text = self.text
        while True:
            # whitespace and comments
            while self.pos < len(text):
                ch = text[self.pos]
                if ch in " \t\r\n":
                    self._advance(1)
                elif ch == "#":
                    end = text.find("\n", self.pos)
                    self._advance((len(text) if end < 0 else end) - self.pos)
                else:
                    break
            if self.pos >= len(text):
                # EOF points at the last character so spans stay inside the text
                start = max(0, len(text) - 1)
                line, col = self._line_col(start)
                out.append(Token("eof", "", self.span(start, line, col, 1)))
                return out
            start, line, col = self.pos, self.line, self.col
            ch = text[self.pos]
            m = _IDENT.match(text, self.pos)
            if m:
                word = m.group()
                kind = "kw" if word in KEYWORDS else "ident"
                self._advance(len(word))
                out.append(Token(kind, word, self.span(start, line, col, len(word))))
                continue
            if ch == '"':
                out.append(self._string())
                continue
            for p in PUNCT:
                if text.startswith(p, self.pos):
                    self._advance(len(p))
                    out.append(Token("punct", p, self.span(start, line, col, len(p))))
                    break
            else:
                if ord(ch) > 127:
                    raise self._error("invalid-character",
                                      f"non-ASCII character {ch!r}; identifiers are ASCII only")
                raise self._error("invalid-character", f"unexpected character {ch!r}")

    def _line_col(self, offset: int):
        line = self.text.count("\n", 0, offset) + 1
        last = self.text.rfind("\n", 0, offset)
        return line, offset - last

    def _string(self) -> Token:
        start, line, col = self.pos, self.line, self.col
        i = self.pos + 1
        buf = []
        text = self.text
        while i < len(text):
            ch = text[i]
            if ch == '"':
                raw = text[start:i + 1]
                self._advance(i + 1 - start)
                return Token("string", raw, self.span(start, line, col, len(raw)), "".join(buf))
            if ch == "\n":
                break
            if ch == "\\" and i + 1 < len(text) and text[i + 1] in '"\\':
                buf.append(text[i + 1])
                i += 2
                continue
            buf.append(ch)
            i += 1
        raise LexError(ParseDiagnostic("error", "syntax-error", "unterminated string",
                                       self.span(start, line, col, 1)))


def tokenize(text: str, filename: str = "<input>") -> List[Token]:
    return Lexer(text, filename).tokens()


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
