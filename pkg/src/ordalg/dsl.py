"""Text format for piecewise power-log functions.

    spec   := piece { ";" piece }
    piece  := bound ".." bound ":" expr
    bound  := rational | "inf"
    expr   := ["-"] term { ("+" | "-") term }
    term   := [coeff "*"] factor { "*" factor }
    factor := "x" [ "^" "(" rational ")" | "^" rational ] | "ln(x)" [ "^" integer ] | rational

Rationals are integers, ``n/d`` or finite decimals (``0.25``, ``1e-3``), all
read exactly.  Example: ``0..1: 1; 1..inf: x^(-2/3)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .symfunc import INF, PartitionError, Piece, PiecewiseFn, Term, combine_terms, normalize

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<range>\.\.)
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?(?:/\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ln>ln\(x\))
  | (?P<inf>inf\b)
  | (?P<x>x\b)
  | (?P<op>[-+*^();:])
    """,
    re.VERBOSE,
)


class DSLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos, line, col = [], 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind, lexeme = m.lastgroup, m.group()
        if kind != "ws":
            out.append(_Tok(kind, lexeme, line, col))
        for ch in lexeme:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    out.append(_Tok("end", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.cur
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise DSLSyntaxError(f"{message}, found {found}", tok.line, tok.column)

    def take(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.cur
        if tok.kind != kind or (text is not None and tok.text != text):
            self.error(f"expected {text or kind}")
        self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.cur.kind == kind and (text is None or self.cur.text == text)

    def rational(self, signed: bool = False) -> Fraction:
        neg = False
        if signed and self.at("op", "-"):
            self.i += 1
            neg = True
        tok = self.take("number")
        try:
            q = Fraction(tok.text)
        except (ValueError, ZeroDivisionError):
            self.error("malformed number", tok)
        return -q if neg else q

    def bound(self):
        if self.at("inf"):
            self.i += 1
            return INF
        return self.rational()

    def factor(self) -> Term:
        if self.at("x"):
            self.i += 1
            if self.at("op", "^"):
                self.i += 1
                if self.at("op", "("):
                    self.i += 1
                    e = self.rational(signed=True)
                    self.take("op", ")")
                else:
                    e = self.rational(signed=True)
                return Term(1, e)
            return Term(1, 1)
        if self.at("ln"):
            self.i += 1
            k = 1
            if self.at("op", "^"):
                self.i += 1
                tok = self.cur
                q = self.rational()
                if q.denominator != 1:
                    self.error("log power must be an integer", tok)
                k = int(q)
            return Term(1, 0, k)
        if self.at("number"):
            return Term(self.rational(), 0)
        self.error("expected x, ln(x) or a number")

    def term(self) -> Term:
        t = self.factor()
        while self.at("op", "*"):
            self.i += 1
            t = t * self.factor()
        return t

    def expr(self) -> tuple[Term, ...]:
        sign = 1
        if self.at("op", "-"):
            self.i += 1
            sign = -1
        terms = [self.term().scaled(sign)]
        while self.at("op", "+") or self.at("op", "-"):
            sign = 1 if self.take("op").text == "+" else -1
            terms.append(self.term().scaled(sign))
        return combine_terms(terms)

    def spec(self) -> list[Piece]:
        pieces = []
        while True:
            start = self.cur
            lo = self.bound()
            self.take("range")
            hi = self.bound()
            self.take("op", ":")
            terms = self.expr()
            try:
                pieces.append(Piece(lo, hi, terms))
            except PartitionError as exc:
                raise DSLSyntaxError(str(exc), start.line, start.column) from None
            if self.at("end"):
                return pieces
            self.take("op", ";")
            if self.at("end"):
                return pieces


def parse_function(text: str) -> PiecewiseFn:
    """Parse DSL text; the pieces must partition (0, inf) exactly."""
    pieces = _Parser(text).spec()
    if pieces[-1].hi != INF:
        raise PartitionError(f"partition ends at {pieces[-1].hi}, not inf")
    return normalize(PiecewiseFn(tuple(pieces)))


def _format_q(q) -> str:
    if isinstance(q, float):
        return repr(q)
    return str(q)


def _format_term(t: Term) -> str:
    factors = []
    if t.exp == 1:
        factors.append("x")
    elif t.exp != 0:
        factors.append(f"x^({t.exp})")
    if t.logpow == 1:
        factors.append("ln(x)")
    elif t.logpow:
        factors.append(f"ln(x)^{t.logpow}")
    mag = abs(t.coeff)
    if not factors:
        return _format_q(mag)
    if mag == 1:
        return "*".join(factors)
    return "*".join([_format_q(mag)] + factors)


def to_dsl(f: PiecewiseFn) -> str:
    """Serialize in the DSL; ``parse_function(to_dsl(f))`` equals ``f``."""
    parts = []
    for p in normalize(f).pieces:
        if not p.terms:
            body = "0"
        else:
            body = ""
            for i, t in enumerate(p.terms):
                neg = t.coeff < 0
                text = _format_term(t)
                if i == 0:
                    body = ("-" if neg else "") + text
                else:
                    body += (" - " if neg else " + ") + text
        hi = "inf" if p.hi == INF else str(p.hi)
        parts.append(f"{p.lo}..{hi}: {body}")
    return "; ".join(parts)
