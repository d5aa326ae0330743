# raagtool/expr_parser.py
"""
Text grammars for user input:
  - group words:          "a b' c"
  - group algebra sums:   "1*[a] + (0.5-2i)*[a b'] - [ ]"
  - *-polynomials:        "X_a*X_b + 2*X_c*"

Parsers here only build plain structures (lists, dicts); vertex validation
against a graph happens in the owning module. Every syntax problem raises
ExpressionSyntaxError with the character position.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from errors import ExpressionSyntaxError

Letter = Tuple[str, int]          # (vertex name, +1 | -1)
Symbol = Tuple[str, bool]         # (vertex name, starred)
PolyTerms = Dict[Tuple[Symbol, ...], complex]

_NUMBER_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?i?|i(?![A-Za-z0-9_])")
_WORD_TOKEN_RE = re.compile(r"[^\s'\[\]]+'?")
# Polynomial variable names: any non-blank run without operators or parentheses.
# A hyphen is part of the name only between name characters and not before
# "X_", so `X_v-1` is one variable and `X_a-X_b` stays a difference.
_POLY_NAME_CHAR = r"[^\s*+()-]"
_VAR_RE = re.compile(r"X_(" + _POLY_NAME_CHAR + r"+(?:-(?!X_)" + _POLY_NAME_CHAR + r"+)*)")
_OPERAND_START = re.compile(r"X_|[0-9.(]|i(?![A-Za-z0-9_])")


def _number_value(text: str) -> complex:
    if text == "i":
        return 1j
    if text.endswith("i"):
        return complex(0.0, float(text[:-1]))
    return complex(float(text), 0.0)


class _Scanner:
    """Character scanner with whitespace skipping and position tracking."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def at_end(self) -> bool:
        return self.peek() == ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise ExpressionSyntaxError(f"expected {ch!r}, found {found!r}", self.pos)
        self.pos += 1

    def match(self, regex: re.Pattern) -> Optional[re.Match]:
        self.skip()
        m = regex.match(self.text, self.pos)
        if m:
            self.pos = m.end()
        return m

    def looking_at(self, regex: re.Pattern) -> bool:
        self.skip()
        return regex.match(self.text, self.pos) is not None


# -----------------------------
# Group words
# -----------------------------

def parse_word_text(text: str) -> List[Letter]:
    """Whitespace-separated letters; an apostrophe suffix marks an inverse."""
    letters: List[Letter] = []
    for m in re.finditer(r"\S+", text):
        token = m.group(0)
        if not _WORD_TOKEN_RE.fullmatch(token):
            raise ExpressionSyntaxError(f"bad letter {token!r}", m.start())
        if token.endswith("'"):
            letters.append((token[:-1], -1))
        else:
            letters.append((token, 1))
    return letters


# -----------------------------
# Group algebra expressions
# -----------------------------

def _parse_coefficient(sc: _Scanner) -> complex:
    if sc.peek() == "(":
        sc.expect("(")
        sign = 1.0
        if sc.peek() in ("+", "-"):
            sign = -1.0 if sc.peek() == "-" else 1.0
            sc.pos += 1
        m = sc.match(_NUMBER_RE)
        if not m:
            raise ExpressionSyntaxError("expected a number", sc.pos)
        value = sign * _number_value(m.group(0))
        while sc.peek() in ("+", "-"):
            sign = -1.0 if sc.peek() == "-" else 1.0
            sc.pos += 1
            m = sc.match(_NUMBER_RE)
            if not m:
                raise ExpressionSyntaxError("expected a number", sc.pos)
            value += sign * _number_value(m.group(0))
        sc.expect(")")
        return value
    m = sc.match(_NUMBER_RE)
    if not m:
        raise ExpressionSyntaxError("expected a coefficient", sc.pos)
    return _number_value(m.group(0))


def _parse_bracket_word(sc: _Scanner) -> List[Letter]:
    sc.expect("[")
    start = sc.pos
    close = sc.text.find("]", start)
    if close < 0:
        raise ExpressionSyntaxError("unterminated '['", start)
    inner = sc.text[start:close]
    try:
        letters = parse_word_text(inner)
    except ExpressionSyntaxError as e:
        raise ExpressionSyntaxError(str(e).rsplit(" at position", 1)[0], start + e.position) from None
    sc.pos = close + 1
    return letters


def parse_algebra_text(text: str) -> List[Tuple[complex, List[Letter]]]:
    """Sum of `coeff * [word]` terms; a bare `[word]` has coefficient 1."""
    sc = _Scanner(text)
    terms: List[Tuple[complex, List[Letter]]] = []
    if sc.at_end():
        raise ExpressionSyntaxError("empty expression", 0)
    sign = 1.0
    if sc.peek() in ("+", "-"):
        sign = -1.0 if sc.peek() == "-" else 1.0
        sc.pos += 1
    while True:
        if sc.peek() == "[":
            coeff = 1.0 + 0j
        else:
            coeff = _parse_coefficient(sc)
            sc.expect("*")
        terms.append((sign * coeff, _parse_bracket_word(sc)))
        if sc.at_end():
            return terms
        ch = sc.peek()
        if ch not in "+-":
            raise ExpressionSyntaxError(f"unexpected {ch!r}", sc.pos)
        sign = -1.0 if ch == "-" else 1.0
        sc.pos += 1


# -----------------------------
# *-polynomials
# -----------------------------

def _poly_add(p: PolyTerms, q: PolyTerms, scale: complex = 1.0) -> PolyTerms:
    out = dict(p)
    for mono, c in q.items():
        value = out.get(mono, 0) + scale * c
        if value == 0:
            out.pop(mono, None)
        else:
            out[mono] = value
    return out


def _poly_mul(p: PolyTerms, q: PolyTerms) -> PolyTerms:
    out: PolyTerms = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            mono = m1 + m2
            value = out.get(mono, 0) + c1 * c2
            if value == 0:
                out.pop(mono, None)
            else:
                out[mono] = value
    return out


class _PolyParser:
    def __init__(self, text: str):
        self.sc = _Scanner(text)

    def parse(self) -> PolyTerms:
        if self.sc.at_end():
            raise ExpressionSyntaxError("empty expression", 0)
        result = self.expr()
        if not self.sc.at_end():
            raise ExpressionSyntaxError(f"unexpected {self.sc.peek()!r}", self.sc.pos)
        return result

    def expr(self) -> PolyTerms:
        result = self.term()
        while self.sc.peek() in ("+", "-"):
            sign = -1.0 if self.sc.peek() == "-" else 1.0
            self.sc.pos += 1
            result = _poly_add(result, self.term(), sign)
        return result

    def term(self) -> PolyTerms:
        result = self.unary()
        while self.sc.peek() == "*":
            self.sc.pos += 1
            result = _poly_mul(result, self.unary())
        if self.sc.looking_at(_OPERAND_START):
            raise ExpressionSyntaxError("juxtaposition is not allowed; use '*'", self.sc.pos)
        return result

    def unary(self) -> PolyTerms:
        ch = self.sc.peek()
        if ch in ("+", "-"):
            self.sc.pos += 1
            inner = self.unary()
            return inner if ch == "+" else {m: -c for m, c in inner.items()}
        return self.atom()

    def atom(self) -> PolyTerms:
        sc = self.sc
        ch = sc.peek()
        if ch == "(":
            sc.pos += 1
            inner = self.expr()
            sc.expect(")")
            return inner
        m = sc.match(_VAR_RE)
        if m:
            starred = self._trailing_star()
            return {((m.group(1), starred),): 1.0 + 0j}
        m = sc.match(_NUMBER_RE)
        if m:
            value = _number_value(m.group(0))
            return {(): value} if value != 0 else {}
        found = ch or "end of input"
        raise ExpressionSyntaxError(f"expected an operand, found {found!r}", sc.pos)

    def _trailing_star(self) -> bool:
        # `X_v*` is an adjoint unless an operand follows the '*'.
        sc = self.sc
        if sc.peek() != "*":
            return False
        save = sc.pos
        sc.pos += 1
        if sc.looking_at(_OPERAND_START):
            sc.pos = save
            return False
        return True


def parse_poly_text(text: str) -> PolyTerms:
    """Parse the polynomial grammar into {monomial: coefficient}."""
    return _PolyParser(text).parse()
