# raagtool/ncpoly.py
"""
Noncommutative *-polynomials over vertex-indexed variables x_v, x_v*.

Coefficients are exact complex numbers (pruned only when exactly zero);
floating point error enters only when a polynomial is evaluated against
an operator context.
"""

from __future__ import annotations

import json
import sys
from functools import reduce
from itertools import product
from operator import matmul
from typing import Dict, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np
import scipy.sparse
from scipy.sparse.linalg import LinearOperator

from errors import (
    ExpressionSyntaxError,
    MissingSymbolError,
    ShapeMismatchError,
    StarredSymbolError,
)
from expr_parser import parse_poly_text
from graph_core import SimpleGraph


class Symbol(NamedTuple):
    vertex: str
    starred: bool = False

    def __str__(self) -> str:
        return f"x_{self.vertex}{'*' if self.starred else ''}"

    def star(self) -> "Symbol":
        return Symbol(self.vertex, not self.starred)


Monomial = Tuple[Symbol, ...]


def symbol(vertex: str, starred: bool = False) -> Symbol:
    return Symbol(sys.intern(vertex), starred)


def _mono_key(mono: Monomial):
    return (len(mono), [(s.vertex, s.starred) for s in mono])


class NcPolynomial:
    """Immutable map monomial -> complex coefficient with no stored zeros."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, complex]] = None):
        clean: Dict[Monomial, complex] = {}
        for mono, coeff in (terms or {}).items():
            coeff = complex(coeff)
            if coeff != 0:
                clean[tuple(mono)] = coeff
        self.terms = clean

    @classmethod
    def constant(cls, c: complex) -> "NcPolynomial":
        return cls({(): c})

    @classmethod
    def variable(cls, vertex: str, starred: bool = False) -> "NcPolynomial":
        return cls({(symbol(vertex, starred),): 1.0})

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def vertices(self) -> List[str]:
        seen = []
        for mono in sorted(self.terms, key=_mono_key):
            for s in mono:
                if s.vertex not in seen:
                    seen.append(s.vertex)
        return seen

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "NcPolynomial") -> "NcPolynomial":
        return poly_add(self, other)

    def __sub__(self, other: "NcPolynomial") -> "NcPolynomial":
        return poly_add(self, other, -1.0)

    def __neg__(self) -> "NcPolynomial":
        return poly_scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, NcPolynomial):
            return poly_multiply(self, other)
        return poly_scale(self, other)

    def __rmul__(self, c) -> "NcPolynomial":
        return poly_scale(self, c)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=_mono_key):
            c = self.terms[mono]
            body = " ".join(str(s) for s in mono) or "1"
            parts.append(f"({c.real:g}{c.imag:+g}i)*{body}")
        return " + ".join(parts)

    __repr__ = __str__


# -----------------------------
# Algebra
# -----------------------------

def parse_poly(text: str, g: Optional[SimpleGraph] = None) -> NcPolynomial:
    """Parse the X_v / X_v* grammar; vertices are checked against g when given."""
    raw = parse_poly_text(text)
    terms = {}
    for mono, coeff in raw.items():
        symbols = []
        for name, starred in mono:
            if g is not None:
                g.index(name)
            symbols.append(symbol(name, starred))
        terms[tuple(symbols)] = coeff
    return NcPolynomial(terms)


def poly_add(p: NcPolynomial, q: NcPolynomial, scale: complex = 1.0) -> NcPolynomial:
    out = dict(p.terms)
    for mono, c in q.terms.items():
        out[mono] = out.get(mono, 0) + scale * c
    return NcPolynomial(out)


def poly_scale(p: NcPolynomial, c: complex) -> NcPolynomial:
    return NcPolynomial({m: c * v for m, v in p.terms.items()})


def poly_multiply(p: NcPolynomial, q: NcPolynomial) -> NcPolynomial:
    out: Dict[Monomial, complex] = {}
    for m1, c1 in p.terms.items():
        for m2, c2 in q.terms.items():
            mono = m1 + m2
            out[mono] = out.get(mono, 0) + c1 * c2
    return NcPolynomial(out)


def adjoint(p: NcPolynomial) -> NcPolynomial:
    """Reverse every monomial, star every symbol, conjugate every coefficient."""
    return NcPolynomial({
        tuple(s.star() for s in reversed(mono)): c.conjugate() for mono, c in p.terms.items()
    })


def l1_norm(p: NcPolynomial) -> float:
    return float(sum(abs(c) for c in p.terms.values()))


def hermitian_substitution(p: NcPolynomial) -> NcPolynomial:
    """q with q(x, x*) = p(x + x*); input must be free of starred symbols."""
    out: Dict[Monomial, complex] = {}
    for mono, c in p.terms.items():
        if any(s.starred for s in mono):
            raise StarredSymbolError(f"starred symbol in {mono}")
        for choice in product((False, True), repeat=len(mono)):
            expanded = tuple(Symbol(s.vertex, star) for s, star in zip(mono, choice))
            out[expanded] = out.get(expanded, 0) + c
    return NcPolynomial(out)


# -----------------------------
# Evaluation
# -----------------------------

def _adjoint_of(op):
    if isinstance(op, LinearOperator):
        return op.H
    if scipy.sparse.issparse(op):
        return op.conj().T.tocsr()
    if hasattr(op, "adjoint") and not isinstance(op, np.ndarray):
        return op.adjoint()
    return np.conj(op).T


def star_context(ops: Mapping[str, object]) -> Dict[Symbol, object]:
    """x_v -> A_v and x_v* -> A_v^H for each vertex."""
    ctx: Dict[Symbol, object] = {}
    for v, op in ops.items():
        ctx[symbol(v)] = op
        ctx[symbol(v, True)] = _adjoint_of(op)
    return ctx


def self_adjoint_context(ops: Mapping[str, object]) -> Dict[Symbol, object]:
    """x_v and x_v* both map to the same Hermitian operator."""
    ctx: Dict[Symbol, object] = {}
    for v, op in ops.items():
        ctx[symbol(v)] = op
        ctx[symbol(v, True)] = op
    return ctx


def _lookup(context: Mapping[Symbol, object], s: Symbol):
    try:
        return context[s]
    except KeyError:
        raise MissingSymbolError(f"no operator supplied for {s}") from None


def evaluate(p: NcPolynomial, context: Mapping[Symbol, object], unit):
    """Sum of coeff * (left-to-right composition of each monomial)."""
    shape = unit.shape
    result = None
    for mono in sorted(p.terms, key=_mono_key):
        c = p.terms[mono]
        if mono:
            ops = [_lookup(context, s) for s in mono]
            for op in ops:
                if op.shape != shape:
                    raise ShapeMismatchError(f"operator for a symbol has shape {op.shape}, expected {shape}")
            term = reduce(matmul, ops)
        else:
            term = unit
        term = c * term
        result = term if result is None else result + term
    return 0 * unit if result is None else result


def apply(p: NcPolynomial, context: Mapping[Symbol, object], x: np.ndarray) -> np.ndarray:
    """p(context) @ x, applying each monomial right to left without forming products."""
    out = np.zeros(x.shape, dtype=np.result_type(x.dtype, np.complex128))
    for mono in sorted(p.terms, key=_mono_key):
        y = x
        for s in reversed(mono):
            y = _lookup(context, s) @ y
        out += p.terms[mono] * y
    return out


def as_linear_operator(p: NcPolynomial, context: Mapping[Symbol, object], dim: int) -> LinearOperator:
    """Matrix-free p(context); rmatvec evaluates adjoint(p) in the same context."""
    p_star = adjoint(p)
    return LinearOperator(
        (dim, dim),
        matvec=lambda x: apply(p, context, np.asarray(x).reshape(-1)),
        rmatvec=lambda x: apply(p_star, context, np.asarray(x).reshape(-1)),
        dtype=np.complex128,
    )


def lipschitz_check(p: NcPolynomial, q: NcPolynomial, context: Mapping[Symbol, object], unit, c: float):
    """(||p(ctx) - q(ctx)||, max(1, c^deg) * ||p - q||_1) for a context of norm <= c."""
    from norms import operator_norm

    diff = p - q
    deg = max(p.degree, q.degree)
    dim = unit.shape[0]
    lhs = operator_norm(as_linear_operator(diff, context, dim)).value
    rhs = max(1.0, c ** deg) * l1_norm(diff)
    return lhs, rhs


# -----------------------------
# Serialization
# -----------------------------

def _parse_symbol_text(text: str) -> Symbol:
    if not text.startswith("x_") or len(text) <= 2 or text == "x_*":
        raise ExpressionSyntaxError(f"bad symbol {text!r}", 0)
    if text.endswith("*"):
        return symbol(text[2:-1], True)
    return symbol(text[2:])


def to_json(p: NcPolynomial) -> str:
    rows = [
        {"monomial": [str(s) for s in mono], "coeff": [p.terms[mono].real, p.terms[mono].imag]}
        for mono in sorted(p.terms, key=_mono_key)
    ]
    return json.dumps(rows)


def from_json(text: str) -> NcPolynomial:
    rows = json.loads(text)
    out: Dict[Monomial, complex] = {}
    for row in rows:
        mono = tuple(_parse_symbol_text(s) for s in row["monomial"])
        re_, im_ = row["coeff"]
        out[mono] = out.get(mono, 0) + complex(re_, im_)
    return NcPolynomial(out)
