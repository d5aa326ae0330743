# raagtool/raag_words.py
"""
Word problem and group algebra for the right-angled Artin group of a graph.

Elements are stored as canonical words: fully reduced, then rearranged to the
lexicographically least equivalent word under the letter order
a < a' < b < b' < ... (vertex order, positive letter before its inverse).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
import scipy.sparse

from config import support_guard
from errors import (
    ExpressionSyntaxError,
    GraphMismatchError,
    RadiusTooSmallError,
    SupportGuardError,
)
from expr_parser import parse_algebra_text, parse_word_text
from graph_core import SimpleGraph, lex_normal_form
from norms import NormEstimate, power_norm

Letter = Tuple[int, int]          # (vertex position, +1 | -1)
Word = Tuple[Letter, ...]

_vertex_of = itemgetter(0)


def _letter_key(letter: Letter) -> Tuple[int, int]:
    return (letter[0], 0 if letter[1] > 0 else 1)


def _canonical(g: SimpleGraph, word: Sequence[Letter]) -> Word:
    return lex_normal_form(g, word, _vertex_of, _letter_key)


def _reduce(g: SimpleGraph, letters: Iterable[Letter]) -> List[Letter]:
    """Left-greedy piling: each letter cancels the nearest inverse it can commute back to."""
    masks = g.noncommute_masks
    stack: List[Letter] = []
    for p, e in letters:
        cancel_at = None
        for idx in range(len(stack) - 1, -1, -1):
            q, f = stack[idx]
            if (masks[p] >> q) & 1:
                if q == p and f == -e:
                    cancel_at = idx
                break
        if cancel_at is None:
            stack.append((p, e))
        else:
            del stack[cancel_at]
    return stack


def _left_multiply(g: SimpleGraph, letter: Letter, word: Word) -> Word:
    """Canonical form of letter * word for a canonical word."""
    p, e = letter
    masks = g.noncommute_masks
    for idx, (q, f) in enumerate(word):
        if (masks[p] >> q) & 1:
            if q == p and f == -e:
                return _canonical(g, word[:idx] + word[idx + 1:])
            break
    return _canonical(g, (letter,) + word)


# -----------------------------
# Group elements
# -----------------------------

@dataclass(frozen=True)
class RaagElement:
    graph: SimpleGraph = field(repr=False)
    letters: Word

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "RaagElement") -> "RaagElement":
        return multiply(self, other)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        names = self.graph.vertices
        return " ".join(names[p] + ("" if e > 0 else "'") for p, e in self.letters)

    def named_letters(self) -> List[Tuple[str, int]]:
        return [(self.graph.vertices[p], e) for p, e in self.letters]


def identity(g: SimpleGraph) -> RaagElement:
    return RaagElement(g, ())


def normal_form(g: SimpleGraph, letters: Iterable[Tuple[str, int]]) -> RaagElement:
    """Canonical normal form of a word given as (vertex name, +1/-1) pairs."""
    positional = []
    for offset, (name, exponent) in enumerate(letters):
        if exponent not in (1, -1):
            raise ExpressionSyntaxError(f"exponent must be +1 or -1, got {exponent!r}", offset)
        positional.append((g.index(name), exponent))
    return RaagElement(g, _canonical(g, _reduce(g, positional)))


def generator(g: SimpleGraph, v: str, exponent: int = 1) -> RaagElement:
    return normal_form(g, [(v, exponent)])


def parse_word(g: SimpleGraph, text: str) -> RaagElement:
    return normal_form(g, parse_word_text(text))


def _same_graph(x: RaagElement, y: RaagElement) -> None:
    if x.graph != y.graph:
        raise GraphMismatchError("elements belong to different graphs")


def multiply(x: RaagElement, y: RaagElement) -> RaagElement:
    _same_graph(x, y)
    g = x.graph
    return RaagElement(g, _canonical(g, _reduce(g, x.letters + y.letters)))


def inverse(x: RaagElement) -> RaagElement:
    flipped = tuple((p, -e) for p, e in reversed(x.letters))
    return RaagElement(x.graph, _canonical(x.graph, flipped))


def is_identity(x: RaagElement) -> bool:
    return not x.letters


def commutator(x: RaagElement, y: RaagElement) -> RaagElement:
    """[x, y] = x y x^-1 y^-1"""
    return multiply(multiply(x, y), multiply(inverse(x), inverse(y)))


# -----------------------------
# Group algebra
# -----------------------------

class GroupAlgebraElement:
    """Finitely supported complex combination of group elements; zeros never stored."""

    __slots__ = ("graph", "terms")

    def __init__(self, graph: SimpleGraph, terms: Mapping[RaagElement, complex] = None):
        self.graph = graph
        clean: Dict[RaagElement, complex] = {}
        for element, coeff in (terms or {}).items():
            if element.graph != graph:
                raise GraphMismatchError("term belongs to a different graph")
            coeff = complex(coeff)
            if coeff != 0:
                clean[element] = clean.get(element, 0) + coeff
        self.terms = {k: c for k, c in clean.items() if c != 0}

    @classmethod
    def from_element(cls, x: RaagElement, coeff: complex = 1.0) -> "GroupAlgebraElement":
        return cls(x.graph, {x: coeff})

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.graph == other.graph and self.terms == other.terms

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        if self.graph != other.graph:
            raise GraphMismatchError("operands belong to different graphs")
        out = dict(self.terms)
        for element, coeff in other.terms.items():
            out[element] = out.get(element, 0) + coeff
        return GroupAlgebraElement(self.graph, out)

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return self + other.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraElement):
            return algebra_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c) -> "GroupAlgebraElement":
        return self.scale(c)

    def scale(self, c: complex) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.graph, {x: c * coeff for x, coeff in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for x in sorted(self.terms, key=lambda el: (len(el), [_letter_key(l) for l in el.letters])):
            c = self.terms[x]
            coeff = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}i)"
            parts.append(f"{coeff}*[{'' if is_identity(x) else str(x)}]")
        return " + ".join(parts)


def algebra_identity(g: SimpleGraph, coeff: complex = 1.0) -> GroupAlgebraElement:
    return GroupAlgebraElement(g, {identity(g): coeff})


def parse_algebra(g: SimpleGraph, text: str) -> GroupAlgebraElement:
    """Parse `coeff * [word] + ...` into a group algebra element."""
    z = GroupAlgebraElement(g)
    for coeff, letters in parse_algebra_text(text):
        z = z + GroupAlgebraElement.from_element(normal_form(g, letters), coeff)
    return z


def algebra_multiply(z: GroupAlgebraElement, w: GroupAlgebraElement, guard: int = None) -> GroupAlgebraElement:
    if z.graph != w.graph:
        raise GraphMismatchError("operands belong to different graphs")
    g = z.graph
    limit = support_guard(guard)
    out: Dict[Word, complex] = {}
    for x, cx in z.terms.items():
        for y, cy in w.terms.items():
            key = _canonical(g, _reduce(g, x.letters + y.letters))
            out[key] = out.get(key, 0) + cx * cy
        if len(out) > limit:
            raise SupportGuardError(f"group algebra support exceeded {limit}")
    return GroupAlgebraElement(g, {RaagElement(g, k): c for k, c in out.items()})


def algebra_adjoint(z: GroupAlgebraElement) -> GroupAlgebraElement:
    return GroupAlgebraElement(z.graph, {inverse(x): c.conjugate() for x, c in z.terms.items()})


def group_trace(z: GroupAlgebraElement) -> complex:
    """Coefficient of the identity element."""
    return z.terms.get(identity(z.graph), 0j)


def l1_norm(z: GroupAlgebraElement) -> float:
    return float(sum(abs(c) for c in z.terms.values()))


def support_length(z: GroupAlgebraElement) -> int:
    return max((len(x) for x in z.terms), default=0)


# -----------------------------
# Balls and the regular representation
# -----------------------------

@dataclass
class Ball:
    """Elements of word length <= radius with left-multiplication moves by generators."""
    graph: SimpleGraph
    radius: int
    words: List[Word]
    index: Dict[Word, int]
    moves: Dict[Letter, Tuple[List[int], List[int]]]

    def __len__(self) -> int:
        return len(self.words)

    def elements(self) -> List[RaagElement]:
        return [RaagElement(self.graph, w) for w in self.words]


def _generators(g: SimpleGraph) -> List[Letter]:
    return [(p, e) for p in range(len(g.vertices)) for e in (1, -1)]


def build_ball(g: SimpleGraph, radius: int, guard: int = None) -> Ball:
    if radius < 0:
        raise RadiusTooSmallError("radius must be nonnegative")
    limit = support_guard(guard)
    gens = _generators(g)
    words: List[Word] = [()]
    index: Dict[Word, int] = {(): 0}
    moves: Dict[Letter, Tuple[List[int], List[int]]] = {s: ([], []) for s in gens}
    frontier = [0]
    if radius >= 8:
        print(f"⏳ Enumerating ball of radius {radius} on {len(g)} generators...", file=sys.stderr)
    for _ in range(radius):
        new = []
        for i in frontier:
            w = words[i]
            for s in gens:
                nw = _left_multiply(g, s, w)
                if len(nw) < len(w):
                    continue
                j = index.get(nw)
                if j is None:
                    j = len(words)
                    words.append(nw)
                    index[nw] = j
                    new.append(j)
                    if len(words) > limit:
                        raise SupportGuardError(f"ball exceeded the support guard of {limit} elements")
                src, dst = moves[s]
                src.append(i)
                dst.append(j)
                inv_src, inv_dst = moves[(s[0], -s[1])]
                inv_src.append(j)
                inv_dst.append(i)
        frontier = new
    if radius >= 8:
        print(f"✓ Ball has {len(words)} elements", file=sys.stderr)
    return Ball(g, radius, words, index, moves)


def ball(g: SimpleGraph, radius: int, guard: int = None) -> List[RaagElement]:
    """All distinct elements of word length <= radius, shortlex ordered by sphere."""
    return build_ball(g, radius, guard).elements()


def _compressed_operator(z: GroupAlgebraElement, b: Ball) -> scipy.sparse.csr_matrix:
    """Compression of lambda(z) to span{delta_g : g in the ball}."""
    g = z.graph
    n = len(b)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    for x, coeff in z.terms.items():
        if not x.letters:
            idx = np.arange(n)
            rows.append(idx)
            cols.append(idx)
        elif len(x.letters) == 1:
            src, dst = b.moves[x.letters[0]]
            rows.append(np.asarray(dst, dtype=np.int64))
            cols.append(np.asarray(src, dtype=np.int64))
        else:
            src, dst = [], []
            for i, w in enumerate(b.words):
                j = b.index.get(_canonical(g, _reduce(g, x.letters + w)))
                if j is not None:
                    src.append(i)
                    dst.append(j)
            rows.append(np.asarray(dst, dtype=np.int64))
            cols.append(np.asarray(src, dtype=np.int64))
        vals.append(np.full(len(rows[-1]), coeff, dtype=np.complex128))
    if not rows:
        return scipy.sparse.csr_matrix((n, n), dtype=np.complex128)
    return scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()


def regular_norm_estimate(z: GroupAlgebraElement, radius: int, guard: int = None) -> NormEstimate:
    if radius < support_length(z):
        raise RadiusTooSmallError(
            f"radius {radius} is below the longest support element ({support_length(z)})"
        )
    b = build_ball(z.graph, radius, guard)
    A = _compressed_operator(z, b)
    AH = A.conj().T.tocsr()
    delta_e = np.zeros(len(b), dtype=np.complex128)
    delta_e[0] = 1.0
    return power_norm(lambda x: A @ x, lambda y: AH @ y, delta_e)


def regular_norm_lower(z: GroupAlgebraElement, radius: int, guard: int = None) -> float:
    """Norm of the ball compression of lambda(z): a lower bound for ||lambda(z)||."""
    return regular_norm_estimate(z, radius, guard).value


def moment_norm_lower(z: GroupAlgebraElement, k: int, guard: int = None) -> float:
    """(tau((z*z)^k))^(1/2k), computed as a sum of squared coefficients of a half power."""
    if k < 1:
        raise RadiusTooSmallError("moment order k must be at least 1")
    w = algebra_multiply(algebra_adjoint(z), z, guard)
    half = algebra_identity(z.graph) if k % 2 == 0 else z
    for _ in range(k // 2):
        half = algebra_multiply(half, w, guard)
    moment = sum(abs(c) ** 2 for c in half.terms.values())
    return float(moment) ** (1.0 / (2 * k))


if __name__ == "__main__":
    from graph_core import path_graph

    print("=" * 60)
    print("RAAG WORDS SMOKE TEST")
    print("=" * 60)
    p4 = path_graph(["a", "b", "c", "d"])
    a, b, c, d = (generator(p4, v) for v in "abcd")
    element = commutator(commutator(a, c), commutator(b, d))
    print(f"[[a,c],[b,d]] = {element}")
    print(f"identity? {is_identity(element)}")
