# raagtool/graph_fock.py
"""
Graph Fock space truncated at depth D.

Basis vectors are traces: commutation classes of words over the vertices,
each stored as its lexicographically least representative. The basis is
ordered by length, then lexicographically, so the vacuum Omega is index 0.

Truncation convention: creation maps length-D traces to 0, so the stored
annihilation matrix is the exact adjoint of the stored creation matrix and
isometry identities hold exactly on degrees < D.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.sparse
from numpy.polynomial import Polynomial

from config import RECURSION_GUARD, support_guard
from errors import DepthTooSmallError, RecursionGuardError, SupportGuardError, UnknownVertexError
from graph_core import SimpleGraph, is_gamma_reduced, lex_normal_form
from ncpoly import NcPolynomial, Symbol, evaluate, star_context
from norms import operator_norm, stabilized
from validator import Check, check_equal

Trace = Tuple[str, ...]


def _identity_key(p: int) -> int:
    return p


def _canonical_positions(g: SimpleGraph, word: Sequence[int]) -> Tuple[int, ...]:
    return lex_normal_form(g, word, _identity_key, _identity_key)


def canonical_trace(g: SimpleGraph, word: Sequence[str]) -> Trace:
    """Lexicographically least word in the commutation class of `word`."""
    positions = [g.index(v) for v in word]
    return tuple(g.vertices[p] for p in _canonical_positions(g, positions))


def enumerate_traces(g: SimpleGraph, k: int) -> List[Trace]:
    """All distinct traces of length exactly k, canonically ordered."""
    level = {()}
    for _ in range(k):
        level = {
            _canonical_positions(g, (p,) + t) for t in level for p in range(len(g.vertices))
        }
    return [tuple(g.vertices[p] for p in t) for t in sorted(level)]


def induced_subgraph(g: SimpleGraph, vertices: Iterable[str]) -> SimpleGraph:
    keep = set(vertices)
    for v in keep:
        g.index(v)
    ordered = [v for v in g.vertices if v in keep]
    edges = [tuple(e) for e in g.edges if e <= keep]
    return SimpleGraph(ordered, edges)


# -----------------------------
# The truncated space
# -----------------------------

class FockSpace:
    """Basis of traces of length <= depth plus every creation matrix."""

    def __init__(self, g: SimpleGraph, depth: int, guard: int = None):
        if depth < 0:
            raise DepthTooSmallError("depth must be nonnegative")
        self.graph = g
        self.depth = depth
        limit = support_guard(guard)
        n = len(g.vertices)

        levels: List[List[Tuple[int, ...]]] = [[()]]
        successor: Dict[Tuple[int, Tuple[int, ...]], Tuple[int, ...]] = {}
        total = 1
        for _ in range(depth):
            nxt = set()
            for t in levels[-1]:
                for p in range(n):
                    nt = _canonical_positions(g, (p,) + t)
                    successor[(p, t)] = nt
                    nxt.add(nt)
            total += len(nxt)
            if total > limit:
                raise SupportGuardError(f"Fock basis exceeded the support guard of {limit}")
            levels.append(sorted(nxt))

        self.basis: List[Tuple[int, ...]] = [t for level in levels for t in level]
        self.index: Dict[Tuple[int, ...], int] = {t: i for i, t in enumerate(self.basis)}
        self.degrees = np.fromiter((len(t) for t in self.basis), dtype=np.int64, count=len(self.basis))
        if len(self.basis) > 100_000:
            print(f"✓ Fock space: {len(self.basis)} traces up to depth {depth}", file=sys.stderr)

        dim = len(self.basis)
        rows: List[List[int]] = [[] for _ in range(n)]
        cols: List[List[int]] = [[] for _ in range(n)]
        for (p, t), nt in successor.items():
            rows[p].append(self.index[nt])
            cols[p].append(self.index[t])
        self._creation: Dict[str, scipy.sparse.csr_matrix] = {}
        for p, v in enumerate(g.vertices):
            data = np.ones(len(rows[p]), dtype=np.complex128)
            self._creation[v] = scipy.sparse.csr_matrix((data, (rows[p], cols[p])), shape=(dim, dim))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def trace_of(self, i: int) -> Trace:
        return tuple(self.graph.vertices[p] for p in self.basis[i])

    def index_of(self, trace: Sequence[str]) -> int:
        key = _canonical_positions(self.graph, [self.graph.index(v) for v in trace])
        return self.index[key]

    def creation_matrix(self, v: str) -> scipy.sparse.csr_matrix:
        try:
            return self._creation[v]
        except KeyError:
            raise UnknownVertexError(v) from None

    def vacuum(self) -> np.ndarray:
        omega = np.zeros(self.dim, dtype=np.complex128)
        omega[0] = 1.0
        return omega

    def basis_vector(self, trace: Sequence[str]) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.complex128)
        e[self.index_of(trace)] = 1.0
        return e

    def below_top(self) -> scipy.sparse.csr_matrix:
        """Projection onto degrees < depth."""
        return scipy.sparse.diags((self.degrees < self.depth).astype(np.complex128)).tocsr()


@lru_cache(maxsize=32)
def fock_space(g: SimpleGraph, depth: int, vertices: Optional[Tuple[str, ...]] = None) -> FockSpace:
    """Cached space; with `vertices` the space of the induced subgraph on them."""
    if vertices is not None:
        g = induced_subgraph(g, vertices)
    return FockSpace(g, depth)


@dataclass(frozen=True)
class TruncatedFockOperator:
    space: FockSpace
    matrix: scipy.sparse.csr_matrix

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    @property
    def depth(self) -> int:
        return self.space.depth

    def adjoint(self) -> "TruncatedFockOperator":
        return TruncatedFockOperator(self.space, self.matrix.conj().T.tocsr())

    def __matmul__(self, other):
        if isinstance(other, TruncatedFockOperator):
            return TruncatedFockOperator(self.space, (self.matrix @ other.matrix).tocsr())
        return self.matrix @ other

    def __add__(self, other: "TruncatedFockOperator") -> "TruncatedFockOperator":
        return TruncatedFockOperator(self.space, (self.matrix + other.matrix).tocsr())

    def __sub__(self, other: "TruncatedFockOperator") -> "TruncatedFockOperator":
        return TruncatedFockOperator(self.space, (self.matrix - other.matrix).tocsr())

    def __mul__(self, c) -> "TruncatedFockOperator":
        return TruncatedFockOperator(self.space, (c * self.matrix).tocsr())

    __rmul__ = __mul__

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def identity_op(space: FockSpace) -> TruncatedFockOperator:
    return TruncatedFockOperator(space, scipy.sparse.identity(space.dim, dtype=np.complex128, format="csr"))


def _space_for(g: SimpleGraph, D: int, space: Optional[FockSpace]) -> FockSpace:
    if D < 1:
        raise DepthTooSmallError("depth must be at least 1")
    return space if space is not None else fock_space(g, D)


def creation_op(g: SimpleGraph, v: str, D: int, space: Optional[FockSpace] = None) -> TruncatedFockOperator:
    """l_v: t -> canonical(v t) for len(t) < D, top degree -> 0."""
    g.index(v)
    space = _space_for(g, D, space)
    return TruncatedFockOperator(space, space.creation_matrix(v))


def annihilation_op(g: SimpleGraph, v: str, D: int, space: Optional[FockSpace] = None) -> TruncatedFockOperator:
    return creation_op(g, v, D, space).adjoint()


def semicircular_op(g: SimpleGraph, v: str, D: int, space: Optional[FockSpace] = None) -> TruncatedFockOperator:
    ell = creation_op(g, v, D, space)
    return ell + ell.adjoint()


def vacuum_state(op: TruncatedFockOperator) -> complex:
    return complex(op.matrix[0, 0])


def op_norm(op: TruncatedFockOperator) -> float:
    """Largest singular value of the stored matrix."""
    if op.matrix.nnz == 0:
        return 0.0
    return operator_norm(op.matrix, tol=1e-10).value


# -----------------------------
# Polynomial norms
# -----------------------------

@dataclass(frozen=True)
class FockNormReport:
    value: float
    depth: int
    previous: Optional[float]
    converged: bool
    vertices: Tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "depth": self.depth,
            "previous": self.previous,
            "converged": self.converged,
            "vertices": list(self.vertices),
        }


def _poly_operator(g: SimpleGraph, p: NcPolynomial, D: int, vertices: Tuple[str, ...]) -> TruncatedFockOperator:
    space = fock_space(g, D, vertices)
    ctx = star_context({v: creation_op(space.graph, v, D, space) for v in vertices})
    return evaluate(p, ctx, identity_op(space))


def fock_norm_report(g: SimpleGraph, p: NcPolynomial, D: int) -> FockNormReport:
    """
    Compression norm of p(l_v, l_v*) at depth D and D-1 on the configuration
    space of the vertices p uses (a reducing subspace containing Omega).
    """
    if D < p.degree:
        raise DepthTooSmallError(f"depth {D} is below the polynomial degree {p.degree}")
    for v in p.vertices():
        g.index(v)
    vertices = tuple(v for v in g.vertices if v in set(p.vertices()))
    if not vertices:
        value = abs(p.terms.get((), 0))
        return FockNormReport(value, D, value, True, ())
    value = op_norm(_poly_operator(g, p, D, vertices))
    previous = op_norm(_poly_operator(g, p, D - 1, vertices)) if D - 1 >= 1 else None
    converged = previous is not None and stabilized([previous, value])
    return FockNormReport(value, D, previous, converged, vertices)


def fock_poly_norm(g: SimpleGraph, p: NcPolynomial, D: int) -> float:
    return fock_norm_report(g, p, D).value


# -----------------------------
# Normal forms of l / l* monomials
# -----------------------------

def ell_normal_form(g: SimpleGraph, monomial: Sequence[Symbol]) -> Optional[Tuple[Symbol, ...]]:
    """
    Rewrite a monomial in l_v (unstarred) and l_v* (starred) into
    l_{v1}...l_{vp} l*_{w1}...l*_{wq}, or None when it vanishes.
    """
    mono = [Symbol(s.vertex, s.starred) for s in monomial]
    for s in mono:
        g.index(s.vertex)
    i = 0
    while i < len(mono) - 1:
        left, right = mono[i], mono[i + 1]
        if left.starred and not right.starred:
            if left.vertex == right.vertex:
                del mono[i:i + 2]
            elif g.adjacent(left.vertex, right.vertex):
                mono[i], mono[i + 1] = right, left
            else:
                return None
            i = 0
            continue
        i += 1
    return tuple(mono)


def normal_form_vacuum(monomial: Sequence[Symbol]) -> int:
    """tau_vac of a normal-form monomial: 1 for the empty word, else 0."""
    return 0 if len(monomial) > 0 else 1


# -----------------------------
# Semicircle moments
# -----------------------------

@lru_cache(maxsize=None)
def dyck_paths(n: int) -> int:
    """Number of Dyck paths with n steps (0 for odd n)."""
    if n % 2:
        return 0
    heights = {0: 1}
    for _ in range(n):
        nxt: Dict[int, int] = {}
        for h, count in heights.items():
            nxt[h + 1] = nxt.get(h + 1, 0) + count
            if h > 0:
                nxt[h - 1] = nxt.get(h - 1, 0) + count
        heights = nxt
    return heights.get(0, 0)


def catalan(p: int) -> int:
    return dyck_paths(2 * p)


def semicircle_expectation(coeffs: Sequence[complex]) -> complex:
    """tau(a(s)) for a polynomial a with the given ascending coefficients."""
    return complex(sum(c * dyck_paths(k) for k, c in enumerate(coeffs)))


@dataclass(frozen=True)
class MomentQuery:
    """Sequence of (vertex, polynomial in s_vertex) factors."""
    factors: Tuple[Tuple[str, Polynomial], ...]

    @classmethod
    def of(cls, pairs: Iterable[Tuple[str, Sequence[complex]]]) -> "MomentQuery":
        return cls(tuple((v, Polynomial(np.asarray(c, dtype=np.complex128))) for v, c in pairs))

    @property
    def total_degree(self) -> int:
        return sum(max(len(_trim(poly.coef)) - 1, 0) for _, poly in self.factors)


def _trim(coeffs) -> Tuple[complex, ...]:
    out = [complex(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def moment_factorize(g: SimpleGraph, q: MomentQuery, guard: int = RECURSION_GUARD) -> complex:
    """
    tau_vac(a_1 ... a_m) from single-vertex semicircle moments and the
    Gamma-reduced recursion:
      - if the tail starting at the first non-centered factor (scanning from
        the right) is Gamma-reduced, split a_i = tau(a_i) + centered part;
      - otherwise merge a_i with the next factor on the same vertex (every
        factor in between commutes with it) and split the product.
    A Gamma-reduced product of centered factors has zero expectation.
    """
    # items are (vertex position, ascending coefficients, centered flag)
    seq = tuple(
        (g.index(v), c, semicircle_expectation(c) == 0)
        for v, c in ((v, _trim(poly.coef)) for v, poly in q.factors)
    )
    memo: Dict[tuple, complex] = {}
    calls = [0]

    def reduced(items) -> bool:
        return is_gamma_reduced(g, [g.vertices[p] for p, _, _ in items])

    def tau(items: tuple) -> complex:
        if not items:
            return 1.0 + 0j
        if items in memo:
            return memo[items]
        calls[0] += 1
        if calls[0] > guard:
            raise RecursionGuardError(f"moment recursion exceeded {guard} steps")

        for idx, (_, c, _) in enumerate(items):
            if len(c) <= 1:
                scalar = c[0] if c else 0j
                value = 0j if scalar == 0 else scalar * tau(items[:idx] + items[idx + 1:])
                memo[items] = value
                return value

        k = len(items)
        while k > 0 and items[k - 1][2] and reduced(items[k - 1:]):
            k -= 1
        if k == 0:
            memo[items] = 0j
            return 0j

        i = k - 1
        p_i, c_i, _ = items[i]
        if reduced(items[i:]):
            t = semicircle_expectation(c_i)
            centered = (p_i, _trim((c_i[0] - t,) + c_i[1:]), True)
            value = t * tau(items[:i] + items[i + 1:]) + tau(items[:i] + (centered,) + items[i + 1:])
        else:
            l = next(j for j in range(i + 1, len(items)) if items[j][0] == p_i)
            merged = _trim(npoly.polymul(c_i, items[l][1]))
            t = semicircle_expectation(merged)
            centered = (p_i, _trim((merged[0] - t,) + merged[1:]), True)
            middle = items[i + 1:l]
            value = (
                tau(items[:i] + (centered,) + middle + items[l + 1:])
                + t * tau(items[:i] + middle + items[l + 1:])
            )
        memo[items] = value
        return value

    return tau(seq)


def moment_direct(g: SimpleGraph, q: MomentQuery, depth: Optional[int] = None) -> complex:
    """<a_1 ... a_m Omega, Omega> computed on the Fock space of the used vertices."""
    used = tuple(v for v in g.vertices if v in {v for v, _ in q.factors})
    if not used:
        value = 1.0 + 0j
        for _, poly in q.factors:
            c = _trim(poly.coef)
            value *= c[0] if c else 0
        return value
    D = max(1, q.total_degree) if depth is None else max(depth, q.total_degree)
    space = fock_space(g, D, used)
    s = {v: semicircular_op(space.graph, v, D, space).matrix for v in used}
    y = space.vacuum()
    for v, poly in reversed(q.factors):
        coeffs = _trim(poly.coef)
        acc = np.zeros_like(y)
        for c in reversed(coeffs):
            acc = s[v] @ acc + c * y
        y = acc
    return complex(y[0])


def semicircle_moments(g: SimpleGraph, v: str, max_n: int, D: Optional[int] = None, restrict: bool = True) -> List[complex]:
    """[<s_v^n Omega, Omega> for n = 0..max_n]."""
    D = D if D is not None else max(1, (max_n + 1) // 2)
    space = fock_space(g, D, (v,)) if restrict else fock_space(g, D)
    s = semicircular_op(space.graph, v, D, space).matrix
    y = space.vacuum()
    moments = []
    for _ in range(max_n + 1):
        moments.append(complex(y[0]))
        y = s @ y
    return moments


# -----------------------------
# Relation checks
# -----------------------------

def _max_abs(m) -> float:
    m = m.tocsr()
    m.eliminate_zeros()
    return float(abs(m.data).max()) if m.nnz else 0.0


def toeplitz_relation_checks(g: SimpleGraph, D: int) -> List[Check]:
    """Commutation for edges, orthogonality for non-edges, the vacuum fixed vector."""
    space = fock_space(g, D)
    ell = {v: space.creation_matrix(v) for v in g.vertices}
    star = {v: m.conj().T.tocsr() for v, m in ell.items()}
    below = space.below_top()
    checks: List[Check] = []
    for v, w in product(g.vertices, repeat=2):
        if v == w:
            iso = (star[v] @ ell[v] - scipy.sparse.identity(space.dim)) @ below
            checks.append(check_equal(f"isometry {v}", _max_abs(iso), 0.0))
        elif g.adjacent(v, w):
            if g.index(v) < g.index(w):
                checks.append(check_equal(f"T1 commute {v}{w}", _max_abs(ell[v] @ ell[w] - ell[w] @ ell[v]), 0.0))
            checks.append(check_equal(
                f"T1 swap {w}*{v}", _max_abs((star[w] @ ell[v] - ell[v] @ star[w]) @ below), 0.0
            ))
        else:
            checks.append(check_equal(f"T2 {w}*{v}", _max_abs(star[w] @ ell[v]), 0.0))
    omega = space.vacuum()
    y = omega.copy()
    for v in g.vertices:
        y = y - ell[v] @ (star[v] @ y)
    checks.append(check_equal("T3 vacuum fixed", float(np.abs(y - omega).max()), 0.0))
    return checks


def cyclic_span_rank(g: SimpleGraph, D: int) -> Tuple[int, int]:
    """(rank of {s_{v1}...s_{vk} Omega : k <= D}, dimension of the depth-D space)."""
    space = fock_space(g, D)
    s = [semicircular_op(g, v, D, space).matrix for v in g.vertices]
    level = [space.vacuum()]
    vectors = list(level)
    for _ in range(D):
        level = [m @ u for u in level for m in s]
        vectors.extend(level)
    rank = int(np.linalg.matrix_rank(np.column_stack(vectors)))
    return rank, space.dim


if __name__ == "__main__":
    from graph_core import path_graph

    print("=" * 60)
    print("GRAPH FOCK SMOKE TEST")
    print("=" * 60)
    p3 = path_graph(["a", "b", "c"])
    print(f"traces of length 2: {enumerate_traces(p3, 2)}")
    print(f"Catalan via s_a: {[round(m.real) for m in semicircle_moments(p3, 'a', 10)]}")
    for c in toeplitz_relation_checks(p3, 3):
        print(f"{'✓' if c.passed else '✗'} {c.name}")
