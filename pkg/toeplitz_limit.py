# raagtool/toeplitz_limit.py
"""
Limit operators of the channel model.

For a vertex v with M = m^|F(v)| the Cuntz-Toeplitz factor has G = 2 M^2
creation letters x_(I,J,+) and x_(I,J,-), each an isometry on a Boltzmann
Fock space truncated at depth D (creation kills the top degree). The limit
operator is

    L_v = 1/(2 sqrt M) * sum_IJ  r+_IJ (x) x_(I,J,+)  +  r-_IJ (x) x_(I,J,-)

on the channel register of the used non-edges tensored with the Fock
factors of the used vertices, in vertex order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse

from config import DEFAULT_LIMIT_DEPTH, guard_dim
from errors import (
    AdjacentVerticesError,
    DepthTooSmallError,
    DimensionGuardError,
    ParameterRangeError,
)
from graph_core import SimpleGraph, channel_index
from ncpoly import NcPolynomial, as_linear_operator, star_context
from norms import NormEstimate, operator_norm, start_vector
from rand_model import lift_block
from validator import Check, check_equal, check_leq

KEY_SLACK = 1e-9


# -----------------------------
# r units
# -----------------------------

def runit(I: int, J: int, sign: int, size: int) -> np.ndarray:
    """r+ = e_IJ + e_JI and r- = i(e_IJ - e_JI) as size x size matrices."""
    if not (0 <= I < size and 0 <= J < size):
        raise ParameterRangeError(f"index ({I}, {J}) out of range for size {size}")
    if sign not in (1, -1):
        raise ParameterRangeError(f"sign must be +1 or -1, got {sign}")
    r = np.zeros((size, size), dtype=np.complex128)
    if sign > 0:
        r[I, J] += 1
        r[J, I] += 1
    else:
        r[I, J] += 1j
        r[J, I] -= 1j
    return r


def _letters(size: int) -> List[Tuple[int, int, int]]:
    return [(I, J, s) for I in range(size) for J in range(size) for s in (1, -1)]


def runit_stack(size: int) -> np.ndarray:
    """All G = 2 size^2 r units, in letter order (I, J, +), (I, J, -)."""
    return np.stack([runit(I, J, s, size) for I, J, s in _letters(size)])


def runit_completeness(size: int) -> Tuple[np.ndarray, np.ndarray]:
    """(sum_IJ r+ r+ + r- r-, 4 size Id); equal entry by entry."""
    r = runit_stack(size)
    return np.einsum("aij,ajk->ik", r, r), 4 * size * np.eye(size, dtype=np.complex128)


# -----------------------------
# Boltzmann Fock factors
# -----------------------------

@dataclass(frozen=True, eq=False)
class CTFockSpace:
    """Words of length <= depth over `letters` symbols; index = offset[k] + base-G rank."""
    letters: int
    depth: int

    @property
    def offsets(self) -> Tuple[int, ...]:
        out = [0]
        for k in range(self.depth):
            out.append(out[-1] + self.letters ** k)
        return tuple(out)

    @property
    def dim(self) -> int:
        return sum(self.letters ** k for k in range(self.depth + 1))

    def degrees(self) -> np.ndarray:
        return np.repeat(np.arange(self.depth + 1), [self.letters ** k for k in range(self.depth + 1)])

    def creation(self, a: int) -> scipy.sparse.csr_matrix:
        """x_a: word w of length < depth -> a w; top degree -> 0."""
        rows, cols = [], []
        offsets = self.offsets
        for k in range(self.depth):
            n_k = self.letters ** k
            rank = np.arange(n_k)
            cols.append(offsets[k] + rank)
            rows.append(offsets[k + 1] + a * n_k + rank)
        rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        data = np.ones(rows.size, dtype=np.complex128)
        return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(self.dim, self.dim))


# -----------------------------
# The limit space
# -----------------------------

@dataclass(frozen=True, eq=False)
class LimitSpace:
    """Channel register over `channels` followed by one CT factor per vertex in `vertices`."""
    graph: SimpleGraph = field(repr=False)
    m: int
    depth: int
    vertices: Tuple[str, ...]
    channels: Tuple[int, ...]
    factors: Dict[str, CTFockSpace] = field(repr=False)
    own: Dict[str, Tuple[int, ...]] = field(repr=False)

    @property
    def channel_dim(self) -> int:
        return self.m ** len(self.channels)

    @property
    def dim(self) -> int:
        return self.channel_dim * math.prod(self.factors[v].dim for v in self.vertices)

    def factor_dims(self) -> List[int]:
        return [self.factors[v].dim for v in self.vertices]

    def vacuum(self, channel_index: int = 0) -> np.ndarray:
        """e_I (x) Omega (x) ... (x) Omega."""
        if not 0 <= channel_index < self.channel_dim:
            raise ParameterRangeError(f"channel index {channel_index} out of range")
        xi = np.zeros(self.dim, dtype=np.complex128)
        xi[channel_index * (self.dim // self.channel_dim)] = 1.0
        return xi

    def below_top(self, v: str) -> np.ndarray:
        """Diagonal mask of vectors whose v-factor degree is < depth."""
        masks = []
        for u in self.vertices:
            if u == v:
                masks.append((self.factors[u].degrees() < self.depth).astype(float))
            else:
                masks.append(np.ones(self.factors[u].dim))
        fock = reduce(np.kron, masks, np.ones(1))
        return np.kron(np.ones(self.channel_dim), fock)


def _channel_frame(g: SimpleGraph, vertices: Sequence[str]):
    """(used vertices in graph order, F(v) per vertex, sorted union of those channels)"""
    used = set(vertices)
    for v in used:
        g.index(v)
    ordered = tuple(v for v in g.vertices if v in used)
    idx = channel_index(g)
    own = {v: idx.channels_of(v) for v in ordered}
    channels = tuple(sorted({c for v in ordered for c in own[v]}))
    return ordered, own, channels


def limit_space(
    g: SimpleGraph,
    vertices: Sequence[str],
    m: int,
    D: int = DEFAULT_LIMIT_DEPTH,
    guard: Optional[int] = None,
) -> LimitSpace:
    if m < 1:
        raise ParameterRangeError(f"m must be at least 1, got {m}")
    if D < 1:
        raise DepthTooSmallError("depth must be at least 1")
    ordered, own, channels = _channel_frame(g, vertices)
    factors = {v: CTFockSpace(2 * (m ** len(own[v])) ** 2, D) for v in ordered}

    total = m ** len(channels)
    for v in ordered:
        total *= factors[v].dim
    limit = guard_dim(guard)
    if total > limit:
        raise DimensionGuardError(f"limit space dimension {total} exceeds the guard {limit}")
    return LimitSpace(g, m, D, ordered, channels, factors, own)


def _lifted_units(m: int, own: Tuple[int, ...], channels: Tuple[int, ...]) -> np.ndarray:
    """r units on the channels `own`, lifted to the register over `channels`."""
    local = runit_stack(m ** len(own))
    acting = tuple(channels.index(c) for c in own)
    dims = (m,) * len(channels)
    union = tuple(range(len(channels)))
    return np.stack([lift_block(r, acting, union, dims) for r in local])


@dataclass(frozen=True, eq=False)
class LOperator:
    vertex: str
    space: LimitSpace = field(repr=False)
    matrix: scipy.sparse.csr_matrix = field(repr=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape


def build_L(
    g: SimpleGraph,
    v: str,
    m: int,
    D: int = DEFAULT_LIMIT_DEPTH,
    space: Optional[LimitSpace] = None,
    guard: Optional[int] = None,
) -> LOperator:
    """L_v as a sparse matrix; identity on every other factor of the space."""
    space = space if space is not None else limit_space(g, (v,), m, D, guard)
    if v not in space.factors:
        raise ParameterRangeError(f"vertex {v!r} has no factor in this limit space")
    pos = space.vertices.index(v)
    dims = space.factor_dims()
    before = math.prod(dims[:pos])
    after = math.prod(dims[pos + 1:])
    fock = space.factors[v]
    units = _lifted_units(space.m, space.own[v], space.channels)
    scale = 1.0 / (2.0 * math.sqrt(space.m ** len(space.own[v])))

    core = None
    for a, r in enumerate(units):
        r_sparse = scipy.sparse.csr_matrix(r)
        if r_sparse.nnz == 0:
            continue
        left = scipy.sparse.kron(r_sparse, scipy.sparse.identity(before, format="csr"), format="csr")
        term = scipy.sparse.kron(left, fock.creation(a), format="csr")
        core = term if core is None else core + term
    full = scipy.sparse.kron(core, scipy.sparse.identity(after, format="csr"), format="csr")
    return LOperator(v, space, (scale * full).tocsr())


def limit_operators(
    g: SimpleGraph,
    vertices: Sequence[str],
    m: int,
    D: int = DEFAULT_LIMIT_DEPTH,
    guard: Optional[int] = None,
) -> Tuple[LimitSpace, Dict[str, scipy.sparse.csr_matrix]]:
    space = limit_space(g, vertices, m, D, guard)
    return space, {v: build_L(g, v, m, D, space).matrix for v in space.vertices}


# -----------------------------
# Checks
# -----------------------------

def isometry_defect(
    g: SimpleGraph,
    v: str,
    m: int,
    D: int = DEFAULT_LIMIT_DEPTH,
    samples: int = 4,
    seed: int = 0,
) -> float:
    """max |<L*L xi, xi> - <xi, xi>| over seeded random xi with v-degree < D."""
    space, ops = limit_operators(g, (v,), m, D)
    L = ops[v]
    mask = space.below_top(v)
    worst = 0.0
    for k in range(samples):
        xi = start_vector(space.dim, seed=seed + k) * mask
        y = L @ xi
        worst = max(worst, abs(np.vdot(y, y) - np.vdot(xi, xi)))
    return float(worst)


def commutation_defect(g: SimpleGraph, v: str, w: str, m: int, D: int = DEFAULT_LIMIT_DEPTH) -> float:
    """max entry of L_v L_w - L_w L_v and L_v* L_w - L_w L_v* for adjacent v, w."""
    if not g.adjacent(v, w):
        raise ParameterRangeError(f"{v!r} and {w!r} are not adjacent")
    _, ops = limit_operators(g, (v, w), m, D)
    a, b = ops[v], ops[w]
    a_star = a.conj().T.tocsr()
    worst = 0.0
    for diff in (a @ b - b @ a, a_star @ b - b @ a_star):
        diff = diff.tocsr()
        diff.eliminate_zeros()
        if diff.nnz:
            worst = max(worst, float(np.abs(diff.data).max()))
    return worst


def key_norm(g: SimpleGraph, v: str, w: str, m: int, D: int = DEFAULT_LIMIT_DEPTH, guard: Optional[int] = None) -> float:
    """
    Compression norm of L_v* L_w for non-adjacent v != w.

    L_v* L_w = sum_ab T_ab (x) x_a* (x) y_b with T_ab = r_a r_b / (4 sqrt(M_v M_w)).
    The y_b are isometries with orthogonal ranges on the degree < D sector,
    x_a* x_a' = delta_aa' there, and every x_a* kills the vacuum. So the norm
    equals that of the matrix with block (b, a) = T_ab, for every depth D >= 1.
    key_norm_direct computes the same value from the build_L operators.
    """
    if v == w:
        raise ParameterRangeError("key_norm needs two distinct vertices")
    if g.adjacent(v, w):
        raise AdjacentVerticesError(f"{v!r} and {w!r} are adjacent")
    if D < 1:
        raise DepthTooSmallError("depth must be at least 1")
    if m < 1:
        raise ParameterRangeError(f"m must be at least 1, got {m}")
    _, own, channels = _channel_frame(g, (v, w))
    n = m ** len(channels)
    size_v, size_w = m ** len(own[v]), m ** len(own[w])
    rows = 2 * size_w ** 2 * n
    limit = guard_dim(guard)
    if rows * 2 * size_v ** 2 * n > limit:
        raise DimensionGuardError(f"key matrix of {rows} rows exceeds the guard {limit}")
    rv = _lifted_units(m, own[v], channels)
    rw = _lifted_units(m, own[w], channels)
    scale = 1.0 / (4.0 * math.sqrt(size_v * size_w))
    blocks = scale * np.einsum("aij,bjk->abik", rv, rw)
    b = blocks.transpose(1, 2, 0, 3).reshape(rw.shape[0] * n, rv.shape[0] * n)
    return operator_norm(b).value


def key_norm_direct(
    g: SimpleGraph,
    v: str,
    w: str,
    m: int,
    D: int = 1,
    guard: Optional[int] = None,
) -> float:
    """||L_v* L_w|| from the sparse build_L operators on the joint limit space."""
    if v == w:
        raise ParameterRangeError("key_norm_direct needs two distinct vertices")
    if g.adjacent(v, w):
        raise AdjacentVerticesError(f"{v!r} and {w!r} are adjacent")
    space, ops = limit_operators(g, (v, w), m, D, guard)
    product = (ops[v].conj().T @ ops[w]).tocsr()
    return operator_norm(product, v0=start_vector(space.dim)).value


@dataclass(frozen=True)
class KeyNormRow:
    m: int
    value: float
    bound: float
    passed: bool

    def as_dict(self) -> dict:
        return {"m": self.m, "value": self.value, "bound": self.bound, "pass": self.passed}


def key_norm_table(
    g: SimpleGraph,
    v: str,
    w: str,
    ms: Sequence[int],
    D: int = DEFAULT_LIMIT_DEPTH,
) -> Tuple[List[KeyNormRow], bool]:
    """Rows (m, value, m^-1/2, pass) and whether the values are nonincreasing in m."""
    rows = []
    for m in ms:
        value = key_norm(g, v, w, m, D)
        bound = m ** -0.5
        rows.append(KeyNormRow(m, value, bound, value <= bound + KEY_SLACK))
    ordered = sorted(rows, key=lambda r: r.m)
    trend = all(b.value <= a.value + KEY_SLACK for a, b in zip(ordered, ordered[1:]))
    return rows, trend


def key_norm_checks(rows: Sequence[KeyNormRow], trend: bool) -> List[Check]:
    checks = [check_leq(f"key norm m={r.m}", r.value, r.bound, KEY_SLACK) for r in rows]
    checks.append(Check(name="key norm nonincreasing", passed=trend, lhs=float(trend), rhs=1.0))
    return checks


@dataclass(frozen=True)
class T3Witness:
    vector: np.ndarray
    image: np.ndarray
    defect: float

    @property
    def fixed(self) -> bool:
        return self.defect == 0.0


def t3_witness(
    g: SimpleGraph,
    vertices: Sequence[str],
    m: int,
    D: int = DEFAULT_LIMIT_DEPTH,
    channel: int = 0,
    space_vertices: Optional[Sequence[str]] = None,
) -> T3Witness:
    """xi = e_I (x) Omega ... Omega and prod_i (1 - L_wi L_wi*) xi, applied right to left."""
    for v in vertices:
        g.index(v)
    support = tuple(space_vertices) if space_vertices is not None else tuple(g.vertices)
    missing = [v for v in vertices if v not in support]
    if missing:
        raise ParameterRangeError(f"vertices {missing} are outside the limit space")
    space, ops = limit_operators(g, support, m, D)
    xi = space.vacuum(channel)
    y = xi.copy()
    for v in reversed(list(vertices)):
        L = ops[v]
        y = y - L @ (L.conj().T @ y)
    return T3Witness(xi, y, float(np.abs(y - xi).max()))


def limit_poly_norm(
    g: SimpleGraph,
    q: NcPolynomial,
    m: int,
    D: int = DEFAULT_LIMIT_DEPTH,
    guard: Optional[int] = None,
) -> NormEstimate:
    """Compression norm of q(L_v, L_v*) on the factors of the vertices q uses."""
    if D < q.degree:
        raise DepthTooSmallError(f"depth {D} is below the polynomial degree {q.degree}")
    for v in q.vertices():
        g.index(v)
    if not q.vertices():
        value = abs(q.terms.get((), 0))
        return NormEstimate(float(value), 0, True, "scalar")
    space, ops = limit_operators(g, q.vertices(), m, D, guard)
    op = as_linear_operator(q, star_context(ops), space.dim)
    return operator_norm(op, v0=start_vector(space.dim))


def limit_relation_checks(g: SimpleGraph, m: int, D: int = DEFAULT_LIMIT_DEPTH) -> List[Check]:
    """Completeness of the r units, isometry per vertex, commutation per edge."""
    checks: List[Check] = []
    idx = channel_index(g)
    sizes = sorted({m ** len(idx.channels_of(v)) for v in g.vertices})
    for size in sizes:
        lhs, rhs = runit_completeness(size)
        checks.append(check_equal(f"r-unit completeness size={size}", float(np.abs(lhs - rhs).max()), 0.0))
    for v in g.vertices:
        checks.append(check_equal(f"isometry L_{v}", isometry_defect(g, v, m, D), 0.0, 1e-12))
    for e in sorted(g.edges, key=lambda pair: sorted(g.position[x] for x in pair)):
        v, w = sorted(e, key=g.position.get)
        checks.append(check_equal(f"commute L_{v} L_{w}", commutation_defect(g, v, w, m, D), 0.0))
    return checks


if __name__ == "__main__":
    from graph_core import edgeless_graph

    print("=" * 60)
    print("TOEPLITZ LIMIT SMOKE TEST")
    print("=" * 60)
    two = edgeless_graph(["a", "b"])
    rows, trend = key_norm_table(two, "a", "b", [1, 2, 3, 4])
    for row in rows:
        print(f"{'✓' if row.passed else '✗'} m={row.m}: {row.value:.6f} <= {row.bound:.6f}")
    print(f"nonincreasing: {trend}")
