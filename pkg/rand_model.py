# raagtool/rand_model.py
"""
Seeded Gaussian ensembles and the channel model X_v = X~_v (x) Id.

Every non-edge {v, w} of the graph carries a channel C^m; every vertex also
owns one auxiliary channel C^K(v). X~_v is an SGRM matrix on the channels of
F(v) followed by the auxiliary channel of v, and identity elsewhere. Adjacent
vertices share no channel, so their operators commute exactly.
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator

from config import BLOCK_GUARD, guard_dim
from errors import (
    DimensionGuardError,
    ExpressionSyntaxError,
    ParameterRangeError,
    ShapeMismatchError,
)
from graph_core import ChannelIndex, SimpleGraph, channel_index
from ncpoly import NcPolynomial, Symbol, apply, as_linear_operator
from norms import NormEstimate, operator_norm, start_vector

SQRT2 = math.sqrt(2.0)
_MASK64 = (1 << 64) - 1


# -----------------------------
# Seeds
# -----------------------------

@dataclass(frozen=True)
class RngSeed:
    """64-bit seed plus a stream label; equal pairs give bit-identical streams."""
    seed: int
    label: str = ""

    def child(self, label: str) -> "RngSeed":
        return RngSeed(self.seed, f"{self.label}/{label}" if self.label else label)

    def generator(self) -> np.random.Generator:
        digest = hashlib.blake2b(self.label.encode("utf-8"), digest_size=8).digest()
        key = np.array([self.seed & _MASK64, int.from_bytes(digest, "little")], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


SeedLike = Union[int, RngSeed]


def as_seed(seed: SeedLike) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed))


# -----------------------------
# Ensembles
# -----------------------------

def _check_ensemble(n: int, sigma2: float) -> None:
    if n < 1:
        raise ParameterRangeError(f"matrix size must be at least 1, got {n}")
    if not sigma2 > 0:
        raise ParameterRangeError(f"variance must be positive, got {sigma2}")


def sample_sgrm(n: int, sigma2: float, seed: SeedLike) -> np.ndarray:
    """
    Self-adjoint Gaussian matrix: real N(0, sigma2) diagonal, and for i < j
    independent N(0, sigma2/2) real and imaginary parts. Exactly Hermitian.
    """
    _check_ensemble(n, sigma2)
    rng = as_seed(seed).generator()
    scale = math.sqrt(sigma2)
    diag = rng.standard_normal(n) * scale
    iu = np.triu_indices(n, 1)
    parts = rng.standard_normal((2, iu[0].size)) * (scale / SQRT2)

    upper = np.zeros((n, n), dtype=np.complex128)
    upper[iu] = parts[0] + 1j * parts[1]
    h = upper + upper.conj().T
    h[np.diag_indices(n)] = diag
    return h


def sample_grm(n: int, sigma2: float, seed: SeedLike) -> np.ndarray:
    """Complex Gaussian matrix with i.i.d. entries, E|Y_ij|^2 = sigma2."""
    _check_ensemble(n, sigma2)
    rng = as_seed(seed).generator()
    parts = rng.standard_normal((2, n, n)) * math.sqrt(sigma2 / 2.0)
    return parts[0] + 1j * parts[1]


def _dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def grm_split(y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Y -> ((Y + Y*)/sqrt2, -i(Y - Y*)/sqrt2); works on stacks of square matrices."""
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim < 2 or y.shape[-1] != y.shape[-2]:
        raise ShapeMismatchError(f"expected square matrices, got shape {y.shape}")
    yh = _dagger(y)
    return (y + yh) / SQRT2, -1j * (y - yh) / SQRT2


def sgrm_combine(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Inverse of grm_split: (X1 + i X2)/sqrt2."""
    x1 = np.asarray(x1, dtype=np.complex128)
    x2 = np.asarray(x2, dtype=np.complex128)
    if x1.shape != x2.shape:
        raise ShapeMismatchError(f"shapes differ: {x1.shape} vs {x2.shape}")
    if x1.ndim < 2 or x1.shape[-1] != x1.shape[-2]:
        raise ShapeMismatchError(f"expected square matrices, got shape {x1.shape}")
    return (x1 + 1j * x2) / SQRT2


def sgrm_norm(n: int, seed: SeedLike) -> float:
    """Spectral norm of one SGRM(n, 1/n) sample."""
    evals = scipy.linalg.eigvalsh(sample_sgrm(n, 1.0 / n, seed))
    return float(np.abs(evals).max())


def tail_frequency(n: int, seeds: Sequence[int], threshold: float = 3.0) -> float:
    """Fraction of seeds whose SGRM(n, 1/n) sample has norm above threshold."""
    if not seeds:
        raise ParameterRangeError("at least one seed is required")
    hits = sum(sgrm_norm(n, RngSeed(s, "tail")) > threshold for s in seeds)
    return hits / len(seeds)


# -----------------------------
# Channel layout
# -----------------------------

@dataclass(frozen=True, eq=False)
class ChannelLayout:
    """F channels (dimension m) followed by one auxiliary channel per vertex."""
    graph: SimpleGraph = field(repr=False)
    m: int
    channels: ChannelIndex = field(repr=False)
    dims: Tuple[int, ...]
    aux: Dict[str, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    @property
    def strides(self) -> Tuple[int, ...]:
        out = []
        acc = 1
        for d in reversed(self.dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))

    def vertex_channels(self, v: str) -> Tuple[int, ...]:
        """F(v) in canonical order, then the auxiliary channel of v when present."""
        own = self.channels.channels_of(v)
        return own + ((self.aux[v],) if v in self.aux else ())

    def flat_to_multi(self, index) -> Tuple:
        return np.unravel_index(index, self.dims)

    def multi_to_flat(self, multi) -> int:
        return np.ravel_multi_index(multi, self.dims)


def channel_layout(
    g: SimpleGraph,
    m: int,
    K: Optional[Mapping[str, int]] = None,
    guard: Optional[int] = None,
) -> ChannelLayout:
    """Layout for the model; K=None drops the auxiliary channels."""
    if m < 1:
        raise ParameterRangeError(f"m must be at least 1, got {m}")
    idx = channel_index(g)
    dims = [m] * len(idx)
    aux: Dict[str, int] = {}
    if K is not None:
        for v in g.vertices:
            k = int(K[v]) if v in K else 0
            if k < 1:
                raise ParameterRangeError(f"K({v}) must be at least 1")
            aux[v] = len(dims)
            dims.append(k)
    total = math.prod(dims)
    limit = guard_dim(guard)
    if total > limit:
        raise DimensionGuardError(f"model dimension {total} exceeds the guard {limit}")
    return ChannelLayout(g, m, idx, tuple(dims), aux)


def parse_k_spec(text: str, g: SimpleGraph) -> Dict[str, int]:
    """'all=8' or 'a=8,b=4,...' (every vertex named exactly once)."""
    out: Dict[str, int] = {}
    uniform = None
    pos = 0
    for chunk in text.split(","):
        if "=" not in chunk:
            raise ExpressionSyntaxError(f"expected name=value, got {chunk.strip()!r}", pos)
        name, value = (part.strip() for part in chunk.split("=", 1))
        try:
            k = int(value)
        except ValueError:
            raise ExpressionSyntaxError(f"K value is not an integer: {value!r}", pos) from None
        if k < 1:
            raise ParameterRangeError(f"K({name}) must be at least 1")
        if name == "all":
            uniform = k
        else:
            g.index(name)
            if name in out:
                raise ExpressionSyntaxError(f"vertex {name!r} given twice", pos)
            out[name] = k
        pos += len(chunk) + 1
    if uniform is not None:
        return {v: out.get(v, uniform) for v in g.vertices}
    missing = [v for v in g.vertices if v not in out]
    if missing:
        raise ExpressionSyntaxError(f"no K value for {', '.join(missing)}", len(text))
    return out


# -----------------------------
# Matrix-free operators
# -----------------------------

def _apply_block(block: np.ndarray, acting: Tuple[int, ...], dims: Tuple[int, ...], x: np.ndarray) -> np.ndarray:
    """(block on `acting`) (x) Id applied to x of shape (N,) or (N, cols)."""
    x = np.asarray(x)
    if not acting:
        return block[0, 0] * x
    batch = x.shape[1:]
    t = x.reshape(tuple(dims) + batch)
    k = len(acting)
    sub = tuple(dims[c] for c in acting)
    b = block.reshape(sub + sub)
    out = np.tensordot(b, t, axes=(tuple(range(k, 2 * k)), acting))
    out = np.moveaxis(out, tuple(range(k)), acting)
    return out.reshape(x.shape)


def lift_block(block: np.ndarray, acting: Tuple[int, ...], union: Tuple[int, ...], dims: Tuple[int, ...]) -> np.ndarray:
    """Rewrite a block acting on `acting` as a block acting on the superset `union`."""
    sub_dims = tuple(dims[c] for c in union)
    n = math.prod(sub_dims)
    local = tuple(union.index(c) for c in acting)
    return _apply_block(block, local, sub_dims, np.eye(n, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class MatrixFreeOperator:
    """A dense block on a few channels, identity on the others; never materialized."""
    layout: ChannelLayout = field(repr=False)
    acting: Tuple[int, ...]
    block: np.ndarray = field(repr=False)

    @property
    def shape(self) -> Tuple[int, int]:
        n = self.layout.dim
        return (n, n)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def adjoint(self) -> "MatrixFreeOperator":
        return MatrixFreeOperator(self.layout, self.acting, self.block.conj().T)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return _apply_block(self.block, self.acting, self.layout.dims, x)

    def _merge(self, other: "MatrixFreeOperator") -> Tuple[Tuple[int, ...], np.ndarray, np.ndarray]:
        if other.layout is not self.layout and other.layout.dims != self.layout.dims:
            raise ShapeMismatchError("operators live on different layouts")
        union = tuple(sorted(set(self.acting) | set(other.acting)))
        size = math.prod(self.layout.dims[c] for c in union)
        if size > BLOCK_GUARD:
            raise DimensionGuardError(
                f"composed block of size {size} exceeds {BLOCK_GUARD}; apply the factors one at a time"
            )
        dims = self.layout.dims
        return union, lift_block(self.block, self.acting, union, dims), lift_block(other.block, other.acting, union, dims)

    def __matmul__(self, other):
        if isinstance(other, MatrixFreeOperator):
            union, a, b = self._merge(other)
            return MatrixFreeOperator(self.layout, union, a @ b)
        return self.matvec(other)

    def __add__(self, other: "MatrixFreeOperator") -> "MatrixFreeOperator":
        union, a, b = self._merge(other)
        return MatrixFreeOperator(self.layout, union, a + b)

    def __sub__(self, other: "MatrixFreeOperator") -> "MatrixFreeOperator":
        union, a, b = self._merge(other)
        return MatrixFreeOperator(self.layout, union, a - b)

    def __mul__(self, c) -> "MatrixFreeOperator":
        return MatrixFreeOperator(self.layout, self.acting, c * self.block)

    __rmul__ = __mul__

    def as_linear_operator(self) -> LinearOperator:
        adj = self.adjoint()
        return LinearOperator(
            self.shape,
            matvec=self.matvec,
            rmatvec=adj.matvec,
            matmat=self.matvec,
            rmatmat=adj.matvec,
            dtype=np.complex128,
        )

    def toarray(self) -> np.ndarray:
        """Full matrix; only for small layouts."""
        n = self.layout.dim
        if n > BLOCK_GUARD:
            raise DimensionGuardError(f"refusing to materialize a {n}x{n} operator")
        return self.matvec(np.eye(n, dtype=np.complex128))


def identity_operator(layout: ChannelLayout) -> MatrixFreeOperator:
    return MatrixFreeOperator(layout, (), np.ones((1, 1), dtype=np.complex128))


# -----------------------------
# The model
# -----------------------------

def _vertex_size(layout: ChannelLayout, v: str) -> int:
    return math.prod(layout.dims[c] for c in layout.vertex_channels(v))


def sample_r_block(layout: ChannelLayout, v: str, seed: SeedLike) -> np.ndarray:
    """R_v = GRM(n, 1/n) on F(v) and aux_v; its K x K blocks are independent GRM(K, 1/n)."""
    n = _vertex_size(layout, v)
    if n > 2000:
        print(f"⏳ Sampling R_{v}: GRM of size {n}...", file=sys.stderr)
    return sample_grm(n, 1.0 / n, as_seed(seed).child(f"R/{v}"))


def assemble_Xv(
    g: SimpleGraph,
    v: str,
    m: int,
    K: Mapping[str, int],
    seed: SeedLike,
    guard: Optional[int] = None,
    layout: Optional[ChannelLayout] = None,
) -> MatrixFreeOperator:
    """X~_v = (R_v + R_v*)/sqrt2, an SGRM(n, 1/n) with n = K(v) m^|F(v)|, on F(v) and aux_v."""
    g.index(v)
    layout = layout if layout is not None else channel_layout(g, m, K, guard)
    r = sample_r_block(layout, v, seed)
    block = (r + r.conj().T) / SQRT2
    return MatrixFreeOperator(layout, layout.vertex_channels(v), block)


def assemble_model(
    g: SimpleGraph,
    m: int,
    K: Mapping[str, int],
    seed: SeedLike,
    guard: Optional[int] = None,
) -> Dict[str, MatrixFreeOperator]:
    """X_v for every vertex on one shared layout; distinct vertices use distinct streams."""
    layout = channel_layout(g, m, K, guard)
    return {v: assemble_Xv(g, v, m, K, seed, layout=layout) for v in g.vertices}


def sample_problem_model(
    g: SimpleGraph,
    v: str,
    m: int,
    seed: SeedLike,
    guard: Optional[int] = None,
    layout: Optional[ChannelLayout] = None,
) -> MatrixFreeOperator:
    """Y_v = SGRM(m^|F(v)|, m^-|F(v)|) on F(v) only; the model without auxiliary channels."""
    g.index(v)
    layout = layout if layout is not None else channel_layout(g, m, None, guard)
    n = _vertex_size(layout, v)
    block = sample_sgrm(n, 1.0 / n, as_seed(seed).child(f"Y/{v}"))
    return MatrixFreeOperator(layout, layout.vertex_channels(v), block)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """
    X~_v = (R + R*)/sqrt2 with R = m^(-|F(v)|/2) sum_IJ e_IJ (x) Q_IJ and
    Q_IJ = (X_IJ + i Y_IJ)/sqrt2. x_blocks[I, J] and y_blocks[I, J] are K x K.
    """
    vertex: str
    m: int
    f_count: int
    x_blocks: np.ndarray
    y_blocks: np.ndarray

    @property
    def block_count(self) -> int:
        return self.x_blocks.shape[0] * self.x_blocks.shape[1]

    def q_blocks(self) -> np.ndarray:
        return sgrm_combine(self.x_blocks, self.y_blocks)

    def reassemble(self) -> np.ndarray:
        q = self.q_blocks()
        size_f, k = q.shape[0], q.shape[2]
        r = q.transpose(0, 2, 1, 3).reshape(size_f * k, size_f * k) / math.sqrt(size_f)
        return (r + r.conj().T) / SQRT2


def block_decompose(
    g: SimpleGraph,
    v: str,
    m: int,
    K: Mapping[str, int],
    seed: SeedLike,
    guard: Optional[int] = None,
) -> Tuple[BlockDecomposition, np.ndarray]:
    """(decomposition of the sampled R_v, the X~_v block built from the same R_v)."""
    xv = assemble_Xv(g, v, m, K, seed, guard)
    f_count = len(xv.layout.channels.channels_of(v))
    size_f = m ** f_count
    k = int(K[v])
    r = sample_r_block(xv.layout, v, seed)
    q = r.reshape(size_f, k, size_f, k).transpose(0, 2, 1, 3) * math.sqrt(size_f)
    x_blocks, y_blocks = grm_split(q)
    return BlockDecomposition(v, m, f_count, x_blocks, y_blocks), xv.block


def dimension_schedule(i: int, delta: float, g: SimpleGraph) -> Dict[str, int]:
    """K(v_1) = i, K(v_k) = round(K(v_{k-1}) ** delta), in vertex order."""
    if not delta > 4:
        raise ParameterRangeError(f"delta must exceed 4, got {delta}")
    if i < 1:
        raise ParameterRangeError(f"schedule index must be at least 1, got {i}")
    out: Dict[str, int] = {}
    k = int(i)
    for pos, v in enumerate(g.vertices):
        if pos > 0:
            if float(delta).is_integer():
                k = k ** int(delta)
            else:
                k = max(1, int(round(k ** delta)))
        out[v] = k
    return out


def growth_inequality(delta: float, k: int) -> Tuple[float, float]:
    """(delta^(k-1), 3 (1 + delta + ... + delta^(k-2)))"""
    lhs = float(delta) ** (k - 1)
    rhs = 3.0 * sum(float(delta) ** j for j in range(k - 1))
    return lhs, rhs


# -----------------------------
# Norms and traces
# -----------------------------

def operator_norm_mf(
    target,
    context: Optional[Mapping[Symbol, object]] = None,
    dim: Optional[int] = None,
) -> NormEstimate:
    """Largest singular value of a MatrixFreeOperator or of p(context), matrix-free."""
    if isinstance(target, MatrixFreeOperator):
        if target.dim <= BLOCK_GUARD:
            return operator_norm(target.toarray())
        return operator_norm(target.as_linear_operator(), v0=start_vector(target.dim))
    if isinstance(target, NcPolynomial):
        if context is None or dim is None:
            raise ParameterRangeError("a polynomial needs an operator context and a dimension")
        return operator_norm(as_linear_operator(target, context, dim), v0=start_vector(dim))
    return operator_norm(target)


def normalized_trace(
    p: NcPolynomial,
    context: Mapping[Symbol, object],
    dim: int,
    probes: Optional[int] = None,
    seed: int = 0,
    chunk: int = 256,
) -> complex:
    """tr(p(X))/dim; exact over basis vectors unless `probes` requests a Hutchinson estimate."""
    if probes is None:
        total = 0j
        for start in range(0, dim, chunk):
            cols = min(chunk, dim - start)
            e = np.zeros((dim, cols), dtype=np.complex128)
            e[start + np.arange(cols), np.arange(cols)] = 1.0
            y = apply(p, context, e)
            total += np.trace(y[start:start + cols, :])
        return complex(total / dim)
    rng = RngSeed(seed, "trace").generator()
    z = rng.choice(np.array([-1.0, 1.0]), size=(dim, probes)).astype(np.complex128)
    y = apply(p, context, z)
    return complex(np.sum(np.conj(z) * y) / (probes * dim))


if __name__ == "__main__":
    from graph_core import path_graph

    print("=" * 60)
    print("RANDOM MODEL SMOKE TEST")
    print("=" * 60)
    p4 = path_graph(["a", "b", "c", "d"])
    K = parse_k_spec("all=2", p4)
    layout = channel_layout(p4, 2, K)
    print(f"P4, m=2, K=2: dims={layout.dims} total={layout.dim}")
    print(f"||SGRM(500, 1/500)|| = {sgrm_norm(500, 7):.4f}")
    print(f"schedule(2, 5) = {dimension_schedule(2, 5, path_graph(['a', 'b']))}")
