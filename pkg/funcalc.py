# raagtool/funcalc.py
"""
Functional calculus t -> psi(t) = exp(i phi(t)), phi(t) = int_0^t sqrt(4 - s^2) ds
clamped to [-pi, pi], and the unitary representations it produces from the
sampled Hermitian model.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import brentq
from scipy.sparse.linalg import LinearOperator

from config import (
    ARPACK_DIM_LIMIT,
    CIRCLE_TOL,
    DEFAULT_THREADS,
    HERMITIAN_TOL,
)
from errors import GraphMismatchError, NotHermitianError, OffCircleError, ParameterRangeError, RelationCheckError
from graph_core import SimpleGraph, graph_to_json
from graph_fock import fock_space, semicircular_op
from ncpoly import NcPolynomial, as_linear_operator, evaluate, star_context, symbol
from norms import NormEstimate, operator_norm, probe_norm, start_vector
from raag_words import (
    GroupAlgebraElement,
    algebra_identity,
    l1_norm,
    moment_norm_lower,
    regular_norm_lower,
    support_length,
)
from rand_model import ChannelLayout, MatrixFreeOperator, RngSeed, assemble_model
from validator import Check, check_equal

RELATION_TOL = 1e-10


# -----------------------------
# phi / psi
# -----------------------------

def phi(t):
    """t sqrt(4 - t^2)/2 + 2 arcsin(t/2) on [-2, 2]; -pi below, pi above."""
    t = np.asarray(t, dtype=float)
    inner = np.clip(t, -2.0, 2.0)
    value = inner * np.sqrt(np.maximum(4.0 - inner * inner, 0.0)) / 2.0 + 2.0 * np.arcsin(inner / 2.0)
    value = np.where(t >= 2.0, math.pi, np.where(t <= -2.0, -math.pi, value))
    return float(value) if value.ndim == 0 else value


def psi(t):
    return np.exp(1j * phi(t))


def psi_inverse(zeta: complex) -> float:
    """The unique t in (-2, 2] with psi(t) = zeta."""
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > CIRCLE_TOL:
        raise OffCircleError(f"|zeta| = {abs(zeta):.12g} is not 1")
    angle = math.atan2(zeta.imag, zeta.real)
    if angle <= -math.pi:
        angle = math.pi
    if angle >= math.pi:
        return 2.0
    return float(brentq(lambda t: phi(t) - angle, -2.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def unitary_from_hermitian(h: np.ndarray) -> np.ndarray:
    """U diag(psi(lambda)) U* from the eigendecomposition of a Hermitian matrix."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if float(np.abs(h - h.conj().T).max(initial=0.0)) > HERMITIAN_TOL * scale:
        raise NotHermitianError("matrix is not Hermitian")
    evals, vecs = scipy.linalg.eigh(h)
    return (vecs * psi(evals)) @ vecs.conj().T


# -----------------------------
# Representations
# -----------------------------

@dataclass(frozen=True, eq=False)
class UnitaryRep:
    """U_v = psi(X~_v) (x) Id for every vertex, stored as small blocks on one layout."""
    graph: SimpleGraph = field(repr=False)
    m: int
    K: Dict[str, int]
    seed: int
    layout: ChannelLayout = field(repr=False)
    unitaries: Dict[str, MatrixFreeOperator] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def context(self):
        return star_context(self.unitaries)


def rep_relation_checks(rep: UnitaryRep, probes: int = 2) -> List[Check]:
    """Unitarity of every block and commutation of every edge on seeded vectors."""
    checks: List[Check] = []
    for v, u in rep.unitaries.items():
        block = u.block
        defect = float(np.abs(block.conj().T @ block - np.eye(block.shape[0])).max())
        checks.append(check_equal(f"unitary U_{v}", defect, 0.0, 1e-12))
    g = rep.graph
    for e in sorted(g.edges, key=lambda pair: sorted(g.position[x] for x in pair)):
        v, w = sorted(e, key=g.position.get)
        defect = commutator_norm(rep, v, w, probes)
        checks.append(check_equal(f"commute U_{v} U_{w}", defect, 0.0, RELATION_TOL))
    return checks


def build_unitary_rep(
    g: SimpleGraph,
    m: int,
    K: Mapping[str, int],
    seed: int,
    guard: Optional[int] = None,
    verify: bool = True,
) -> UnitaryRep:
    model = assemble_model(g, m, K, RngSeed(int(seed)), guard)
    layout = next(iter(model.values())).layout
    unitaries = {
        v: MatrixFreeOperator(layout, x.acting, unitary_from_hermitian(x.block)) for v, x in model.items()
    }
    rep = UnitaryRep(g, m, dict(K), int(seed), layout, unitaries)
    if verify:
        failed = [c for c in rep_relation_checks(rep) if not c.passed]
        if failed:
            raise RelationCheckError(f"representation relation failed: {failed[0].name} ({failed[0].lhs:.3g})")
    return rep


def commutator_norm(rep: UnitaryRep, v: str, w: str, probes: int = 2, seed: int = 0) -> float:
    """max ||(U_v U_w - U_w U_v) xi|| over seeded unit vectors xi."""
    a, b = rep.unitaries[v], rep.unitaries[w]
    worst = 0.0
    for k in range(probes):
        xi = start_vector(rep.dim, seed=seed + k)
        worst = max(worst, float(np.linalg.norm(a @ (b @ xi) - b @ (a @ xi))))
    return worst


def algebra_to_poly(z: GroupAlgebraElement) -> NcPolynomial:
    """Each group element becomes the monomial of its normal form; v' maps to x_v*."""
    terms = {}
    for x, c in z.terms.items():
        mono = tuple(symbol(name, exponent < 0) for name, exponent in x.named_letters())
        terms[mono] = terms.get(mono, 0) + c
    return NcPolynomial(terms)


def rep_apply(rep: UnitaryRep, z: GroupAlgebraElement) -> LinearOperator:
    """sum_g z(g) U(g), applied matrix-free."""
    if z.graph != rep.graph:
        raise GraphMismatchError("element and representation use different graphs")
    return as_linear_operator(algebra_to_poly(z), rep.context(), rep.dim)


def rep_norm(rep: UnitaryRep, z: GroupAlgebraElement, probes: int = 1) -> NormEstimate:
    """Exact or ARPACK norm of rep_apply(z); seeded probes above ARPACK_DIM_LIMIT."""
    op = rep_apply(rep, z)
    if rep.dim > ARPACK_DIM_LIMIT:
        print(f"⚠ dimension {rep.dim} is above {ARPACK_DIM_LIMIT}; using a probe estimate", file=sys.stderr)
        return probe_norm(op, probes=probes)
    return operator_norm(op, v0=start_vector(rep.dim))


def distance_from_identity(rep: UnitaryRep, z: GroupAlgebraElement, probes: int = 1) -> NormEstimate:
    return rep_norm(rep, z - algebra_identity(z.graph), probes)


def fock_psi_estimate(g: SimpleGraph, z: GroupAlgebraElement, D: int) -> float:
    """||z(psi(S_v))|| with S_v the depth-D compression of s_v; an estimate, not a bound."""
    if z.graph != g:
        raise GraphMismatchError("element uses a different graph")
    p = algebra_to_poly(z)
    used = tuple(v for v in g.vertices if v in set(p.vertices()))
    if not used:
        return float(abs(p.terms.get((), 0)))
    space = fock_space(g, D, used)
    ops = {v: unitary_from_hermitian(semicircular_op(space.graph, v, D, space).toarray()) for v in used}
    value = evaluate(p, star_context(ops), np.eye(space.dim, dtype=np.complex128))
    return float(scipy.linalg.svdvals(value)[0])


# -----------------------------
# Experiment harness
# -----------------------------

@dataclass(frozen=True)
class SchedulePoint:
    m: int
    K: Dict[str, int]


def _cell(g, z, point: SchedulePoint, seed: int, guard, label: str) -> dict:
    print(f"{label} ⏳ m={point.m} K={sorted(set(point.K.values()))} seed={seed}", file=sys.stderr)
    rep = build_unitary_rep(g, point.m, point.K, seed, guard)
    estimate = rep_norm(rep, z)
    return {"seed": seed, "norm": estimate.value, "method": estimate.method, "converged": estimate.converged}


def strong_conv_experiment(
    g: SimpleGraph,
    z: GroupAlgebraElement,
    schedule: Sequence[SchedulePoint],
    seeds: Sequence[int],
    radius: int = 8,
    moment_k: int = 6,
    fock_depth: int = 4,
    threads: int = DEFAULT_THREADS,
    guard: Optional[int] = None,
) -> dict:
    """
    Norms of the represented z over a schedule of (m, K) and seeds, with the
    reference bracket [max(ball, moment) lower bounds, l1 upper bound].
    """
    if not schedule:
        raise ParameterRangeError("schedule must not be empty")
    if not seeds:
        raise ParameterRangeError("at least one seed is required")
    cells = [(point, seed) for point in schedule for seed in seeds]
    total = len(cells)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [
            pool.submit(_cell, g, z, point, seed, guard, f"[{i + 1}/{total}]")
            for i, (point, seed) in enumerate(cells)
        ]
        results = [f.result() for f in futures]

    rows = []
    for i, point in enumerate(schedule):
        chunk = results[i * len(seeds):(i + 1) * len(seeds)]
        norms = [r["norm"] for r in chunk]
        rows.append({
            "m": point.m,
            "K": dict(point.K),
            "seeds": chunk,
            "mean": float(np.mean(norms)),
            "min": float(np.min(norms)),
            "max": float(np.max(norms)),
        })

    ball_lower = regular_norm_lower(z, max(radius, support_length(z)))
    moment_lower = moment_norm_lower(z, moment_k)
    print("✓ Reference bracket computed", file=sys.stderr)
    return {
        "graph": json.loads(graph_to_json(g)),
        "z": str(z),
        "schedule": rows,
        "reference": {
            "lower": max(ball_lower, moment_lower),
            "upper": l1_norm(z),
            "oracle_names": ["ball_compression", "trace_moment"],
            "ball_lower": ball_lower,
            "moment_lower": moment_lower,
            "fock_psi_estimate": fock_psi_estimate(g, z, fock_depth),
        },
    }


if __name__ == "__main__":
    from graph_core import complete_graph
    from raag_words import parse_algebra

    print("=" * 60)
    print("FUNCTIONAL CALCULUS SMOKE TEST")
    print("=" * 60)
    print(f"phi(1) = {phi(1.0):.10f}  psi(2) = {psi(2.0):.6f}")
    print(f"psi_inverse(psi(1.3)) = {psi_inverse(psi(1.3)):.12f}")
    z2 = complete_graph(["a", "b"])
    z = parse_algebra(z2, "1*[a]+1*[a']+1*[b]+1*[b']")
    rep = build_unitary_rep(z2, 1, {"a": 32, "b": 32}, 11)
    print(f"||rho(z)|| = {rep_norm(rep, z).value:.4f} (limit 4)")
