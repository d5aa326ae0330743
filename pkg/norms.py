# raagtool/norms.py
"""
Operator-norm estimation shared by every module.

Three regimes:
  - small operators are materialized and handed to a dense SVD (exact);
  - large operators go through ARPACK on A^H A with a fixed start vector;
  - power_norm runs plain power iteration from a caller-chosen start
    vector (ball compressions start at delta_e).
All estimates are Rayleigh values, hence lower bounds on the true norm.
"""

import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, aslinearoperator, eigsh

from config import DENSE_NORM_LIMIT, MF_MAXITER, MF_TOL, POWER_MAXITER, POWER_TOL, STABLE_TOL


@dataclass(frozen=True)
class NormEstimate:
    value: float
    iterations: int
    converged: bool
    method: str

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "method": self.method,
        }


def start_vector(n: int, complex_valued: bool = True, seed: int = 0) -> np.ndarray:
    """Deterministic normalized start vector for iterative solvers."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    if complex_valued:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def power_norm(
    apply: Callable[[np.ndarray], np.ndarray],
    apply_adjoint: Callable[[np.ndarray], np.ndarray],
    v0: np.ndarray,
    tol: float = POWER_TOL,
    maxiter: int = POWER_MAXITER,
) -> NormEstimate:
    """
    Power iteration on A^H A. The returned value is ||A x|| for the final
    unit vector x, so it never exceeds ||A||.
    """
    norm0 = np.linalg.norm(v0)
    if norm0 == 0:
        return NormEstimate(0.0, 0, True, "power")
    x = v0 / norm0
    previous = 0.0
    for iteration in range(1, maxiter + 1):
        y = apply(x)
        estimate = float(np.linalg.norm(y))
        if estimate == 0.0:
            return NormEstimate(0.0, iteration, True, "power")
        if abs(estimate - previous) <= tol * estimate:
            return NormEstimate(estimate, iteration, True, "power")
        previous = estimate
        z = apply_adjoint(y)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return NormEstimate(estimate, iteration, True, "power")
        x = z / nz
    print(f"⚠ power iteration hit the cap of {maxiter} (estimate {previous:.12g})", file=sys.stderr)
    return NormEstimate(previous, maxiter, False, "power")


def _dense(op, n: int) -> np.ndarray:
    if isinstance(op, np.ndarray):
        return op
    if scipy.sparse.issparse(op):
        return op.toarray()
    return op.matmat(np.eye(n, dtype=op.dtype))


def operator_norm(
    op,
    v0: Optional[np.ndarray] = None,
    tol: float = MF_TOL,
    maxiter: int = MF_MAXITER,
    dense_limit: int = DENSE_NORM_LIMIT,
) -> NormEstimate:
    """Largest singular value of a matrix, sparse matrix or LinearOperator."""
    n_rows, n = op.shape
    if n == 0 or n_rows == 0:
        return NormEstimate(0.0, 0, True, "dense")
    if max(n, n_rows) <= dense_limit:
        values = scipy.linalg.svdvals(_dense(op, n))
        return NormEstimate(float(values[0]) if values.size else 0.0, 1, True, "dense")

    A = op if isinstance(op, LinearOperator) else aslinearoperator(op)
    dtype = np.result_type(A.dtype, np.complex128)
    normal = LinearOperator(
        (n, n),
        matvec=lambda x: A.rmatvec(A.matvec(x)),
        dtype=dtype,
    )
    if v0 is None:
        v0 = start_vector(n)
    try:
        vals = eigsh(normal, k=1, which="LM", v0=v0.astype(dtype), tol=tol, maxiter=maxiter,
                     return_eigenvectors=False)
        return NormEstimate(float(np.sqrt(max(vals[0].real, 0.0))), maxiter, True, "arpack")
    except ArpackNoConvergence as e:
        partial = e.eigenvalues
        print("⚠ ARPACK did not converge; falling back to power iteration", file=sys.stderr)
        fallback = power_norm(A.matvec, A.rmatvec, v0, tol=tol, maxiter=maxiter)
        value = fallback.value
        if partial is not None and len(partial):
            value = max(value, float(np.sqrt(max(partial.real.max(), 0.0))))
        return NormEstimate(value, fallback.iterations, False, "arpack+power")


def probe_norm(op, probes: int = 2, seed: int = 0) -> NormEstimate:
    """
    Cheap lower bound max ||A xi|| / ||xi|| over seeded random probes plus one
    power step each. Used when the space is too large for ARPACK workspaces.
    """
    A = op if isinstance(op, LinearOperator) else aslinearoperator(op)
    n = A.shape[1]
    best = 0.0
    for k in range(probes):
        xi = start_vector(n, seed=seed + k)
        y = A.matvec(xi)
        best = max(best, float(np.linalg.norm(y)))
        z = A.rmatvec(y)
        nz = np.linalg.norm(z)
        if nz > 0:
            best = max(best, float(np.linalg.norm(A.matvec(z / nz))))
    return NormEstimate(best, probes, False, "probe")


def stabilized(values: Sequence[float], threshold: float = STABLE_TOL) -> bool:
    """True when the last two entries of a depth sequence agree to the threshold."""
    if len(values) < 2:
        return False
    last, before = values[-1], values[-2]
    return abs(last - before) < threshold * max(1.0, abs(last))
