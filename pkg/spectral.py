# raagtool/spectral.py
"""
Numerical side of the complementary-series argument: spherical matrix
coefficients, a smooth bump f_T on [T, T+1] integrated against the sinh^2
Haar weight, and the exponent comparison that makes the pairing estimate
contradict the L^p bound for large T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from config import QUAD_EPSABS, THRESHOLD_GRID_STEP
from errors import ParameterRangeError
from validator import Check, check_geq


@dataclass(frozen=True)
class BumpSpec:
    """Smooth f~_T: 0 outside [T, T+1], 1 on [T+eps, T+1-eps], exp(-1/x) ramps between."""
    T: float
    eps: float = 0.02

    def __post_init__(self):
        if not self.T > 1:
            raise ParameterRangeError(f"T must exceed 1, got {self.T}")
        if not 0 < self.eps < 0.25:
            raise ParameterRangeError(f"eps must lie in (0, 1/4), got {self.eps}")

    @property
    def plateau(self):
        return self.T + self.eps, self.T + 1 - self.eps


def _flat(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, np.exp(-1.0 / safe), 0.0)


def smoothstep(x):
    """C-infinity ramp: 0 for x <= 0, 1 for x >= 1."""
    a = _flat(x)
    b = _flat(1.0 - np.asarray(x, dtype=float))
    return a / (a + b)


def bump_value(spec: BumpSpec, r):
    r = np.asarray(r, dtype=float)
    rise = smoothstep((r - spec.T) / spec.eps)
    fall = smoothstep((spec.T + 1 - r) / spec.eps)
    value = rise * fall
    return float(value) if value.ndim == 0 else value


# -----------------------------
# Complementary series
# -----------------------------

def spherical_coeff(u: float, r: float) -> float:
    """(2/u) sinh(ur/2) / sinh(r), continuous at r = 0."""
    if not 0 < u <= 2:
        raise ParameterRangeError(f"u must lie in (0, 2], got {u}")
    if r < 0:
        raise ParameterRangeError(f"r must be nonnegative, got {r}")
    if r == 0:
        return 1.0
    # (2/u) e^{(u/2 - 1) r} (1 - e^{-ur}) / (1 - e^{-2r})
    return float((2.0 / u) * math.exp((u / 2.0 - 1.0) * r) * math.expm1(-u * r) / math.expm1(-2.0 * r))


def spherical_vector(u: float, z: complex) -> float:
    """pi^{-1/2} (|z|^2 + 1)^{-(2+u)/2}"""
    if not 0 < u < 2:
        raise ParameterRangeError(f"u must lie in (0, 2), got {u}")
    return float((abs(z) ** 2 + 1.0) ** (-(2.0 + u) / 2.0) / math.sqrt(math.pi))


# -----------------------------
# Integrals against the Haar weight
# -----------------------------

def _integrate(f, a: float, b: float, points=None) -> float:
    value, _ = quad(f, a, b, points=points, epsabs=QUAD_EPSABS, limit=200)
    return float(value)


def lp_norm_bound(spec: BumpSpec, p: float) -> float:
    """(int f~_T(r)^p sinh^2(r) dr)^(1/p)"""
    if not 1 <= p < 2:
        raise ParameterRangeError(f"p must lie in [1, 2), got {p}")
    lo, hi = spec.plateau
    integral = _integrate(lambda r: bump_value(spec, r) ** p * math.sinh(r) ** 2, spec.T, spec.T + 1, [lo, hi])
    return integral ** (1.0 / p)


def haar_bound(spec: BumpSpec, p: float) -> float:
    """(2 e^{2T})^(1/p)"""
    return (2.0 * math.exp(2.0 * spec.T)) ** (1.0 / p)


def lp_norm_check(spec: BumpSpec, p: float) -> Check:
    value = lp_norm_bound(spec, p)
    bound = haar_bound(spec, p)
    return Check(name=f"lp norm T={spec.T:g} p={p:g}", passed=value <= bound, lhs=value, rhs=bound)


class PairingResult(NamedTuple):
    value: float
    bound: float
    passed: bool


def _check_u(u: float) -> None:
    if not 0 < u < 2:
        raise ParameterRangeError(f"u must lie in (0, 2), got {u}")


def pairing_value(u: float, spec: BumpSpec) -> float:
    """(2/u) int f~_T(r) sinh(r) sinh(ur/2) dr"""
    _check_u(u)
    lo, hi = spec.plateau

    def integrand(r: float) -> float:
        return bump_value(spec, r) * math.sinh(r) * math.sinh(u * r / 2.0)

    return (2.0 / u) * _integrate(integrand, spec.T, spec.T + 1, [lo, hi])


def pairing_lower(u: float, spec: BumpSpec) -> PairingResult:
    """(value, (1/u^2) e^{T(1+u/2)}, value >= bound)"""
    value = pairing_value(u, spec)
    bound = math.exp(spec.T * (1.0 + u / 2.0)) / (u * u)
    return PairingResult(value, bound, value >= bound)


def pairing_rate(u: float, spec: BumpSpec) -> float:
    """value / e^{T(1+u/2)}; constant in T when the exponential rate is right."""
    return pairing_value(u, spec) / math.exp(spec.T * (1.0 + u / 2.0))


class ThresholdResult(NamedTuple):
    threshold: float
    closed_form: float
    lhs_rate: float
    rhs_rate: float


def contradiction_threshold(eta: float, p: float, c: float, step: float = THRESHOLD_GRID_STEP) -> ThresholdResult:
    """
    Smallest grid T >= 0 with (1/eta^2) e^{T(1+eta/2)} > c e^{2T/p}.
    Needs 1 + eta/2 > 2/p, otherwise the right side always wins.
    """
    if not 0 < eta < 2:
        raise ParameterRangeError(f"eta must lie in (0, 2), got {eta}")
    if not c > 0:
        raise ParameterRangeError(f"c must be positive, got {c}")
    lhs_rate = 1.0 + eta / 2.0
    rhs_rate = 2.0 / p
    if not (rhs_rate < lhs_rate and p < 2):
        raise ParameterRangeError(
            f"p={p} is outside (2/(1+eta/2), 2) = ({2.0 / lhs_rate:.6g}, 2): no contradiction"
        )
    offset = math.log(c * eta * eta)
    closed = max(0.0, offset / (lhs_rate - rhs_rate))

    def holds(t: float) -> bool:
        return -2.0 * math.log(eta) + lhs_rate * t > math.log(c) + rhs_rate * t

    k = math.ceil(closed / step)
    while not holds(k * step):
        k += 1
    return ThresholdResult(k * step, closed, lhs_rate, rhs_rate)


# -----------------------------
# Trivial representation limit
# -----------------------------

def trivial_limit_gap(spec: BumpSpec, u: float) -> float:
    """Plateau pairing integral at u minus the plateau sinh^2 integral; tends to 0 as u -> 2."""
    if not 0 < u <= 2:
        raise ParameterRangeError(f"u must lie in (0, 2], got {u}")
    lo, hi = spec.plateau
    pairing = (2.0 / u) * _integrate(lambda r: math.sinh(r) * math.sinh(u * r / 2.0), lo, hi)
    weight = _integrate(lambda r: math.sinh(r) ** 2, lo, hi)
    return pairing - weight


def trivial_rep_check(spec: BumpSpec) -> Check:
    """int f_T sinh^2 is at least the plateau integral of sinh^2."""
    lo, hi = spec.plateau
    full = _integrate(lambda r: bump_value(spec, r) * math.sinh(r) ** 2, spec.T, spec.T + 1, [lo, hi])
    plateau = _integrate(lambda r: math.sinh(r) ** 2, lo, hi)
    return check_geq(f"trivial pairing T={spec.T:g}", full, plateau)


if __name__ == "__main__":
    print("=" * 60)
    print("SPECTRAL SMOKE TEST")
    print("=" * 60)
    spec = BumpSpec(3.0, 0.02)
    print(f"spherical_coeff(1, 2) = {spherical_coeff(1.0, 2.0):.5f}")
    print(f"lp bound p=1: {lp_norm_bound(spec, 1.0):.3f} <= {haar_bound(spec, 1.0):.3f}")
    print(f"pairing u=1: {pairing_lower(1.0, spec)}")
    print(f"threshold(1, 1.5, 10): {contradiction_threshold(1.0, 1.5, 10.0)}")
