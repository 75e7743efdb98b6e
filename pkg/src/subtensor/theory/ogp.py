"""First-moment exponents for the m-overlap-gap bound.

Everything here is in base 2, matching the counting estimates it evaluates.
"""

from __future__ import annotations

import math

from ..errors import InvalidParam
from .scalar import ProblemParams, log2_binomial


def binary_entropy(q: float) -> float:
    """h(q) = -q log2 q - (1-q) log2(1-q), with h(0) = h(1) = 0."""
    if not 0.0 <= q <= 1.0:
        raise InvalidParam(f"q must lie in [0, 1], got {q}")
    if q in (0.0, 1.0):
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def _check(m, gamma, nu1, nu2, c):
    if not 0.5 < nu1 < nu2 < 1.0:
        raise InvalidParam(f"need 1/2 < nu1 < nu2 < 1, got {nu1}, {nu2}")
    if m < 2 or gamma <= 0 or c < 0:
        raise InvalidParam("need m >= 2, gamma > 0, c >= 0")


def _band_entropy(params: ProblemParams, nu1: float) -> float:
    """k h(nu1) + k (1 - nu1) log2(e N / (k (1 - nu1)))."""
    n, k = params.n, params.k
    return k * binary_entropy(nu1) + k * (1.0 - nu1) * math.log2(
        math.e * n / (k * (1.0 - nu1))
    )


def c0_log2_bound(params: ProblemParams, m: int, nu1: float) -> float:
    """log2 of the upper bound on the number of m-tuples with overlaps in the band."""
    p, k = params.p, params.k
    return (
        p * log2_binomial(params.n, k)
        + m * p * math.log2(k)
        + m * p * _band_entropy(params, nu1)
    )


def c1_log2_bound(params: ProblemParams, m: int, gamma: float, nu2: float) -> float:
    """log2 of the bound on the joint tail of m correlated solutions (o(1) dropped)."""
    p = params.p
    return -gamma**2 * p * log2_binomial(params.n, params.k) * m / (1.0 + 2.0 * m * p * nu2**p)


def ogp_exponent_psi(
    params: ProblemParams, m: int, gamma: float, nu1: float, nu2: float, c: float = 0.0
) -> float:
    """Sign-determining exponent Psi; Psi < 0 certifies the first-moment bound.

    ``Psi = 1 + m [c - gamma^2/(1 + 2mp nu2^p) + (k/L) h(nu1)
    + (k/L)(1-nu1) log2(eN/(k(1-nu1)))]`` with ``L = log2 C(N,k)``.
    """
    _check(m, gamma, nu1, nu2, c)
    log2c = log2_binomial(params.n, params.k)
    if log2c <= 0:
        raise InvalidParam("Psi is undefined when C(N,k) = 1")
    p = params.p
    return 1.0 + m * (
        c
        - gamma**2 / (1.0 + 2.0 * m * p * nu2**p)
        + _band_entropy(params, nu1) / log2c
    )
