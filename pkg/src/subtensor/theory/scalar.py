"""Closed-form scalar quantities: ground-state value, tails, counting bounds."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from ..errors import InvalidParam
from ..rtensor import OverlapVector
from .report import BoundReport

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# exact big-integer binomials are used while C(n,k) has at most this many bits;
_EXACT_COMB_BITS = 4096
_LOG_SUM_LIMIT = 10**6


@dataclass(frozen=True)
class ProblemParams:
    n: int
    k: int
    p: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise InvalidParam(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.p < 1:
            raise InvalidParam(f"need p >= 1, got {self.p}")

    @property
    def near_full(self) -> bool:
        """True when k/n is at least 1 - 1e-9, i.e. outside limsup k/N < 1."""
        return self.k / self.n >= 1 - 1e-9


@functools.lru_cache(maxsize=4096)
def log_binomial(n: int, k: int) -> float:
    """Natural log of C(n, k)."""
    if k < 0 or n < 0 or k > n:
        raise InvalidParam(f"need 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    if k * math.log2(n) <= _EXACT_COMB_BITS:
        return math.log(math.comb(n, k))
    if k <= _LOG_SUM_LIMIT:
        # pairwise sum of ln(n - i) avoids the cancellation in lgamma(n+1) - lgamma(n-k+1)
        return float(np.log(np.arange(n - k + 1, n + 1, dtype=float)).sum()) - math.lgamma(k + 1)
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log2_binomial(n: int, k: int) -> float:
    return log_binomial(n, k) / math.log(2.0)


def e_max(params: ProblemParams) -> float:
    """sqrt((2p / k^p) * ln C(N, k)): the max of C(N,k)^p iid N(0, k^-p)."""
    n, k, p = params.n, params.k, params.p
    return math.sqrt(2.0 * p * log_binomial(n, k) / float(k) ** p)


def correlation_lambda(ov: OverlapVector) -> float:
    """Correlation prod(a_q) / k^p of two normalized subtensor sums."""
    return math.prod(ov.intersections) / float(ov.k) ** len(ov.intersections)


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def normal_sf(x: float) -> float:
    """P[N(0,1) >= x] via the complementary error function."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def gaussian_tail_bounds(x: float) -> tuple[float, float, float]:
    """Return ``(lower, upper, exact)`` for P[N(0,1) >= x], x > 0."""
    if not x > 0:
        raise InvalidParam(f"x must be positive, got {x}")
    phi = normal_pdf(x)
    return x / (x * x + 1.0) * phi, phi / x, normal_sf(x)


def bivariate_tail_upper(rho: float, u: float) -> float:
    """Upper bound on P[Z > u, Z_rho > u] for standard normals with correlation rho."""
    if not 0.0 <= rho < 1.0:
        raise InvalidParam(f"rho must lie in [0, 1), got {rho}")
    if not u > 0:
        raise InvalidParam(f"u must be positive, got {u}")
    return (
        (1.0 + rho) ** 2
        / (2.0 * math.pi * u * u * math.sqrt(1.0 - rho * rho))
        * math.exp(-u * u / (1.0 + rho))
    )


def _counting_terms(n: int, k: int, delta: float) -> list[float]:
    if not 0.0 < delta < 1.0:
        raise InvalidParam(f"delta must lie in (0, 1), got {delta}")
    if not 1 <= k <= n:
        raise InvalidParam(f"need 1 <= k <= n, got n={n}, k={k}")
    lo = (1.0 - delta) * k
    return [
        log_binomial(k, a) + log_binomial(n - k, k - a)
        for a in range(k + 1)
        if a > lo and k - a <= n - k
    ]


def log_counting_tail(n: int, k: int, delta: float) -> float:
    """ln of sum_{a > (1-delta)k} C(k, a) C(n-k, k-a)."""
    terms = _counting_terms(n, k, delta)
    return float(special.logsumexp(terms)) if terms else -math.inf


def counting_tail(n: int, k: int, delta: float) -> float:
    """Number of k-subsets sharing more than (1-delta)k elements with a fixed one."""
    return math.exp(log_counting_tail(n, k, delta))


def counting_tail_report(n: int, k: int, delta: float, gamma: float) -> BoundReport:
    """Check the counting sum against C(n,k)^gamma and report the delta conditions.

    The conditions are ``delta < min(1/2, (n/k - 1)/2, gamma)`` and
    ``delta + 2 delta ln(e/delta) + delta ln(1+alpha) < gamma ln(1+alpha)``
    with ``alpha = n/k - 1``.
    """
    alpha = n / k - 1.0
    cond_min = delta < min(0.5, 0.5 * alpha, gamma)
    cond_exp = alpha > 0 and (
        delta + 2 * delta * math.log(math.e / delta) + delta * math.log1p(alpha)
        < gamma * math.log1p(alpha)
    )
    log_sum = log_counting_tail(n, k, delta)
    log_cap = gamma * log_binomial(n, k)
    return BoundReport(
        "counting_tail",
        {"n": n, "k": k, "delta": delta, "gamma": gamma},
        upper=log_cap,
        exact_or_mc=log_sum,
        precondition=bool(cond_min and cond_exp),
        note=(
            "values are natural logs; delta<min(1/2,(N/k-1)/2,gamma): "
            f"{cond_min}; exponent condition: {cond_exp}"
        ),
    )


def second_moment_lower_bound(
    params: ProblemParams, epsilon: float, delta: float
) -> float:
    """Main term of the Paley-Zygmund lower bound on P[N_E >= 1].

    With ``x = (1-delta)^(epsilon p / 2)`` and
    ``Ebar = (1-epsilon) sqrt(2p ln C(N,k))`` this returns
    ``[(1+x)^2 / sqrt(1-x^2) * exp(x Ebar^2)]^-1``.  The additive
    ``C(N,k)^-Theta(1)`` correction has no explicit constant and is omitted.
    """
    if not 0.0 < epsilon < 1.0 or not 0.0 < delta < 1.0:
        raise InvalidParam("epsilon and delta must lie in (0, 1)")
    x = (1.0 - delta) ** (epsilon * params.p / 2.0)
    ebar_sq = (1.0 - epsilon) ** 2 * 2.0 * params.p * log_binomial(params.n, params.k)
    log_term = 2.0 * math.log1p(x) - 0.5 * math.log1p(-x * x) + x * ebar_sq
    return math.exp(-log_term)


def second_moment_report(params: ProblemParams, epsilon: float, delta: float) -> BoundReport:
    return BoundReport(
        "second_moment_lower_bound",
        {"n": params.n, "k": params.k, "p": params.p, "epsilon": epsilon, "delta": delta},
        lower=0.0,
        upper=1.0,
        exact_or_mc=second_moment_lower_bound(params, epsilon, delta),
        note="main term only; additive C(N,k)^-Theta(1) term unresolved",
    )


def igpt_guarantee_ratio(p: int) -> float:
    """2 sqrt(p) / (p + 1)."""
    if p < 1:
        raise InvalidParam(f"p must be >= 1, got {p}")
    return 2.0 * math.sqrt(p) / (p + 1.0)


def igp_informal_estimate(n: int, k: int) -> float:
    """(4/3) sqrt(2 ln N / k), the submatrix estimate; equals ratio(2) * sqrt(4 ln N / k)."""
    return 4.0 / 3.0 * math.sqrt(2.0 * math.log(n) / k)


def log_expected_count(params: ProblemParams, level: float) -> float:
    """ln E[N_E] = p ln C(N,k) + ln P[N(0,1) > k^(p/2) E]."""
    z = float(params.k) ** (params.p / 2.0) * level
    return params.p * log_binomial(params.n, params.k) + float(special.log_ndtr(-z))


def borell_tis_two_sided(u: float, k: int, p: int) -> float:
    """2 exp(-u^2 k^p / 2), the two-sided concentration bound for the max average."""
    return 2.0 * math.exp(-u * u * float(k) ** p / 2.0)


def gauss_max_centering(n: float) -> float:
    """b_n = sqrt(2 ln n) - ln(4 pi ln n) / (2 sqrt(2 ln n))."""
    if n <= 1:
        raise InvalidParam("n must exceed 1")
    r = math.sqrt(2.0 * math.log(n))
    return r - math.log(4.0 * math.pi * math.log(n)) / (2.0 * r)


def gauss_max_window(n: float) -> float:
    """Half-width (in units of M/sqrt(Pi)) of the high-probability window around b_n."""
    return 1.5 * math.log(math.log(n)) / math.sqrt(2.0 * math.log(n))


def expected_max_gaussians(n: int) -> float:
    """E[max of n iid N(0,1)] by quadrature of n x phi(x) Phi(x)^(n-1)."""
    if n < 1:
        raise InvalidParam("n must be >= 1")
    if n == 1:
        return 0.0

    def integrand(x):
        return n * x * math.exp(-0.5 * x * x + (n - 1) * special.log_ndtr(x)) / _SQRT_2PI

    val, _ = integrate.quad(integrand, -12.0, 12.0, limit=200, points=[0.0, math.sqrt(2 * math.log(n))])
    return val


def igpt_step_weights(k: int, p: int) -> np.ndarray:
    """Pi_{j,t} = t^(j-1) (t-1)^(p-j) for j = 1..p, t = 2..k (shape (p, k-1))."""
    t = np.arange(2, k + 1, dtype=float)
    j = np.arange(1, p + 1, dtype=float)[:, None]
    return t ** (j - 1) * (t - 1) ** (p - j)


def igpt_expected_average(n: int, k: int, p: int) -> float:
    """Finite-size prediction of the IGPT average.

    Every step maximizes ``N // k`` fresh independent N(0, Pi_{j,t}) sums, so
    the expected output average is ``m_B (1 + sum sqrt(Pi_{j,t})) / k^p`` with
    ``m_B`` the expected max of ``B = N // k`` standard normals.
    """
    block = n // k
    if block < 1:
        raise InvalidParam("need N // k >= 1")
    weight = 1.0 + float(np.sqrt(igpt_step_weights(k, p)).sum())
    return expected_max_gaussians(block) * weight / float(k) ** p
