"""Covariance structure of m correlated near-optimal solutions.

For m multi-indices whose pairwise per-axis overlaps are ``nu2 - eta(i,j,q)``
the normalized subtensor sums have covariance ``Sigma`` with unit diagonal
and ``Sigma_ij = prod_q (nu2 - eta(i,j,q))``.  ``Sigma0`` is the equicorrelated
matrix obtained at ``eta = 0`` and ``E = Sigma0 - Sigma``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import HypothesisViolated, InvalidParam, Singular
from .report import BoundReport


@dataclass(frozen=True)
class CovarianceModel:
    m: int
    p: int
    nu1: float
    nu2: float
    eta_draws: np.ndarray = field(repr=False)  # shape (m(m-1)/2, p), pairs i<j in lex order
    sigma: np.ndarray = field(repr=False, compare=False, default=None)
    sigma0: np.ndarray = field(repr=False, compare=False, default=None)
    e: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def eta(self) -> float:
        """Width nu2 - nu1 of the admissible overlap band."""
        return self.nu2 - self.nu1

    @property
    def nu2p(self) -> float:
        return self.nu2**self.p

    def pairs(self) -> list[tuple[int, int]]:
        return list(itertools.combinations(range(self.m), 2))


def sigma0_matrix(m: int, s: float) -> np.ndarray:
    """(1 - s) I + s 11^T with ``s = nu2^p``."""
    return (1.0 - s) * np.eye(m) + s * np.ones((m, m))


def build_covariance_model(
    m: int,
    p: int,
    nu1: float,
    nu2: float,
    eta_source="zero",
    seed: int | None = None,
) -> CovarianceModel:
    """Build Sigma, Sigma0 and E.

    ``eta_source`` is ``"zero"``, ``"random"`` (uniform on ``[0, nu2-nu1]``,
    seeded by ``seed``) or an explicit array of shape ``(m(m-1)/2, p)``.
    """
    if not 0.5 < nu1 < nu2 < 1.0:
        raise InvalidParam(f"need 1/2 < nu1 < nu2 < 1, got nu1={nu1}, nu2={nu2}")
    if m < 2 or p < 1:
        raise InvalidParam("need m >= 2 and p >= 1")
    n_pairs = m * (m - 1) // 2
    width = nu2 - nu1
    if isinstance(eta_source, str):
        if eta_source == "zero":
            eta = np.zeros((n_pairs, p))
        elif eta_source == "random":
            rng = np.random.default_rng(seed)
            eta = rng.uniform(0.0, width, size=(n_pairs, p))
        else:
            raise InvalidParam(f"unknown eta_source {eta_source!r}")
    else:
        eta = np.array(eta_source, dtype=float)
        if eta.shape != (n_pairs, p):
            raise InvalidParam(f"eta draws must have shape {(n_pairs, p)}, got {eta.shape}")
        if eta.min() < 0.0 or eta.max() > width:
            raise InvalidParam(f"eta draws must lie in [0, nu2 - nu1] = [0, {width}]")
    eta.setflags(write=False)

    sigma = np.eye(m)
    for (i, j), row in zip(itertools.combinations(range(m), 2), eta):
        sigma[i, j] = sigma[j, i] = np.prod(nu2 - row)
    # same product as the Sigma entries so that eta = 0 gives E = 0 exactly
    s = float(np.prod(np.full(p, nu2)))
    sigma0 = sigma0_matrix(m, s)
    e = sigma0 - sigma
    np.fill_diagonal(e, 0.0)
    for a in (sigma, sigma0, e):
        a.setflags(write=False)
    return CovarianceModel(m, p, nu1, nu2, eta, sigma, sigma0, e)


def sigma0_inverse(model: CovarianceModel) -> np.ndarray:
    """Sherman-Morrison closed form of Sigma0^-1."""
    return _sigma0_inverse(model.m, model.nu2p)


def _sigma0_inverse(m: int, s: float) -> np.ndarray:
    if s >= 1.0:
        raise Singular("Sigma0 is singular when nu2^p = 1")
    return np.eye(m) / (1.0 - s) - s / ((1.0 - s) * (1.0 + (m - 1) * s)) * np.ones((m, m))


def sigma0_determinant(model: CovarianceModel) -> float:
    return _sigma0_determinant(model.m, model.nu2p)


def _sigma0_determinant(m: int, s: float) -> float:
    return (1.0 - s) ** (m - 1) * (1.0 + (m - 1) * s)


def sigma0_eigenvalues(m: int, s: float) -> np.ndarray:
    """Ascending: 1 - s (multiplicity m - 1), then 1 + (m - 1) s."""
    return np.array([1.0 - s] * (m - 1) + [1.0 + (m - 1) * s])


def eta_threshold(m: int, p: int, nu2: float) -> float:
    """Largest band width for which Sigma is guaranteed positive definite."""
    return (1.0 - nu2**p) / (m * p * nu2 ** (p - 1))


def lemma_checks(model: CovarianceModel) -> list[BoundReport]:
    """Evaluate the covariance lemmas (a), (d)-(g) and the Wielandt-Hoffman step."""
    m, p, nu2 = model.m, model.p, model.nu2
    s = model.nu2p
    eta = model.eta
    inputs = {"m": m, "p": p, "nu1": model.nu1, "nu2": nu2}
    reports = []

    off = model.e[~np.eye(m, dtype=bool)]
    e_cap = p * eta * nu2 ** (p - 1)
    reports.append(BoundReport("lemma_a_E_entries", inputs, 0.0, e_cap, float(off.max())))
    reports.append(
        BoundReport("lemma_a_E_entries_min", inputs, 0.0, e_cap, float(off.min()))
    )

    eigs = np.linalg.eigvalsh(model.sigma)
    lam1, lam_m = float(eigs[0]), float(eigs[-1])
    eta_ok = eta < eta_threshold(m, p, nu2)
    reports.append(
        BoundReport(
            "lemma_d_positive_definite",
            inputs,
            lower=0.0,
            exact_or_mc=lam1,
            satisfied=lam1 > 0.0,
            precondition=eta_ok,
            note="smallest eigenvalue of Sigma",
        )
    )

    fro = float(np.linalg.norm(model.e, "fro"))
    # allowance for the backward error of the symmetric eigensolver
    eig_tol = 8.0 * m * np.finfo(float).eps * max(1.0, lam_m)
    reports.append(
        BoundReport(
            "wielandt_hoffman_lambda1",
            inputs,
            upper=fro + eig_tol,
            exact_or_mc=abs(lam1 - (1.0 - s)),
            note=f"|Lambda_1 - (1 - nu2^p)| <= ||E||_F (+{eig_tol:.1e} rounding)",
        )
    )
    reports.append(
        BoundReport(
            "frobenius_E",
            inputs,
            upper=m * eta * p * nu2 ** (p - 1),
            exact_or_mc=fro,
            note="||E||_F <= m eta p nu2^(p-1)",
        )
    )

    pd = lam1 > 0.0
    if pd:
        w = np.linalg.solve(model.sigma, np.ones(m))
        reports.append(
            BoundReport(
                "lemma_e_inverse_row_sums_positive",
                inputs,
                lower=0.0,
                exact_or_mc=float(w.min()),
                satisfied=bool((w > 0).all()),
                note="min entry of Sigma^-1 1, checked numerically",
            )
        )
        gap = 1.0 - 2.0 * m * p * s
        f_pre = gap > 0.0
        det_term = float(np.linalg.det(model.sigma)) ** -0.5
        prod_term = float(np.prod(w))
        reports.append(
            BoundReport(
                "lemma_f_det",
                inputs,
                upper=gap ** (-m / 2) if f_pre else math.inf,
                exact_or_mc=det_term,
                precondition=f_pre,
                note="|Sigma|^-1/2 <= (1 - 2mp nu2^p)^(-m/2)",
            )
        )
        reports.append(
            BoundReport(
                "lemma_f_product",
                inputs,
                upper=m ** (m / 2) * gap ** (-m) if f_pre else math.inf,
                exact_or_mc=prod_term,
                precondition=f_pre,
                note="prod <e_i, Sigma^-1 1> <= m^(m/2) (1 - 2mp nu2^p)^-m",
            )
        )
        reports.append(
            BoundReport(
                "lemma_g_quadratic_form",
                inputs,
                lower=m / (1.0 + 2.0 * m * p * s),
                exact_or_mc=float(w.sum()),
                note="1^T Sigma^-1 1 >= m / (1 + 2mp nu2^p)",
            )
        )
    reports.append(
        BoundReport(
            "wielandt_hoffman_lambda_m",
            inputs,
            upper=1.0 + 2.0 * m * p * s,
            exact_or_mc=lam_m,
            note="largest eigenvalue of Sigma <= 1 + 2mp nu2^p",
        )
    )
    return reports


def mvn_tail_bounds(sigma, t) -> tuple[float, float]:
    """Savage-type bounds on P[X >= t] for X ~ N(0, Sigma).

    With ``v = Sigma^-1 t > 0`` entrywise::

        upper = phi_Sigma(t) / prod(v)
        lower = upper * (1 - <1/v, Sigma^-1 (1/v)>)

    ``lower`` can be negative, in which case it is vacuous.  In one
    dimension ``upper`` is the Mills-ratio bound phi(u)/u.
    """
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    d = len(t)
    if sigma.shape != (d, d):
        raise InvalidParam(f"Sigma must be {d}x{d}")
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise Singular("Sigma is not positive definite") from exc
    v = np.linalg.solve(sigma, t)
    if not (v > 0).all():
        raise HypothesisViolated(f"Sigma^-1 t has a non-positive entry: {v}")
    log_det = 2.0 * float(np.log(np.diag(chol)).sum())
    log_phi = -0.5 * d * math.log(2.0 * math.pi) - 0.5 * log_det - 0.5 * float(t @ v)
    upper = math.exp(log_phi - float(np.log(v).sum()))
    r = 1.0 / v
    lower = upper * (1.0 - float(r @ np.linalg.solve(sigma, r)))
    return lower, upper


def slepian_premise_check(
    m: int, p: int, nu2: float, eta_draws, taus, nu1: float | None = None
) -> BoundReport:
    """Compare interpolated and base pair covariances for every pair i < j.

    The margin ``prod(nu2 - eta) - cos(tau_i) cos(tau_j) prod(nu2 - eta)`` must
    be non-negative; ``exact_or_mc`` holds the smallest margin.
    """
    taus = np.asarray(taus, dtype=float)
    eta = np.asarray(eta_draws, dtype=float)
    if taus.shape != (m,):
        raise InvalidParam(f"need {m} tau values")
    if taus.min() < 0.0 or taus.max() > math.pi / 2:
        raise InvalidParam("tau values must lie in [0, pi/2]")
    if eta.shape != (m * (m - 1) // 2, p):
        raise InvalidParam("eta draws have the wrong shape")
    cos = [1.0 if x == 0.0 else (0.0 if x == math.pi / 2 else math.cos(x)) for x in taus]
    margins = []
    for (i, j), row in zip(itertools.combinations(range(m), 2), eta):
        base = float(np.prod(nu2 - row))
        interp = (cos[i] * cos[j]) * base
        margins.append(base - interp)
    worst = min(margins)
    return BoundReport(
        "slepian_premise",
        {"m": m, "p": p, "nu2": nu2, "taus": taus.tolist(), "margins": margins},
        lower=0.0,
        exact_or_mc=worst,
    )
