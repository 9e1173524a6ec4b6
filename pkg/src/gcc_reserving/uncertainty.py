"""Prediction uncertainty of chain-ladder and GCC reserves.

The GCC parameter estimation error is obtained by error propagation: the
total GCC ultimate is viewed as a function of the CL factors and its
elasticities ``q_t = d log(sum_i C^GCC_{i,J}) / d log f_t`` weight the
factor estimation variances ``sigma^2_t / (f_t^2 S_t)``, where ``S_t`` is the
column sum used in ``f_t``.  Process variance follows Mack's recursion with
GCC fitted values in place of CL ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chain_ladder import ClFit, cl_predict, column_sums, pattern_from_factors
from .errors import DomainError
from .gcc import (
    GccInput,
    GccResult,
    aggregate_predictor,
    cc_kappa,
    cc_predict,
    check_lambda,
    gcc_predict,
)
from .triangle import ClaimsTriangle, PremiumVector, as_premiums, latest_diagonal


@dataclass(frozen=True)
class MsepReport:
    """MSEP split for one ``lambda``; all amounts in raw currency units."""

    lam: float
    process_var: float
    param_error: float
    msep: float
    rmsep: float
    reserves_total: float
    cova: Optional[float]

    @property
    def process_sd(self) -> float:
        return math.sqrt(self.process_var)

    @property
    def param_sd(self) -> float:
        return math.sqrt(self.param_error)


def _elasticity_mask(tri: ClaimsTriangle) -> np.ndarray:
    """``M[t, k] = 1{t >= I - k}``, shape ``(J, I)``."""
    return np.arange(tri.J)[:, None] >= tri.diagonal_dev[None, :]


def q_sensitivities(tri: ClaimsTriangle, pi, beta_hat, lam: float) -> np.ndarray:
    """Elasticities ``q_t(lambda)``, ``t = 0..J-1``, of the total GCC ultimate.

    Parameters
    ----------
    tri : ClaimsTriangle
    pi : PremiumVector
    beta_hat : array_like
        Development pattern; should come from ``pattern_from_factors`` so the
        log-factor derivatives are consistent.
    lam : float
    """
    inp = GccInput(tri, as_premiums(pi, tri), beta_hat, lam)
    res = gcc_predict(inp)
    pi_v = inp.pi.values
    b = inp.beta_diag
    w = inp.weights()
    mask = _elasticity_mask(tri)
    exposure = res.kappa_gcc * pi_v
    own = mask @ (b * exposure)
    share = (w @ mask.T.astype(float)) / w.sum(axis=1, keepdims=True)  # (I, J)
    pooled = ((1.0 - b) * exposure) @ share
    return (own + pooled) / res.ultimates.sum()


def q_cl_boundary(tri: ClaimsTriangle, f_hat) -> np.ndarray:
    """``q_t(0) = sum_{i >= I-t} C^CL_{i,J} / sum_i C^CL_{i,J}``."""
    ult = cl_predict(tri, f_hat).ultimates
    return (_elasticity_mask(tri) @ ult) / ult.sum()


def q_cc_boundary(tri: ClaimsTriangle, pi, beta_hat) -> np.ndarray:
    """``q_t(1)`` written through the Cape Cod ratio and predictors."""
    beta = np.asarray(beta_hat, dtype=float)
    pi_v = pi.values if isinstance(pi, PremiumVector) else np.asarray(pi, dtype=float)
    bp = beta[tri.diagonal_dev] * pi_v
    frac = (_elasticity_mask(tri) @ bp) / bp.sum()
    return frac * cc_kappa(tri, pi, beta) * pi_v.sum() / cc_predict(tri, pi, beta).sum()


def _estimation_variances(tri: ClaimsTriangle, fit: ClFit) -> np.ndarray:
    """``(sigma^2_j / f_j^2) / S_j`` for ``j = 0..J-1``."""
    return fit.require_sigma2() / fit.f_hat**2 / column_sums(tri)


def gcc_param_error(tri: ClaimsTriangle, pi: PremiumVector, fit: ClFit, lam: float) -> float:
    """Parameter estimation error ``Delta^2_GCC(lambda)``."""
    check_lambda(lam)
    var = _estimation_variances(tri, fit)
    q = q_sensitivities(tri, pi, fit.beta_hat, lam)
    total = gcc_predict(GccInput(tri, as_premiums(pi, tri), fit.beta_hat, lam)).ultimates.sum()
    return float(total**2 * np.sum(q**2 * var))


def mack_param_error(tri: ClaimsTriangle, fit: ClFit) -> float:
    """Mack's parameter estimation error, written as the literal double sum.

    Kept deliberately loop-based: it is the independent check for
    ``gcc_param_error`` at ``lambda = 0``.
    """
    var = _estimation_variances(tri, fit)
    ult = cl_predict(tri, fit.f_hat).ultimates
    I, J = tri.I, tri.J
    # years i = I-J+1 .. I, i.e. rows 1 .. I-1
    years = range(I - J + 1, I + 1)

    def tail(i):
        return sum(var[j] for j in range(I - i, J))

    diag_term = sum(ult[i - 1] ** 2 * tail(i) for i in years)
    cross = 0.0
    for i in years:
        for k in years:
            if i < k:
                cross += ult[i - 1] * ult[k - 1] * tail(i)
    return float(diag_term + 2.0 * cross)


def _process_var(ultimates, fitted, fit: ClFit) -> float:
    s2f = fit.require_sigma2() / fit.f_hat**2
    n_years, n_dev = fitted.shape
    total = 0.0
    for r in range(1, n_years):
        d = n_dev - 1 - r
        c = fitted[r, d : n_dev - 1]
        if np.any(~(c > 0)):
            raise DomainError(f"non-positive fitted value for accident year {r + 1}")
        total += ultimates[r] ** 2 * np.sum(s2f[d:] / c)
    return float(total)


def gcc_process_var(result: GccResult, fit: ClFit) -> float:
    """Process variance ``Psi^2_GCC(lambda)`` from GCC fitted values."""
    return _process_var(result.ultimates, result.fitted, fit)


def mack_process_var(tri: ClaimsTriangle, fit: ClFit) -> float:
    pred = cl_predict(tri, fit.f_hat)
    return _process_var(pred.ultimates, pred.fitted, fit)


def gcc_msep(tri: ClaimsTriangle, pi: PremiumVector, fit: ClFit, lam: float) -> MsepReport:
    lam = check_lambda(lam)
    result = gcc_predict(GccInput(tri, as_premiums(pi, tri), fit.beta_hat, lam))
    psi2 = gcc_process_var(result, fit)
    delta2 = gcc_param_error(tri, pi, fit, lam)
    msep = psi2 + delta2
    rmsep = math.sqrt(msep)
    reserves = result.reserves_total
    cova = rmsep / reserves if reserves > 0 else None
    return MsepReport(lam, psi2, delta2, msep, rmsep, reserves, cova)


def taylor_delta(tri: ClaimsTriangle, pi, true_factors, perturbed_factors, lam: float) -> float:
    """First-order approximation of ``sum C^GCC(f) - sum C^GCC(f_hat)``.

    Sensitivities and the total are evaluated at ``true_factors``.
    """
    f = np.asarray(true_factors, dtype=float)
    f_hat = np.asarray(perturbed_factors, dtype=float)
    if np.any(~(f > 0)) or np.any(~(f_hat > 0)):
        raise DomainError("factor vectors must be strictly positive")
    beta = pattern_from_factors(f)
    q = q_sensitivities(tri, pi, beta, lam)
    total = gcc_predict(GccInput(tri, as_premiums(pi, tri), beta, lam)).ultimates.sum()
    return float(-total * np.sum(q / f * (f_hat - f)))


def exact_delta(tri: ClaimsTriangle, pi, true_factors, perturbed_factors, lam: float) -> float:
    """``sum C^GCC(f) - sum C^GCC(f_hat)`` evaluated exactly."""
    diag = latest_diagonal(tri)
    return aggregate_predictor(diag, pi, true_factors, lam) - aggregate_predictor(
        diag, pi, perturbed_factors, lam
    )
