"""Mack chain-ladder estimation on a cumulative triangle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, UnsupportedShapeError
from .triangle import ClaimsTriangle, _frozen, latest_diagonal

#: Smallest J for which the variance tail rule (and hence any MSEP) is defined.
MIN_J_FOR_MSEP = 3


@dataclass(frozen=True, eq=False)
class ClFit:
    """Estimated CL factors, variance parameters and development pattern.

    ``sigma2_hat`` is ``None`` when the triangle is too small for the
    variance tail rule (``J < 3``); reserves still work in that case.
    """

    f_hat: np.ndarray
    sigma2_hat: Optional[np.ndarray]
    beta_hat: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f_hat, dtype=float)
        if np.any(~(f > 0)):
            raise DomainError("CL factors must be strictly positive")
        if self.sigma2_hat is not None:
            s2 = np.asarray(self.sigma2_hat, dtype=float)
            if s2.shape != f.shape:
                raise DomainError("sigma2_hat and f_hat lengths differ")
            if np.any(s2 < 0):
                raise DomainError("variance parameters must be non-negative")
        beta = np.asarray(self.beta_hat, dtype=float)
        if beta.shape != (f.size + 1,) or beta[-1] != 1.0:
            raise DomainError("beta_hat must have length J+1 and end in exactly 1")
        object.__setattr__(self, "f_hat", _frozen(f))
        object.__setattr__(self, "beta_hat", _frozen(beta))
        if self.sigma2_hat is not None:
            object.__setattr__(self, "sigma2_hat", _frozen(self.sigma2_hat))

    @property
    def J(self) -> int:
        return self.f_hat.size

    def require_sigma2(self) -> np.ndarray:
        if self.sigma2_hat is None:
            raise UnsupportedShapeError(
                f"MSEP needs J >= {MIN_J_FOR_MSEP} for the variance tail rule, got J={self.J}"
            )
        return self.sigma2_hat


@dataclass(frozen=True, eq=False)
class ClPrediction:
    """CL ultimates and the rolled-forward lower triangle.

    ``fitted[r, j]`` holds ``C^CL_{i,j}`` for ``j >= I - i`` (row ``r = i - 1``)
    and NaN to the left of the diagonal.
    """

    ultimates: np.ndarray
    fitted: np.ndarray

    @property
    def reserves(self) -> np.ndarray:
        rows = np.arange(self.fitted.shape[0])
        return self.ultimates - self.fitted[rows, self.fitted.shape[1] - 1 - rows]


def column_sums(tri: ClaimsTriangle) -> np.ndarray:
    """``S_j = sum_{l=1}^{I-j-1} C_{l,j}`` for ``j = 0..J-1``."""
    return np.array([tri.values[: tri.I - j - 1, j].sum() for j in range(tri.J)])


def fit_cl_factors(tri: ClaimsTriangle) -> np.ndarray:
    """Volume-weighted CL factors ``f_j = sum C_{i,j+1} / sum C_{i,j}``."""
    num = np.array([tri.values[: tri.I - j - 1, j + 1].sum() for j in range(tri.J)])
    return num / column_sums(tri)


def tail_sigma2(s_jm3: float, s_jm2: float) -> float:
    """``min(s_jm2**2 / s_jm3, s_jm3, s_jm2)`` for the last variance parameter."""
    # 0/0 -> 0 and x/0 -> inf keep the min rule finite
    if s_jm3 > 0:
        ratio = s_jm2 * s_jm2 / s_jm3
    else:
        ratio = np.inf if s_jm2 > 0 else 0.0
    return float(min(ratio, s_jm3, s_jm2))


def fit_sigma2(tri: ClaimsTriangle, f_hat: np.ndarray, ddof: int = 1) -> np.ndarray:
    """Mack variance parameters ``sigma^2_j``.

    For ``j <= J-2`` the weighted residual sum over the ``n_j = I - j - 1``
    observed development ratios is divided by ``n_j - ddof``.  ``ddof=1`` is
    Mack's unbiased estimator and reproduces the published Wuthrich-Merz
    figures; ``ddof=0`` divides by ``n_j``.  The last parameter follows the
    tail rule ``min(s_{J-2}^2 / s_{J-3}, s_{J-3}, s_{J-2})``.
    """
    if tri.J < MIN_J_FOR_MSEP:
        raise UnsupportedShapeError(
            f"variance tail rule needs J >= {MIN_J_FOR_MSEP}, got J={tri.J}"
        )
    if ddof not in (0, 1):
        raise DomainError("ddof must be 0 or 1")
    f_hat = np.asarray(f_hat, dtype=float)
    s2 = np.empty(tri.J)
    for j in range(tri.J - 1):
        n = tri.I - j - 1
        c = tri.values[:n, j]
        ratios = tri.values[:n, j + 1] / c
        s2[j] = np.sum(c * (ratios - f_hat[j]) ** 2) / (n - ddof)
    s2[-1] = tail_sigma2(s2[-3], s2[-2])
    return s2


def pattern_from_factors(f_hat) -> np.ndarray:
    """``beta_j = prod_{k>=j} 1/f_k`` with ``beta_J = 1`` exactly."""
    f = np.asarray(f_hat, dtype=float)
    if np.any(~(f > 0)):
        raise DomainError("development factors must be strictly positive")
    tail = np.cumprod(f[::-1])[::-1]
    return np.append(1.0 / tail, 1.0)


def cl_predict(tri: ClaimsTriangle, f_hat) -> ClPrediction:
    f = np.asarray(f_hat, dtype=float)
    diag = latest_diagonal(tri)
    fitted = np.full(tri.values.shape, np.nan)
    for r, d in enumerate(tri.diagonal_dev):
        fitted[r, d] = diag[r]
        for j in range(d + 1, tri.J + 1):
            fitted[r, j] = fitted[r, j - 1] * f[j - 1]
    return ClPrediction(ultimates=fitted[:, -1].copy(), fitted=fitted)


def fit_cl(tri: ClaimsTriangle, ddof: int = 1) -> ClFit:
    """Fit factors, pattern and (when ``J >= 3``) variance parameters."""
    f = fit_cl_factors(tri)
    s2 = fit_sigma2(tri, f, ddof=ddof) if tri.J >= MIN_J_FOR_MSEP else None
    return ClFit(f_hat=f, sigma2_hat=s2, beta_hat=pattern_from_factors(f))
