"""Cape Cod and generalized Cape Cod (GCC) claims ratios and predictors.

The GCC claims ratio of accident year ``i`` is a weighted average of the
individual CL-implied ratios ``kappa_l = C_{l,I-l} / (beta_{I-l} pi_l)`` with
weights ``beta_{I-l} pi_l lambda^|i-l|``.  ``lambda = 0`` gives the
chain-ladder and ``lambda = 1`` the Cape Cod method.  ``0**0`` is taken as
1, so both boundaries hold exactly rather than as limits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .chain_ladder import fit_cl_factors, pattern_from_factors
from .errors import DomainError, ShapeError
from .triangle import (
    ClaimsTriangle,
    PremiumVector,
    as_premiums,
    check_alignment,
    latest_diagonal,
)


def _pi(pi) -> np.ndarray:
    return pi.values if isinstance(pi, PremiumVector) else np.asarray(pi, dtype=float)


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def decay_matrix(n: int, lam: float) -> np.ndarray:
    """``D[i, l] = lambda ** |i - l|`` with ``0 ** 0 = 1``."""
    lam = check_lambda(lam)
    idx = np.arange(n)
    return np.power(lam, np.abs(idx[:, None] - idx[None, :]).astype(float))


@dataclass(frozen=True, eq=False)
class GccInput:
    tri: ClaimsTriangle
    pi: PremiumVector
    beta_hat: np.ndarray
    lam: float

    def __post_init__(self):
        check_lambda(self.lam)
        object.__setattr__(self, "pi", as_premiums(self.pi, self.tri))
        check_alignment(self.tri, self.pi)
        beta = np.asarray(self.beta_hat, dtype=float)
        if beta.shape != (self.tri.J + 1,):
            raise ShapeError(f"beta_hat has length {beta.size}, expected J+1={self.tri.J + 1}")
        if np.any(~(beta > 0)):
            raise DomainError("development pattern must be strictly positive")
        object.__setattr__(self, "beta_hat", beta)
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def from_triangle(cls, tri: ClaimsTriangle, pi: PremiumVector, lam: float) -> "GccInput":
        """Use the CL-implied pattern estimated from ``tri`` itself."""
        return cls(tri, pi, pattern_from_factors(fit_cl_factors(tri)), lam)

    def with_lambda(self, lam: float) -> "GccInput":
        return GccInput(self.tri, self.pi, self.beta_hat, lam)

    @property
    def beta_diag(self) -> np.ndarray:
        """``beta_{I-i}`` for ``i = 1..I``."""
        return self.beta_hat[self.tri.diagonal_dev]

    def weights(self) -> np.ndarray:
        """Unnormalised ``W[i, l] = beta_{I-l} pi_l lambda^|i-l|``."""
        return decay_matrix(self.tri.I, self.lam) * (self.beta_diag * self.pi.values)[None, :]


@dataclass(frozen=True, eq=False)
class GccResult:
    """GCC claims ratios and predictors for one ``lambda``.

    ``fitted[r, j]`` is ``C_{i,I-i} + (beta_j - beta_{I-i}) kappa^GCC_i pi_i``
    for ``j >= I - i`` and NaN elsewhere.
    """

    lam: float
    kappa_individual: np.ndarray
    kappa_gcc: np.ndarray
    ultimates: np.ndarray
    fitted: np.ndarray
    diagonal: np.ndarray

    @property
    def reserves(self) -> np.ndarray:
        return self.ultimates - self.diagonal

    @property
    def reserves_total(self) -> float:
        return float(self.reserves.sum())


def individual_kappas(tri: ClaimsTriangle, pi, beta_hat) -> np.ndarray:
    beta = np.asarray(beta_hat, dtype=float)
    return latest_diagonal(tri) / (beta[tri.diagonal_dev] * _pi(pi))


def cc_kappa(tri: ClaimsTriangle, pi, beta_hat) -> float:
    """Pooled Cape Cod ratio ``sum C_{i,I-i} / sum beta_{I-i} pi_i``."""
    beta = np.asarray(beta_hat, dtype=float)
    return float(latest_diagonal(tri).sum() / np.sum(beta[tri.diagonal_dev] * _pi(pi)))


def alpha_weights(inp: GccInput) -> np.ndarray:
    w = inp.weights()
    return w / w.sum(axis=1, keepdims=True)


def gcc_kappas(inp: GccInput) -> np.ndarray:
    kappa = individual_kappas(inp.tri, inp.pi, inp.beta_hat)
    return alpha_weights(inp) @ kappa


def gcc_predict(inp: GccInput) -> GccResult:
    tri, pi = inp.tri, inp.pi.values
    diag = latest_diagonal(tri)
    b_diag = inp.beta_diag
    k_gcc = gcc_kappas(inp)
    fitted = np.full(tri.values.shape, np.nan)
    for r, d in enumerate(tri.diagonal_dev):
        fitted[r, d:] = diag[r] + (inp.beta_hat[d:] - b_diag[r]) * k_gcc[r] * pi[r]
        fitted[r, d] = diag[r]
    ultimates = diag + (1.0 - b_diag) * k_gcc * pi
    fitted[:, -1] = ultimates
    return GccResult(
        lam=inp.lam,
        kappa_individual=individual_kappas(tri, inp.pi, inp.beta_hat),
        kappa_gcc=k_gcc,
        ultimates=ultimates,
        fitted=fitted,
        diagonal=diag,
    )


def omega_weights(inp: GccInput) -> np.ndarray:
    """Credibility weights of the CL predictors in the GCC predictor."""
    b = inp.beta_diag[:, None]
    return b * np.eye(inp.tri.I) + (1.0 - b) * alpha_weights(inp)


def predict_from_omega(inp: GccInput, cl_ultimates) -> np.ndarray:
    """``sum_l omega_{i,l} (pi_i / pi_l) C^CL_{l,J}``; equals the GCC ultimates."""
    pi = inp.pi.values
    return (omega_weights(inp) * (pi[:, None] / pi[None, :])) @ np.asarray(cl_ultimates)


class CredibilitySplit(NamedTuple):
    """``kappa^GCC_i = z * kappa_i + (1 - z) * pooled``.

    ``pooled`` is ``None`` when no other accident year carries weight
    (``lambda = 0`` or a single accident year); then ``z == 1``.
    """

    z: float
    pooled: Optional[float]

    def combine(self, own_kappa: float) -> float:
        if self.pooled is None:
            return own_kappa
        return self.z * own_kappa + (1.0 - self.z) * self.pooled


def credibility_decomposition(inp: GccInput, i: int) -> CredibilitySplit:
    """Split year ``i`` (1-based) into own experience and leave-one-out pool."""
    if not 1 <= i <= inp.tri.I:
        raise IndexError(f"accident year {i} outside 1..{inp.tri.I}")
    r = i - 1
    w = inp.weights()[r]
    total = w.sum()
    z = float(w[r] / total)
    others = np.arange(inp.tri.I) != r
    denom = w[others].sum()
    if denom == 0.0:
        return CredibilitySplit(1.0, None)
    decay = decay_matrix(inp.tri.I, inp.lam)[r]
    pooled = float(np.sum(latest_diagonal(inp.tri)[others] * decay[others]) / denom)
    return CredibilitySplit(z, pooled)


def gcc_reserves(result: GccResult, tri: ClaimsTriangle) -> tuple[np.ndarray, float]:
    per_year = result.ultimates - latest_diagonal(tri)
    return per_year, float(per_year.sum())


def cc_predict(tri: ClaimsTriangle, pi, beta_hat) -> np.ndarray:
    """Cape Cod ultimates ``C_{i,I-i} + (1 - beta_{I-i}) kappa^CC pi_i``."""
    beta = np.asarray(beta_hat, dtype=float)
    return latest_diagonal(tri) + (1.0 - beta[tri.diagonal_dev]) * cc_kappa(tri, pi, beta) * _pi(pi)


def aggregate_predictor(diagonal, pi, factors, lam: float) -> float:
    """Total GCC ultimate as a function of CL factors.

    Only the latest diagonal enters once the factors are fixed, which is what
    makes this the natural object for sensitivity checks in ``log f``.
    """
    diagonal = np.asarray(diagonal, dtype=float)
    pi = _pi(pi)
    beta = pattern_from_factors(factors)
    n = diagonal.size
    b = beta[n - 1 - np.arange(n)]
    w = decay_matrix(n, lam) * (b * pi)[None, :]
    k_gcc = (w @ (diagonal / (b * pi))) / w.sum(axis=1)
    return float(np.sum(diagonal + (1.0 - b) * k_gcc * pi))
