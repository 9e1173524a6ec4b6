"""Monte Carlo validation of the GCC estimators under Mack-type dynamics.

Each replication draws a full ``I x (J+1)`` square of cumulative claims:

* ``C_{i,0}`` has mean ``beta_0 kappa pi_i`` and coefficient of variation
  ``initial_cv``;
* ``C_{i,j+1} | C_{i,j}`` has mean ``f_j C_{i,j}`` and variance
  ``sigma^2_j C_{i,j}``.

Both steps use a gamma or lognormal law matched to these two moments, so
cells stay positive.  The upper triangle is fed to the estimators and the
last column gives the realised ultimates.

Replication ``k`` always uses the ``k``-th child of ``SeedSequence(seed)``,
so results do not depend on how replications are split across workers.
"""

from __future__ import annotations

import configparser
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain_ladder import fit_cl, pattern_from_factors
from .errors import ConfigError, ReservingError, SimulationError
from .gcc import GccInput, cc_kappa, check_lambda, gcc_kappas, gcc_predict
from .triangle import ClaimsTriangle, PremiumVector, observed_mask
from .uncertainty import gcc_msep

FAMILIES = ("gamma", "lognormal")
MAX_REDRAW_RATE = 0.10

# Mack-consistent parameters close to the bundled Wuthrich-Merz estimates.
_WM_FACTORS = (1.4925, 1.0778, 1.0229, 1.0148, 1.0070, 1.0051, 1.0011, 1.0010, 1.0014)
_WM_SIGMA2 = (18293.4, 1142.6, 248.4, 393.9, 87.2, 4.00, 0.678, 0.0482, 0.00344)
_WM_PREMIUMS = (
    15473558, 14882436, 14456039, 14054917, 14525373,
    15025923, 14832503, 14550289, 14461687, 15210768,
)


def _floats(values) -> tuple:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class SimConfig:
    factors: tuple
    sigma2: tuple
    premiums: tuple
    kappa: float
    replications: int = 10_000
    seed: int = 20240101
    family: str = "gamma"
    initial_cv: float = 0.05
    lambdas: tuple = (0.0, 0.5, 1.0)

    def __post_init__(self):
        for name in ("factors", "sigma2", "premiums", "lambdas"):
            object.__setattr__(self, name, _floats(getattr(self, name)))
        J = len(self.factors)
        if J < 1:
            raise ConfigError("need at least one development factor")
        if len(self.sigma2) != J:
            raise ConfigError(f"{len(self.sigma2)} variance parameters for J={J} factors")
        if len(self.premiums) != J + 1:
            raise ConfigError(f"{len(self.premiums)} premiums, expected I = J + 1 = {J + 1}")
        if any(not (f > 0 and math.isfinite(f)) for f in self.factors):
            raise ConfigError("factors must be positive and finite")
        if any(not (s >= 0 and math.isfinite(s)) for s in self.sigma2):
            raise ConfigError("variance parameters must be non-negative and finite")
        if any(not (p > 0 and math.isfinite(p)) for p in self.premiums):
            raise ConfigError("premiums must be positive and finite")
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ConfigError("kappa must be positive")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError("replications must be a positive integer")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not self.initial_cv >= 0:
            raise ConfigError("initial_cv must be non-negative")
        if not self.lambdas:
            raise ConfigError("empty lambda grid")
        for lam in self.lambdas:
            try:
                check_lambda(lam)
            except ReservingError as exc:
                raise ConfigError(str(exc)) from None

    @property
    def J(self) -> int:
        return len(self.factors)

    @property
    def I(self) -> int:  # noqa: E743
        return self.J + 1

    @property
    def beta(self) -> np.ndarray:
        return pattern_from_factors(self.factors)

    @classmethod
    def wuthrich_merz_like(cls, **overrides) -> "SimConfig":
        """Ten-year config with parameters near the bundled data's estimates."""
        params = dict(
            factors=_WM_FACTORS,
            sigma2=_WM_SIGMA2,
            premiums=_WM_PREMIUMS,
            kappa=0.68,
        )
        params.update(overrides)
        return cls(**params)


def _list(text: str) -> list:
    return [float(tok) for tok in text.replace("\n", " ").replace(",", " ").split()]


def parse_config(text: str) -> SimConfig:
    """Read a ``[simulation]`` INI section; see ``scripts/configs/default.ini``."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}".splitlines()[0]) from None
    if "simulation" not in parser:
        raise ConfigError("missing [simulation] section")
    sec = parser["simulation"]
    known = {"i", "j", "factors", "sigma2", "premiums", "kappa", "replications",
             "seed", "family", "initial_cv", "lambdas"}
    unknown = set(sec) - known
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    try:
        kw = dict(
            factors=_list(sec["factors"]),
            sigma2=_list(sec["sigma2"]),
            premiums=_list(sec["premiums"]),
            kappa=float(sec["kappa"]),
        )
        if "replications" in sec:
            kw["replications"] = int(sec["replications"])
        if "seed" in sec:
            kw["seed"] = int(sec["seed"])
        if "family" in sec:
            kw["family"] = sec["family"].strip()
        if "initial_cv" in sec:
            kw["initial_cv"] = float(sec["initial_cv"])
        if "lambdas" in sec:
            kw["lambdas"] = _list(sec["lambdas"])
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigError(f"bad value: {exc}") from None
    cfg = SimConfig(**kw)
    if "j" in sec and int(sec["j"]) != cfg.J:
        raise ConfigError(f"J={sec['j']} does not match {cfg.J} factors")
    if "i" in sec and int(sec["i"]) != cfg.I:
        raise ConfigError(f"I={sec['i']} does not match I = J + 1 = {cfg.I}")
    return cfg


def read_config(path) -> SimConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def format_config(cfg: SimConfig) -> str:
    def join(xs):
        return ", ".join(repr(x) for x in xs)

    return (
        "[simulation]\n"
        f"I = {cfg.I}\nJ = {cfg.J}\n"
        f"factors = {join(cfg.factors)}\n"
        f"sigma2 = {join(cfg.sigma2)}\n"
        f"premiums = {join(cfg.premiums)}\n"
        f"kappa = {cfg.kappa!r}\n"
        f"replications = {cfg.replications}\n"
        f"seed = {cfg.seed}\n"
        f"family = {cfg.family}\n"
        f"initial_cv = {cfg.initial_cv!r}\n"
        f"lambdas = {join(cfg.lambdas)}\n"
    )


def draw_positive(rng: np.random.Generator, mean, var, family: str) -> np.ndarray:
    """Positive draws with the given mean and variance (``var == 0`` is exact)."""
    mean = np.asarray(mean, dtype=float)
    var = np.broadcast_to(np.asarray(var, dtype=float), mean.shape)
    out = mean.copy()
    noisy = var > 0
    if not np.any(noisy):
        return out
    m, v = mean[noisy], var[noisy]
    if family == "gamma":
        shape = m * m / v
        out[noisy] = rng.gamma(shape, v / m)
    else:
        s2 = np.log1p(v / (m * m))
        out[noisy] = np.exp(rng.normal(np.log(m) - 0.5 * s2, np.sqrt(s2)))
    return out


def simulate_square(cfg: SimConfig, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Full square(s) of cumulative claims.

    Returns shape ``(I, J+1)``, or ``(size, I, J+1)`` when ``size`` is given.
    """
    pi = np.asarray(cfg.premiums)
    first_mean = cfg.beta[0] * cfg.kappa * pi
    if size is not None:
        first_mean = np.broadcast_to(first_mean, (size, cfg.I))
    square = np.empty(first_mean.shape + (cfg.J + 1,))
    square[..., 0] = draw_positive(rng, first_mean, (cfg.initial_cv * first_mean) ** 2, cfg.family)
    for j in range(cfg.J):
        c = square[..., j]
        mean = cfg.factors[j] * c
        var = cfg.sigma2[j] * c
        bad = ~(np.isfinite(mean) & (mean > 0) & np.isfinite(var))
        if np.any(bad):
            r = int(np.argwhere(bad)[0][-1])
            raise ConfigError(
                f"cannot parameterise {cfg.family} draw for cell (i={r + 1}, j={j + 1})"
            )
        square[..., j + 1] = draw_positive(rng, mean, var, cfg.family)
    return square


def _valid(square: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(square)) and np.all(square > 0))


def simulate_triangle(cfg: SimConfig, rng: np.random.Generator) -> tuple[np.ndarray, ClaimsTriangle]:
    """Draw a square and return it with its observed upper triangle."""
    square = simulate_square(cfg, rng)
    if not _valid(square):
        raise SimulationError("simulated a non-positive or non-finite cell")
    values = np.where(observed_mask(cfg.I), square, np.nan)
    return square, ClaimsTriangle(values)


@dataclass
class SimStudy:
    """Per-replication results of ``run_study``; arrays are indexed ``[rep, lambda]``."""

    config: SimConfig
    lambdas: np.ndarray
    realized_ultimate: np.ndarray
    predicted_ultimate: np.ndarray
    reserves: np.ndarray
    rmsep: np.ndarray
    kappa_cc_true_beta: np.ndarray
    kappa_gcc_true_beta: np.ndarray  # [rep, lambda, year]
    redraws: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def replications(self) -> int:
        return self.realized_ultimate.size

    @property
    def prediction_error(self) -> np.ndarray:
        return self.realized_ultimate[:, None] - self.predicted_ultimate

    @property
    def empirical_rmse(self) -> np.ndarray:
        return np.sqrt(np.mean(self.prediction_error**2, axis=0))

    @property
    def mean_rmsep(self) -> np.ndarray:
        return self.rmsep.mean(axis=0)

    @property
    def calibration_ratio(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.mean_rmsep / self.empirical_rmse

    def kappa_cc_summary(self) -> tuple[float, float]:
        """Monte Carlo mean and standard error of ``kappa^CC`` (true pattern)."""
        k = self.kappa_cc_true_beta
        se = float(k.std(ddof=1) / math.sqrt(k.size)) if k.size > 1 else 0.0
        return float(k.mean()), se

    def summary_rows(self) -> list[dict]:
        rows = []
        for n, lam in enumerate(self.lambdas):
            rows.append({
                "lambda": float(lam),
                "mean_reserves": float(self.reserves[:, n].mean()),
                "empirical_rmse": float(self.empirical_rmse[n]),
                "mean_estimated_rmsep": float(self.mean_rmsep[n]),
                "mean_prediction_error": float(self.prediction_error[:, n].mean()),
            })
        return rows


def _one_replication(cfg: SimConfig, lambdas, seed_seq) -> tuple:
    rng = np.random.default_rng(seed_seq)
    redraws = 0
    while True:
        square = simulate_square(cfg, rng)
        if _valid(square):
            break
        redraws += 1
        if redraws > 1000:
            raise SimulationError("could not draw a positive triangle in 1000 attempts")
    tri = ClaimsTriangle(np.where(observed_mask(cfg.I), square, np.nan))
    pi = PremiumVector(np.asarray(cfg.premiums))
    fit = fit_cl(tri)
    n_lam = len(lambdas)
    pred, res, rmsep = np.empty(n_lam), np.empty(n_lam), np.empty(n_lam)
    k_gcc = np.empty((n_lam, cfg.I))
    beta_true = cfg.beta
    for n, lam in enumerate(lambdas):
        report = gcc_msep(tri, pi, fit, lam)
        res[n] = report.reserves_total
        pred[n] = gcc_predict(GccInput(tri, pi, fit.beta_hat, lam)).ultimates.sum()
        rmsep[n] = report.rmsep
        k_gcc[n] = gcc_kappas(GccInput(tri, pi, beta_true, lam))
    k_cc = cc_kappa(tri, pi, beta_true)
    return square[:, -1].sum(), pred, res, rmsep, k_cc, k_gcc, redraws


def _run_chunk(cfg, lambdas, seeds):
    return [_one_replication(cfg, lambdas, s) for s in seeds]


def run_study(cfg: SimConfig, lambdas: Sequence[float] | None = None, workers: int = 1) -> SimStudy:
    """Simulate ``cfg.replications`` triangles and evaluate the estimators.

    Parameters
    ----------
    cfg : SimConfig
    lambdas : sequence of float, optional
        Grid to evaluate; defaults to ``cfg.lambdas``.
    workers : int
        Number of worker processes. Output is identical for any value.

    Raises
    ------
    SimulationError
        If more than 10% of replications needed a redraw.
    """
    if cfg.J < 3:
        raise ConfigError("MSEP study needs J >= 3")
    lambdas = tuple(float(check_lambda(x)) for x in (cfg.lambdas if lambdas is None else lambdas))
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    if workers <= 1:
        out = _run_chunk(cfg, lambdas, seeds)
    else:
        chunks = np.array_split(np.arange(len(seeds)), workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, cfg, lambdas, [seeds[k] for k in c]) for c in chunks]
            out = [row for fut in futures for row in fut.result()]
    redraws = sum(row[6] for row in out)
    if redraws > MAX_REDRAW_RATE * cfg.replications:
        raise SimulationError(
            f"{redraws} redraws for {cfg.replications} replications exceeds the 10% limit"
        )
    return SimStudy(
        config=cfg,
        lambdas=np.array(lambdas),
        realized_ultimate=np.array([row[0] for row in out]),
        predicted_ultimate=np.array([row[1] for row in out]),
        reserves=np.array([row[2] for row in out]),
        rmsep=np.array([row[3] for row in out]),
        kappa_cc_true_beta=np.array([row[4] for row in out]),
        kappa_gcc_true_beta=np.array([row[5] for row in out]),
        redraws=redraws,
    )
