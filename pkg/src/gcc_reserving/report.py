"""Lambda sweeps and their machine-readable / display renderings.

Machine outputs (CSV, JSON) carry raw currency amounts with 15 significant
digits.  The human table divides amounts by ``scale`` and rounds to whole
display units, with CoVa as a two-decimal percentage.

CSV record columns, in this order::

    lambda, reserves_total, process_sd, param_sd, rmsep, cova,
    process_var, param_error, msep, reserve_<year>...
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chain_ladder import fit_cl
from .errors import DomainError
from .gcc import GccInput, cc_kappa, check_lambda, gcc_predict
from .triangle import ClaimsTriangle, PremiumVector, check_alignment
from .uncertainty import gcc_msep, q_sensitivities

SCHEMA_VERSION = "1.0"
RECORD_COLUMNS = (
    "lambda",
    "reserves_total",
    "process_sd",
    "param_sd",
    "rmsep",
    "cova",
    "process_var",
    "param_error",
    "msep",
)


def fmt(x) -> str:
    """15 significant digits; ``None`` becomes an empty field."""
    if x is None:
        return ""
    return format(float(x), ".15g")


def json_number(x):
    """15 significant digits; integral values become ``int`` so ``1`` prints as ``1``."""
    if x is None:
        return None
    if isinstance(x, (list, tuple, np.ndarray)):
        return [json_number(v) for v in x]
    v = float(fmt(x))
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def lambda_grid(step: float) -> list[float]:
    """Equally spaced grid on [0, 1] including both ends."""
    step = float(step)
    if not 0 < step <= 1:
        raise DomainError(f"grid step must lie in (0, 1], got {step}")
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9:
        raise DomainError(f"grid step {step} does not divide [0, 1]")
    return [round(k / n, 12) for k in range(n + 1)]


def file_digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


@dataclass
class ReportDocument:
    metadata: dict
    records: list[dict]
    kappa_individual: list[float]
    kappa_gcc: list[list[float]]  # [lambda][year]
    q: list[list[float]]  # [lambda][t]
    origins: list[int] = field(default_factory=list)

    def check(self, rtol: float = 1e-9) -> None:
        lams = [r["lambda"] for r in self.records]
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise DomainError("lambda values must be strictly increasing")
        for r in self.records:
            if not math.isclose(r["rmsep"] ** 2, r["process_var"] + r["param_error"], rel_tol=rtol):
                raise DomainError(f"inconsistent record at lambda={r['lambda']}")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "metadata": self.metadata,
            "origins": self.origins,
            "records": [{k: json_number(v) for k, v in r.items()} for r in self.records],
            "kappa_individual": json_number(self.kappa_individual),
            "kappa_gcc": [json_number(row) for row in self.kappa_gcc],
            "q": [json_number(row) for row in self.q],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def records_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(RECORD_COLUMNS) + [f"reserve_{o}" for o in self.origins])
        for r in self.records:
            w.writerow([fmt(r[c]) for c in RECORD_COLUMNS] + [fmt(v) for v in r["reserves_by_year"]])
        return buf.getvalue()

    def kappa_csv(self) -> str:
        """Long format ``lambda, accident_year, kappa_individual, kappa_gcc``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "accident_year", "kappa_individual", "kappa_gcc"])
        for r, row in zip(self.records, self.kappa_gcc):
            for o, k_ind, k in zip(self.origins, self.kappa_individual, row):
                w.writerow([fmt(r["lambda"]), o, fmt(k_ind), fmt(k)])
        return buf.getvalue()

    def q_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "t", "q"])
        for r, row in zip(self.records, self.q):
            for t, v in enumerate(row):
                w.writerow([fmt(r["lambda"]), t, fmt(v)])
        return buf.getvalue()

    def table(self) -> str:
        """Display-scaled table: reserves, process, param, RMSEP, CoVa."""
        scale = self.metadata["display_scale"]
        lines = [f"{'lambda':>6}  {'reserves':>10}  {'process':>8}  {'param':>8}  {'RMSEP':>8}  {'CoVa':>7}"]
        for r in self.records:
            cova = f"{100 * r['cova']:.2f}%" if r["cova"] is not None else "n/a"
            lines.append(
                f"{r['lambda']:>6.2f}  {r['reserves_total'] / scale:>10,.0f}  "
                f"{r['process_sd'] / scale:>8,.0f}  {r['param_sd'] / scale:>8,.0f}  "
                f"{r['rmsep'] / scale:>8,.0f}  {cova:>7}"
            )
        lines.append(f"(amounts in units of {scale:g})")
        return "\n".join(lines) + "\n"

    def argmin_rmsep(self) -> float:
        return min(self.records, key=lambda r: r["rmsep"])["lambda"]


def build_report(
    tri: ClaimsTriangle,
    pi: PremiumVector,
    lambdas: Sequence[float],
    scale: float = 1.0,
    sources: dict | None = None,
) -> ReportDocument:
    check_alignment(tri, pi)
    lambdas = [check_lambda(x) for x in lambdas]
    if len(lambdas) < 1:
        raise DomainError("empty lambda grid")
    fit = fit_cl(tri)
    records, k_gcc, q = [], [], []
    for lam in lambdas:
        rep = gcc_msep(tri, pi, fit, lam)
        res = gcc_predict(GccInput(tri, pi, fit.beta_hat, lam))
        records.append({
            "lambda": lam,
            "reserves_total": rep.reserves_total,
            "process_sd": rep.process_sd,
            "param_sd": rep.param_sd,
            "rmsep": rep.rmsep,
            "cova": rep.cova,
            "process_var": rep.process_var,
            "param_error": rep.param_error,
            "msep": rep.msep,
            "reserves_by_year": res.reserves.tolist(),
        })
        k_gcc.append(res.kappa_gcc.tolist())
        q.append(q_sensitivities(tri, pi, fit.beta_hat, lam).tolist())
    kappa_ind = gcc_predict(GccInput(tri, pi, fit.beta_hat, 0.0)).kappa_individual
    metadata = {
        "lambdas": lambdas,
        "display_scale": scale,
        "sources": sources or {},
        "I": tri.I,
        "J": tri.J,
        "kappa_cc": json_number(cc_kappa(tri, pi, fit.beta_hat)),
    }
    doc = ReportDocument(metadata, records, kappa_ind.tolist(), k_gcc, q, list(tri.origins))
    doc.check()
    return doc
