"""Command-line front end: ``gcc-reserve {fit,reserve,sweep,simulate}``.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 invalid input data,
5 invalid simulation config or failed study.  Diagnostics go to stderr as
a single line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import datasets
from .chain_ladder import fit_cl
from .errors import ConfigError, ReservingError, SimulationError
from .gcc import GccInput, cc_kappa, gcc_predict
from .report import SCHEMA_VERSION, build_report, file_digest, fmt, json_number, lambda_grid
from .simulator import SimConfig, read_config, run_study
from .triangle import check_alignment, read_premiums, read_triangle

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4
EXIT_CONFIG = 5


class UsageError(Exception):
    pass


def _lambda_arg(text: str) -> float:
    try:
        lam = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= lam <= 1.0:
        raise argparse.ArgumentTypeError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {x}")
    return x


def _int_at_least(low: int):
    def parse(text: str) -> int:
        try:
            n = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if n < low:
            raise argparse.ArgumentTypeError(f"must be >= {low}, got {n}")
        return n

    return parse


def _load_inputs(args):
    tri_path = args.triangle or datasets.data_path(datasets.TRIANGLE_FILE)
    pi_path = args.premiums or datasets.data_path(datasets.PREMIUM_FILE)
    tri = read_triangle(tri_path)
    pi = read_premiums(pi_path)
    check_alignment(tri, pi)
    sources = {
        "triangle": {"path": str(tri_path), "sha256": file_digest(tri_path)},
        "premiums": {"path": str(pi_path), "sha256": file_digest(pi_path)},
    }
    return tri, pi, sources


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_fit(args) -> int:
    tri, pi, sources = _load_inputs(args)
    fit = fit_cl(tri)
    res = gcc_predict(GccInput(tri, pi, fit.beta_hat, 0.0))
    k_cc = cc_kappa(tri, pi, fit.beta_hat)
    sigma2 = list(fit.sigma2_hat) if fit.sigma2_hat is not None else [None] * fit.J
    if args.format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "f_hat": json_number(fit.f_hat),
            "sigma2_hat": json_number(sigma2),
            "beta_hat": json_number(fit.beta_hat),
            "origins": list(tri.origins),
            "kappa_individual": json_number(res.kappa_individual),
            "kappa_cc": json_number(k_cc),
            "sources": sources,
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "f_hat", "sigma2_hat", "beta_hat"])
    for j in range(fit.J + 1):
        f = fmt(fit.f_hat[j]) if j < fit.J else ""
        s2 = fmt(sigma2[j]) if j < fit.J else ""
        w.writerow([j, f, s2, fmt(fit.beta_hat[j])])
    w.writerow([])
    w.writerow(["accident_year", "kappa_individual"])
    for o, k in zip(tri.origins, res.kappa_individual):
        w.writerow([o, fmt(k)])
    w.writerow([])
    w.writerow(["kappa_cc", fmt(k_cc)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_reserve(args) -> int:
    tri, pi, _ = _load_inputs(args)
    fit = fit_cl(tri)
    res = gcc_predict(GccInput(tri, pi, fit.beta_hat, args.lam))
    scale = args.scale
    if args.format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "lambda": json_number(args.lam),
            "display_scale": json_number(scale),
            "origins": list(tri.origins),
            "reserves_by_year": json_number(res.reserves),
            "reserves_total": json_number(res.reserves_total),
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [f"GCC reserves, lambda = {fmt(args.lam)}", f"{'year':>6}  {'raw':>18}  {'display':>10}"]
    for o, r in zip(tri.origins, res.reserves):
        lines.append(f"{o:>6}  {fmt(r):>18}  {r / scale:>10,.0f}")
    lines.append(f"{'total':>6}  {fmt(res.reserves_total):>18}  {res.reserves_total / scale:>10,.0f}")
    lines.append(f"(display units of {scale:g})")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    tri, pi, sources = _load_inputs(args)
    try:
        grid = lambda_grid(args.grid_step)
    except ReservingError as exc:
        raise UsageError(str(exc)) from None
    if len(grid) < 2:
        raise UsageError("grid step must give at least two points")
    doc = build_report(tri, pi, grid, scale=args.scale, sources=sources)
    if args.format == "json":
        _emit(doc.to_json(), args.out)
    elif args.format == "table":
        _emit(doc.table(), args.out)
    else:
        _emit(doc.records_csv(), args.out)
        if args.out:
            out = Path(args.out)
            out.with_name(out.stem + "_kappa.csv").write_text(doc.kappa_csv())
            out.with_name(out.stem + "_q.csv").write_text(doc.q_csv())
    return EXIT_OK


def _study_output(study, fmt_name: str) -> str:
    rows = study.summary_rows()
    mean_k, se_k = study.kappa_cc_summary()
    if fmt_name == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "replications": study.replications,
            "seed": study.config.seed,
            "family": study.config.family,
            "redraws": study.redraws,
            "kappa_true": study.config.kappa,
            "kappa_cc_true_beta_mean": json_number(mean_k),
            "kappa_cc_true_beta_se": json_number(se_k),
            "summary": [{k: json_number(v) for k, v in r.items()} for r in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0])
    w.writerow(cols)
    for r in rows:
        w.writerow([fmt(r[c]) for c in cols])
    return buf.getvalue()


def cmd_simulate(args) -> int:
    cfg = read_config(args.config) if args.config else SimConfig.wuthrich_merz_like()
    if args.seed is not None:
        cfg = SimConfig(**{**cfg.__dict__, "seed": args.seed})
    study = run_study(cfg, workers=args.workers)
    _emit(_study_output(study, args.format), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcc-reserve",
        description="Generalized Cape Cod reserves and their prediction uncertainty.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def inputs(p):
        p.add_argument("--triangle", metavar="PATH", help="triangle CSV (default: bundled data)")
        p.add_argument("--premiums", metavar="PATH", help="premium CSV (default: bundled data)")
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    p = sub.add_parser("fit", help="CL factors, variance parameters, pattern and claims ratios")
    inputs(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reserve", help="GCC reserves for one lambda")
    inputs(p)
    p.add_argument("--lambda", dest="lam", type=_lambda_arg, required=True, metavar="X")
    p.add_argument("--scale", type=_positive, default=1000.0, metavar="N")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_reserve)

    p = sub.add_parser("sweep", help="reserves and MSEP over a lambda grid")
    inputs(p)
    p.add_argument("--grid-step", type=_positive, default=0.05, metavar="X")
    p.add_argument("--scale", type=_positive, default=1000.0, metavar="N")
    p.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo calibration study")
    p.add_argument("--config", metavar="PATH", help="INI config (default: built-in 10-year config)")
    p.add_argument("--seed", type=_int_at_least(0), metavar="N")
    p.add_argument("--workers", type=_int_at_least(1), default=1, metavar="N")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog}: error: {exc}\n")
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), file=sys.stderr)
        return EXIT_IO
    except (ConfigError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReservingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
