"""Batch command line: ``curkit approx|select|autok|sweep``.

Structured reports are JSON, curves are CSV; both carry ``schema_version``.
Every report embeds the resolved configuration and a SHA-256 of the matrix
that was analyzed.  Exit codes: 0 success, 2 configuration error, 3 data
error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import (
    deim_select,
    leverage_scores,
    pca_correlation_select,
    qr_select_columns,
    top_k,
)
from .errors import ConfigurationError, CurError, DataError, NumericalError
from .evaluation import (
    CUR_METHODS,
    relative_error,
    run_cur,
    selection_report,
    sweep_error_curve,
)
from .matrix_io import (
    LabeledMatrix,
    fill_missing_by_class_mean,
    load_labels,
    load_matrix,
    mean_center_rows,
    min_max_normalize_cols,
    save_matrix,
)
from .model_selection import AUTO_METHODS, auto_select_columns
from .numerics import truncated_svd
from .sfcur import select_columns
from .solver import SfConfig

SCHEMA_VERSION = 1
SELECT_METHODS = ("sf", "ls-d", "deim", "qr", "pca")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        if math.isfinite(obj):
            return obj
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _emit(report: dict, out):
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def matrix_sha256(X) -> str:
    X = np.ascontiguousarray(X, dtype="<f8")
    h = hashlib.sha256()
    h.update(repr(X.shape).encode())
    h.update(X.tobytes())
    return h.hexdigest()


def _config_dict(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _sf_config(args) -> SfConfig:
    return SfConfig(
        zero_threshold=args.zero_threshold,
        mu_scale=args.mu_scale,
        mu=args.mu,
        strict_count=args.strict_count,
        max_iter=args.max_iter,
        bisection_max_iter=args.bisection_max_iter,
    )


def _prepare(args) -> LabeledMatrix:
    lm = load_matrix(args.input, args.format, allow_missing=args.fill_missing)
    classes = load_labels(args.classes) if args.classes else None
    if args.fill_missing:
        if classes is None:
            raise ConfigurationError("--fill-missing needs --classes")
        if args.transpose:
            raise ConfigurationError("--fill-missing cannot be combined with --transpose")
        lm.class_of_row = classes
        lm = fill_missing_by_class_mean(lm)
    x = lm.matrix
    if args.center_rows:
        x = mean_center_rows(x)
    if args.minmax_cols:
        x = min_max_normalize_cols(x)
    lm = LabeledMatrix(x, lm.row_labels, lm.col_labels, None, lm.source)
    if args.transpose:
        lm = lm.transpose()
    if classes is not None:
        if len(classes) != lm.shape[0]:
            raise DataError(
                f"{len(classes)} class labels for {lm.shape[0]} rows"
            )
        lm.class_of_row = classes
    return lm


def _header(args, lm: LabeledMatrix) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "curkit_version": __version__,
        "command": args.command,
        "config": _config_dict(args),
        "input": {
            "path": str(args.input),
            "shape": list(lm.shape),
            "matrix_sha256": matrix_sha256(lm.matrix),
        },
    }


def _labels(lm, indices, axis):
    names = lm.col_labels if axis == "cols" else lm.row_labels
    return [names[i] for i in indices] if names else None


def cmd_approx(args) -> int:
    lm = _prepare(args)
    X = lm.matrix
    if args.method == "svd":
        raise ConfigurationError("approx builds CUR factorizations; use sweep --with-svd")
    if args.c is None or args.r is None:
        raise ConfigurationError("approx needs --c and --r")
    start = time.perf_counter()
    dec = run_cur(X, args.method, args.c, args.r, args.rank_k, args.seed, _sf_config(args))
    elapsed = time.perf_counter() - start
    result = {
        "method": dec.method,
        "c": args.c,
        "r": args.r,
        "I_C": dec.col_indices,
        "I_R": dec.row_indices,
        "col_labels": _labels(lm, dec.col_indices, "cols"),
        "row_labels": _labels(lm, dec.row_indices, "rows"),
        "n_selected_cols": dec.c,
        "n_selected_rows": dec.r,
        "relative_error": relative_error(X, dec),
        "wall_time": elapsed,
        "status": dec.status,
        "trace": {k: t.as_dict() for k, t in dec.traces.items()} if dec.traces else None,
    }
    if args.factors:
        out = Path(args.factors)
        out.mkdir(parents=True, exist_ok=True)
        save_matrix(out / "C.csv", dec.C(X))
        save_matrix(out / "U.csv", dec.U)
        save_matrix(out / "R.csv", dec.R(X))
        result["factors_dir"] = str(out)
    _emit({**_header(args, lm), "result": result}, args.out)
    return 0


def _select_indices(X, method, c, rank_k, cfg):
    if method == "sf":
        idx, trace = select_columns(X, c, cfg)
        return idx, trace.as_dict()
    if method == "ls-d":
        k = rank_k if rank_k is not None else min(10, min(X.shape))
        return top_k(leverage_scores(X, k, "cols").scores, c), None
    if method == "deim":
        if c > min(X.shape):
            raise ConfigurationError(f"DEIM can select at most {min(X.shape)} columns")
        return deim_select(truncated_svd(X, c).V, c), None
    if method == "qr":
        return qr_select_columns(X, c), None
    if method == "pca":
        return pca_correlation_select(X, c), None
    raise ConfigurationError(f"select supports {', '.join(SELECT_METHODS)}")


def cmd_select(args) -> int:
    lm = _prepare(args)
    if args.c is None:
        raise ConfigurationError("select needs --c")
    if args.separation and lm.class_of_row is None:
        raise ConfigurationError("--separation requires --classes")
    if not 1 <= args.c <= lm.shape[1]:
        raise ConfigurationError(f"c={args.c} outside [1, {lm.shape[1]}]")
    idx, trace = _select_indices(lm.matrix, args.method, args.c, args.rank_k,
                                 _sf_config(args))
    result = {
        "method": args.method,
        "c": args.c,
        "selected": idx,
        "labels": _labels(lm, idx, "cols"),
        "trace": trace,
    }
    if args.separation:
        result["separation"] = selection_report(lm, idx, args.threshold).as_dict()
    _emit({**_header(args, lm), "result": result}, args.out)
    return 0


def _require_dir(out) -> Path:
    if not out:
        raise ConfigurationError("this command writes several files; pass --out DIR")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_autok(args) -> int:
    lm = _prepare(args)
    out = _require_dir(args.out)
    rank_k = 2 if args.rank_k is None else args.rank_k
    picks, scores = auto_select_columns(lm.matrix, args.method, "both", _sf_config(args),
                                        rank_k=rank_k)
    with open(out / "scores.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        cols = ["k", "aic", "bic", "residual_sq", "exact_fit", "feasible", "note"]
        writer.writerow(["schema_version"] + cols)
        for s in scores:
            row = s.as_row()
            writer.writerow([SCHEMA_VERSION] + [
                format(row[c], ".17g") if isinstance(row[c], float) else row[c] for c in cols
            ])
    wanted = ("aic", "bic") if args.criterion == "both" else (args.criterion,)
    by_k = {s.k: s for s in scores}
    chosen = {}
    for crit in wanted:
        dec = picks[crit]
        k = dec.params["k"]
        chosen[crit] = {
            "k": k,
            "I_C": dec.col_indices,
            "labels": _labels(lm, dec.col_indices, "cols"),
            "aic": by_k[k].aic,
            "bic": by_k[k].bic,
            "residual_sq": by_k[k].residual_sq,
        }
    report = {
        **_header(args, lm),
        "result": {
            "method": args.method,
            "chosen": chosen,
            "infeasible_k": [s.k for s in scores if not s.feasible],
            "scores_csv": str(out / "scores.csv"),
        },
    }
    _emit(report, out / "autok.json")
    return 0


def _parse_grid(text):
    try:
        grid = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"--grid must be comma-separated integers, got {text!r}")
    if not grid:
        raise ConfigurationError("--grid is empty")
    return grid


def cmd_sweep(args) -> int:
    lm = _prepare(args)
    out = _require_dir(args.out)
    if args.grid is None:
        raise ConfigurationError("sweep needs --grid")
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    for m in methods:
        if m not in CUR_METHODS + ("svd",):
            raise ConfigurationError(f"unknown method {m!r}")
    with_svd = args.with_svd or "svd" in methods
    curve = sweep_error_curve(lm.matrix, [m for m in methods if m != "svd"],
                              _parse_grid(args.grid), args.seed, args.rank_k,
                              _sf_config(args), with_svd=with_svd)
    curve.write_error_csv(out / "errors.csv")
    curve.write_timing_csv(out / "timing.csv")
    report = {
        **_header(args, lm),
        "result": {
            "errors_csv": str(out / "errors.csv"),
            "timing_csv": str(out / "timing.csv"),
            "points": len(curve.points),
        },
    }
    _emit(report, out / "sweep.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"curkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    io = common.add_argument_group("input")
    io.add_argument("--input", required=True, help="matrix file")
    io.add_argument("--format", choices=("csv", "mtx"), default="csv")
    io.add_argument("--transpose", action="store_true",
                    help="analyze the transpose of the (preprocessed) input")
    io.add_argument("--center-rows", action="store_true", help="subtract row means")
    io.add_argument("--minmax-cols", action="store_true",
                    help="min-max normalize each column to [0, 1]")
    io.add_argument("--classes", help="file with one class label per analyzed row")
    io.add_argument("--fill-missing", action="store_true",
                    help="read empty/NA cells and fill them with per-class column means")
    algo = common.add_argument_group("algorithm")
    algo.add_argument("--c", type=int, help="number of columns")
    algo.add_argument("--r", type=int, help="number of rows")
    algo.add_argument("--rank-k", type=int, default=None,
                      help="rank parameter for leverage scores")
    algo.add_argument("--seed", type=int, default=0)
    algo.add_argument("--strict-count", action="store_true",
                      help="fail instead of returning the nearest achievable count")
    algo.add_argument("--zero-threshold", type=float, default=0.0)
    algo.add_argument("--mu-scale", type=float, default=1.01)
    algo.add_argument("--mu", type=float, default=None,
                      help="explicit surrogate constant (must exceed the spectral bound)")
    algo.add_argument("--max-iter", type=int, default=20,
                      help="inner solver iterations per bisection step")
    algo.add_argument("--bisection-max-iter", type=int, default=60)
    common.add_argument("--out", help="output file (approx/select) or directory (autok/sweep)")

    p = sub.add_parser("approx", parents=[common], help="compute one CUR factorization")
    p.add_argument("--method", choices=CUR_METHODS + ("svd",), default="sf")
    p.add_argument("--factors", help="directory for C.csv, U.csv, R.csv")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("select", parents=[common], help="rank features (columns)")
    p.add_argument("--method", choices=SELECT_METHODS, default="sf")
    p.add_argument("--separation", action="store_true",
                   help="report per-class counts of entries above --threshold")
    p.add_argument("--threshold", type=float, default=1.0)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("autok", parents=[common], help="choose c by AIC/BIC")
    p.add_argument("--method", choices=AUTO_METHODS, default="sf")
    p.add_argument("--criterion", choices=("aic", "bic", "both"), default="both")
    p.set_defaults(func=cmd_autok)

    p = sub.add_parser("sweep", parents=[common], help="error/timing curves over c = r = k")
    p.add_argument("--method", default=",".join(CUR_METHODS),
                   help="comma-separated methods (svd allowed)")
    p.add_argument("--grid", help="comma-separated values of k")
    p.add_argument("--with-svd", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def _thread_limit():
    value = os.environ.get("CURKIT_THREADS")
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise ConfigurationError(f"CURKIT_THREADS must be an integer, got {value!r}")
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=max(1, n))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit():
            return args.func(args)
    except (CurError, np.linalg.LinAlgError, OSError) as exc:
        if isinstance(exc, CurError):
            code = exc.exit_code
        elif isinstance(exc, np.linalg.LinAlgError):
            code = NumericalError.exit_code
        else:
            code = DataError.exit_code
        error = {
            "schema_version": SCHEMA_VERSION,
            "error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code},
        }
        sys.stderr.write(json.dumps(error) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
