"""Command-line front end.

Subcommands:
  ci        confidence intervals for CSV data (methods wq / qr / dfq / both)
  simulate  Monte Carlo coverage/width study from a config file or preset
  target    oracle quantile table for a synthetic model, as CSV
  indist    indistinguishable-pair analysis for a synthetic model, as JSON

All numeric results equal the corresponding library calls bit for bit; the
CLI only parses arguments, loads data, and serializes. Exit codes: 2 usage
errors, 3 data errors, 4 when every localization weight is zero.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from .base import Dataset, IntervalResult, QuantileSpec
from .errors import (
    AllWeightsZero,
    ConstantColumn,
    DimensionMismatch,
    LocalQuantError,
    MissingColumn,
    ParseError,
)
from .experiments import PRESETS, parse_config, run_experiment, write_summaries
from .kernels import Kernel, LocalizationSpec
from .orderstat import df_quantile_ci
from .qr import qr_interval
from .rng import RngStream
from .synthetic import (
    NoiseSetting,
    Signal,
    SyntheticModel,
    indistinguishable_pair,
    mixture_weight,
    true_theta,
)
from .wq import wq_interval

_EXIT_USAGE = 2
_EXIT_DATA = 3
_EXIT_NO_WEIGHT = 4


def load_csv(path: str, x_columns: list[str], y_column: str, normalize: bool = False) -> Dataset:
    """Load named numeric columns from an RFC-4180 CSV file with a header row.

    With normalize=True each covariate column is standardized to mean 0 and
    sd 1 (population sd); the per-column (mean, sd) pairs are stored on the
    returned dataset so centers and bandwidths can be given in normalized
    units. Responses are never transformed.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file") from None
        header = [name.strip() for name in header]
        for name in [*x_columns, y_column]:
            if name not in header:
                raise MissingColumn(f"column {name!r} not found; header has {header}")
        cols = [header.index(name) for name in x_columns]
        ycol = header.index(y_column)

        xs, ys = [], []
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} fields, found {len(row)}", row=rownum
                )
            try:
                xs.append([float(row[c]) for c in cols])
            except ValueError:
                bad = next(c for c in cols if not _is_float(row[c]))
                raise ParseError(
                    f"could not parse {row[bad]!r} as a number", row=rownum, column=header[bad]
                ) from None
            try:
                ys.append(float(row[ycol]))
            except ValueError:
                raise ParseError(
                    f"could not parse {row[ycol]!r} as a number", row=rownum, column=y_column
                ) from None

    if not ys:
        raise ParseError("file contains no data rows")
    covariates = np.asarray(xs, dtype=float)
    responses = np.asarray(ys, dtype=float)
    if not np.all(np.isfinite(covariates)) or not np.all(np.isfinite(responses)):
        raise ParseError("file contains non-finite values")

    normalization = None
    if normalize:
        means = covariates.mean(axis=0)
        sds = covariates.std(axis=0)
        for j, sd in enumerate(sds):
            if sd == 0.0:
                raise ConstantColumn(f"column {x_columns[j]!r} is constant (sd = 0)")
        covariates = (covariates - means) / sds
        normalization = (means, sds)

    return Dataset(
        covariates=covariates,
        responses=responses,
        x_names=tuple(x_columns),
        y_name=y_column,
        normalization=normalization,
    )


def _is_float(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def _endpoint_to_json(value: float):
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return value


def parse_endpoint(value) -> float:
    """Inverse of the JSON endpoint encoding ("-inf"/"inf" strings)."""
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    return float(value)


def _interval_record(res: IntervalResult, x0, h, q: QuantileSpec) -> dict:
    return {
        "x0": x0,
        "h": h,
        "lower": _endpoint_to_json(res.lower),
        "upper": _endpoint_to_json(res.upper),
        "n_eff": res.n_eff,
        "accepted": res.accepted,
        "method": res.method,
        "p": q.p,
        "alpha": q.alpha,
    }


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localquant",
        description="Distribution-free confidence intervals for locally weighted quantiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ci = sub.add_parser("ci", help="confidence intervals for CSV data")
    ci.add_argument("--data", required=True, help="CSV file with a header row")
    ci.add_argument("--x-cols", default=None, help="comma-separated covariate column names")
    ci.add_argument("--y-col", required=True, help="response column name")
    ci.add_argument(
        "--x0",
        action="append",
        default=None,
        metavar="V1,V2,...",
        help="center point, one value per covariate; repeat for several points",
    )
    ci.add_argument(
        "--h",
        action="append",
        default=None,
        metavar="H1,H2,...",
        help="bandwidths, one per covariate; repeat for several settings",
    )
    ci.add_argument(
        "--kernel", default="triangular", choices=[k.value for k in Kernel],
        help="kernel family (default triangular)",
    )
    ci.add_argument("--p", type=float, default=0.5, help="quantile level (default 0.5)")
    ci.add_argument("--alpha", type=float, default=0.1, help="total miscoverage (default 0.1)")
    ci.add_argument(
        "--alpha1", type=float, default=None, help="lower-tail miscoverage (default alpha/2)"
    )
    ci.add_argument(
        "--method", choices=["wq", "qr", "dfq", "both"], default="both",
        help="interval method; 'both' runs wq and qr",
    )
    ci.add_argument("--seed", type=int, default=None, help="rejection seed (required for qr)")
    ci.add_argument(
        "--normalize", action="store_true",
        help="standardize covariates; --x0/--h are then in normalized units",
    )

    sim = sub.add_parser("simulate", help="Monte Carlo coverage/width study")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="flat key-value config file (see README)")
    src.add_argument("--preset", choices=sorted(PRESETS), help="named built-in study")
    sim.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")
    sim.add_argument("--out", default=None, help="output CSV path (default stdout)")

    signal_names = [s.value for s in Signal]
    tgt = sub.add_parser("target", help="oracle quantile table as CSV")
    tgt.add_argument("--preset", choices=["flat-sanity"], default=None)
    tgt.add_argument("--signal", default="spikes", choices=signal_names)
    tgt.add_argument("--setting", type=int, default=1, choices=[1, 2, 3])
    tgt.add_argument("--kernel", default="triangular", choices=[k.value for k in Kernel])
    tgt.add_argument("--h", type=float, default=0.04)
    tgt.add_argument("--p", type=float, default=0.5)
    tgt.add_argument(
        "--x0-grid", default="0.1:0.9:17",
        help="comma list of centers, or start:stop:count",
    )
    tgt.add_argument("--out", default=None, help="output CSV path (default stdout)")

    ind = sub.add_parser("indist", help="indistinguishable-pair analysis as JSON")
    ind.add_argument("--signal", default="spikes", choices=signal_names)
    ind.add_argument("--setting", type=int, default=1, choices=[1, 2, 3])
    ind.add_argument("--x0", type=float, default=0.47)
    ind.add_argument("--h", type=float, default=0.04)
    ind.add_argument("--h0", type=float, default=0.012)
    ind.add_argument("--theta-star", type=float, default=2.7)
    ind.add_argument("--p", type=float, default=0.5)

    return parser


def _cmd_ci(args, parser: argparse.ArgumentParser) -> int:
    methods = ["wq", "qr"] if args.method == "both" else [args.method]
    if "qr" in methods and args.seed is None:
        parser.error("--method qr requires --seed for reproducibility")
    alpha1 = args.alpha / 2.0 if args.alpha1 is None else args.alpha1
    try:
        q = QuantileSpec(args.p, args.alpha, alpha1)
    except ValueError as exc:
        parser.error(str(exc))

    needs_kernel = any(m in ("wq", "qr") for m in methods)
    if needs_kernel:
        if not args.x_cols:
            parser.error("--x-cols is required for methods wq/qr")
        if not args.x0 or not args.h:
            parser.error("--x0 and --h are required for methods wq/qr")
    x_cols = [c.strip() for c in args.x_cols.split(",")] if args.x_cols else []

    data = load_csv(args.data, x_cols, args.y_col, normalize=args.normalize)

    records = []
    if needs_kernel:
        kernel = Kernel.from_name(args.kernel)
        centers = [_float_list(tok) for tok in args.x0]
        bandwidths = [_float_list(tok) for tok in args.h]
        for center in centers:
            for bw in bandwidths:
                if len(center) != data.dim or len(bw) != data.dim:
                    raise DimensionMismatch(
                        f"--x0/--h need {data.dim} value(s) to match columns {x_cols}"
                    )
                spec = LocalizationSpec(kernel, center, bw)
                for method in methods:
                    if method == "wq":
                        res = wq_interval(data, spec, q)
                    elif method == "qr":
                        res = qr_interval(data, spec, q, RngStream(args.seed))
                    else:
                        continue
                    records.append(_interval_record(res, center, bw, q))
    if "dfq" in methods:
        res = df_quantile_ci(data.responses, q.p, q.alpha1, q.alpha2)
        records.append(_interval_record(res, None, None, q))

    for record in records:
        print(json.dumps(record))
    return 0


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def _cmd_simulate(args, parser: argparse.ArgumentParser) -> int:
    if args.preset:
        config = PRESETS[args.preset]
    else:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = parse_config(fh.read())
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
    summaries = run_experiment(config, workers=max(1, args.workers))
    out = _open_out(args.out)
    try:
        write_summaries(out, [(config, summaries)])
    finally:
        if args.out:
            out.close()
    return 0


def _x0_grid(text: str) -> list[float]:
    if ":" in text:
        start, stop, count = text.split(":")
        return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
    return _float_list(text)


def _cmd_target(args) -> int:
    if args.preset == "flat-sanity":
        # step signal probed away from its jumps: the oracle must return the
        # same flat-region quantile at every center
        signal, setting, kernel, h, p = "step", 1, "triangular", 0.04, 0.5
        grid = [float(v) for v in np.linspace(0.45, 0.55, 5)]
    else:
        signal, setting, kernel, h, p = args.signal, args.setting, args.kernel, args.h, args.p
        grid = _x0_grid(args.x0_grid)
    model = SyntheticModel(Signal.from_name(signal), NoiseSetting.from_number(setting))
    kern = Kernel.from_name(kernel)
    out = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(["signal", "setting", "kernel", "p", "h", "x0", "theta"])
        for x0 in grid:
            theta = true_theta(model, LocalizationSpec(kern, [x0], [h]), p)
            writer.writerow([signal, setting, kernel, repr(p), repr(h), repr(x0), repr(theta)])
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_indist(args) -> int:
    model = SyntheticModel(Signal.from_name(args.signal), NoiseSetting.from_number(args.setting))
    spec = LocalizationSpec(Kernel.TRIANGULAR, [args.x0], [args.h])
    theta_p = true_theta(model, spec, args.p)
    theta_prime, tv = indistinguishable_pair(model, spec, args.h0, args.theta_star)
    print(
        json.dumps(
            {
                "theta_p": theta_p,
                "theta_prime": theta_prime,
                "tv_distance": tv,
                "mixture_weight": mixture_weight(args.h, args.h0),
            }
        )
    )
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ci":
            return _cmd_ci(args, parser)
        if args.command == "simulate":
            return _cmd_simulate(args, parser)
        if args.command == "target":
            return _cmd_target(args)
        return _cmd_indist(args)
    except AllWeightsZero as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_NO_WEIGHT
    except (LocalQuantError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
