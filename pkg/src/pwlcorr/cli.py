"""Batch command-line front-end; every subcommand writes CSV.

Exit status is 0 on success, 2 for usage errors and 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import __version__
from .calibration import (
    DEFAULT_N,
    DEFAULT_TRIALS,
    build_table,
    estimate_r,
    fit_inverse,
    load_model,
    save_model,
)
from .csvio import emit_csv, read_pairs, write_pairs
from .errors import ParameterError, PwlCorrError
from .metrics import DEFAULT_N_VALUES, SweepResult, crb_sigma, error_std_sweep, fisher_info, snr_sweep
from .price import build_gcurve, default_grid, dg_dR
from .pwl import PwlMixture, default_degree, format_spec, parse_spec
from .sampling import Family, RngStream, sample_pairs
from .wht import transform_batch

# fixed stream indices so each stage of a run draws independent randomness from one seed
STREAM_CALIBRATE = 1
STREAM_SWEEP = 2


def _spec(text):
    try:
        return parse_spec(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _unit(text):
    v = float(text)
    if not -1.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [-1, 1]")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return v


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("list must contain positive integers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the creation time from the comment header")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--family", type=str.lower, choices=[f.value for f in Family],
                    default="gaussian")
    mc.add_argument("--use-wht", action="store_true")

    p = argparse.ArgumentParser(prog="pwlcorr", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("gtable", parents=[common], help="theoretical g(R) for a mixture")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--alpha", type=float, help="single offset, weight 1")
    src.add_argument("--spec", type=_spec, help="l1, mp:gamma=..., or mix:w=...;alpha=...")
    g.add_argument("--grid", type=_positive_int, default=199, help="points on [-edge, edge]")
    g.add_argument("--edge", type=float, default=0.99)

    c = sub.add_parser("calibrate", parents=[common, mc], help="fit an inverse-map model")
    c.add_argument("--spec", type=_spec, required=True)
    c.add_argument("--degree", type=_positive_int)
    c.add_argument("--n", type=_positive_int, default=DEFAULT_N)
    c.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS)
    c.add_argument("--grid", type=_positive_int, default=41)
    c.add_argument("--edge", type=float, default=0.95)
    c.add_argument("--model", required=True, help="where to write the model file")

    e = sub.add_parser("estimate", parents=[common], help="estimate R from a pair file")
    e.add_argument("--spec", type=_spec, required=True)
    e.add_argument("--model", required=True)
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--use-wht", action="store_true")

    for name, helptext in (("sweep", "error std vs R at one N"), ("snr", "SNR vs N")):
        s = sub.add_parser(name, parents=[common, mc], help=helptext)
        s.add_argument("--spec", type=_spec, required=True)
        s.add_argument("--model", help="model file; calibrated on the fly when omitted")
        s.add_argument("--trials", type=_positive_int, default=1000 if name == "sweep" else 400)
        s.add_argument("--grid", type=_positive_int, default=19)
        s.add_argument("--edge", type=float, default=0.9)
        if name == "sweep":
            s.add_argument("--n", type=_positive_int, default=256)
        else:
            s.add_argument("--n-values", type=_int_list, default=list(DEFAULT_N_VALUES))

    k = sub.add_parser("crb", parents=[common], help="Cramér-Rao bound table")
    k.add_argument("--n", type=_positive_int, default=256)
    k.add_argument("--grid", type=_positive_int, default=199)
    k.add_argument("--edge", type=float, default=0.99)

    w = sub.add_parser("wht", parents=[common], help="Walsh-Hadamard transform a pair file")
    w.add_argument("--in", dest="input", required=True)

    sm = sub.add_parser("sample", parents=[common], help="draw correlated pairs")
    sm.add_argument("--n", type=_positive_int, required=True)
    sm.add_argument("--r", type=_unit, required=True)
    sm.add_argument("--family", type=str.lower, choices=[f.value for f in Family],
                    default="gaussian")
    sm.add_argument("--stream", type=int, default=0)
    return p


def _config(args) -> dict:
    cfg = {"tool": f"pwlcorr {__version__}"}
    for key, value in sorted(vars(args).items()):
        if key in ("no_timestamp", "out", "threads"):
            continue
        if value is None:
            continue
        if hasattr(value, "kind"):
            value = format_spec(value)
        elif isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        cfg[key] = value
    if not args.no_timestamp:
        cfg["created"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return cfg


@contextmanager
def _executor(threads):
    if threads <= 1:
        yield None
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            yield ex


def _grid(points, edge):
    if not 0 < edge < 1:
        raise ParameterError(f"--edge must be in (0, 1), got {edge}")
    return default_grid(points, edge) if points > 1 else np.array([0.0])


def cmd_gtable(args):
    if args.spec is not None:
        m = args.spec.as_mixture()
        if m is None:
            raise ParameterError(f"{format_spec(args.spec)} has no piecewise-linear mixture form")
    else:
        m = PwlMixture.single(0.0 if args.alpha is None else args.alpha)
    curve = build_gcurve(m, _grid(args.grid, args.edge))
    rows = [(r, g, dg_dR(r, m)) for r, g in curve.rows()]
    emit_csv(rows, ("R", "g", "dg_dR"), args.out, _config(args))


def cmd_calibrate(args):
    rng = RngStream(args.seed, STREAM_CALIBRATE)
    with _executor(args.threads) as ex:
        table = build_table(args.spec, _grid(args.grid, args.edge), args.n, args.trials, rng,
                            args.use_wht, args.family, executor=ex)
    model = fit_inverse(table, args.degree)
    save_model(model, args.model)
    cfg = _config(args)
    cfg.update(degree=model.degree, residual=model.residual,
               domain=f"{model.domain[0]!r},{model.domain[1]!r}")
    emit_csv(table.rows(), ("R", "mean_score", "stderr"), args.out, cfg)


def cmd_estimate(args):
    model = load_model(args.model)
    batch = read_pairs(args.input)
    r_hat = estimate_r(batch.xs, batch.ys, args.spec, model, args.use_wht)
    emit_csv([(format_spec(args.spec), len(batch), r_hat)], ("spec", "N", "r_hat"), args.out,
             _config(args))


def _model_for(args):
    if args.model:
        return load_model(args.model)
    table = build_table(args.spec, rng=RngStream(args.seed, STREAM_CALIBRATE))
    return fit_inverse(table, default_degree(args.spec))


def _emit_sweep(res: SweepResult, args):
    emit_csv(res.rows(), SweepResult.HEADER, args.out, _config(args))


def cmd_sweep(args):
    model = _model_for(args)
    with _executor(args.threads) as ex:
        res = error_std_sweep(args.spec, model, args.family, _grid(args.grid, args.edge), args.n,
                              args.trials, RngStream(args.seed, STREAM_SWEEP), args.use_wht, ex)
    _emit_sweep(res, args)


def cmd_snr(args):
    model = _model_for(args)
    with _executor(args.threads) as ex:
        res = snr_sweep(args.spec, model, args.family, args.n_values, args.trials,
                        RngStream(args.seed, STREAM_SWEEP), _grid(args.grid, args.edge),
                        args.use_wht, ex)
    _emit_sweep(res, args)


def cmd_crb(args):
    grid = _grid(args.grid, args.edge)
    rows = [(r, args.n, fisher_info(r), crb_sigma(r, args.n)) for r in grid]
    emit_csv(rows, ("R", "N", "fisher_info", "crb_sigma"), args.out, _config(args))


def cmd_wht(args):
    batch = transform_batch(read_pairs(args.input))
    write_pairs(batch, args.out, _config(args))


def cmd_sample(args):
    batch = sample_pairs(args.n, args.r, args.family, RngStream(args.seed, args.stream))
    write_pairs(batch, args.out, _config(args))


COMMANDS = {
    "gtable": cmd_gtable,
    "calibrate": cmd_calibrate,
    "estimate": cmd_estimate,
    "sweep": cmd_sweep,
    "snr": cmd_snr,
    "crb": cmd_crb,
    "wht": cmd_wht,
    "sample": cmd_sample,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.subcommand](args)
    except (PwlCorrError, OSError) as exc:
        print(f"pwlcorr {args.subcommand}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
