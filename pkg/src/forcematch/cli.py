"""Command line interface: ``forcematch <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .errors import ForceMatchError, ValidationError
from .extraction import ExtractionOptions, extract_design_rows
from .force_model import BootstrapConfig, DEConfig, bootstrap_ci, fit, form_for
from .pipeline import RunConfig, run_pipeline
from .report import summary_text, write_report
from .simulator import SimConfig, simulate
from .sparsifier import RevisitDistribution, degrade, distribution_for_target_mean

log = logging.getLogger("forcematch")


def _distinct(inputs, outputs):
    ins = {Path(p).resolve() for p in inputs if p}
    for out in outputs:
        if out and Path(out).resolve() in ins:
            raise ValidationError(f"output path {out} equals an input path")


def cmd_simulate(args):
    cfg = SimConfig()
    if args.config:
        run = RunConfig.load(args.config)
        cfg = run.sim_config()
    changes = {k: v for k, v in {
        "seed": args.seed, "n_agents": args.n_agents, "iso_iid": args.iso_iid,
        "iso_da": args.iso_da, "speed": args.speed, "heading_noise": args.heading_noise,
        "patch_count": args.patch_count,
        "duration": None if args.hours is None else 3600.0 * args.hours,
    }.items() if v is not None}
    cfg = cfg.replace(**changes)
    data, behavior = simulate(cfg)
    io.write_dataset(args.out, data)
    if args.log:
        io.write_behavior_log(args.log, behavior)
    print(f"simulated {len(data)} agents x {cfg.n_steps} steps -> {args.out}", file=sys.stderr)


def cmd_degrade(args):
    _distinct([args.input], [args.out])
    if args.target_mean is not None:
        dist = distribution_for_target_mean(args.target_mean, args.sdlog)
    elif args.meanlog is not None:
        dist = RevisitDistribution(args.meanlog, args.sdlog)
    else:
        raise ValidationError("give --target-mean or --meanlog")
    data = io.read_dataset(args.input, iso_time=args.iso_time)
    io.write_dataset(args.out, degrade(data, dist, args.seed))


def _options(args):
    return ExtractionOptions(args.min_step, args.max_dt_next, args.max_dt_prev,
                             args.max_interpolation_gap, args.keep_stationary_prev)


def cmd_extract(args):
    _distinct([args.input], [args.out])
    data = io.read_dataset(args.input, iso_time=args.iso_time)
    rows = extract_design_rows(data, args.focal, _options(args))
    io.write_rows(args.out, rows)
    print(f"{len(rows)} design rows -> {args.out}", file=sys.stderr)


def cmd_fit(args):
    _distinct([args.rows, args.input], [args.out, args.trace])
    if args.rows:
        rows = io.read_rows(args.rows)
    elif args.input and args.focal is not None:
        rows = extract_design_rows(io.read_dataset(args.input, iso_time=args.iso_time),
                                   args.focal, _options(args))
    else:
        raise ValidationError("give --rows, or --input together with --focal")
    form = form_for(rows, args.model)
    bounds = [(0.0, args.bound_iid), (0.0, args.bound_da), (0.0, args.bound_sd)][: form.n_gates]
    de = DEConfig(args.pop_size, args.F, args.CR, args.max_gens, args.tol, args.patience, args.seed)
    result = fit(rows, form, bounds, de)
    if args.bootstrap:
        boot = bootstrap_ci(rows, form, bounds, BootstrapConfig(
            args.bootstrap, args.seed,
            de=DEConfig(args.pop_size, args.F, args.CR, args.bootstrap_max_gens, args.tol, 15)))
        result.ci, result.ci_failures = boot.intervals, boot.n_failed
    if args.label:
        result.metadata["label"] = args.label
    io.write_fit(args.out, result)
    if args.trace:
        io.write_trace(args.trace, result)
    print(summary_text(result, args.label or Path(args.out).stem))


def cmd_report(args):
    _distinct(args.fits, [args.outdir])
    results = {}
    for path in args.fits:
        res = io.read_fit(path)
        results[str(res.metadata.get("label", Path(path).stem))] = res
    paths = write_report(results, args.outdir)
    print(paths["summary"].read_text(encoding="utf-8"))


def cmd_pipeline(args):
    config = RunConfig.load(args.config) if args.config else RunConfig()
    checks = run_pipeline(config, args.outdir)
    for c in checks:
        print(c.line())


def _add_extraction(p):
    p.add_argument("--min-step", type=float, default=0.1)
    p.add_argument("--max-dt-next", type=float)
    p.add_argument("--max-dt-prev", type=float)
    p.add_argument("--max-interpolation-gap", type=float)
    p.add_argument("--keep-stationary-prev", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forcematch",
        description="Infer social influences on travel direction from (sparse) group tracks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a ground-truth group dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--log", help="behaviour log CSV")
    p.add_argument("--config", help="RunConfig JSON supplying simulation settings")
    p.add_argument("--seed", type=int)
    p.add_argument("--hours", type=float)
    p.add_argument("--n-agents", type=int)
    p.add_argument("--iso-iid", type=float)
    p.add_argument("--iso-da", type=float)
    p.add_argument("--speed", type=float)
    p.add_argument("--heading-noise", type=float)
    p.add_argument("--patch-count", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("degrade", help="subsample with lognormal revisit times")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--target-mean", type=float, help="mean revisit time (min)")
    p.add_argument("--meanlog", type=float)
    p.add_argument("--sdlog", type=float, default=0.6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iso-time", action="store_true", help="t column holds ISO-8601 stamps")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("extract", help="focal design rows from a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--focal", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--iso-time", action="store_true")
    _add_extraction(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("fit", help="fit a direction model")
    p.add_argument("--rows")
    p.add_argument("--input")
    p.add_argument("--focal")
    p.add_argument("--iso-time", action="store_true")
    p.add_argument("--model", choices=["eq1", "eq2"], default="eq2")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", help="optimizer trace CSV")
    p.add_argument("--label")
    p.add_argument("--bound-iid", type=float, default=1000.0)
    p.add_argument("--bound-da", type=float, default=1.0)
    p.add_argument("--bound-sd", type=float, default=10.0)
    p.add_argument("--pop-size", type=int)
    p.add_argument("--F", type=float, default=0.8)
    p.add_argument("--CR", type=float, default=0.9)
    p.add_argument("--max-gens", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--patience", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bootstrap", type=int, default=0, help="replicates (0 = no intervals)")
    p.add_argument("--bootstrap-max-gens", type=int, default=60)
    _add_extraction(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="summaries and figure data from fit JSONs")
    p.add_argument("fits", nargs="+")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("pipeline", help="end-to-end recovery experiment")
    p.add_argument("--config")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ForceMatchError as exc:
        print(f"forcematch: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"forcematch: I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
