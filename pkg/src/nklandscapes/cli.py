"""Command-line entry point: ``design``, ``analyze``, ``sweep`` and ``verify``."""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import sys
from pathlib import Path

from . import designs, experiments, optima, walsh
from .errors import CapacityError, DesignError, ParameterError
from .landscape import DEFAULT_CAP, generate_weights, load_design, Landscape

EXIT_OK, EXIT_PARAM, EXIT_CAPACITY, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("nklandscapes")


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _add_globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--sigma2", type=float, default=d(1.0))
    p.add_argument("--out", default=d(None), help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv"], default=d("csv"))
    p.add_argument("--no-banner", action="store_true", default=d(False),
                   help="omit the timestamp comment line from CSV output")
    p.add_argument("--orthant-tol", type=float, default=d(1e-3),
                   help="relative error target for expected optima counts")
    p.add_argument("--max-samples", type=int, default=d(1 << 20),
                   help="QMC points per randomization")
    p.add_argument("--cap", type=int, default=d(DEFAULT_CAP),
                   help="largest N materialized densely")


def build_parser():
    parser = argparse.ArgumentParser(prog="nklandscapes", description=__doc__)
    _add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="emit an interaction design file")
    p.add_argument("kind", choices=designs.DESIGN_KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--diffset", type=_int_list, default=None,
                   help="comma-separated residues; overrides the tabulated set for 'maximal'")

    p = sub.add_parser("analyze", parents=[common], help="rank, moments and expected optima")
    p.add_argument("design_file")
    p.add_argument("--weights-seed", type=int, default=None,
                   help="seed of a concrete landscape for observed coefficients/optima")
    p.add_argument("--distribution", choices=["normal", "uniform"], default="normal")
    p.add_argument("--brute-force", action="store_true")
    p.add_argument("--coefficients", default=None, help="write the coefficient table CSV here")

    p = sub.add_parser("sweep", parents=[common], help="rank vs expected optima over many designs")
    p.add_argument("--n-values", type=_int_list, default=[25, 50, 100])
    p.add_argument("--k-values", type=_int_list, default=list(range(1, 8)))
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--kinds", default=",".join(designs.DESIGN_KINDS))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    return parser


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _banner(args):
    if args.no_banner:
        return None
    return f"generated {datetime.datetime.now().isoformat(timespec='seconds')}"


def cmd_design(args):
    if args.kind == "maximal" and args.diffset is not None:
        design = designs.translate_design(args.diffset, args.n)
    else:
        design = designs.make_design(args.kind, args.n, args.k, args.seed)
    text = json.dumps(design.to_dict()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    k = args.k if len(set(design.k_of)) != 1 else design.k_of[0]
    bound = walsh.max_rank_bound(design.n, k) if design.is_classic() else ""
    print(f"rank: {walsh.rank(design)}")
    print(f"max_rank_bound: {bound}")
    print(f"is_packing: {designs.is_packing(design)}")
    print(f"classic: {design.is_classic()}")
    return EXIT_OK


def cmd_analyze(args):
    design = load_design(args.design_file)
    ts = walsh.term_set(design)
    print(f"n: {design.n}")
    print(f"rank: {len(ts)}")
    print("terms_by_order: " + ",".join(f"{o}:{c}" for o, c in sorted(ts.counts_by_order().items())))
    sigma = optima.sigma_from_design(design, args.sigma2)
    print(f"sigma_diag_range: {sigma.diagonal().min():.6g},{sigma.diagonal().max():.6g}")
    report = optima.expected_local_optima(design, args.sigma2, rel_err=args.orthant_tol,
                                          max_samples=args.max_samples, seed=args.seed,
                                          design_type=Path(args.design_file).stem)
    print(f"expected_optima: {report.expected:.6g} +- {report.expected_error:.3g}")
    observed = None
    if args.weights_seed is not None or args.brute_force:
        wseed = args.seed if args.weights_seed is None else args.weights_seed
        ls = Landscape(design, generate_weights(design, 0.0, args.sigma2, args.distribution, wseed))
        if args.brute_force:
            report.observed = optima.count_local_optima(ls, args.cap)
            report.observed_mean = float(report.observed)
            report.replicates = 1
            print(f"observed_optima: {report.observed}")
        if args.coefficients:
            observed = walsh.extract_coefficients(design, ls.weights.flat, ts, args.cap)
    if args.coefficients:
        Path(args.coefficients).write_text(walsh.moments_csv(design, 0.0, args.sigma2, observed))
    _emit(experiments.rows_to_csv([report.row()], optima.REPORT_FIELDS, _banner(args)), args.out)
    return EXIT_OK


def cmd_sweep(args):
    spec = experiments.SweepSpec(n_values=tuple(args.n_values), k_values=tuple(args.k_values),
                                 replicates_per_cell=args.replicates,
                                 design_kinds=tuple(k for k in args.kinds.split(",") if k),
                                 sigma2=args.sigma2, seed=args.seed, rel_err=args.orthant_tol,
                                 max_samples=args.max_samples)
    rows = experiments.run_sweep(spec, workers=args.workers)
    _emit(experiments.rows_to_csv(rows, banner=_banner(args)), args.out)
    return EXIT_OK


def cmd_verify(args):
    results = experiments.verify(args.level, args.seed)
    failed = 0
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.module}: {r.name}  ({r.detail})")
        failed += not r.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {"design": cmd_design, "analyze": cmd_analyze, "sweep": cmd_sweep,
            "verify": cmd_verify}


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ParameterError, DesignError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
