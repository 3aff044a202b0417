"""
``qfpi`` command: steady-state transmission, rectification and intracavity
profile of a two-emitter device, sweeps, design searches and built-in
validation checks.

Data is written as CSV to the standard output (or ``--out``); logs go to the
standard error.
"""

import csv
import sys

from qfpi.cli.common import (
    EXIT_INVALID,
    QFPIArgumentParser,
    add_common_arguments,
    device,
    device_params,
    exit_status,
    output,
    resolve,
    settings,
    setup_logging,
)
from qfpi.cli.sweep import run_search_command, run_sweep_command
from qfpi.converters import format_number, write_records
from qfpi.errors import QFPIError
from qfpi.solver import scan_fixed_points
from qfpi.sweep import OUTPUTS, evaluate_point
from qfpi.transport import Direction, intracavity_profile, oriented, transmit
from qfpi.validation import run_checks

TRANSMIT_FIELDS = ("p_inc", "L", "dw1", "dw2", "gamma1", "gamma2", "direction",
                   "p1", "p2", "R1", "R2", "T", "converged", "iterations",
                   "residual")
# only scans count the fixed points
SCAN_FIELDS = TRANSMIT_FIELDS + ("branch_count",)
PROFILE_FIELDS = ("z", "p_intr", "avg_intracavity")


def cmd_transmit(args, values):
    dev = device(values)
    s = settings(values)
    direction = Direction.parse(values["direction"])
    if args.scan:
        sols = scan_fixed_points(values["p_inc"], oriented(dev, direction), s)
    else:
        sols = [transmit(values["p_inc"], dev, direction, s)[1]]
    params = device_params(values)
    with output(values) as fp:
        w = csv.writer(fp, lineterminator="\n")
        if args.header:
            w.writerow(SCAN_FIELDS if args.scan else TRANSMIT_FIELDS)
        for sol in sols:
            row = [params[k] for k in ("p_inc", "L", "dw1", "dw2", "gamma1", "gamma2")]
            if sol.converged:
                row += [sol.p1, sol.p2, sol.R1, sol.R2, sol.transmittance]
            else:
                row += [None]*5
            row += [sol.converged, sol.iterations, sol.residual]
            if args.scan:
                row.append(sol.branch_count)
            w.writerow([format_number(x) for x in row[:6]] + [direction.value]
                       + [format_number(x) for x in row[6:]])
    return exit_status(all(sol.converged for sol in sols), values)


def cmd_rectify(args, values):
    rec = evaluate_point(device_params(values), OUTPUTS, settings(values))
    with output(values) as fp:
        write_records([rec], fp, header=args.header)
    return exit_status(rec.converged, values)


def cmd_profile(args, values):
    prof = intracavity_profile(values["p_inc"], device(values),
                               n_samples=values["n_samples"], s=settings(values))
    with output(values) as fp:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(PROFILE_FIELDS)
        for i, (z, p) in enumerate(zip(prof.positions, prof.intensities)):
            avg = prof.average if i == 0 else None
            w.writerow([format_number(float(z)),
                        format_number(float(p)) if prof.solution.converged else "",
                        format_number(avg) if prof.solution.converged else ""])
    return exit_status(prof.solution.converged, values)


def cmd_sweep(args, values):
    if args.axis:
        values["axes"] = args.axis
    values["progress"] = args.progress
    return run_sweep_command(values)


def cmd_search(args, values):
    values["progress"] = args.progress
    return run_search_command(values)


def cmd_validate(args, values):
    results = run_checks()
    with output(values) as fp:
        for res in results:
            print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}", file=fp)
    return 0 if all(res.passed for res in results) else EXIT_INVALID


def main(argv=None):
    ap = QFPIArgumentParser(prog="qfpi")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", help="Transmittance in one direction")
    p.add_argument("--scan", action="store_true", default=False,
                   help="Report every fixed point found from random restarts")
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("rectify", help="Transmittance in both directions and rectification")
    p.set_defaults(func=cmd_rectify)

    p = sub.add_parser("profile", help="Intracavity intensity profile")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("sweep", help="Parameter sweep over one or two axes")
    p.add_argument("--axis", action="append", default=None,
                   help="Sweep axis name:min:max:count[:linear|log] (at most twice)")
    p.add_argument("--outputs", default=None,
                   help=f"Columns to fill among {', '.join(OUTPUTS)}")
    p.add_argument("--progress", action="store_true", default=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="Design maximizing rectification")
    p.add_argument("--tie-dw1", action="store_true", default=None,
                   help="Identical emitters: dw1 follows dw2")
    p.add_argument("--progress", action="store_true", default=False)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("validate", help="Run the built-in model checks")
    p.set_defaults(func=cmd_validate)

    for p in sub.choices.values():
        add_common_arguments(p)

    args = ap.parse_args(argv)
    setup_logging(args)
    try:
        values = resolve(args)
        return args.func(args, values)
    except (QFPIError, OSError) as e:
        print(f"qfpi: error: {e}", file=sys.stderr)
        return EXIT_INVALID

