"""
Parameter sweeps and design searches from configuration files.

``qfpi-sweep configs/rectification_low_power.cfg --out landscape.csv`` runs the
sweep described by the file; ``--search`` runs the design search instead.
"""

import csv
import logging
import sys

from qfpi.cli.common import (
    EXIT_INVALID,
    QFPIArgumentParser,
    add_logging_arguments,
    add_run_arguments,
    device_params,
    exit_status,
    output,
    resolve,
    settings,
    setup_logging,
)
from qfpi.config import parse_outputs
from qfpi.converters import format_number, write_records
from qfpi.errors import QFPIError
from qfpi.sweep import OUTPUTS, SweepAxis, SweepSpec, design_search, run_sweep

logger = logging.getLogger(__name__)

SEARCH_FIELDS = ("L", "dw1", "r_factor", "l_factor", "T12", "T21", "evaluated")


def sweep_spec(values):
    """
    :py:class:`qfpi.sweep.SweepSpec` from resolved settings: ``axes`` (from
    ``--axis`` flags) take precedence over ``axis1``/``axis2``.
    """
    texts = values.get("axes") or [values[k] for k in ("axis1", "axis2") if values.get(k)]
    axes = tuple(SweepAxis.parse(t) for t in texts)
    names = {a.name for a in axes}
    fixed = {k: v for k, v in device_params(values).items() if k not in names}
    if "dw" in names:
        fixed.pop("dw1")
        fixed.pop("dw2")
    outputs = parse_outputs(values["outputs"]) if values.get("outputs") else frozenset(OUTPUTS)
    return SweepSpec(axes, fixed, settings(values), outputs)


def run_sweep_command(values):
    spec = sweep_spec(values)
    records = run_sweep(spec, nb_jobs=values.get("nb_jobs"),
                        progress=values.get("progress", False))
    logger.info("%d grid points evaluated", len(records))
    with output(values) as fp:
        write_records(records, fp)
    return exit_status(all(r.converged for r in records), values)


def run_search_command(values):
    best = design_search(values["p_inc"], dw2=values["dw2"],
            length_bounds=(values["length_min"], values["length_max"]),
            dw1_bounds=(values["dw1_min"], values["dw1_max"]),
            s=settings(values),
            n_coarse=values["n_coarse"], n_refine=values["n_refine"],
            rounds=values["rounds"],
            gamma1=values["gamma1"], gamma2=values["gamma2"],
            tie_dw1=values["tie_dw1"],
            nb_jobs=values.get("nb_jobs"),
            progress=values.get("progress", False))
    logger.info("best design L=%g dw1=%g (r=%g, l=%g) after %d points",
                best.length, best.dw1, best.r_factor, best.l_factor, best.evaluated)
    with output(values) as fp:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(SEARCH_FIELDS)
        w.writerow([format_number(x) for x in (best.length, best.dw1, best.r_factor,
                    best.l_factor, best.t12, best.t21, best.evaluated)])
    return 0


def main(argv=None):
    ap = QFPIArgumentParser(prog="qfpi-sweep")
    ap.add_argument("config_file",
                    help="Sweep setup (key = value file)")
    ap.add_argument("--search", action="store_true", default=False,
                    help="Search for the design maximizing rectification")
    ap.add_argument("--progress", action="store_true", default=False,
                    help="Display a progress bar")
    add_logging_arguments(ap)
    add_run_arguments(ap)
    args = ap.parse_args(argv)
    setup_logging(args)
    args.config = args.config_file
    try:
        values = resolve(args)
        values["progress"] = args.progress
        if args.search:
            return run_search_command(values)
        return run_sweep_command(values)
    except (QFPIError, OSError) as e:
        print(f"qfpi-sweep: error: {e}", file=sys.stderr)
        return EXIT_INVALID
