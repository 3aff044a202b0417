"""
Argument handling shared by the ``qfpi`` and ``qfpi-sweep`` commands
"""

from argparse import ArgumentParser
from contextlib import contextmanager
import logging
import sys

from qfpi.config import load_config, merge, solver_settings
from qfpi.solver import DeviceConfig

DEFAULTS = {
    "p_inc": 0.001,
    "length": 1.0,
    "dw1": 0.0,
    "dw2": 0.0,
    "gamma1": 1.0,
    "gamma2": 1.0,
    "direction": "ltr",
    "n_samples": 201,
    "strict": False,
    "length_min": 0.0,
    "length_max": 1.0,
    "dw1_min": -3.0,
    "dw1_max": 3.0,
    "n_coarse": 65,
    "n_refine": 33,
    "rounds": 3,
    "tie_dw1": False,
}

# keys which may come from the command line
FLAG_KEYS = ("p_inc", "length", "dw1", "dw2", "gamma1", "gamma2", "direction",
             "n_samples", "nb_jobs", "strict", "out", "damping", "rel_tol",
             "abs_tol", "max_iterations", "n_seeds", "continuation_steps",
             "seed", "scan_grid", "outputs", "tie_dw1")

EXIT_INVALID = 1
EXIT_UNCONVERGED = 2


class QFPIArgumentParser(ArgumentParser):
    """
    Argument errors exit with code 1, like any other invalid input
    """
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def add_logging_arguments(ap):
    ap.add_argument("-v", "--verbose", action="store_true", default=False,
                    help="Report progress of the computations")
    ap.add_argument("--debug", action="store_true", default=False,
                    help="Report solver internals")

def add_run_arguments(ap):
    ap.add_argument("--out", default=None,
                    help="Write data to this file instead of the standard output")
    ap.add_argument("--strict", action="store_true", default=None,
                    help="Exit with code 2 if any point did not converge")
    ap.add_argument("--nb-jobs", type=int, default=None,
                    help="Number of worker processes (0 for all available CPUs)")

def add_common_arguments(ap):
    add_logging_arguments(ap)
    add_run_arguments(ap)
    ap.add_argument("--config", default=None,
                    help="key = value file supplying defaults")
    ap.add_argument("--p-inc", type=float, default=None,
                    help=f"Incident power, photons per lifetime (default: {DEFAULTS['p_inc']})")
    ap.add_argument("--length", type=float, default=None,
                    help=f"Emitter separation in wavelengths (default: {DEFAULTS['length']})")
    ap.add_argument("--dw1", type=float, default=None,
                    help="Detuning of the first emitter")
    ap.add_argument("--dw2", type=float, default=None,
                    help="Detuning of the second emitter")
    ap.add_argument("--gamma1", type=float, default=None,
                    help="Decay rate of the first emitter")
    ap.add_argument("--gamma2", type=float, default=None,
                    help="Decay rate of the second emitter")
    ap.add_argument("--direction", default=None, choices=["ltr", "rtl"],
                    help="Direction of the incident light (default: ltr)")
    ap.add_argument("--n-samples", type=int, default=None,
                    help=f"Number of positions of intracavity profiles (default: {DEFAULTS['n_samples']})")
    ap.add_argument("--header", action="store_true", default=False,
                    help="Print the CSV header before single-row results")
    ap.add_argument("--damping", type=float, default=None,
                    help="Initial mixing factor of the damped iteration")
    ap.add_argument("--max-iterations", type=int, default=None)
    ap.add_argument("--rel-tol", type=float, default=None)
    ap.add_argument("--abs-tol", type=float, default=None)
    ap.add_argument("--n-seeds", type=int, default=None,
                    help="Random restarts of fixed-point scans")
    ap.add_argument("--continuation-steps", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None,
                    help="Seed of the random restarts")
    ap.add_argument("--scan-grid", type=int, default=None,
                    help="Grid size seeding fixed-point scans (0 to disable)")


def setup_logging(args):
    level = logging.WARNING
    if getattr(args, "verbose", False):
        level = logging.INFO
    if getattr(args, "debug", False):
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s:%(name)s: %(message)s")


def resolve(args):
    """
    Settings from built-in defaults, then the ``--config`` file, then the
    command-line flags
    """
    from_file = load_config(args.config) if getattr(args, "config", None) else {}
    from_flags = {k: getattr(args, k) for k in FLAG_KEYS if hasattr(args, k)}
    return merge(DEFAULTS, from_file, from_flags)


def device_params(values):
    """
    Device parameters named as sweep parameters
    """
    return {"p_inc": values["p_inc"], "L": values["length"],
            "dw1": values["dw1"], "dw2": values["dw2"],
            "gamma1": values["gamma1"], "gamma2": values["gamma2"]}

def device(values):
    return DeviceConfig.from_values(values["length"], values["dw1"], values["dw2"],
                                    values["gamma1"], values["gamma2"])

def settings(values):
    return solver_settings(values)


@contextmanager
def output(values):
    path = values.get("out")
    if path:
        with open(path, "w", newline="") as fp:
            yield fp
    else:
        yield sys.stdout


def exit_status(converged, values):
    if values.get("strict") and not converged:
        logging.getLogger("qfpi.cli").warning("some points did not converge")
        return EXIT_UNCONVERGED
    return 0
