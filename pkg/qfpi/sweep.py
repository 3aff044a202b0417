"""
Parameter sweeps over one or two axes and the search for the device design
that maximizes rectification.

Grid points are independent: :py:func:`.run_sweep` spreads them over worker
processes and returns the records in grid order, whatever the number of
jobs.
"""

from dataclasses import dataclass, field
from multiprocessing import Process, SimpleQueue, cpu_count
import itertools
import logging
import math
import os
import traceback

import numpy as np
from tqdm import tqdm

from qfpi.errors import DesignSearchError, InvalidParameterError, QFPIError
from qfpi.solver import DEFAULT_SETTINGS, DeviceConfig, SolverSettings
from qfpi.transport import average_intracavity, rectify

logger = logging.getLogger(__name__)

PARAMETERS = ("p_inc", "L", "dw1", "dw2", "gamma1", "gamma2")
# "dw" sets both detunings at once
AXIS_NAMES = PARAMETERS + ("dw",)
OUTPUTS = ("transmit", "rectify", "profile_average", "p1", "p2")

DEFAULT_FIXED = {
    "p_inc": 0.001,
    "L": 1.0,
    "dw1": 0.0,
    "dw2": 0.0,
    "gamma1": 1.0,
    "gamma2": 1.0,
}

DEFAULT_NB_JOBS = int(os.environ.get("QFPI_NB_JOBS", "0"))


@dataclass(frozen=True)
class SweepAxis:
    """
    :param str name: one of :py:data:`.AXIS_NAMES`
    :param int count: number of values (``>= 2``)
    :param str spacing: ``"linear"`` or ``"log"``
    """
    name: str
    minimum: float
    maximum: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidParameterError(f"unknown sweep axis '{self.name}' "
                                        f"(expected one of {', '.join(AXIS_NAMES)})")
        if self.count < 2:
            raise InvalidParameterError(f"axis '{self.name}': count must be >= 2")
        if not (math.isfinite(self.minimum) and math.isfinite(self.maximum)):
            raise InvalidParameterError(f"axis '{self.name}': bounds must be finite")
        if self.minimum > self.maximum:
            raise InvalidParameterError(f"axis '{self.name}': min > max")
        if self.spacing not in ("linear", "log"):
            raise InvalidParameterError(f"axis '{self.name}': unknown spacing '{self.spacing}'")
        if self.spacing == "log" and self.minimum <= 0:
            raise InvalidParameterError(f"axis '{self.name}': log spacing needs min > 0")

    @classmethod
    def parse(cls, text):
        """
        Parse ``name:min:max:count[:spacing]``, fields may also be separated
        by whitespace.

        >>> SweepAxis.parse("p_inc:1e-5:1e4:91:log").count
        91
        """
        parts = text.replace(":", " ").split()
        if len(parts) not in (4, 5):
            raise InvalidParameterError(f"invalid axis specification '{text}'")
        try:
            minimum, maximum = float(parts[1]), float(parts[2])
            count = int(parts[3])
        except ValueError as e:
            raise InvalidParameterError(f"invalid axis specification '{text}': {e}") from e
        return cls(parts[0], minimum, maximum, count, *parts[4:])

    def values(self):
        if self.spacing == "log":
            return np.geomspace(self.minimum, self.maximum, self.count)
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """
    Grid of one or two axes, the values of the parameters which are not
    swept, and the outputs to report.
    """
    axes: tuple
    fixed: dict = field(default_factory=dict)
    solver: SolverSettings = DEFAULT_SETTINGS
    outputs: frozenset = frozenset(OUTPUTS)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise InvalidParameterError("a sweep has one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise InvalidParameterError("sweep axes must be distinct")
        if "dw" in names and ("dw1" in names or "dw2" in names):
            raise InvalidParameterError("axis 'dw' cannot be combined with 'dw1' or 'dw2'")
        for key in self.fixed:
            if key not in PARAMETERS:
                raise InvalidParameterError(f"unknown parameter '{key}'")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise InvalidParameterError(f"unknown outputs: {', '.join(sorted(unknown))}")

    def points(self):
        """
        Parameter dictionaries of the grid, first axis varying slowest
        """
        base = dict(DEFAULT_FIXED)
        base.update(self.fixed)
        for values in itertools.product(*(a.values() for a in self.axes)):
            point = dict(base)
            for axis, v in zip(self.axes, values):
                if axis.name == "dw":
                    point["dw1"] = point["dw2"] = float(v)
                else:
                    point[axis.name] = float(v)
            yield point


@dataclass(frozen=True)
class SweepRecord:
    """
    One grid point. Fields which were not requested, or which are undefined
    because a direction did not converge, are ``None``.
    """
    p_inc: float
    L: float
    dw1: float
    dw2: float
    gamma1: float
    gamma2: float
    p1: float = None
    p2: float = None
    R1: float = None
    R2: float = None
    T12: float = None
    T21: float = None
    r_factor: float = None
    l_factor: float = None
    avg_intracavity: float = None
    converged_12: bool = False
    converged_21: bool = False
    iterations: int = 0
    residual: float = None

    @property
    def converged(self):
        return self.converged_12 and self.converged_21


def _finite(x):
    return x if x is not None and math.isfinite(x) else None

def evaluate_point(params, outputs=OUTPUTS, s=None):
    """
    Solve both propagation directions at one parameter point.

    :param dict params: values of all :py:data:`.PARAMETERS`
    :rtype: :py:class:`.SweepRecord`
    """
    s = s or DEFAULT_SETTINGS
    dev = DeviceConfig.from_values(length=params["L"], dw1=params["dw1"],
            dw2=params["dw2"], gamma1=params["gamma1"], gamma2=params["gamma2"])
    p_inc = params["p_inc"]
    res = rectify(p_inc, dev, s)
    sol = res.solution_12
    rec = {k: float(params[k]) for k in PARAMETERS}
    if sol.converged:
        rec["R1"] = sol.R1
        rec["R2"] = sol.R2
        if "p1" in outputs:
            rec["p1"] = sol.p1
        if "p2" in outputs:
            rec["p2"] = sol.p2
        if "profile_average" in outputs:
            rec["avg_intracavity"] = average_intracavity(p_inc, dev, sol)
    if "transmit" in outputs or "rectify" in outputs:
        rec["T12"] = _finite(res.t12)
        rec["T21"] = _finite(res.t21)
    if "rectify" in outputs:
        rec["r_factor"] = _finite(res.r_factor)
        rec["l_factor"] = _finite(res.l_factor)
    rec["converged_12"] = res.solution_12.converged
    rec["converged_21"] = res.solution_21.converged
    rec["iterations"] = res.solution_12.iterations + res.solution_21.iterations
    rec["residual"] = _finite(max(res.solution_12.residual, res.solution_21.residual))
    return SweepRecord(**rec)


def resolve_nb_jobs(nb_jobs=None):
    """
    ``None`` reads ``QFPI_NB_JOBS`` (default 0), 0 uses all available CPUs
    """
    if nb_jobs is None:
        nb_jobs = DEFAULT_NB_JOBS
    if nb_jobs < 0:
        raise InvalidParameterError(f"nb_jobs must be >= 0 (got {nb_jobs})")
    if nb_jobs == 0:
        nb_jobs = cpu_count()
    return nb_jobs


def _sweep_worker(q, points, indexes, outputs, s):
    for i in indexes:
        try:
            q.put((i, evaluate_point(points[i], outputs, s), None))
        except Exception:
            q.put((i, None, traceback.format_exc()))

def _report(records):
    failed = sum(1 for rec in records if not rec.converged)
    if failed:
        logger.warning("%d of %d grid point(s) did not converge", failed, len(records))

def run_sweep(spec, nb_jobs=None, progress=False):
    """
    Evaluate every point of the grid of ``spec``.

    :param int nb_jobs: number of worker processes (0 for all available CPUs)
    :param bool progress: display a progress bar on stderr
    :rtype: list(:py:class:`.SweepRecord`)
    :raises InvalidParameterError: if a grid point has invalid parameters
    """
    points = list(spec.points())
    nb_jobs = min(resolve_nb_jobs(nb_jobs), len(points))
    logger.info("sweeping %d points with %d job(s)", len(points), nb_jobs)

    if nb_jobs <= 1:
        records = [evaluate_point(p, spec.outputs, spec.solver)
                   for p in tqdm(points, disable=not progress)]
        _report(records)
        return records

    q = SimpleQueue()
    procs = [Process(target=_sweep_worker,
                     args=(q, points, range(j, len(points), nb_jobs),
                           spec.outputs, spec.solver))
             for j in range(nb_jobs)]
    for p in procs:
        p.start()
    records = [None]*len(points)
    errors = []
    for _ in tqdm(range(len(points)), disable=not progress):
        i, rec, err = q.get()
        if err is not None:
            errors.append(err)
        records[i] = rec
    for p in procs:
        p.join()
    if errors:
        logger.debug("worker failure:\n%s", errors[0])
        last = errors[0].strip().splitlines()[-1]
        if "InvalidParameterError" in last:
            raise InvalidParameterError(last.split(":", 1)[-1].strip())
        raise QFPIError(f"{len(errors)} grid point(s) failed: {last}")
    _report(records)
    return records


@dataclass(frozen=True)
class DesignPoint:
    """
    Best design found by :py:func:`.design_search`; ``evaluated`` is the
    total number of grid points solved.
    """
    length: float
    dw1: float
    r_factor: float
    l_factor: float
    t12: float
    t21: float
    evaluated: int

    @property
    def score(self):
        return min(self.r_factor, self.l_factor)


def _score(rec):
    if not rec.converged or rec.r_factor is None or rec.l_factor is None:
        return None
    return min(rec.r_factor, rec.l_factor)

def _window(center, span, bounds):
    lo = max(bounds[0], center - span/2)
    hi = min(bounds[1], center + span/2)
    return lo, hi


def design_search(p_inc, dw2=0.0, length_bounds=(0.0, 1.0), dw1_bounds=(-3.0, 3.0),
                  s=None, n_coarse=65, n_refine=33, rounds=3, shrink=4.0,
                  gamma1=1.0, gamma2=1.0, tie_dw1=False, nb_jobs=None,
                  progress=False):
    """
    Look for the emitter separation and first-emitter detuning maximizing
    :math:`\\min(r, l)` at incident power ``p_inc``.

    A coarse ``n_coarse`` x ``n_coarse`` grid over the bounds is followed by
    ``rounds`` refinements on ``n_refine`` x ``n_refine`` grids, each centered
    on the best point so far with a window ``shrink`` times narrower than
    the previous one, clipped to the bounds.

    With ``tie_dw1``, both emitters share the detuning ``dw2`` and only the
    separation is searched.

    :rtype: :py:class:`.DesignPoint`
    :raises DesignSearchError: if no grid point converged in both directions
    """
    s = s or DEFAULT_SETTINGS
    if not (length_bounds[0] <= length_bounds[1] and dw1_bounds[0] <= dw1_bounds[1]):
        raise InvalidParameterError("search bounds must be ordered")
    fixed = {"p_inc": p_inc, "dw2": dw2, "gamma1": gamma1, "gamma2": gamma2}
    if tie_dw1:
        fixed["dw1"] = dw2
    l_win, d_win = tuple(length_bounds), tuple(dw1_bounds)
    l_span = length_bounds[1] - length_bounds[0]
    d_span = dw1_bounds[1] - dw1_bounds[0]
    best = None
    best_score = -math.inf
    evaluated = 0

    for k in range(rounds+1):
        n = n_coarse if k == 0 else n_refine
        axes = [SweepAxis("L", l_win[0], l_win[1], n)]
        if not tie_dw1:
            axes.append(SweepAxis("dw1", d_win[0], d_win[1], n))
        spec = SweepSpec(tuple(axes), fixed, s, frozenset(["rectify"]))
        records = run_sweep(spec, nb_jobs=nb_jobs, progress=progress)
        evaluated += len(records)
        for rec in records:
            score = _score(rec)
            if score is not None and score > best_score:
                best, best_score = rec, score
        if best is None:
            raise DesignSearchError(f"no converged design at p_inc={p_inc}")
        logger.info("round %d: best L=%g dw1=%g r=%g l=%g", k, best.L, best.dw1,
                    best.r_factor, best.l_factor)
        l_span /= shrink
        d_span /= shrink
        l_win = _window(best.L, l_span, length_bounds)
        d_win = _window(best.dw1, d_span, dw1_bounds)

    return DesignPoint(best.L, best.dw1, best.r_factor, best.l_factor,
                       best.T12, best.T21, evaluated)
