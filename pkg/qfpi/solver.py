"""
Self-consistent powers impinging on the two emitters.

The power ``p1`` reaching the first emitter is the coherent sum of the
incident field and of the backward intracavity field at ``z = 0``, while the
power ``p2`` reaching the second emitter is the forward intracavity field at
``z = L``. Both fields depend on the emitter reflectances, which themselves
depend on ``p1`` and ``p2``: the pair ``(p1, p2)`` is a fixed point of
:py:func:`.fixed_point_map`.

Three strategies are provided:

* :py:func:`.solve_steady_state`, damped fixed-point iteration;
* :py:func:`.solve_with_continuation`, the same iteration warm-started along a
  geometric ramp of incident powers (adiabatic ramp-up);
* :py:func:`.scan_fixed_points`, restarts from deterministic, grid and random
  starting points completed by deflated root finding, to expose
  multistability.

:py:func:`.solve` dispatches between the first two according to
:py:attr:`.SolverSettings.continuation_below`.
"""

from dataclasses import dataclass, replace
import logging
import math

import numpy as np
from scipy.ndimage import minimum_filter
from scipy.optimize import root

from qfpi.cavity import (
    CavityGeometry,
    MirrorPair,
    incident_amplitude,
    intracavity_amplitudes,
    transmittance_formula,
)
from qfpi.emitter import EmitterParams, phase_shift, reflectance
from qfpi.errors import InvalidParameterError, SingularCavityError

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class DeviceConfig:
    """
    Two emitters separated by ``geometry.length_wavelengths``. ``emitter1``
    is the first one met by light shined from left to right.
    """
    emitter1: EmitterParams
    emitter2: EmitterParams
    geometry: CavityGeometry

    @classmethod
    def from_values(cls, length=0.0, dw1=0.0, dw2=0.0, gamma1=1.0, gamma2=1.0):
        """
        Examples:

        >>> dev = DeviceConfig.from_values(length=1, dw1=0.2)
        """
        return cls(EmitterParams(float(gamma1), float(dw1)),
                   EmitterParams(float(gamma2), float(dw2)),
                   CavityGeometry(float(length)))

    def swapped(self):
        """
        The same device seen from the right: emitters are exchanged.
        """
        return replace(self, emitter1=self.emitter2, emitter2=self.emitter1)

    def mirrors(self, p1, p2):
        """
        Mirrors formed by the emitters when driven by powers ``p1`` and ``p2``

        :rtype: :py:class:`qfpi.cavity.MirrorPair`
        """
        return MirrorPair.from_reflectances(
                reflectance(p1, self.emitter1),
                reflectance(p2, self.emitter2),
                phase_shift(self.emitter1),
                phase_shift(self.emitter2))


@dataclass(frozen=True)
class SolverSettings:
    """
    Numerical settings of the self-consistent solvers.

    :param float damping: mixing factor :math:`\\alpha \\in (0, 1]` of the
        damped iteration :math:`p \\leftarrow (1-\\alpha)p + \\alpha f(p)`
    :param float rel_tol: relative fixed-point tolerance
    :param float abs_tol: absolute tolerance floor
    :param int max_iterations: iteration budget of one solve
    :param int n_seeds: number of random restarts of :py:func:`.scan_fixed_points`
    :param int continuation_steps: number of powers of the continuation ramp
    :param float continuation_below: :py:func:`.solve` uses continuation
        for incident powers below this value
    :param int backoff_patience: number of iterations without a 10%
        improvement of the residual before the damping is halved
    :param float min_damping: lower bound of the damping back-off
    :param int clamp_limit: consecutive singular evaluations before declaring
        the perfect-mirror limit
    :param int seed: seed of the random restarts
    :param int scan_grid: size of the log-spaced grid whose residual minima
        seed :py:func:`.scan_fixed_points` (0 disables it)
    """
    damping: float = 0.5
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_iterations: int = 100000
    n_seeds: int = 32
    continuation_steps: int = 20
    continuation_below: float = 0.01
    backoff_patience: int = 50
    min_damping: float = 1e-4
    clamp_limit: int = 100
    seed: int = 0
    scan_grid: int = 61

    def __post_init__(self):
        if not (0 < self.damping <= 1):
            raise InvalidParameterError(f"damping must be within (0, 1] (got {self.damping})")
        if not (0 < self.min_damping <= self.damping):
            raise InvalidParameterError("min_damping must be within (0, damping]")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidParameterError("tolerances must be > 0")
        for name in ["max_iterations", "continuation_steps", "backoff_patience", "clamp_limit"]:
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be >= 1")
        for name in ["n_seeds", "scan_grid"]:
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0")

    def tolerance(self, p):
        """
        Tolerance on each component: ``max(rel_tol*p[i], abs_tol)``
        """
        return np.maximum(self.rel_tol*np.asarray(p, dtype=float), self.abs_tol)

    def relative_residual(self, f, p):
        """
        ``max(|f[i] - p[i]| / max(p[i], abs_tol))`` over the components
        """
        p = np.asarray(p, dtype=float)
        return float(np.max(np.abs(f - p)/np.maximum(p, self.abs_tol)))

    def accepts(self, f, p):
        return bool(np.all(np.abs(f - np.asarray(p, dtype=float)) <= self.tolerance(p)))

DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True)
class SteadyStateSolution:
    """
    Fixed point of the self-consistency equations, with the derived emitter
    responses and transmittance.

    When ``converged`` is ``False``, ``p1`` and ``p2`` hold the last iterate
    for diagnostic purposes and ``transmittance`` is NaN. ``residual`` is the
    largest componentwise relative residual of the map.

    ``branch_count`` is only set on the solutions returned by
    :py:func:`.scan_fixed_points`; it is ``None`` otherwise.
    """
    p_inc: float
    p1: float
    p2: float
    R1: float
    R2: float
    theta1: float
    theta2: float
    transmittance: float
    converged: bool
    iterations: int
    residual: float
    damping: float
    perfect_mirror_limit: bool = False
    branch_count: int = None

    @property
    def node_at_emitter1(self):
        """
        ``True`` when the power reaching the first emitter is negligible with
        respect to the incident power (standing-wave node at ``z = 0``)
        """
        return self.converged and self.p1 < 1e-2*self.p_inc

    @property
    def point(self):
        return np.array([self.p1, self.p2])


def _check_power(p, what="incident power"):
    if not (np.all(np.isfinite(p)) and np.all(np.asarray(p) >= 0)):
        raise InvalidParameterError(f"{what} must be finite and >= 0 (got {p})")


def fixed_point_map(p1, p2, p_inc, dev):
    """
    One application of the self-consistency map:

    .. math::
        p_1' = |t^{inc}(0) + t^{intr}_{\\leftarrow}(0)|^2, \\quad
        p_2' = |t^{intr}_{\\rightarrow}(L)|^2

    with reflectances evaluated at the trial powers ``(p1, p2)``.
    Trial powers may be numpy arrays of the same shape.

    :raises SingularCavityError: if the cavity denominator vanishes
    """
    _check_power(p1, "trial power")
    _check_power(p2, "trial power")
    _check_power(p_inc)
    if p_inc == 0:
        return 0.0, 0.0
    mp = dev.mirrors(p1, p2)
    geom = dev.geometry
    L = geom.length_wavelengths
    if np.ndim(p1) == 0 and np.ndim(p2) == 0:
        forward, backward = intracavity_amplitudes(p_inc, mp, geom, np.array([0.0, L]))
        back0, fwd_l = backward[0], forward[1]
    else:
        _, back0 = intracavity_amplitudes(p_inc, mp, geom, 0.0)
        fwd_l, _ = intracavity_amplitudes(p_inc, mp, geom, L)
    inc0 = incident_amplitude(p_inc, geom, 0.0)
    q1 = np.abs(inc0 + back0)**2
    q2 = np.abs(fwd_l)**2
    if np.ndim(q1) == 0:
        return float(q1), float(q2)
    return q1, q2


def _make_solution(p_inc, dev, p, converged, iterations, residual, damping,
                   perfect_mirror_limit=False):
    p1, p2 = (float(x) for x in p)
    R1 = reflectance(p1, dev.emitter1)
    R2 = reflectance(p2, dev.emitter2)
    theta1 = phase_shift(dev.emitter1)
    theta2 = phase_shift(dev.emitter2)
    if not converged:
        T = math.nan
    elif R1 >= 1 or R2 >= 1:
        # a perfect mirror blocks everything
        T = 0.0
        perfect_mirror_limit = True
    else:
        T = transmittance_formula(R1, R2, (theta1+theta2)/2, dev.geometry.mu)
    return SteadyStateSolution(float(p_inc), p1, p2, R1, R2, theta1, theta2, T,
                               converged, iterations, float(residual), damping,
                               perfect_mirror_limit)

def _zero_input(dev, s):
    return _make_solution(0.0, dev, (0.0, 0.0), True, 0, 0.0, s.damping)

def default_seed(p_inc, dev):
    """
    Powers obtained when neglecting the feedback of the second emitter:
    ``(p_inc, (1 - R1(p_inc)) p_inc)``
    """
    return (p_inc, (1 - reflectance(p_inc, dev.emitter1))*p_inc)


def _iterate(p_inc, dev, s, start):
    p = np.array(start, dtype=float)
    alpha = s.damping
    best = math.inf
    stall = 0
    clamps = 0
    residual = math.inf
    for n in range(1, s.max_iterations+1):
        try:
            f = np.array(fixed_point_map(p[0], p[1], p_inc, dev))
        except SingularCavityError:
            clamps += 1
            if clamps >= s.clamp_limit:
                logger.info("p_inc=%g: perfect-mirror limit after %d singular evaluations",
                            p_inc, clamps)
                return _make_solution(p_inc, dev, (0.0, 0.0), True, n, 0.0, alpha,
                                      perfect_mirror_limit=True)
            p = np.maximum(p, s.abs_tol)
            continue
        clamps = 0
        residual = s.relative_residual(f, p)
        if s.accepts(f, p):
            return _make_solution(p_inc, dev, p, True, n, residual, alpha)
        if residual < 0.9*best:
            best = residual
            stall = 0
        else:
            stall += 1
            if stall >= s.backoff_patience:
                alpha = max(alpha/2, s.min_damping)
                stall = 0
                best = residual
                logger.debug("p_inc=%g: damping reduced to %g at iteration %d",
                             p_inc, alpha, n)
        p = (1-alpha)*p + alpha*f
    logger.debug("p_inc=%g: no convergence after %d iterations (residual %g)",
                 p_inc, s.max_iterations, residual)
    return _make_solution(p_inc, dev, p, False, s.max_iterations, residual, alpha)


def solve_steady_state(p_inc, dev, s=None, start=None):
    """
    Damped fixed-point iteration, from ``start`` or from
    :py:func:`.default_seed`.

    Non-convergence is reported through the ``converged`` flag of the
    returned solution.

    :param float p_inc: incident power
    :param dev: device
    :type dev: :py:class:`.DeviceConfig`
    :param s: solver settings (default: :py:data:`.DEFAULT_SETTINGS`)
    :type s: :py:class:`.SolverSettings`
    :param start: initial ``(p1, p2)``
    :rtype: :py:class:`.SteadyStateSolution`
    """
    s = s or DEFAULT_SETTINGS
    _check_power(p_inc)
    if p_inc == 0:
        return _zero_input(dev, s)
    if start is None:
        start = default_seed(p_inc, dev)
    else:
        _check_power(start, "initial powers")
    return _iterate(p_inc, dev, s, start)


def continuation_ramp(p_inc, s):
    """
    Geometric ramp of powers from ``min(p_inc, 10 abs_tol)`` to ``p_inc``
    """
    lo = min(p_inc, 10*s.abs_tol)
    if s.continuation_steps == 1 or lo >= p_inc:
        return np.array([p_inc])
    return np.geomspace(lo, p_inc, s.continuation_steps)

def solve_with_continuation(p_inc, dev, s=None):
    """
    Solve along a geometric ramp of incident powers, warm-starting each solve
    from the previous fixed point, and return the solution at ``p_inc``.
    This follows the branch connected to vanishing input power.

    :rtype: :py:class:`.SteadyStateSolution`
    """
    s = s or DEFAULT_SETTINGS
    _check_power(p_inc)
    if p_inc == 0:
        return _zero_input(dev, s)
    start = None
    iterations = 0
    for q in continuation_ramp(p_inc, s):
        sol = solve_steady_state(float(q), dev, s, start=start)
        iterations += sol.iterations
        if sol.converged:
            start = (sol.p1, sol.p2)
        else:
            logger.info("continuation step p_inc=%g did not converge, restarting from default seed", q)
            start = None
    return replace(sol, iterations=iterations)


def solve(p_inc, dev, s=None):
    """
    Default strategy: :py:func:`.solve_with_continuation` below
    ``s.continuation_below``, :py:func:`.solve_steady_state` above.
    """
    s = s or DEFAULT_SETTINGS
    if p_inc < s.continuation_below:
        return solve_with_continuation(p_inc, dev, s)
    return solve_steady_state(p_inc, dev, s)


def certify(p_inc, dev, p, s=None):
    """
    Re-evaluate the map once at ``p`` and return ``(ok, residual)`` where
    ``ok`` tells whether every component of ``p`` satisfies the fixed-point
    tolerance and ``residual`` is the largest relative one.
    """
    s = s or DEFAULT_SETTINGS
    p = np.asarray(p, dtype=float)
    f = np.array(fixed_point_map(p[0], p[1], p_inc, dev))
    return s.accepts(f, p), s.relative_residual(f, p)


def _same_point(a, b, rtol=1e-6):
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    return np.max(np.abs(a - b)) <= rtol*scale


def residual_minima(p_inc, dev, n_grid, span=(1e-4, 40.0)):
    """
    Local minima of the relative residual of :py:func:`.fixed_point_map` over
    a log-spaced ``n_grid`` x ``n_grid`` grid of
    ``[span[0] p_inc, span[1] p_inc]^2``, sorted by increasing residual.

    :returns: array of ``(p1, p2)`` rows
    """
    grid = p_inc*np.geomspace(span[0], span[1], n_grid)
    P1, P2 = np.meshgrid(grid, grid, indexing="ij")
    try:
        F1, F2 = fixed_point_map(P1, P2, p_inc, dev)
    except SingularCavityError:
        return np.empty((0, 2))
    with np.errstate(divide="ignore"):
        res = np.hypot(np.log(np.maximum(F1, 1e-300)/P1),
                       np.log(np.maximum(F2, 1e-300)/P2))
    minima = np.argwhere(res == minimum_filter(res, size=3, mode="nearest"))
    i, j = minima[:, 0], minima[:, 1]
    order = np.argsort(res[i, j], kind="stable")
    return np.column_stack([P1[i, j], P2[i, j]])[order]


def _log_residual(p_inc, dev, roots):
    def residual(y):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            q = np.exp(y)
            try:
                f = np.array(fixed_point_map(q[0], q[1], p_inc, dev))
            except (SingularCavityError, InvalidParameterError):
                return np.full(2, 1e10)
            g = y - np.log(np.maximum(f, 1e-300))
            for r in roots:
                g = g*(1 + 1/np.sum((y - r)**2))
        if not np.all(np.isfinite(g)):
            return np.full(2, 1e10)
        return g
    return residual

def _deflated_root(p_inc, dev, s, start, roots, polish_rounds=3):
    y0 = np.log(np.maximum(start, s.abs_tol))
    try:
        res = root(_log_residual(p_inc, dev, roots), y0, method="hybr",
                   options={"xtol": 1e-13})
        y = res.x
        nfev = int(res.nfev)
        # polish without deflation
        for _ in range(polish_rounds):
            if not np.all(np.isfinite(y)):
                return None
            res = root(_log_residual(p_inc, dev, []), y, method="hybr",
                       options={"xtol": 1e-15})
            y = res.x
            nfev += int(res.nfev)
            if np.all(np.isfinite(y)) and certify(p_inc, dev, np.exp(y), s)[0]:
                break
    except (ValueError, FloatingPointError):
        return None
    if not np.all(np.isfinite(y)):
        return None
    p = np.exp(y)
    ok, residual = certify(p_inc, dev, p, s)
    if not ok:
        return None
    return _make_solution(p_inc, dev, p, True, nfev, residual, s.damping)


def scan_fixed_points(p_inc, dev, s=None, max_deflations=4):
    """
    Look for all the fixed points of the self-consistency map.

    Starting points are, in this order: :py:func:`.default_seed`, the
    standing-wave node guess ``(p_inc**2, p_inc)``, the residual minima of
    a coarse ``s.scan_grid`` grid (see :py:func:`.residual_minima`) and
    ``s.n_seeds`` random seeds log-uniformly drawn in
    ``[abs_tol, 10 max(p_inc, 1)]^2``. The continuation solution is always
    included.

    Each start is iterated with the damped map (except grid minima), then a
    Newton-type root finder is run from it on the residual deflated by the
    fixed points already found, up to ``max_deflations`` times while new
    fixed points show up, so that fixed points which repel the damped
    iteration are also discovered.

    :returns: distinct converged solutions sorted by ``p1``, each carrying
        ``branch_count``
    :rtype: list(:py:class:`.SteadyStateSolution`)
    """
    s = s or DEFAULT_SETTINGS
    _check_power(p_inc)
    if p_inc == 0:
        return [replace(_zero_input(dev, s), branch_count=1)]
    found = []
    roots = []
    def register(sol):
        if sol is None or not sol.converged:
            return False
        for other in found:
            if _same_point(sol.point, other.point):
                return False
        found.append(sol)
        if sol.p1 > 0 and sol.p2 > 0:
            roots.append(np.log(sol.point))
        return True
    def deflate_from(start):
        for _ in range(max_deflations):
            if not register(_deflated_root(p_inc, dev, s, start, roots)):
                break

    register(solve_with_continuation(p_inc, dev, s))
    for start in (default_seed(p_inc, dev), (p_inc**2, p_inc)):
        register(solve_steady_state(p_inc, dev, s, start=start))
        deflate_from(start)
    if s.scan_grid >= 3:
        for start in residual_minima(p_inc, dev, s.scan_grid):
            deflate_from(start)
    rng = np.random.default_rng(s.seed)
    lo = math.log(s.abs_tol)
    hi = math.log(10*max(p_inc, 1.0))
    for _ in range(s.n_seeds):
        start = np.exp(rng.uniform(lo, hi, size=2))
        register(solve_steady_state(p_inc, dev, s, start=start))
        deflate_from(start)
    found.sort(key=lambda sol: sol.p1)
    if len(found) > 1:
        logger.info("p_inc=%g: %d distinct fixed points", p_inc, len(found))
    return [replace(sol, branch_count=len(found)) for sol in found]
