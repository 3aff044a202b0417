"""
Independent checks of the model: analytic limits, a truncated round-trip
series oracle for the interferometer amplitudes, a brute-force oracle for
the self-consistent fixed points, and reciprocity for identical emitters.

:py:func:`.run_checks` runs them all and is what ``qfpi validate`` reports.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np
from scipy.optimize import root

from qfpi.cavity import (
    CavityGeometry,
    MirrorPair,
    WAVENUMBER,
    fp_coefficients,
    intracavity_amplitudes,
    output_amplitude,
    transmittance_formula,
)
from qfpi.emitter import (
    EmitterParams,
    phase_shift,
    reflectance,
    reflectance_from_bloch,
)
from qfpi.errors import SingularCavityError
from qfpi.solver import (
    DeviceConfig,
    SolverSettings,
    certify,
    fixed_point_map,
    residual_minima,
    solve,
    solve_steady_state,
)
from qfpi.transport import backward_phase_offset, rectify, transmit

logger = logging.getLogger(__name__)


def _round_trips(mp, geom, n_terms):
    q = mp.r1*mp.r2*np.exp(1j*(2*geom.kl + mp.theta1 + mp.theta2))
    return np.sum(q**np.arange(n_terms))

def series_output_amplitude(p_inc, mp, geom, n_terms=64):
    """
    Output amplitude at ``z = L`` as the sum of the first ``n_terms`` round
    trips. The truncation error is at most
    :math:`\\sqrt{p_{inc}T_1T_2}\\,s^N/(1-s)` with :math:`s = \\sqrt{R_1R_2}`.
    """
    return complex(math.sqrt(p_inc)*mp.t1*mp.t2*_round_trips(mp, geom, n_terms))

def series_intracavity_amplitudes(p_inc, mp, geom, z, n_terms=64):
    """
    Truncated round-trip series of the forward and backward amplitudes at
    ``0 <= z <= L``
    """
    k = WAVENUMBER
    L = geom.length_wavelengths
    total = math.sqrt(p_inc)*mp.t1*_round_trips(mp, geom, n_terms)
    forward = total*np.exp(1j*k*(z - L))
    backward = total*mp.r2*np.exp(1j*(geom.kl + mp.theta2))*np.exp(-1j*k*(z - L))
    return complex(forward), complex(backward)


def _log_map_residual(p_inc, dev):
    def residual(y):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            q = np.exp(y)
            try:
                f = np.array(fixed_point_map(q[0], q[1], p_inc, dev))
            except SingularCavityError:
                return np.full(2, 1e10)
            g = y - np.log(np.maximum(f, 1e-300))
        return g if np.all(np.isfinite(g)) else np.full(2, 1e10)
    return residual

def brute_force_fixed_points(p_inc, dev, n_grid=201, span=(1e-4, 40.0), s=None):
    """
    All fixed points found by scanning a log-spaced ``n_grid`` x ``n_grid``
    grid of ``[span[0] p_inc, span[1] p_inc]^2``: local minima of the relative
    residual are polished by root finding and kept if they pass the
    fixed-point tolerance of ``s``.

    :returns: list of ``(p1, p2)`` sorted by ``p1``
    """
    s = s or SolverSettings()
    minima = residual_minima(p_inc, dev, n_grid, span)
    logger.debug("p_inc=%g: %d candidate minima", p_inc, len(minima))
    found = []
    residual = _log_map_residual(p_inc, dev)
    for start in minima:
        y = np.log(start)
        for _ in range(2):
            y = root(residual, y, method="hybr", options={"xtol": 1e-15}).x
        p = np.exp(y)
        if not np.all(np.isfinite(p)) or not certify(p_inc, dev, p, s)[0]:
            continue
        if any(np.max(np.abs(p - q)) <= 1e-6*np.max(p) for q in found):
            continue
        found.append(p)
    return sorted((float(p[0]), float(p[1])) for p in found)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def check_reflectance_values():
    em = EmitterParams()
    ok = (reflectance(0, em) == 1.0 and reflectance(0.25, em) == 0.5
          and reflectance(0, EmitterParams(1, 0.5)) == 0.5)
    return ok, "R(0)=1, R(1/4)=1/2, R(0; dw=0.5)=1/2"

def check_bloch_consistency(n=1000, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = 10**rng.uniform(-8, 4)
        em = EmitterParams(10**rng.uniform(-1, 1), rng.uniform(-10, 10))
        worst = max(worst, abs(reflectance_from_bloch(p, em) - reflectance(p, em)))
    return worst <= 1e-12, f"max deviation {worst:.3g}"

def check_phase_shift():
    ok = (math.isclose(phase_shift(EmitterParams(1, 0)), -math.pi)
          and math.isclose(phase_shift(EmitterParams(1, 0.5)), -3*math.pi/4))
    return ok, "theta(0)=-pi, theta(gamma/2)=-3pi/4"

def check_fp_coefficients():
    F1, F2 = fp_coefficients(0.25, 0.25)
    ok = math.isclose(F1, 1.0) and math.isclose(F2, 16/9) \
        and fp_coefficients(0, 0) == (1.0, 0.0)
    return ok, f"F(1/4, 1/4) = ({F1:.6g}, {F2:.6g})"

def check_single_mirror(n=100, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        R1 = rng.uniform(0, 0.999)
        T = transmittance_formula(R1, 0.0, rng.uniform(-4, -2), rng.uniform(0, 10))
        worst = max(worst, abs(T - (1 - R1)))
    return worst <= 1e-12, f"max deviation {worst:.3g}"

def check_series_oracle(n=50, n_terms=64, seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        R1, R2 = rng.uniform(0, 0.9, size=2)
        mp = MirrorPair.from_reflectances(R1, R2, rng.uniform(-4, -2), rng.uniform(-4, -2))
        geom = CavityGeometry(rng.uniform(0, 2))
        s = mp.r1*mp.r2
        tail = s**n_terms/(1 - s)
        z = rng.uniform(0, geom.length_wavelengths)
        f, b = intracavity_amplitudes(1.0, mp, geom, z)
        sf, sb = series_intracavity_amplitudes(1.0, mp, geom, z, n_terms)
        pairs = [
            (output_amplitude(1.0, mp, geom), series_output_amplitude(1.0, mp, geom, n_terms),
             mp.t1*mp.t2*tail),
            (f, sf, mp.t1*tail),
            (b, sb, mp.t1*mp.r2*tail),
        ]
        for exact, approx, bound in pairs:
            worst = max(worst, abs(exact - approx)/(bound + 1e-14))
    return worst <= 1 + 1e-9, f"max error/bound {worst:.3g}"

def check_closed_form_transmittance(n=100, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        R1, R2 = rng.uniform(0, 0.99, size=2)
        th1, th2 = rng.uniform(-4.7, -1.6, size=2)
        geom = CavityGeometry(rng.uniform(0, 3))
        mp = MirrorPair.from_reflectances(R1, R2, th1, th2)
        T = transmittance_formula(R1, R2, mp.theta_plus, geom.mu)
        worst = max(worst, abs(abs(output_amplitude(1.0, mp, geom))**2 - T))
    return worst <= 1e-12, f"max deviation {worst:.3g}"

def check_transparent_limit():
    dev = DeviceConfig.from_values(length=0.3, dw1=1e6, dw2=1e6)
    T, sol = transmit(1.0, dev)
    return sol.converged and abs(T - 1) <= 1e-6, f"T={T!r}"

def check_node_phase():
    worst = 0.0
    for L in (1, 2, 5):
        dev = DeviceConfig.from_values(length=L)
        for R in (0.1, 0.5, 0.9):
            worst = max(worst, abs(backward_phase_offset(1.0, dev, R, R) - math.pi))
    return worst <= 1e-9, f"max deviation from pi {worst:.3g}"

ORACLE_CASES = [
    (0.1, dict(length=0.5)),
    (1.0, dict(length=1.0)),
    (0.1, dict(length=1.0)),
    (0.3, dict(length=0.25, dw1=0.5)),
    (2.0, dict(length=0.7, dw1=-0.4, dw2=0.3, gamma2=2.0)),
]

def check_fixed_point_oracle():
    details = []
    ok = True
    for p_inc, kw in ORACLE_CASES:
        dev = DeviceConfig.from_values(**kw)
        sol = solve_steady_state(p_inc, dev)
        roots = brute_force_fixed_points(p_inc, dev)
        match = sol.converged and any(
            max(abs(sol.p1 - a), abs(sol.p2 - b)) <= 1e-6*max(a, b, sol.p1, sol.p2)
            for a, b in roots)
        ok = ok and match
        details.append(f"p_inc={p_inc:g} {kw}: {'ok' if match else 'MISMATCH'}")
    return ok, "; ".join(details)

def check_reciprocity(n=10, seed=4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    converged = 0
    for _ in range(n):
        dw = rng.uniform(-2, 2)
        dev = DeviceConfig.from_values(length=rng.uniform(0, 1), dw1=dw, dw2=dw)
        res = rectify(10**rng.uniform(-2, 1), dev)
        if not res.both_converged:
            continue
        converged += 1
        worst = max(worst, abs(res.t12 - res.t21), res.r_factor)
    ok = worst <= 1e-12 and converged >= 0.8*n
    return ok, f"max |T12-T21| {worst:.3g} over {converged}/{n} converged devices"

def check_zero_power():
    dev = DeviceConfig.from_values(length=0.4, dw1=0.3)
    sol = solve(0.0, dev)
    return sol.converged and sol.p1 == 0 and sol.p2 == 0, "p_inc=0 gives p1=p2=0"

CHECKS = [
    ("reflectance values", check_reflectance_values),
    ("bloch consistency", check_bloch_consistency),
    ("phase shift", check_phase_shift),
    ("fabry-perot coefficients", check_fp_coefficients),
    ("single mirror limit", check_single_mirror),
    ("round-trip series", check_series_oracle),
    ("closed-form transmittance", check_closed_form_transmittance),
    ("transparent limit", check_transparent_limit),
    ("node phase", check_node_phase),
    ("zero power", check_zero_power),
    ("fixed-point oracle", check_fixed_point_oracle),
    ("reciprocity", check_reciprocity),
]


def run_checks(names=None):
    """
    Run the checks of :py:data:`.CHECKS` (or only those in ``names``)

    :rtype: list(:py:class:`.CheckResult`)
    """
    results = []
    for name, check in CHECKS:
        if names is not None and name not in names:
            continue
        try:
            passed, detail = check()
        except Exception as e:
            logger.exception("check '%s' raised", name)
            passed, detail = False, f"{type(e).__name__}: {e}"
        logger.info("%s: %s (%s)", name, "PASS" if passed else "FAIL", detail)
        results.append(CheckResult(name, bool(passed), detail))
    return results
