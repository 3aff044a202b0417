"""
Directional transport through the two-emitter device: transmittance in each
direction, rectification figures of merit and intracavity intensity.
"""

from dataclasses import dataclass
import cmath
import enum
import logging
import math

import numpy as np
from scipy.integrate import simpson

from qfpi.cavity import (
    MirrorPair,
    incident_amplitude,
    intracavity_amplitudes,
)
from qfpi.emitter import phase_shift
from qfpi.errors import InvalidParameterError
from qfpi.solver import solve

logger = logging.getLogger(__name__)

class Direction(enum.Enum):
    LEFT_TO_RIGHT = "ltr"
    RIGHT_TO_LEFT = "rtl"

    @classmethod
    def parse(cls, text):
        """
        Accepts ``ltr``, ``rtl``, ``12``, ``21``, ``left-to-right`` and
        ``right-to-left``
        """
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("_", "-")
        aliases = {
            "ltr": cls.LEFT_TO_RIGHT, "12": cls.LEFT_TO_RIGHT,
            "left-to-right": cls.LEFT_TO_RIGHT,
            "rtl": cls.RIGHT_TO_LEFT, "21": cls.RIGHT_TO_LEFT,
            "right-to-left": cls.RIGHT_TO_LEFT,
        }
        if key not in aliases:
            raise InvalidParameterError(f"unknown direction '{text}'")
        return aliases[key]


@dataclass(frozen=True)
class RectificationResult:
    """
    :param float t12: transmittance from left to right
    :param float t21: transmittance from right to left
    :param float r_factor: rectification factor
        :math:`|T_{12}-T_{21}|/(T_{12}+T_{21})`
    :param float l_factor: rectification figure :math:`T_{12}\\,r`
    """
    t12: float
    t21: float
    r_factor: float
    l_factor: float
    both_converged: bool
    solution_12: object = None
    solution_21: object = None


@dataclass(frozen=True)
class IntensityProfile:
    positions: np.ndarray
    intensities: np.ndarray
    average: float
    quadrature_average: float
    solution: object = None


@dataclass(frozen=True)
class ScalingPoint:
    p_inc: float
    average: float
    converged: bool


def oriented(dev, direction):
    """
    Device as seen by light travelling in ``direction``
    """
    if Direction.parse(direction) is Direction.RIGHT_TO_LEFT:
        return dev.swapped()
    return dev


def transmit(p_inc, dev, direction=Direction.LEFT_TO_RIGHT, s=None):
    """
    Transmittance of the device for light shined in ``direction``.

    :returns: ``(T, solution)``; ``T`` is NaN if the solver did not converge
    """
    sol = solve(p_inc, oriented(dev, direction), s)
    return sol.transmittance, sol


def rectify(p_inc, dev, s=None):
    """
    Solve both directions and compute the rectification figures.
    ``r_factor`` is 0 when no light goes through in either direction, and
    both factors are NaN unless both directions converged.

    :rtype: :py:class:`.RectificationResult`
    """
    t12, sol12 = transmit(p_inc, dev, Direction.LEFT_TO_RIGHT, s)
    t21, sol21 = transmit(p_inc, dev, Direction.RIGHT_TO_LEFT, s)
    both = sol12.converged and sol21.converged
    if both:
        total = t12 + t21
        r = abs(t12 - t21)/total if total > 0 else 0.0
        l = t12*r
    else:
        r = l = math.nan
    return RectificationResult(t12, t21, r, l, both, sol12, sol21)


def _mean_phase(x):
    """
    :math:`(e^x - 1)/x`, i.e. the average of :math:`e^{xu}` over ``u`` in [0, 1]
    """
    if abs(x) < 1e-4:
        return 1 + x/2 + x*x/6 + x**3/24
    return (cmath.exp(x) - 1)/x

def average_intracavity(p_inc, dev, solution):
    """
    Closed-form spatial average of :math:`|t_\\rightarrow + t_\\leftarrow|^2`
    over ``[0, L]`` for a converged ``solution``. For ``L = 0`` this is the
    intensity at the emitters.
    """
    if not solution.converged:
        return math.nan
    if p_inc == 0 or solution.perfect_mirror_limit:
        return 0.0
    mp = dev.mirrors(solution.p1, solution.p2)
    geom = dev.geometry
    a, b = intracavity_amplitudes(p_inc, mp, geom, 0.0)
    cross = a*b.conjugate()*_mean_phase(2j*geom.kl)
    return float(abs(a)**2 + abs(b)**2 + 2*cross.real)


def intracavity_profile(p_inc, dev, n_samples=201, s=None, solution=None):
    """
    Intracavity intensity sampled on ``n_samples`` evenly spaced positions of
    ``[0, L]``, light shined from the left.

    The average is computed in closed form; ``quadrature_average`` is the
    Simpson estimate on the samples, logged when they disagree.

    :param solution: steady state to use instead of solving again
    :rtype: :py:class:`.IntensityProfile`
    """
    if n_samples < 2:
        raise InvalidParameterError(f"n_samples must be >= 2 (got {n_samples})")
    geom = dev.geometry
    L = geom.length_wavelengths
    z = np.linspace(0.0, L, n_samples)
    sol = solution if solution is not None else solve(p_inc, dev, s)
    if not sol.converged:
        nan = np.full(n_samples, math.nan)
        return IntensityProfile(z, nan, math.nan, math.nan, sol)
    if p_inc == 0 or sol.perfect_mirror_limit:
        zeros = np.zeros(n_samples)
        return IntensityProfile(z, zeros, 0.0, 0.0, sol)
    mp = dev.mirrors(sol.p1, sol.p2)
    forward, backward = intracavity_amplitudes(p_inc, mp, geom, z)
    intensities = np.abs(forward + backward)**2
    average = average_intracavity(p_inc, dev, sol)
    if L > 0:
        quad = float(simpson(intensities, x=z)/L)
    else:
        quad = float(intensities[0])
    if not math.isclose(average, quad, rel_tol=1e-3):
        logger.warning("intracavity average %g differs from quadrature %g (n_samples=%d)",
                       average, quad, n_samples)
    else:
        logger.debug("intracavity average %g, quadrature %g", average, quad)
    return IntensityProfile(z, intensities, average, quad, sol)


def average_intracavity_scaling(dev, powers, s=None):
    """
    Average intracavity power for each incident power of ``powers``
    (no point is dropped).

    :rtype: list(:py:class:`.ScalingPoint`)
    """
    points = []
    for p in powers:
        sol = solve(float(p), dev, s)
        points.append(ScalingPoint(float(p), average_intracavity(float(p), dev, sol),
                                   sol.converged))
    return points


def backward_phase_offset(p_inc, dev, R1, R2):
    """
    Phase of the backward intracavity field at ``z = 0`` relative to the
    incident field, in ``[0, 2pi)``, for mirrors of reflectances ``R1`` and
    ``R2`` with the reflection phases of ``dev``. It is exactly ``pi`` on
    resonance for an integer number of wavelengths, which puts a node at
    the first emitter.
    """
    if not p_inc > 0:
        raise InvalidParameterError(f"incident power must be > 0 (got {p_inc})")
    mp = MirrorPair.from_reflectances(R1, R2, phase_shift(dev.emitter1),
                                      phase_shift(dev.emitter2))
    inc = incident_amplitude(p_inc, dev.geometry, 0.0)
    _, back = intracavity_amplitudes(p_inc, mp, dev.geometry, 0.0)
    return cmath.phase(back/inc) % (2*math.pi)

