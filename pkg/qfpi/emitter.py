"""
Two-level emitters as saturable mirrors.

All rates are expressed in units of a reference decay rate, and powers are
dimensionless (number of photons per lifetime). An emitter is fully described
by its decay rate ``gamma`` and the detuning ``delta_omega`` of the drive with
respect to its transition frequency.

Functions accept Python floats as well as numpy arrays of powers.

>>> em = EmitterParams(gamma=1.0, delta_omega=0.0)
>>> float(reflectance(0.25, em))
0.5
>>> phase_shift(em)
-3.141592653589793
"""

from dataclasses import dataclass
import math

import numpy as np

from qfpi.errors import InvalidParameterError

@dataclass(frozen=True)
class EmitterParams:
    """
    Parameters of one two-level emitter

    :param float gamma: decay rate (strictly positive)
    :param float delta_omega: detuning of the drive, same units as ``gamma``
    """
    gamma: float = 1.0
    delta_omega: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise InvalidParameterError(f"gamma must be finite and > 0 (got {self.gamma})")
        if not math.isfinite(self.delta_omega):
            raise InvalidParameterError(f"delta_omega must be finite (got {self.delta_omega})")


@dataclass(frozen=True)
class BlochSteadyState:
    """
    Steady state of the optical Bloch equations of a driven emitter, without
    dephasing nor incoherent pumping
    """
    sigma_minus_re: float
    sigma_minus_im: float
    sigma_z: float
    rabi: float

    @property
    def coherence_squared(self):
        """
        :math:`|\\langle\\sigma_-\\rangle|^2`
        """
        return self.sigma_minus_re**2 + self.sigma_minus_im**2


@dataclass(frozen=True)
class EmitterResponse:
    reflectance: float
    phase_shift: float


def _check_power(p, strict=False):
    p = np.asarray(p, dtype=float)
    if strict:
        if np.any(~(p > 0)):
            raise InvalidParameterError(f"impinging power must be > 0 (got {p})")
    elif np.any(~(p >= 0)):
        raise InvalidParameterError(f"impinging power must be >= 0 (got {p})")
    return p

def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def bloch_steady_state(p, em):
    """
    Steady-state coherence and inversion of an emitter driven by the power
    ``p``. The Rabi frequency is :math:`\\Omega = \\gamma\\sqrt{2p}`.

    :param float p: impinging power (``>= 0``)
    :param em: emitter parameters
    :type em: :py:class:`.EmitterParams`
    :rtype: :py:class:`.BlochSteadyState`
    """
    p = _check_power(p)
    g = em.gamma
    dw = em.delta_omega
    rabi = g*np.sqrt(2*p)
    a = g*g + 4*dw*dw
    denom = a + 2*rabi*rabi
    re = -g*rabi/denom
    im = (2*dw/g)*re
    # -1/2 + rabi^2/denom, written without cancellation
    sz = -a/(2*denom)
    return BlochSteadyState(_scalar(re), _scalar(im), _scalar(sz), _scalar(rabi))


def reflectance(p, em):
    """
    Fraction of the impinging power ``p`` that the emitter reflects back into
    the waveguide. Decreases with ``p`` (saturation) and with ``|delta_omega|``.

    :param p: impinging power (``>= 0``), scalar or array
    :param em: emitter parameters
    :type em: :py:class:`.EmitterParams`
    """
    p = _check_power(p)
    g2 = em.gamma**2
    return _scalar(g2/(g2 + 4*em.delta_omega**2 + 4*p*g2))


def reflectance_from_bloch(p, em):
    """
    Reflectance obtained from the Bloch steady state: half of the photons
    scattered by the emitter go backward, i.e. a reflected flux of
    :math:`\\gamma P_e/2`, normalized by the impinging flux :math:`p\\gamma`.

    Unlike :py:func:`.reflectance`, ``p = 0`` is rejected since the
    normalization is singular.
    """
    p = _check_power(p, strict=True)
    st = bloch_steady_state(p, em)
    g = em.gamma
    # excited population from the steady-state energy balance
    # (absorbed = scattered), free of the -1/2 + 1/2 cancellation
    excited = -np.asarray(st.sigma_minus_re)*np.asarray(st.rabi)/g
    reflected = g*excited/2
    return _scalar(reflected/(p*g))


def phase_shift(em):
    """
    Phase acquired upon reflection on the emitter, in
    :math:`(-3\\pi/2, -\\pi/2)`.
    """
    return math.atan(2*em.delta_omega/em.gamma) - math.pi


def response(p, em):
    """
    Reflectance and reflection phase of the emitter at power ``p``

    :rtype: :py:class:`.EmitterResponse`
    """
    return EmitterResponse(reflectance(p, em), phase_shift(em))
