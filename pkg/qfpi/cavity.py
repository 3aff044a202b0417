"""
Coherent amplitude algebra of a Fabry-Perot interferometer whose mirrors are
the two emitters, located at ``z = 0`` and ``z = L``.

Lengths are measured in units of the photon wavelength, hence the wavenumber
is :math:`k = 2\\pi`. The phase of the field is taken to be 0 at ``z = L``.
Transmission through a mirror is real and positive (no phase shift), and a
reflection on mirror ``i`` multiplies the amplitude by
:math:`\\sqrt{R_i} e^{i\\theta_i}`.

Amplitudes are in units of :math:`\\sqrt{\\text{photons per lifetime}}`; they
are Python ``complex`` numbers, or numpy complex arrays when positions or
mirrors are given as arrays.
"""

from dataclasses import dataclass
import math

import numpy as np

from qfpi.errors import InvalidParameterError, SingularCavityError

ComplexAmplitude = complex

WAVENUMBER = 2*math.pi
DENOMINATOR_EPS = 1e-14

@dataclass(frozen=True)
class CavityGeometry:
    """
    :param float length_wavelengths: emitter separation ``L`` in wavelengths
    """
    length_wavelengths: float = 0.0

    def __post_init__(self):
        L = self.length_wavelengths
        if not (math.isfinite(L) and L >= 0):
            raise InvalidParameterError(f"length must be finite and >= 0 (got {L})")

    @property
    def kl(self):
        return WAVENUMBER*self.length_wavelengths

    @property
    def mu(self):
        """
        Half of the propagation phase, :math:`\\mu = kL/2`
        """
        return self.kl/2


@dataclass(frozen=True)
class MirrorPair:
    """
    Amplitude reflectances/transmittances and reflection phases of the two
    mirrors. Use :py:meth:`.from_reflectances` to build consistent pairs.
    """
    r1: float
    r2: float
    t1: float
    t2: float
    theta1: float
    theta2: float

    @classmethod
    def from_reflectances(cls, R1, R2, theta1, theta2):
        """
        :param R1: power reflectance of the first mirror, in ``[0, 1]``
        :param R2: power reflectance of the second mirror, in ``[0, 1]``
        :param float theta1: reflection phase of the first mirror
        :param float theta2: reflection phase of the second mirror
        """
        R1 = _check_reflectance(R1)
        R2 = _check_reflectance(R2)
        return cls(_scalar(np.sqrt(R1)), _scalar(np.sqrt(R2)),
                    _scalar(np.sqrt(1-R1)), _scalar(np.sqrt(1-R2)),
                    theta1, theta2)

    @property
    def R1(self):
        return self.r1**2

    @property
    def R2(self):
        return self.r2**2

    @property
    def theta_plus(self):
        return (self.theta1 + self.theta2)/2

    def denominator(self, geom):
        """
        Geometric-series denominator
        :math:`D = 1 - \\sqrt{R_1R_2}\\,e^{2i(kL+\\theta_+)}`

        :raises SingularCavityError: if :math:`|D| < 10^{-14}`
        """
        d = 1 - self.r1*self.r2*np.exp(2j*(geom.kl + self.theta_plus))
        if np.any(np.abs(d) < DENOMINATOR_EPS):
            raise SingularCavityError("Fabry-Perot round-trip denominator vanishes")
        return d


def _check_reflectance(R):
    R = np.asarray(R, dtype=float)
    if np.any(~((R >= 0) & (R <= 1))):
        raise InvalidParameterError(f"reflectance must be within [0, 1] (got {R})")
    return R

def _scalar(x):
    if np.ndim(x) == 0 and hasattr(x, "item"):
        return x.item()
    return x

def _sqrt_power(p_inc):
    p_inc = np.asarray(p_inc, dtype=float)
    if np.any(~(p_inc >= 0)):
        raise InvalidParameterError(f"incident power must be >= 0 (got {p_inc})")
    return np.sqrt(p_inc)


def fp_coefficients(R1, R2):
    """
    Coefficients :math:`F_1, F_2` of the Fabry-Perot transmittance.
    :math:`F_1 \\geq 1` and :math:`F_2 \\geq 0`.

    :raises SingularCavityError: if ``R1 >= 1`` or ``R2 >= 1``
    """
    R1 = _check_reflectance(R1)
    R2 = _check_reflectance(R2)
    if np.any(R1 >= 1) or np.any(R2 >= 1):
        raise SingularCavityError("Fabry-Perot coefficients are singular for unit reflectance")
    s = np.sqrt(R1*R2)
    denom = (1-R1)*(1-R2)
    return _scalar((1-s)**2/denom), _scalar(4*s/denom)


def transmittance_formula(R1, R2, theta_plus, mu):
    """
    Closed-form Fabry-Perot transmittance
    :math:`T = 1/(F_1 + F_2\\sin^2(2\\mu + \\theta_+))`, in ``(0, 1]``.
    """
    F1, F2 = fp_coefficients(R1, R2)
    return _scalar(1/(F1 + F2*np.sin(2*mu + theta_plus)**2))


def incident_amplitude(p_inc, geom, z=0.0):
    """
    Incident amplitude at ``z <= 0``: :math:`\\sqrt{p_{inc}}e^{ik(z-L)}`
    """
    if np.any(np.asarray(z) > 0):
        raise InvalidParameterError(f"incident amplitude is defined for z <= 0 (got {z})")
    a = _sqrt_power(p_inc)*np.exp(1j*WAVENUMBER*(np.asarray(z) - geom.length_wavelengths))
    return _scalar(a)


def output_amplitude(p_inc, mp, geom, z=None):
    """
    Amplitude transmitted by the whole interferometer at ``z >= L``, as the
    sum of the round-trip series

    .. math::
        \\frac{\\sqrt{p_{inc}}e^{ik(z-L)}\\sqrt{T_1T_2}}
              {1-\\sqrt{R_1R_2}e^{2ikL}e^{i(\\theta_1+\\theta_2)}}

    :param mp: mirrors
    :type mp: :py:class:`.MirrorPair`
    :param geom: geometry
    :type geom: :py:class:`.CavityGeometry`
    :param z: position, defaults to ``L``
    """
    L = geom.length_wavelengths
    z = L if z is None else z
    if np.any(np.asarray(z) < L):
        raise InvalidParameterError(f"output amplitude is defined for z >= L (got {z})")
    d = mp.denominator(geom)
    a = _sqrt_power(p_inc)*np.exp(1j*WAVENUMBER*(np.asarray(z) - L))*mp.t1*mp.t2/d
    return _scalar(a)


def intracavity_amplitudes(p_inc, mp, geom, z):
    """
    Forward and backward amplitudes between the mirrors, at ``0 <= z <= L``.
    The backward series has no zeroth-order term: the backward wave only
    exists after a first reflection on the second mirror.

    :returns: ``(forward, backward)``
    """
    L = geom.length_wavelengths
    zz = np.asarray(z, dtype=float)
    if np.any((zz < 0) | (zz > L)):
        raise InvalidParameterError(f"intracavity amplitudes are defined for 0 <= z <= L (got {z})")
    d = mp.denominator(geom)
    sp = _sqrt_power(p_inc)
    k = WAVENUMBER
    forward = sp*mp.t1*np.exp(1j*k*(zz - L))/d
    backward = sp*mp.t1*mp.r2*np.exp(1j*(geom.kl + mp.theta2))*np.exp(-1j*k*(zz - L))/d
    return _scalar(forward), _scalar(backward)
