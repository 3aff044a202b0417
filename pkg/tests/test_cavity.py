import cmath
import math
import unittest

import numpy as np

from qfpi.cavity import (
    CavityGeometry,
    MirrorPair,
    fp_coefficients,
    incident_amplitude,
    intracavity_amplitudes,
    output_amplitude,
    transmittance_formula,
)
from qfpi.errors import InvalidParameterError, SingularCavityError
from qfpi.validation import series_intracavity_amplitudes, series_output_amplitude


class TestFabryPerot(unittest.TestCase):
    def test_coefficients(self):
        self.assertEqual(fp_coefficients(0, 0), (1.0, 0.0))
        F1, F2 = fp_coefficients(0.25, 0.25)
        self.assertAlmostEqual(F1, 1.0)
        self.assertAlmostEqual(F2, 16/9)
        rng = np.random.default_rng(0)
        R1, R2 = rng.uniform(0, 0.999, size=(2, 500))
        F1, F2 = fp_coefficients(R1, R2)
        self.assertTrue(np.all(F1 >= 1 - 1e-12))
        self.assertTrue(np.all(F2 >= 0))
    def test_singular(self):
        with self.assertRaises(SingularCavityError):
            fp_coefficients(1.0, 0.5)
        with self.assertRaises(ZeroDivisionError):
            transmittance_formula(0.5, 1.0, 0, 0)
        with self.assertRaises(InvalidParameterError):
            fp_coefficients(1.5, 0.5)
    def test_single_mirror(self):
        self.assertAlmostEqual(transmittance_formula(0.3, 0, -2.5, 0.7), 0.7, delta=1e-12)
    def test_bounds(self):
        rng = np.random.default_rng(1)
        R1, R2 = rng.uniform(0, 0.999, size=(2, 500))
        T = transmittance_formula(R1, R2, rng.uniform(-4.7, -1.6, 500), rng.uniform(0, 10, 500))
        self.assertTrue(np.all((T > 0) & (T <= 1 + 1e-12)))
    def test_periodic_in_length(self):
        a = transmittance_formula(0.4, 0.6, -math.pi, CavityGeometry(0.3).mu)
        b = transmittance_formula(0.4, 0.6, -math.pi, CavityGeometry(0.8).mu)
        self.assertAlmostEqual(a, b, delta=1e-12)


class TestAmplitudes(unittest.TestCase):
    def setUp(self):
        self.mp = MirrorPair.from_reflectances(0.4, 0.7, -2.9, -3.5)
        self.geom = CavityGeometry(0.37)
    def test_incident(self):
        a = incident_amplitude(4.0, CavityGeometry(0.25), 0.0)
        self.assertAlmostEqual(a, -2j, delta=1e-12)
        with self.assertRaises(InvalidParameterError):
            incident_amplitude(1.0, self.geom, 0.1)
    def test_transmittance_from_output(self):
        T = transmittance_formula(self.mp.R1, self.mp.R2, self.mp.theta_plus, self.geom.mu)
        self.assertAlmostEqual(abs(output_amplitude(1.0, self.mp, self.geom))**2, T, delta=1e-12)
    def test_output_phase_reference(self):
        a = output_amplitude(1.0, self.mp, self.geom)
        b = output_amplitude(1.0, self.mp, self.geom, z=self.geom.length_wavelengths + 1)
        self.assertAlmostEqual(abs(a - b), 0, delta=1e-12)
        with self.assertRaises(InvalidParameterError):
            output_amplitude(1.0, self.mp, self.geom, z=0.0)
    def test_series(self):
        s = self.mp.r1*self.mp.r2
        tail = s**64/(1 - s)
        self.assertLessEqual(abs(output_amplitude(1.0, self.mp, self.geom)
                                 - series_output_amplitude(1.0, self.mp, self.geom)),
                             self.mp.t1*self.mp.t2*tail + 1e-14)
        for z in (0.0, 0.2, 0.37):
            f, b = intracavity_amplitudes(1.0, self.mp, self.geom, z)
            sf, sb = series_intracavity_amplitudes(1.0, self.mp, self.geom, z)
            self.assertLessEqual(abs(f - sf), self.mp.t1*tail + 1e-14)
            self.assertLessEqual(abs(b - sb), self.mp.t1*self.mp.r2*tail + 1e-14)
    def test_vectorized_positions(self):
        z = np.linspace(0, 0.37, 11)
        f, b = intracavity_amplitudes(1.0, self.mp, self.geom, z)
        self.assertEqual(f.shape, (11,))
        f5, b5 = intracavity_amplitudes(1.0, self.mp, self.geom, z[5])
        self.assertAlmostEqual(f[5], f5)
        self.assertAlmostEqual(b[5], b5)
        with self.assertRaises(InvalidParameterError):
            intracavity_amplitudes(1.0, self.mp, self.geom, 0.5)
    def test_backward_ratio(self):
        z = np.linspace(0, 0.37, 9)
        f, b = intracavity_amplitudes(2.0, self.mp, self.geom, z)
        self.assertTrue(np.allclose(np.abs(b)**2/np.abs(f)**2, self.mp.R2, rtol=1e-12, atol=0))
    def test_flat_without_second_mirror(self):
        mp = MirrorPair.from_reflectances(0.6, 0.0, -2.9, -math.pi)
        f, b = intracavity_amplitudes(1.0, mp, self.geom, np.linspace(0, 0.37, 9))
        p = np.abs(f + b)**2
        self.assertLessEqual(p.max() - p.min(), 1e-8*p.max())
    def test_transparent(self):
        mp = MirrorPair.from_reflectances(0, 0, -math.pi, -math.pi)
        f, b = intracavity_amplitudes(1.0, mp, self.geom, 0.1)
        self.assertEqual(b, 0)
        self.assertAlmostEqual(cmath.phase(f), cmath.phase(cmath.exp(2j*math.pi*(0.1 - 0.37))))
    def test_singular_denominator(self):
        mp = MirrorPair.from_reflectances(1.0, 1.0, -math.pi, -math.pi)
        with self.assertRaises(SingularCavityError):
            output_amplitude(1.0, mp, CavityGeometry(1.0))
    def test_invalid_geometry(self):
        with self.assertRaises(InvalidParameterError):
            CavityGeometry(-0.1)
