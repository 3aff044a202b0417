import math
import unittest

import numpy as np

from qfpi.errors import InvalidParameterError
from qfpi.solver import DeviceConfig, SolverSettings, solve
from qfpi.transport import (
    Direction,
    average_intracavity,
    average_intracavity_scaling,
    backward_phase_offset,
    intracavity_profile,
    rectify,
    transmit,
)


class TestDirection(unittest.TestCase):
    def test_parse(self):
        self.assertIs(Direction.parse("ltr"), Direction.LEFT_TO_RIGHT)
        self.assertIs(Direction.parse("21"), Direction.RIGHT_TO_LEFT)
        self.assertIs(Direction.parse("Right_To_Left"), Direction.RIGHT_TO_LEFT)
        with self.assertRaises(InvalidParameterError):
            Direction.parse("up")


class TestTransmit(unittest.TestCase):
    def test_half_wavelength(self):
        T, sol = transmit(0.1, DeviceConfig.from_values(length=0.5))
        self.assertTrue(sol.converged)
        self.assertAlmostEqual(T, 0.943, delta=1e-3)
    def test_transparent(self):
        T, sol = transmit(1.0, DeviceConfig.from_values(length=0.3, dw1=1e6, dw2=1e6))
        self.assertAlmostEqual(T, 1.0, delta=1e-6)
    def test_right_to_left(self):
        dev = DeviceConfig.from_values(length=0.3, dw1=0.4)
        T21, sol = transmit(0.2, dev, Direction.RIGHT_TO_LEFT)
        self.assertEqual(T21, solve(0.2, dev.swapped()).transmittance)
    def test_unconverged(self):
        T, sol = transmit(0.1, DeviceConfig.from_values(length=1),
                          s=SolverSettings(max_iterations=2))
        self.assertTrue(math.isnan(T))
        self.assertFalse(sol.converged)


class TestRectify(unittest.TestCase):
    def test_reciprocity(self):
        rng = np.random.default_rng(0)
        converged = 0
        for _ in range(10):
            dw = rng.uniform(-2, 2)
            dev = DeviceConfig.from_values(length=rng.uniform(0, 1), dw1=dw, dw2=dw)
            res = rectify(10**rng.uniform(-2, 0), dev)
            if res.both_converged:
                converged += 1
                self.assertLessEqual(res.r_factor, 1e-10)
        self.assertGreaterEqual(converged, 8)
    def test_swap(self):
        dev = DeviceConfig.from_values(length=0.3, dw1=0.8, gamma2=1.5)
        res = rectify(0.1, dev)
        inv = rectify(0.1, dev.swapped())
        self.assertTrue(res.both_converged and inv.both_converged)
        self.assertEqual((inv.t12, inv.t21), (res.t21, res.t12))
        self.assertEqual(inv.r_factor, res.r_factor)
        self.assertAlmostEqual(inv.l_factor, res.t21*res.r_factor, delta=1e-15)
    def test_asymmetric(self):
        res = rectify(0.1, DeviceConfig.from_values(length=0.3, dw1=0.8))
        self.assertTrue(res.both_converged)
        self.assertTrue(0 <= res.r_factor <= 1)
        self.assertAlmostEqual(res.l_factor, res.t12*res.r_factor)
        self.assertAlmostEqual(res.r_factor, abs(res.t12 - res.t21)/(res.t12 + res.t21))
        self.assertEqual(res.solution_21.p_inc, res.solution_12.p_inc)
    def test_zero_transmission(self):
        res = rectify(0.0, DeviceConfig.from_values(length=1))
        self.assertEqual((res.t12, res.t21, res.r_factor, res.l_factor), (0.0, 0.0, 0.0, 0.0))
    def test_unconverged(self):
        res = rectify(0.1, DeviceConfig.from_values(length=1, dw1=0.3),
                      SolverSettings(max_iterations=2))
        self.assertFalse(res.both_converged)
        self.assertTrue(math.isnan(res.r_factor))


class TestProfile(unittest.TestCase):
    def test_quadrature(self):
        dev = DeviceConfig.from_values(length=0.8, dw1=0.3)
        prof = intracavity_profile(0.05, dev, n_samples=2001)
        self.assertEqual(len(prof.positions), 2001)
        self.assertEqual(prof.positions[-1], 0.8)
        self.assertTrue(np.all(prof.intensities >= 0))
        self.assertAlmostEqual(prof.average/prof.quadrature_average, 1, delta=1e-6)
    def test_zero_length(self):
        dev = DeviceConfig.from_values(length=0.0, dw1=0.3)
        prof = intracavity_profile(0.05, dev, n_samples=5)
        self.assertTrue(np.allclose(prof.positions, 0))
        self.assertAlmostEqual(prof.average, prof.intensities[0], delta=1e-12)
    def test_nodes(self):
        dev = DeviceConfig.from_values(length=1)
        prof = intracavity_profile(0.1, dev, n_samples=2001)
        peak = prof.intensities.max()
        for i in (0, 1000, 2000):
            self.assertLessEqual(prof.intensities[i], 0.05*peak)
    def test_flat_without_second_mirror(self):
        dev = DeviceConfig.from_values(length=0.7, dw1=0.2, dw2=1e9)
        prof = intracavity_profile(0.05, dev, n_samples=101)
        self.assertTrue(prof.solution.converged)
        level = prof.intensities.max()
        self.assertGreater(level, 0)
        self.assertLessEqual(level - prof.intensities.min(), 1e-8*level)
    def test_reuse_solution(self):
        dev = DeviceConfig.from_values(length=0.4)
        sol = solve(0.2, dev)
        prof = intracavity_profile(0.2, dev, n_samples=11, solution=sol)
        self.assertIs(prof.solution, sol)
        self.assertEqual(prof.average, average_intracavity(0.2, dev, sol))
    def test_invalid(self):
        with self.assertRaises(InvalidParameterError):
            intracavity_profile(0.1, DeviceConfig.from_values(), n_samples=1)
    def test_zero_power(self):
        prof = intracavity_profile(0.0, DeviceConfig.from_values(length=0.5), n_samples=3)
        self.assertEqual(list(prof.intensities), [0.0, 0.0, 0.0])
        self.assertEqual(prof.average, 0.0)


class TestScaling(unittest.TestCase):
    def test_points(self):
        dev = DeviceConfig.from_values(length=1)
        pts = average_intracavity_scaling(dev, [1e-4, 1e-3, 0.0])
        self.assertEqual([p.p_inc for p in pts], [1e-4, 1e-3, 0.0])
        self.assertTrue(all(p.converged for p in pts))
        self.assertEqual(pts[2].average, 0.0)
        # intracavity power builds up well above the incident power
        self.assertGreater(pts[0].average/1e-4, pts[1].average/1e-3)
    def test_buildup(self):
        dev = DeviceConfig.from_values(length=1)
        powers = [1e-4, 1e-3, 5e-3]
        for pt in average_intracavity_scaling(dev, powers):
            self.assertTrue(pt.converged)
            self.assertGreater(pt.average, pt.p_inc)


class TestPhaseOffset(unittest.TestCase):
    def test_node(self):
        for L in (1, 3):
            dev = DeviceConfig.from_values(length=L)
            for R in (0.2, 0.7):
                self.assertAlmostEqual(backward_phase_offset(0.5, dev, R, R), math.pi, delta=1e-9)
    def test_off_resonance(self):
        dev = DeviceConfig.from_values(length=1, dw1=0.5, dw2=0.5)
        self.assertGreater(abs(backward_phase_offset(0.5, dev, 0.5, 0.5) - math.pi), 0.1)
    def test_invalid(self):
        with self.assertRaises(InvalidParameterError):
            backward_phase_offset(0.0, DeviceConfig.from_values(length=1), 0.5, 0.5)
