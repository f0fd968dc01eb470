import math
import unittest

import numpy as np
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats
from scipy.spatial.transform import Rotation as ScipyRotation

from attitude_core.errors import ManifoldError, SingularityError
from attitude_core.so3 import (
    E1,
    E2,
    E3,
    IDENTITY,
    dist_frobenius,
    dist_frobenius_trace,
    dist_geodesic,
    dist_hyperbolic,
    exp_so3,
    hat,
    is_rotation,
    log_so3,
    orthogonality_error,
    project_to_so3,
    random_rotation,
    relative_rotation,
    rotation_angle,
    vee,
)

vectors = arrays(np.float64, (3,), elements=st.floats(min_value=-10.0, max_value=10.0))
directions = arrays(np.float64, (3,), elements=st.floats(min_value=-1.0, max_value=1.0)).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)
angles = st.floats(min_value=1e-12, max_value=math.pi - 1e-3)


def axis_angle(direction, angle):
    return angle * direction / np.linalg.norm(direction)


class TestHatVee(unittest.TestCase):
    @seed(11)
    @settings(max_examples=300, deadline=None)
    @given(vectors)
    def test_exact_inverses(self, p):
        self.assertTrue(np.array_equal(vee(hat(p)), p))
        S = hat(p)
        self.assertTrue(np.array_equal(hat(vee(S)), S))
        self.assertTrue(np.array_equal(S, -S.T))

    def test_hat_is_cross_product(self):
        p = np.array([0.3, -1.2, 2.0])
        q = np.array([-0.7, 0.4, 1.1])
        np.testing.assert_allclose(hat(p) @ q, np.cross(p, q), atol=1e-15)

    def test_vee_rejects_symmetric_input(self):
        with self.assertRaises(ManifoldError):
            vee(np.diag([1.0, 2.0, 3.0]))


class TestExpLog(unittest.TestCase):
    def test_identity_cases(self):
        np.testing.assert_array_equal(exp_so3(np.zeros(3)), IDENTITY)
        np.testing.assert_array_equal(log_so3(IDENTITY), np.zeros((3, 3)))

    def test_quarter_turn_about_z(self):
        R = exp_so3([0.0, 0.0, math.pi / 2])
        expected = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        np.testing.assert_allclose(R, expected, atol=1e-15)

    def test_log_refuses_angle_pi(self):
        for E in (E1, E2, E3):
            with self.assertRaises(SingularityError):
                log_so3(E)
        with self.assertRaises(SingularityError):
            log_so3(exp_so3([0.0, math.pi - 1e-7, 0.0]))

    def test_log_just_inside_the_margin(self):
        p = np.array([math.pi - 1e-3, 0.0, 0.0])
        np.testing.assert_allclose(vee(log_so3(exp_so3(p))), p, atol=1e-9)

    def test_small_angle_series_keeps_precision(self):
        p = np.array([1e-8, -2e-8, 3e-9])
        R = exp_so3(p)
        np.testing.assert_allclose(vee(log_so3(R)), p, rtol=1e-12, atol=0.0)
        self.assertAlmostEqual(rotation_angle(R), float(np.linalg.norm(p)), delta=1e-20)

    def test_series_threshold_is_continuous(self):
        axis = np.array([0.6, 0.0, 0.8])
        below = exp_so3((1e-4 - 1e-12) * axis)
        above = exp_so3((1e-4 + 1e-12) * axis)
        self.assertLess(np.linalg.norm(below - above), 1e-11)

    @seed(12)
    @settings(max_examples=300, deadline=None)
    @given(directions, angles)
    def test_matches_scipy_rotation(self, direction, angle):
        p = axis_angle(direction, angle)
        np.testing.assert_allclose(exp_so3(p), ScipyRotation.from_rotvec(p).as_matrix(), atol=1e-12)

    @seed(13)
    @settings(max_examples=500, deadline=None)
    @given(directions, angles)
    def test_round_trip(self, direction, angle):
        p = axis_angle(direction, angle)
        R = exp_so3(p)
        self.assertTrue(is_rotation(R))
        np.testing.assert_allclose(vee(log_so3(R)), p, atol=1e-9)
        self.assertAlmostEqual(rotation_angle(R), angle, delta=1e-9)

    def test_round_trip_seeded_sweep(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(20000):
            axis = rng.standard_normal(3)
            axis /= np.linalg.norm(axis)
            p = rng.uniform(0.0, math.pi - 1e-3) * axis
            worst = max(worst, float(np.max(np.abs(vee(log_so3(exp_so3(p))) - p))))
        self.assertLess(worst, 1e-9)


class TestMetrics(unittest.TestCase):
    @seed(21)
    @settings(max_examples=300, deadline=None)
    @given(directions, directions, angles)
    def test_distance_identities(self, base_dir, rel_dir, angle):
        R1 = exp_so3(axis_angle(base_dir, 1.0))
        R2 = R1 @ exp_so3(axis_angle(rel_dir, angle))
        self.assertAlmostEqual(dist_geodesic(R1, R2), angle, delta=1e-9)
        self.assertAlmostEqual(dist_frobenius(R1, R2), 2.0 * math.sqrt(2.0) * math.sin(angle / 2.0), delta=1e-9)
        self.assertAlmostEqual(dist_geodesic(R1, R2), dist_geodesic(R2, R1), delta=1e-9)

    def test_trace_form_agrees(self):
        R1 = exp_so3([0.2, 0.5, -0.4])
        R2 = exp_so3([-1.0, 0.3, 0.9])
        self.assertAlmostEqual(dist_frobenius_trace(R1, R2), dist_frobenius(R1, R2), delta=1e-12)

    def test_frobenius_bound_at_antipode(self):
        self.assertAlmostEqual(dist_frobenius(IDENTITY, E3), 2.0 * math.sqrt(2.0), delta=1e-15)

    def test_hyperbolic_distance(self):
        R = exp_so3([0.1, 0.2, 0.3])
        self.assertEqual(dist_hyperbolic(R, R), 0.0)
        p, q = np.array([0.5, 0.0, 0.0]), np.array([0.0, 0.7, 0.0])
        self.assertAlmostEqual(dist_hyperbolic(exp_so3(p), exp_so3(q)), np.linalg.norm(hat(p) - hat(q)), delta=1e-12)

    def test_relative_rotation(self):
        R1 = exp_so3([0.3, 0.1, 0.0])
        R2 = exp_so3([0.0, -0.4, 0.2])
        np.testing.assert_allclose(R1 @ relative_rotation(R1, R2), R2, atol=1e-15)

    def test_rotation_angle_is_clamped(self):
        self.assertEqual(rotation_angle(IDENTITY * (1.0 + 1e-12)), 0.0)
        self.assertAlmostEqual(rotation_angle(E1 * (1.0 + 1e-12)), math.pi, delta=1e-15)


class TestProjection(unittest.TestCase):
    def test_projection_removes_drift(self):
        rng = np.random.default_rng(5)
        R = exp_so3([0.4, -0.9, 1.3])
        M = R + 1e-6 * rng.standard_normal((3, 3))
        P = project_to_so3(M)
        self.assertTrue(is_rotation(P, tol=1e-12))
        U, _, Vt = np.linalg.svd(M)
        np.testing.assert_allclose(P, U @ Vt, atol=1e-12)
        self.assertLess(orthogonality_error(P), 1e-13)

    def test_projection_is_idempotent_on_rotations(self):
        R = exp_so3([1.0, 2.0, -0.5])
        np.testing.assert_allclose(project_to_so3(R), R, atol=1e-14)

    def test_projection_rejects_reflections_and_rank_loss(self):
        with self.assertRaises(ManifoldError):
            project_to_so3(np.diag([1.0, 1.0, -1.0]))
        with self.assertRaises(ManifoldError):
            project_to_so3(np.diag([1.0, 1.0, 0.0]))


class TestRandomRotation(unittest.TestCase):
    def test_seeded_and_bounded(self):
        a = random_rotation(3, 1.5)
        b = random_rotation(3, 1.5)
        np.testing.assert_array_equal(a, b)
        rng = np.random.default_rng(0)
        for _ in range(200):
            R = random_rotation(rng, 1.5)
            self.assertTrue(is_rotation(R))
            theta = rotation_angle(R)
            self.assertGreater(theta, 0.0)
            self.assertLessEqual(theta, 1.5 + 1e-12)

    def test_angle_distribution_is_uniform(self):
        rng = np.random.default_rng(2024)
        samples = [rotation_angle(random_rotation(rng, 3.0)) for _ in range(10_000)]
        result = stats.kstest(samples, stats.uniform(loc=0.0, scale=3.0).cdf)
        self.assertLess(result.statistic, 0.02)

    def test_rejects_invalid_bound(self):
        for bad in (0.0, -1.0, math.pi, 4.0):
            with self.assertRaises(ValueError):
                random_rotation(0, bad)


if __name__ == "__main__":
    unittest.main()
