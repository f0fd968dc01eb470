import math
import unittest
from unittest import mock

import numpy as np

from attitude_core.config import InitSpec, SimConfig
from attitude_core.controllers import ControllerKind
from attitude_core.errors import SingularityError, StepError, ValidationError
from attitude_core.integrator import IntegratorSpec, SimState, simulate, step
from attitude_core.reference import ReferenceKind
from attitude_core.so3 import (
    IDENTITY,
    dist_geodesic,
    exp_so3,
    is_rotation,
    orthogonality_error,
    relative_rotation,
    rotation_angle,
)

EXPLICIT = InitSpec(rr=(0.3, -0.2, 0.5), r1=(1.4, 0.6, -0.9))


def make_config(tag="asy_geo", reference=None, init=EXPLICIT, method="lie_euler", h=1e-3, t_final=1.0, sample_every=10):
    return SimConfig(
        controller=ControllerKind(tag),
        reference=reference or ReferenceKind.zero(),
        init=init,
        integrator=IntegratorSpec(method=method, h=h),
        t_final=t_final,
        sample_every=sample_every,
    )


class TestIntegratorSpec(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ValueError):
            IntegratorSpec(method="rk45")
        with self.assertRaises(ValueError):
            IntegratorSpec(h=0.0)
        with self.assertRaises(ValueError):
            IntegratorSpec(reproject_every=0)


class TestStep(unittest.TestCase):
    def test_step_stays_on_the_group(self):
        config = make_config(reference=ReferenceKind.paper_sim())
        state = config.initial_state()
        for method in ("lie_euler", "lie_rk4"):
            spec = IntegratorSpec(method=method, h=1e-2)
            new_state = step(SimState(2.0, state.Rr, state.R1), config.controller, config.reference, spec)
            self.assertAlmostEqual(new_state.t, 2.01, delta=1e-15)
            self.assertTrue(is_rotation(new_state.Rr, tol=1e-13))
            self.assertTrue(is_rotation(new_state.R1, tol=1e-13))

    def test_lie_euler_contracts_the_angle_exactly(self):
        # 零参考下 Lie-Euler 每步把相对角乘以 (1 - h)
        config = make_config()
        state = config.initial_state()
        theta0 = rotation_angle(relative_rotation(state.R1, state.Rr))
        spec = config.integrator
        for _ in range(5):
            state = step(state, config.controller, config.reference, spec)
        theta = rotation_angle(relative_rotation(state.R1, state.Rr))
        self.assertAlmostEqual(theta, theta0 * (1.0 - spec.h) ** 5, delta=1e-13)

    def test_constant_rate_flow(self):
        # 常值角速度下 10 步 Lie-Euler 恰好转过 exp((1, 0, 0))
        reference = ReferenceKind.constant((1.0, 0.0, 0.0))
        spec = IntegratorSpec(h=0.1)
        state = SimState(0.0, IDENTITY, IDENTITY)
        for _ in range(10):
            state = step(state, ControllerKind("asy_geo"), reference, spec)
        expected = exp_so3([1.0, 0.0, 0.0])
        np.testing.assert_allclose(state.Rr, expected, atol=1e-14)
        np.testing.assert_allclose(state.R1, expected, atol=1e-14)


class TestSimulate(unittest.TestCase):
    def test_record_grid_and_final_time(self):
        records = simulate(make_config(t_final=0.0125, sample_every=5))
        times = [r.t for r in records]
        self.assertEqual(times[0], 0.0)
        self.assertAlmostEqual(times[1], 0.005, delta=1e-15)
        self.assertEqual(times[-1], 0.0125)
        self.assertEqual(len(records), 4)

    def test_deterministic(self):
        config = make_config(reference=ReferenceKind.paper_sim(), init=InitSpec(seed=4), t_final=0.5)
        self.assertEqual(simulate(config), simulate(config))

    def test_asy_geo_exponential_decay(self):
        for method, tol in (("lie_euler", 5e-4), ("lie_rk4", 1e-9)):
            records = simulate(make_config(method=method, t_final=1.0))
            theta0 = records[0].theta
            final = records[-1]
            self.assertAlmostEqual(final.t, 1.0, delta=1e-12)
            self.assertAlmostEqual(final.theta / theta0, math.exp(-1.0), delta=tol)
            self.assertAlmostEqual(final.W, final.d_R ** 2, delta=1e-15)

    def test_step_size_self_convergence(self):
        finals = {}
        for h in (1e-3, 1e-4):
            config = make_config(reference=ReferenceKind.paper_sim(), h=h, t_final=2.0, sample_every=1000)
            finals[h] = simulate(config)[-1]
        coarse, fine = finals[1e-3], finals[1e-4]
        self.assertEqual(coarse.t, fine.t)
        self.assertLess(dist_geodesic(coarse.rr_matrix(), fine.rr_matrix()), 5e-3)
        self.assertLess(dist_geodesic(coarse.r1_matrix(), fine.r1_matrix()), 5e-3)

    def test_record_fields(self):
        records = simulate(make_config(tag="asy_fro", t_final=0.1))
        first = records[0]
        np.testing.assert_allclose(first.rr_matrix(), exp_so3(EXPLICIT.rr), atol=1e-15)
        np.testing.assert_allclose(first.r1_matrix(), exp_so3(EXPLICIT.r1), atol=1e-15)
        self.assertAlmostEqual(first.W, 0.5 * first.d_F ** 2, delta=1e-15)
        self.assertAlmostEqual(first.d_F, 2.0 * math.sqrt(2.0) * math.sin(first.theta / 2.0), delta=1e-12)
        self.assertAlmostEqual(first.d_R, first.theta, delta=1e-12)
        self.assertEqual(first.error_measure("d_F"), first.d_F)
        with self.assertRaises(ValueError):
            first.error_measure("d_X")

    def test_manifold_preserved_with_unbounded_reference(self):
        config = make_config(tag="ftt_geo", reference=ReferenceKind.paper_sim(), init=InitSpec(seed=1), t_final=10.0)
        records = simulate(config)
        worst = max(max(orthogonality_error(r.rr_matrix()), orthogonality_error(r.r1_matrix())) for r in records)
        self.assertLess(worst, 1e-10)

    def test_singular_start_reports_time(self):
        config = make_config(init=InitSpec(rr=(0.0, 0.0, 0.0), r1=(math.pi, 0.0, 0.0)))
        with self.assertRaises(SingularityError) as ctx:
            simulate(config)
        self.assertEqual(ctx.exception.time, 0.0)

    def test_non_finite_step(self):
        nan_matrix = np.full((3, 3), np.nan)
        with mock.patch("attitude_core.integrator.exp_so3", return_value=nan_matrix):
            with self.assertRaises(StepError) as ctx:
                simulate(make_config(t_final=0.01))
        self.assertEqual(ctx.exception.time, 0.0)

    def test_negative_final_time(self):
        with self.assertRaises(ValidationError):
            simulate(make_config(t_final=-1.0))


if __name__ == "__main__":
    unittest.main()
