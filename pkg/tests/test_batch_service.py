import csv
import os
import tempfile
import unittest

from attitude_core.config import InitSpec, SimConfig
from attitude_core.constants import EXIT_FAILURE, EXIT_OK, EXIT_SINGULARITY, SUMMARY_HEADER
from attitude_core.controllers import ControllerKind
from attitude_core.integrator import IntegratorSpec
from attitude_core.reference import ReferenceKind
from services.batch_service import BatchService, batch
from services.run_service import RunResult, RunService


def template(tag="ftt_fro", t_final=6.0):
    return SimConfig(
        controller=ControllerKind(tag),
        reference=ReferenceKind.paper_sim(),
        init=InitSpec(seed=0, theta_max=3.0),
        integrator=IntegratorSpec(h=1e-3),
        t_final=t_final,
        sample_every=10,
    )


class FailingRunService(RunService):
    """Aborts every odd seed as if the run hit the singular set."""

    def execute(self, config, csv_path, report_path, plot_path=None):
        if config.init.seed % 2:
            return RunResult(EXIT_SINGULARITY, 0.5, error="singular", singularity_hit=True)
        return super().execute(config, csv_path, report_path, plot_path)


class TestBatchService(unittest.IsolatedAsyncioTestCase):
    async def test_rows_follow_seed_order(self):
        with tempfile.TemporaryDirectory() as tmp:
            summary = await BatchService(max_workers=3).run_batch(template(), 4, 10, tmp)
            self.assertEqual([row.seed for row in summary.rows], [10, 11, 12, 13])
            self.assertEqual(summary.exit_code, EXIT_OK)
            self.assertTrue(summary.all_theta_monotone)
            for row in summary.rows:
                self.assertIsNotNone(row.convergence_time)
                self.assertFalse(row.singularity_hit)
                self.assertTrue(os.path.exists(os.path.join(tmp, f"run_{row.seed}.csv")))
                self.assertTrue(os.path.exists(os.path.join(tmp, f"report_{row.seed}.txt")))
            with open(os.path.join(tmp, "summary.csv"), encoding="utf-8", newline="") as handle:
                rows = list(csv.reader(handle))
            self.assertEqual(tuple(rows[0]), SUMMARY_HEADER)
            self.assertEqual([r[0] for r in rows[1:]], ["10", "11", "12", "13"])

    async def test_failed_run_is_recorded(self):
        with tempfile.TemporaryDirectory() as tmp:
            service = BatchService(run_service=FailingRunService(), max_workers=2)
            summary = await service.run_batch(template(t_final=0.5), 3, 0, tmp)
            self.assertEqual(summary.exit_code, EXIT_FAILURE)
            self.assertIsNone(summary.rows[0].error)
            self.assertEqual(summary.rows[1].error, "singular")
            self.assertTrue(summary.rows[1].singularity_hit)
            self.assertFalse(summary.all_theta_monotone)
            self.assertFalse(os.path.exists(os.path.join(tmp, "run_1.csv")))

    async def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            await BatchService().run_batch(template(), 0, 0, tempfile.gettempdir())
        with self.assertRaises(ValueError):
            BatchService(max_workers=0)


class TestBatchDeterminism(unittest.TestCase):
    def test_same_seed_base_same_summary(self):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            first = batch(template("asy_geo", t_final=1.0), 3, 5, a, max_workers=3)
            second = batch(template("asy_geo", t_final=1.0), 3, 5, b, max_workers=1)
            self.assertEqual(first.to_csv(), second.to_csv())
            with open(os.path.join(a, "run_6.csv"), "rb") as fa, open(os.path.join(b, "run_6.csv"), "rb") as fb:
                self.assertEqual(fa.read(), fb.read())

    def test_single_run_matches_run_service(self):
        with tempfile.TemporaryDirectory() as tmp:
            summary = batch(template("ftt_geo", t_final=1.0), 1, 7, tmp)
            result = RunService().execute(
                template("ftt_geo", t_final=1.0).with_seed(7),
                os.path.join(tmp, "single.csv"),
                os.path.join(tmp, "single.txt"),
            )
            self.assertEqual(summary.rows[0].theta0, result.theta0)
            with open(os.path.join(tmp, "run_7.csv"), "rb") as fa, open(os.path.join(tmp, "single.csv"), "rb") as fb:
                self.assertEqual(fa.read(), fb.read())


if __name__ == "__main__":
    unittest.main()
