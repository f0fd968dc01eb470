import math
import os
import tempfile
import unittest

from attitude_core.analysis import analyze_trajectory
from attitude_core.config import InitSpec, SimConfig
from attitude_core.constants import CSV_HEADER
from attitude_core.controllers import ControllerKind
from attitude_core.errors import ParseError
from attitude_core.integrator import IntegratorSpec, TrajectoryRecord, simulate
from services.trajectory_service import (
    TrajectoryService,
    record_to_row,
    row_to_record,
    write_all_atomic,
    write_atomic,
)

HEADER_LINE = (
    "t,Rr11,Rr12,Rr13,Rr21,Rr22,Rr23,Rr31,Rr32,Rr33,"
    "R111,R112,R113,R121,R122,R123,R131,R132,R133,"
    "theta,d_R,d_F,W,omega1_norm,regularized"
)


def short_run(tag="ftt_geo", seed=3):
    config = SimConfig(
        controller=ControllerKind(tag),
        init=InitSpec(seed=seed),
        integrator=IntegratorSpec(h=1e-3),
        t_final=0.3,
        sample_every=7,
    )
    return simulate(config)


class TestTrajectoryService(unittest.TestCase):
    def setUp(self):
        self.service = TrajectoryService()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_header_is_fixed(self):
        text = self.service.render_csv([])
        self.assertEqual(text, HEADER_LINE + "\n")
        self.assertEqual(len(CSV_HEADER), 25)

    def test_write_and_read_back_bit_exact(self):
        records = short_run()
        path = os.path.join(self.tmp.name, "run.csv")
        write_atomic(path, self.service.render_csv(records))
        loaded = self.service.read_csv(path)
        self.assertEqual(loaded, records)
        self.assertEqual(loaded[-1].t, 0.3)
        self.assertEqual(os.listdir(self.tmp.name), ["run.csv"])

    def test_nan_sentinel_and_flags(self):
        record = TrajectoryRecord(
            t=1.0,
            Rr=(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0),
            R1=(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0),
            theta=math.pi,
            d_R=float("nan"),
            d_F=2.0 * math.sqrt(2.0),
            W=4.0,
            omega1_norm=0.0,
            regularized=True,
        )
        row = record_to_row(record)
        self.assertEqual(row[20], "nan")
        self.assertEqual(row[-1], "1")
        self.assertEqual(row[0], "1")
        self.assertEqual(row[19], "3.1415926535897931")
        back = row_to_record(row)
        self.assertTrue(math.isnan(back.d_R))
        self.assertTrue(back.regularized)

    def test_deterministic_bytes(self):
        a = os.path.join(self.tmp.name, "a.csv")
        b = os.path.join(self.tmp.name, "b.csv")
        write_atomic(a, self.service.render_csv(short_run()))
        write_atomic(b, self.service.render_csv(short_run()))
        with open(a, "rb") as fa, open(b, "rb") as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_unwritable_directory_leaves_nothing(self):
        missing = os.path.join(self.tmp.name, "missing", "run.csv")
        with self.assertRaises(OSError):
            write_atomic(missing, self.service.render_csv(short_run()))
        self.assertFalse(os.path.exists(missing))
        self.assertEqual(os.listdir(self.tmp.name), [])

    def test_write_all_is_all_or_nothing(self):
        first = os.path.join(self.tmp.name, "a.csv")
        second = os.path.join(self.tmp.name, "missing", "b.txt")
        with self.assertRaises(OSError):
            write_all_atomic({first: "a\n", second: "b\n"})
        self.assertEqual(os.listdir(self.tmp.name), [])

    def test_write_all_places_every_file(self):
        targets = {os.path.join(self.tmp.name, name): name for name in ("a.csv", "b.txt", "c.svg")}
        placed = write_all_atomic(targets)
        self.assertEqual([str(p) for p in placed], list(targets))
        self.assertEqual(sorted(os.listdir(self.tmp.name)), ["a.csv", "b.txt", "c.svg"])

    def test_existing_file_is_replaced_whole(self):
        path = os.path.join(self.tmp.name, "run.csv")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("stale\n" * 1000)
        write_atomic(path, self.service.render_csv(short_run()))
        with open(path, encoding="utf-8") as handle:
            self.assertEqual(handle.readline().strip(), HEADER_LINE)
            self.assertNotIn("stale", handle.read())

    def test_bad_csv(self):
        path = os.path.join(self.tmp.name, "bad.csv")
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("t,x\n1,2\n")
        with self.assertRaises(ParseError):
            self.service.read_csv(path)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(HEADER_LINE + "\n1,2,3\n")
        with self.assertRaises(ParseError) as ctx:
            self.service.read_csv(path)
        self.assertEqual(ctx.exception.line, 2)

    def test_report_file(self):
        records = short_run("asy_geo")
        report = analyze_trajectory(records, ControllerKind("asy_geo"))
        path = os.path.join(self.tmp.name, "report.txt")
        write_atomic(path, report.to_text())
        values = self.service.read_report(path)
        self.assertEqual(values["controller"], "asy_geo")
        self.assertEqual(values["predicted_time"], "n/a")
        self.assertEqual(float(values["theta0"]), report.theta0)
        self.assertEqual(float(values["t_final"]), 0.3)


if __name__ == "__main__":
    unittest.main()
