#!/usr/bin/env python3
"""
验收脚本：以完整的运行次数检查跟踪控制器的各项性质

Runs the full-size acceptance checks that the unit tests only sample:
exponential rate, finite-time settling, finite-time existence over a
batch, singularity avoidance, manifold preservation, the math-core
property sweep, invariance of the angle rate under a constant reference
offset and determinism. Every simulation uses the unbounded
reference ``t sin(3t) (1, 1, 1)``. Exits nonzero when any check fails.

    python scripts/verify_acceptance.py
    python scripts/verify_acceptance.py --runs 20 --oracle
"""

import argparse
import dataclasses
import filecmp
import logging
import math
import os
import sys
import tempfile
import time

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from attitude_core.analysis import (  # noqa: E402
    check_theta_monotone,
    detect_convergence_time,
    fit_exponential_rate,
    reference_offset_residual,
)
from attitude_core.config import SimConfig, load_config_text  # noqa: E402
from attitude_core.constants import CONTROLLER_TAGS  # noqa: E402
from attitude_core.controllers import ControllerKind, control  # noqa: E402
from attitude_core.errors import SingularityError  # noqa: E402
from attitude_core.integrator import simulate  # noqa: E402
from attitude_core.logger_utils import configure_logging  # noqa: E402
from attitude_core.so3 import (  # noqa: E402
    dist_frobenius,
    dist_geodesic,
    exp_so3,
    hat,
    log_so3,
    orthogonality_error,
    relative_rotation,
    rotation_angle,
    vee,
)
from services.batch_service import batch  # noqa: E402
from services.run_service import RunService  # noqa: E402

logger = logging.getLogger("verify_acceptance")


def base_config(tag: str, **changes) -> SimConfig:
    config = load_config_text(f'controller = "{tag}"\n', source="<acceptance>")
    return dataclasses.replace(config, **changes)


def theta0_of(config: SimConfig) -> float:
    state = config.initial_state()
    return rotation_angle(relative_rotation(state.R1, state.Rr))


def seeds_with_theta(tag: str, count: int, low: float) -> list[int]:
    """First ``count`` seeds whose random initial angle is at least ``low``."""
    config = base_config(tag)
    seeds, candidate = [], 0
    while len(seeds) < count:
        if theta0_of(config.with_seed(candidate)) >= low:
            seeds.append(candidate)
        candidate += 1
    return seeds


def check_exponential_rate(runs: int) -> tuple[bool, str]:
    worst = 0.0
    for seed in seeds_with_theta("asy_geo", runs, 0.5):
        records = simulate(base_config("asy_geo", t_final=5.0).with_seed(seed))
        worst = max(worst, abs(fit_exponential_rate(records) + 2.0))
    return worst <= 0.04, f"max |slope + 2| = {worst:.4f}"


def check_finite_time_bound(runs: int, oracle: bool) -> tuple[bool, str]:
    worst = 0.0
    for seed in seeds_with_theta("ftt_geo", runs, 0.5):
        records = simulate(base_config("ftt_geo", sample_every=1).with_seed(seed))
        detected = detect_convergence_time(records, 1e-6, "d_R")
        if detected is None:
            return False, f"seed {seed} never converged"
        worst = max(worst, abs(detected / (math.sqrt(2.0) * records[0].d_R) - 1.0))
    message = f"max relative error {worst:.4%}"
    if oracle:
        config = base_config("ftt_geo", sample_every=100).with_seed(0)
        config = dataclasses.replace(config, integrator=dataclasses.replace(config.integrator, h=1e-5))
        records = simulate(config)
        detected = detect_convergence_time(records, 1e-6, "d_R")
        error = abs(detected / (math.sqrt(2.0) * records[0].d_R) - 1.0)
        message += f", dense oracle {error:.4%}"
        worst = max(worst, error)
    return worst <= 0.02, message


def check_finite_time_existence(runs: int, out_dir: str) -> tuple[bool, str]:
    summary = batch(base_config("ftt_fro"), runs, 0, out_dir)
    converged = sum(1 for row in summary.rows if row.convergence_time is not None)
    ok = converged == runs and not summary.any_error
    return ok, f"{converged}/{runs} runs settled below d_F = 1e-6"


def check_singularity_and_manifold(runs: int) -> tuple[bool, bool, str, str]:
    aborts, worst_increment, worst_ortho = 0, 0.0, 0.0
    for tag in CONTROLLER_TAGS:
        for seed in range(runs):
            try:
                records = simulate(base_config(tag).with_seed(seed))
            except SingularityError:
                aborts += 1
                continue
            worst_increment = max(worst_increment, check_theta_monotone(records).max_increment)
            for r in records:
                worst_ortho = max(worst_ortho, orthogonality_error(r.rr_matrix()), orthogonality_error(r.r1_matrix()))
    avoid_ok = aborts == 0 and worst_increment <= 1e-6
    ortho_ok = worst_ortho < 1e-10
    return (
        avoid_ok,
        ortho_ok,
        f"{aborts} aborts, max theta increment {worst_increment:.2e}",
        f"max ||R^T R - I|| = {worst_ortho:.2e}",
    )


def check_math_core(samples: int) -> tuple[bool, str]:
    rng = np.random.default_rng(12345)
    worst_rt = worst_metric = worst_inv = 0.0
    hat_vee_ok = True
    for i in range(samples):
        axis = rng.standard_normal(3)
        axis /= np.linalg.norm(axis)
        theta = rng.uniform(0.0, math.pi - 1e-3)
        p = theta * axis
        R = exp_so3(p)
        worst_rt = max(worst_rt, float(np.max(np.abs(vee(log_so3(R)) - p))))
        hat_vee_ok &= bool(np.array_equal(vee(hat(p)), p))
        if i % 10 == 0:
            base = exp_so3(rng.uniform(-1.8, 1.8, 3))
            worst_metric = max(
                worst_metric,
                abs(dist_geodesic(base, base @ R) - theta),
                abs(dist_frobenius(base, base @ R) - 2.0 * math.sqrt(2.0) * math.sin(theta / 2.0)),
            )
        if i % 100 == 0 and 1e-3 < theta < math.pi - 1e-2:
            G = exp_so3(rng.uniform(-1.8, 1.8, 3))
            R1 = exp_so3(rng.uniform(-1.8, 1.8, 3))
            w = rng.standard_normal(3)
            for tag in CONTROLLER_TAGS:
                kind = ControllerKind(tag)
                a = control(kind, R1, R1 @ R, w).omega1
                b = control(kind, G @ R1, G @ R1 @ R, w).omega1
                worst_inv = max(worst_inv, float(np.max(np.abs(a - b))))
    ok = worst_rt <= 1e-9 and worst_metric <= 1e-9 and hat_vee_ok and worst_inv <= 1e-12
    return ok, f"round trip {worst_rt:.1e}, metrics {worst_metric:.1e}, invariance {worst_inv:.1e}"


def check_reference_offset(runs: int) -> tuple[bool, str]:
    worst = 0.0
    offset = (0.5, -1.0, 2.0)
    for tag in CONTROLLER_TAGS:
        for seed in range(runs):
            config = base_config(tag, t_final=3.0).with_seed(seed)
            records = simulate(config)
            worst = max(
                worst,
                reference_offset_residual(records, config.controller, config.reference, offset, sample_time=config.integrator.h),
            )
    return worst <= 1e-8, f"max theta' change under a constant offset {worst:.1e}"


def check_determinism(out_dir: str) -> tuple[bool, str]:
    service = RunService()
    config = base_config("ftt_fro").with_seed(7)
    paths = []
    for name in ("a", "b"):
        csv_path = os.path.join(out_dir, f"{name}.csv")
        report_path = os.path.join(out_dir, f"{name}.txt")
        service.execute(config, csv_path, report_path)
        paths.append((csv_path, report_path))
    same = all(filecmp.cmp(x, y, shallow=False) for x, y in zip(paths[0], paths[1]))
    return same, "CSV and report byte-identical" if same else "outputs differ"


def main() -> int:
    parser = argparse.ArgumentParser(description="Full acceptance checks")
    parser.add_argument("--runs", type=int, default=20, help="random inits for the rate and settling checks")
    parser.add_argument("--batch-runs", type=int, default=100, help="runs for the batch checks")
    parser.add_argument("--samples", type=int, default=100000, help="math-core round trips")
    parser.add_argument("--oracle", action="store_true", help="also run the dense h = 1e-5 oracle")
    args = parser.parse_args()
    configure_logging("WARNING")

    print("🔍 Acceptance checks for the attitude tracking simulator")
    print("=" * 60)
    results = []
    with tempfile.TemporaryDirectory() as tmp:
        checks = [
            ("exponential rate (asy_geo)", lambda: check_exponential_rate(args.runs)),
            ("finite-time bound (ftt_geo)", lambda: check_finite_time_bound(args.runs, args.oracle)),
            ("finite-time existence (ftt_fro)", lambda: check_finite_time_existence(args.batch_runs, tmp)),
            ("math core", lambda: check_math_core(args.samples)),
            ("reference offset invariance", lambda: check_reference_offset(args.runs)),
            ("determinism", lambda: check_determinism(tmp)),
        ]
        for name, check in checks:
            start = time.perf_counter()
            ok, message = check()
            results.append(ok)
            print(f"  {'✅' if ok else '❌'} {name:<34} {message} ({time.perf_counter() - start:.1f} s)")

        start = time.perf_counter()
        avoid_ok, ortho_ok, avoid_msg, ortho_msg = check_singularity_and_manifold(args.batch_runs)
        elapsed = time.perf_counter() - start
        results.extend([avoid_ok, ortho_ok])
        print(f"  {'✅' if avoid_ok else '❌'} {'singularity avoidance':<34} {avoid_msg} ({elapsed:.1f} s)")
        print(f"  {'✅' if ortho_ok else '❌'} {'manifold preservation':<34} {ortho_msg}")

    print("=" * 60)
    passed = sum(results)
    print(f"{passed}/{len(results)} checks passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
