"""Trajectory and report file handling.

轨迹 CSV 与收敛报告的读写。所有写操作先写入同目录的临时文件，成功后
再原子替换目标文件，中断的运行不会留下截断的输出。
"""

from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from attitude_core.analysis import parse_report_text
from attitude_core.constants import CSV_HEADER, FLOAT_FORMAT, LOG_LEVEL
from attitude_core.errors import ParseError
from attitude_core.integrator import TrajectoryRecord

logger = logging.getLogger(__name__)
logger.setLevel(LOG_LEVEL)


def _fmt(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def record_to_row(record: TrajectoryRecord) -> list[str]:
    """Serialise one record in :data:`CSV_HEADER` order."""
    row = [_fmt(record.t)]
    row.extend(_fmt(x) for x in record.Rr)
    row.extend(_fmt(x) for x in record.R1)
    row.extend(_fmt(x) for x in (record.theta, record.d_R, record.d_F, record.W, record.omega1_norm))
    row.append("1" if record.regularized else "0")
    return row


def row_to_record(row: Sequence[str]) -> TrajectoryRecord:
    """Inverse of :func:`record_to_row`."""
    if len(row) != len(CSV_HEADER):
        raise ValueError(f"expected {len(CSV_HEADER)} columns, got {len(row)}")
    values = [float(x) for x in row[:-1]]
    return TrajectoryRecord(
        t=values[0],
        Rr=tuple(values[1:10]),
        R1=tuple(values[10:19]),
        theta=values[19],
        d_R=values[20],
        d_F=values[21],
        W=values[22],
        omega1_norm=values[23],
        regularized=row[-1].strip() == "1",
    )


def write_all_atomic(outputs: Mapping[str | Path, str]) -> list[Path]:
    """Write several files so that either all of them appear or none do.

    每个文件先写入同目录的临时文件，全部写完后再依次 ``os.replace``。
    任一步失败时删除临时文件和已经替换到位的文件，并重新抛出异常。
    """
    staged: list[tuple[str, Path]] = []
    placed: list[Path] = []
    try:
        for target, text in outputs.items():
            path = Path(target)
            fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
            staged.append((tmp_name, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        for tmp_name, path in staged:
            os.replace(tmp_name, path)
            placed.append(path)
            logger.debug("wrote %s", path)
    except BaseException:
        for tmp_name, _ in staged:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
        for path in placed:
            if path.exists():
                path.unlink()
        raise
    return placed


def write_atomic(path: str | Path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    return write_all_atomic({path: text})[0]


class TrajectoryService:
    """Service for trajectory CSV and report files."""

    def render_csv(self, records: Iterable[TrajectoryRecord]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record_to_row(record))
        return buffer.getvalue()

    def read_csv(self, path: str | Path) -> list[TrajectoryRecord]:
        """Load a trajectory CSV produced by :meth:`render_csv`."""
        path = Path(path)
        with path.open("r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or tuple(header) != CSV_HEADER:
                raise ParseError("unexpected CSV header", source=str(path), line=1)
            records = []
            for number, row in enumerate(reader, start=2):
                try:
                    records.append(row_to_record(row))
                except ValueError as exc:
                    raise ParseError(str(exc), source=str(path), line=number) from exc
        return records

    def read_report(self, path: str | Path) -> dict[str, str]:
        """Read a report rendered by :meth:`ConvergenceReport.to_text`."""
        return parse_report_text(Path(path).read_text(encoding="utf-8"))
