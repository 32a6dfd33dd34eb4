"""Run-log and metrics files."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .sim import FIELDS, RunMetrics, SimRecord


def write_csv(records, path) -> Path:
    """Header plus one row per record.  Floats are written with ``repr`` so
    reading them back is exact."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIELDS)
        for rec in records:
            writer.writerow([repr(float(x)) for x in rec])
    return path


def read_csv(path) -> list[SimRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != FIELDS:
            raise ValueError(f"unexpected header {header!r}")
        return [SimRecord(*map(float, row)) for row in reader]


def write_jsonl(records, path) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec._asdict()) + "\n")
    return path


def read_jsonl(path) -> list[SimRecord]:
    with Path(path).open() as fh:
        return [SimRecord(**json.loads(line)) for line in fh if line.strip()]


def write_metrics(metrics: RunMetrics, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(metrics.to_dict(), indent=2) + "\n")
    return path
