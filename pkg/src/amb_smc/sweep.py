"""Cross-product parameter sweeps over independent runs."""
from __future__ import annotations

import csv
import itertools
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .config import ConfigError, apply_overrides, config_from_mapping, dump_config, parse_value, resolve_key, set_path
from .output import write_csv, write_jsonl, write_metrics
from .sim import RunMetrics, run

METRIC_FIELDS = tuple(RunMetrics.__dataclass_fields__)


def parse_axis(spec: str):
    """``"k=10,25,50"`` -> ``("k", [10, 25, 50])``."""
    key, sep, values = spec.partition("=")
    if not sep or not values:
        raise ConfigError(f"axis {spec!r} is not key=v1,v2,...")
    resolve_key(key.strip())
    return key.strip(), [parse_value(v.strip()) for v in values.split(",")]


def cell_seed(base_seed: int, index: int) -> int:
    return base_seed + index


def _run_cell(job):
    index, mapping, assignment, out_dir, log_format = job
    row = {key: value for key, value in assignment}
    row["cell"] = index
    row["seed"] = mapping.get("scenario", {}).get("seed")
    row["error"] = ""
    try:
        cfg = config_from_mapping(mapping)
    except ConfigError as exc:
        row.update({name: None for name in METRIC_FIELDS})
        row["converged"] = False
        row["error"] = str(exc)
        return row
    records, metrics = run(cfg)
    row.update(metrics.to_dict())
    if out_dir is not None:
        cell_dir = Path(out_dir) / f"cell_{index:03d}"
        cell_dir.mkdir(parents=True, exist_ok=True)
        (cell_dir / "config.toml").write_text(dump_config(cfg))
        writer = write_csv if log_format == "csv" else write_jsonl
        writer(records, cell_dir / f"log.{log_format}")
        write_metrics(metrics, cell_dir / "metrics.json")
    return row


def sweep(base: dict, axes, cap: int = 256, workers: Optional[int] = None,
          output_dir=None, log_format: str = "csv") -> list[dict]:
    """Run every combination of ``axes`` on top of the ``base`` config mapping.

    ``axes`` is a list of ``(key, values)``.  Cell ``n`` uses seed
    ``base_seed + n``, so an empty sweep reproduces a plain run.  Invalid
    cells are reported in their row and the sweep continues.
    """
    axes = [(key, list(values)) for key, values in axes]
    combos = list(itertools.product(*[[(key, v) for v in values] for key, values in axes]))
    if len(combos) > cap:
        raise ConfigError(f"sweep has {len(combos)} cells, cap is {cap}")
    base_seed = base.get("scenario", {}).get("seed", 0)
    jobs = []
    for index, assignment in enumerate(combos):
        mapping = apply_overrides(base, [])
        for key, value in assignment:
            set_path(mapping, resolve_key(key), value)
        set_path(mapping, ("scenario", "seed"), cell_seed(base_seed, index))
        jobs.append((index, mapping, assignment, output_dir, log_format))
    if workers is not None and workers <= 1 or len(jobs) == 1:
        return [_run_cell(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_cell, jobs))


def write_sweep_csv(rows, keys, path) -> Path:
    path = Path(path)
    columns = list(keys) + ["cell", "seed"] + list(METRIC_FIELDS) + ["error"]
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c) for c in columns})
    return path
