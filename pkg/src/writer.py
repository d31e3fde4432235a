import json
import os

import polars as pl

from src.config import Config
from src.models import SweepRow
from src.simulation.gates import GateSequence

SWEEP_SCHEMA = {
    'gamma': pl.Float64,
    'algorithm': pl.Utf8,
    'backend': pl.Utf8,
    'p1_bar': pl.Float64,
    'p2_bar': pl.Float64,
    'success': pl.Float64,
    'stderr': pl.Float64,
}


def output_path(filename: str, path: str | None = None) -> str:
    """Explicit path, or `filename` under the configured output directory."""
    return path or os.path.join(Config.default().output_dir, filename)


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_run_record(record: dict, path: str) -> str:
    """Write a run record as indented JSON; identical records give identical files."""
    _ensure_parent(path)
    with open(path, 'w') as fh:
        fh.write(json.dumps(record, indent=2) + '\n')
    print(f'\nRun record written to {path}')
    return path


def sweep_frame(rows: list[SweepRow]) -> pl.DataFrame:
    return pl.DataFrame([row.model_dump() for row in rows], schema=SWEEP_SCHEMA)


def write_sweep_csv(rows: list[SweepRow], path: str) -> str:
    """CSV with the fixed header gamma,algorithm,backend,p1_bar,p2_bar,success,stderr."""
    _ensure_parent(path)
    sweep_frame(rows).write_csv(path)
    print(f'\nSweep written to {path}')
    return path


def write_gate_text(sequence: GateSequence, path: str) -> str:
    _ensure_parent(path)
    with open(path, 'w') as fh:
        fh.write(sequence.to_text())
    print(f'\nCircuit written to {path}')
    return path
