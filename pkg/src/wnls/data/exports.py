"""
CSV exports.

Fixed column order, header row, no index column. Floats use pandas'
shortest round-trip representation, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, List, Sequence

import pandas as pd

from ..calculations.diagnostics import ObservableSeries
from ..calculations.errors import OutputError
from ..calculations.functionals import EnergyReport, MoserSweepResult

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["b", "alpha", "n_param", "ratio", "verdict"]
ENERGY_COLUMNS = ["mass", "kinetic", "potential", "hamiltonian", "class"]


def _write(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    logger.info(f"📦 Wrote {len(frame)} rows to {path}")
    return path


def write_observables_csv(series: ObservableSeries, path) -> Path:
    return _write(series.frame[ObservableSeries.COLUMNS], path)


def sweep_frame(results: Iterable[MoserSweepResult]) -> pd.DataFrame:
    frames = [r.to_frame() for r in results]
    if not frames:
        return pd.DataFrame(columns=SWEEP_COLUMNS)
    return pd.concat(frames, ignore_index=True)[SWEEP_COLUMNS]


def write_sweep_csv(results: Iterable[MoserSweepResult], path) -> Path:
    return _write(sweep_frame(results), path)


def write_energy_csv(report: EnergyReport, path) -> Path:
    frame = pd.DataFrame([dict(report.summary_rows())], columns=ENERGY_COLUMNS)
    return _write(frame, path)


def write_rows_csv(rows: Sequence[Sequence], columns: List[str], path) -> Path:
    """Generic table writer for probe results."""
    return _write(pd.DataFrame(list(rows), columns=columns), path)
