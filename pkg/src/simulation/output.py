"""
Result artifacts: aggregate CSV, per-trial CSV, SVG rate curves and a JSON summary.
"""

import json
from pathlib import Path
from typing import Any, Dict, Sequence, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

from src.utils.logger import logger

from .experiment import AGGREGATE_COLUMNS, TrialRecord, aggregate

AXIS_LABELS = {
    "M": "M (files)",
    "B": "B (packets per file)",
    "L": "L (requests per user)",
    "n": "n (users)",
    "m": "m (files in library)",
    "gamma": "Zipf exponent",
    "a": "HgLC window a",
    "b": "HgLC window b",
}

PathLike = Union[str, Path]


def _as_table(data: Union[pd.DataFrame, Sequence[TrialRecord]]) -> pd.DataFrame:
    table = data if isinstance(data, pd.DataFrame) else aggregate(data)
    if table.empty:
        raise ValueError("no records to write")
    return table


def emit_csv(data: Union[pd.DataFrame, Sequence[TrialRecord]], path: PathLike) -> Path:
    """Aggregate table with columns sweep_param,value,scheme,mean_rate,ci95_lo,ci95_hi,trials."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _as_table(data)[AGGREGATE_COLUMNS].to_csv(path, index=False, float_format="%.10g")
    logger.info(f"Saved aggregate table to {path}")
    return path


def emit_trials_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.10g")
    return path


def emit_plot(data: Union[pd.DataFrame, Sequence[TrialRecord]], path: PathLike, title: str = None) -> Path:
    """Line chart of mean rate against the sweep value, one series per scheme."""
    table = _as_table(data)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    param = str(table["sweep_param"].iloc[0])

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for scheme, grp in table.groupby("scheme", sort=False):
        grp = grp.sort_values("value")
        line, = ax.plot(grp["value"], grp["mean_rate"], marker="o", label=scheme)
        if (grp["ci95_hi"] > grp["ci95_lo"]).any():
            ax.fill_between(grp["value"], grp["ci95_lo"], grp["ci95_hi"], color=line.get_color(), alpha=0.15)
    ax.set_xlabel(AXIS_LABELS.get(param, param))
    ax.set_ylabel("average rate (file units)")
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(linestyle="--", alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Saved rate plot to {path}")
    return path


def emit_json(payload: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(payload, f, indent=2, default=float)
    return path
