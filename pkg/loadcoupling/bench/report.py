import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import Optional, Sequence, Union

import pandas as pd

from loadcoupling.errors import InvalidConfigError

from .experiment import ExperimentReport

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "demand",
    "method",
    "objective_kind",
    "objective",
    "bound",
    "sum_load_mc",
    "sum_load_sc",
    "max_load_mc",
    "max_load_sc",
    "jt_ue_count",
    "seconds",
    "seed",
    "status",
    "load_feasible",
]

FORMATS = ("csv", "json")


def report_frame(reports: Sequence[ExperimentReport]) -> pd.DataFrame:
    """One row per (seed, demand, method) in run order, CSV columns only."""
    records = [
        {key: getattr(row, key) for key in CSV_COLUMNS}
        for report in reports
        for row in report.rows
    ]
    return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)


def summarize(reports: Sequence[ExperimentReport]) -> pd.DataFrame:
    return summarize_frame(report_frame(reports))


def summarize_frame(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Mean of every numeric column per (demand, method) over the seeds.

    A (demand, method) is load feasible only if it is for every seed. With
    a single seed the rows are returned unchanged.
    """
    if frame.empty or frame["seed"].nunique() < 2:
        return frame
    numeric = [c for c in CSV_COLUMNS
               if c not in ("method", "objective_kind", "status", "seed",
                            "demand", "load_feasible")]
    groups = frame.groupby(["demand", "method", "objective_kind"], sort=False)
    grouped = groups[numeric].mean().reset_index()
    grouped["seed"] = "mean"
    grouped["status"] = groups["status"].agg(
        lambda s: s.iloc[0] if s.nunique() == 1 else "mixed"
    ).to_numpy()
    grouped["load_feasible"] = groups["load_feasible"].all().to_numpy()
    return grouped[CSV_COLUMNS]


def _json_payload(reports: Sequence[ExperimentReport]) -> list:
    payload = []
    for report in reports:
        rows = []
        for row in report.rows:
            item = dataclasses.asdict(row)
            item["gap"] = row.gap
            rows.append(item)
        payload.append({
            "seed": report.seed,
            "calibrated": report.calibrated,
            "demands": report.demands,
            "config": report.config,
            "rows": rows,
        })
    return payload


def json_safe(value):
    """value with every NaN or infinite float replaced by None."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    return value


def render_report(reports: Sequence[ExperimentReport], fmt: str = "csv",
                  summary: bool = False) -> str:
    if fmt not in FORMATS:
        raise InvalidConfigError(f"format must be one of {FORMATS}, got {fmt!r}")
    if fmt == "csv":
        frame = summarize(reports) if summary else report_frame(reports)
        return render_frame(frame)
    return json.dumps(json_safe(_json_payload(reports)), indent=2,
                      sort_keys=True) + "\n"


def emit_report(reports: Sequence[ExperimentReport],
                path: Optional[Union[str, Path]] = None, fmt: str = "csv",
                summary: bool = False) -> str:
    """
    Render reports as CSV or JSON and write them to path when given.

    Output depends only on the report contents, so the same runs always
    produce the same bytes (wall-clock columns are zero unless timing is on).

    Returns:
        str: The rendered text.
    """
    text = render_report(reports, fmt, summary)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"Wrote {fmt} report to {path}")
    return text


def render_frame(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format="%.10g")


def load_csv_report(path: Union[str, Path]) -> pd.DataFrame:
    """
    Read a CSV report written by emit_report.

    Raises:
        InvalidConfigError: A report column is missing.
    """
    frame = pd.read_csv(path)
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise InvalidConfigError(f"{path} is not a report, missing {missing}")
    return frame[CSV_COLUMNS]


def summarize_csv(paths: Sequence[Union[str, Path]]) -> pd.DataFrame:
    """Per (demand, method) means over the rows of several CSV reports."""
    frames = [load_csv_report(path) for path in paths]
    if not frames:
        return pd.DataFrame(columns=CSV_COLUMNS)
    return summarize_frame(pd.concat(frames, ignore_index=True))
