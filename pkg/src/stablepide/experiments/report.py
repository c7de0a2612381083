"""Experiment reports with lossless CSV and JSON round trips."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

RATE_COLUMNS = ("delta", "value", "error", "log2_delta", "log2_error", "runtime_ms")
CONSTANT_COLUMNS = ("delta", "M", "C", "q", "I1", "I2", "I_Delta", "R0", "R1", "R2", "Gamma")


def fit_slope(x: Sequence[float], err: Sequence[float], min_points: int = 4) -> float:
    """Least-squares slope of log(err) against log(x); NaN when undetermined."""
    x = np.asarray(x, dtype=float)
    e = np.asarray(err, dtype=float)
    ok = np.isfinite(e) & (e > 0.0) & (x > 0.0)
    if ok.sum() < min_points:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(e[ok]), 1)[0])


def tail_slope(x: Sequence[float], err: Sequence[float]) -> float:
    """Slope over the finest half of the ladder (at least two points)."""
    x = list(x)
    e = list(err)
    h = max(2, (len(x) + 1) // 2)
    return fit_slope(x[-h:], e[-h:], min_points=2)


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _parse_cell(s: str) -> Any:
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def _plain(v: Any) -> Any:
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@dataclass
class ExperimentReport:
    kind: str
    columns: list[str]
    rows: list[dict[str, Any]]
    fitted_slope: float = math.nan
    tail_slope: float = math.nan
    predicted_gamma: float = math.nan
    constants: dict[str, Any] = field(default_factory=dict)
    passes: dict[str, bool] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.passes.values())

    def column(self, name: str) -> list[Any]:
        return [r[name] for r in self.rows]

    # ---- CSV -------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(r[c]) for c in self.columns])
        return buf.getvalue()

    @staticmethod
    def rows_from_csv(text: str) -> tuple[list[str], list[dict[str, Any]]]:
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        return header, [dict(zip(header, (_parse_cell(c) for c in row))) for row in reader]

    # ---- JSON ------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return _plain(
            {
                "kind": self.kind,
                "columns": list(self.columns),
                "rows": [{c: r[c] for c in self.columns} for r in self.rows],
                "fitted_slope": self.fitted_slope,
                "tail_slope": self.tail_slope,
                "predicted_gamma": self.predicted_gamma,
                "constants": self.constants,
                "passes": self.passes,
                "provenance": self.provenance,
                "notes": self.notes,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentReport":
        return cls(
            kind=d["kind"],
            columns=list(d["columns"]),
            rows=[dict(r) for r in d["rows"]],
            fitted_slope=d["fitted_slope"],
            tail_slope=d["tail_slope"],
            predicted_gamma=d["predicted_gamma"],
            constants=d["constants"],
            passes=d["passes"],
            provenance=d["provenance"],
            notes=list(d["notes"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")
