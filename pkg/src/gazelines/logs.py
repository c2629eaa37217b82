"""Fixation-log CSV ingestion and export.

The on-disk format is a plain CSV with header ``t,x,y`` or ``t,x,y,label``:
seconds, screen coordinates, and an optional 1-based line label. Floats are
written with repr, so export followed by parse restores the exact values.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import DataFormatError
from .geometry import Fixation, TextRegion
from .simulate import LabeledPage

logger = logging.getLogger(__name__)

_HEADERS = (["t", "x", "y"], ["t", "x", "y", "label"])


@dataclass(frozen=True)
class FixationLog:
    """Parsed fixation rows plus whatever source metadata is known."""

    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    labels: Optional[np.ndarray] = None
    sample_hz: Optional[float] = None
    n_dropped: int = 0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        if not (times.shape[0] == xs.shape[0] == ys.shape[0]):
            raise ValueError("times, xs and ys must have equal lengths")
        if times.shape[0] == 0:
            raise ValueError("a fixation log must contain at least one row")
        if np.any(np.diff(times) < 0.0):
            raise ValueError("timestamps must be non-decreasing")
        if not (np.isfinite(xs).all() and np.isfinite(ys).all() and np.isfinite(times).all()):
            raise ValueError("fixation coordinates must be finite")
        labels = self.labels
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape[0] != times.shape[0]:
                raise ValueError("labels must match the number of rows")
            labels.setflags(write=False)
        for arr in (times, xs, ys):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.times.shape[0]

    def fixations(self) -> list:
        return [Fixation(t, x, y) for t, x, y in zip(self.times, self.xs, self.ys)]

    def to_page(self, region: TextRegion) -> LabeledPage:
        """View the log as a labeled page against ``region``."""
        if self.labels is None:
            raise ValueError("log has no labels; cannot build a labeled page")
        return LabeledPage(
            times=self.times, xs=self.xs, ys=self.ys, labels=self.labels, region=region
        )


def _parse_float(text: str, what: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise DataFormatError(f"line {line_no}: invalid {what} value {text!r}") from exc


def parse_fixation_csv(
    path,
    *,
    on_invalid: str = "error",
    require_label: bool = False,
    sample_hz: Optional[float] = None,
    drop_outside: Optional[TextRegion] = None,
) -> FixationLog:
    """Parse a fixation CSV, reporting problems with their line number.

    Rows with NaN or infinite coordinates are rejected according to
    ``on_invalid``: ``"error"`` aborts with the offending line,
    ``"drop"`` skips them and counts the drops. With ``drop_outside`` set,
    rows landing outside that region are dropped as well; the default is
    to keep them, since downstream discretization clamps and prediction
    sequences then stay aligned with any ground-truth labels.
    """
    if on_invalid not in ("error", "drop"):
        raise ValueError("on_invalid must be 'error' or 'drop'")
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, expected a t,x,y[,label] header")
        header = [h.strip().lower() for h in header]
        if header not in _HEADERS:
            raise DataFormatError(
                f"{path}: missing or invalid header {header!r}; expected t,x,y or t,x,y,label"
            )
        has_label = len(header) == 4
        if require_label and not has_label:
            raise DataFormatError(f"{path}: a label column is required")

        times, xs, ys, labels, line_nos = [], [], [], [], []
        dropped = 0
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"line {line_no}: expected {len(header)} fields, got {len(row)}"
                )
            t = _parse_float(row[0], "t", line_no)
            x = _parse_float(row[1], "x", line_no)
            y = _parse_float(row[2], "y", line_no)
            if not (math.isfinite(t) and math.isfinite(x) and math.isfinite(y)):
                if on_invalid == "drop":
                    dropped += 1
                    continue
                raise DataFormatError(f"line {line_no}: non-finite coordinate")
            if drop_outside is not None and not (
                drop_outside.x_left <= x <= drop_outside.x_right
                and drop_outside.y_top <= y <= drop_outside.y_bottom
            ):
                dropped += 1
                continue
            if has_label:
                try:
                    label = int(row[3])
                except ValueError as exc:
                    raise DataFormatError(
                        f"line {line_no}: invalid label value {row[3]!r}"
                    ) from exc
                if label < 1:
                    raise DataFormatError(f"line {line_no}: label {label} below 1")
                labels.append(label)
            times.append(t)
            xs.append(x)
            ys.append(y)
            line_nos.append(line_no)

    if not times:
        raise DataFormatError(f"{path}: no data rows")
    t_arr = np.array(times)
    bad = np.nonzero(np.diff(t_arr) < 0.0)[0]
    if bad.size:
        raise DataFormatError(
            f"line {line_nos[int(bad[0]) + 1]}: timestamp decreases "
            "(row order must follow time)"
        )
    logger.info("parsed %d rows from %s (%d dropped)", len(times), path, dropped)
    return FixationLog(
        times=t_arr,
        xs=np.array(xs),
        ys=np.array(ys),
        labels=np.array(labels) if has_label else None,
        sample_hz=sample_hz,
        n_dropped=dropped,
    )


def write_fixation_csv(path, data: Union[LabeledPage, FixationLog]) -> Path:
    """Export a page or log to the fixation CSV format."""
    path = Path(path)
    labels = data.labels
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if labels is not None:
            writer.writerow(["t", "x", "y", "label"])
            for t, x, y, lab in zip(data.times, data.xs, data.ys, labels):
                writer.writerow([repr(float(t)), repr(float(x)), repr(float(y)), int(lab)])
        else:
            writer.writerow(["t", "x", "y"])
            for t, x, y in zip(data.times, data.xs, data.ys):
                writer.writerow([repr(float(t)), repr(float(x)), repr(float(y))])
    return path
