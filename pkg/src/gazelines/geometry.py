"""Text-region geometry: mapping fixations to line numbers.

The y axis points downward (screen convention): line 1 is the topmost line
and ``y_top < y_bottom``. Line centers divide the region height evenly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientDataError
from .hmm import ObservationSequence


@dataclass(frozen=True)
class Fixation:
    """One gaze sample: time in seconds plus screen coordinates."""

    t: float
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite fixation ({self.t}, {self.x}, {self.y})")


@dataclass(frozen=True)
class TextRegion:
    """Rectangle holding the block of text, with evenly spaced lines."""

    y_top: float
    y_bottom: float
    x_left: float
    x_right: float
    n_lines: int

    def __post_init__(self):
        vals = (self.y_top, self.y_bottom, self.x_left, self.x_right)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("region bounds must be finite")
        if not self.y_bottom > self.y_top:
            raise ValueError(f"y_bottom ({self.y_bottom}) must exceed y_top ({self.y_top})")
        if self.x_right < self.x_left:
            raise ValueError(f"x_right ({self.x_right}) below x_left ({self.x_left})")
        if self.n_lines < 1:
            raise ValueError("n_lines must be at least 1")

    @property
    def height(self) -> float:
        return self.y_bottom - self.y_top

    @property
    def width(self) -> float:
        return self.x_right - self.x_left

    @property
    def line_spacing(self) -> float:
        """Vertical distance between adjacent line centers (one line-width)."""
        return self.height / self.n_lines


def line_centers(region: TextRegion) -> np.ndarray:
    """Y-coordinate of every line center, top to bottom."""
    j = np.arange(1, region.n_lines + 1, dtype=np.float64)
    return region.y_top + (j - 0.5) * region.line_spacing


def discretize_ys(ys, region: TextRegion) -> np.ndarray:
    """Vectorized nearest-line classification of y coordinates.

    A point exactly on the halfway boundary between two lines takes the
    lower line number; points outside the region clamp to line 1 or
    ``n_lines``.
    """
    u = (np.asarray(ys, dtype=np.float64) - region.y_top) / region.line_spacing
    idx = np.ceil(u).astype(np.int64)
    return np.clip(idx, 1, region.n_lines)


def discretize(fix: Fixation, region: TextRegion) -> int:
    """Line number whose center is nearest to the fixation's y coordinate."""
    return int(discretize_ys(np.array([fix.y]), region)[0])


def discretize_page(fixes: Sequence[Fixation], region: TextRegion) -> ObservationSequence:
    """Discretize a page of fixations, preserving order and length."""
    if len(fixes) == 0:
        raise ValueError("cannot discretize an empty page")
    ys = np.array([f.y for f in fixes], dtype=np.float64)
    return ObservationSequence(discretize_ys(ys, region))


def _axis_bounds(values: np.ndarray, k_sigma: float, batch: int) -> tuple[float, float]:
    """Clean one coordinate axis and average its extreme points.

    One pass drops values beyond ``k_sigma`` standard deviations of the
    mean; the bounds are the means of the ``batch`` smallest and largest
    survivors.
    """
    mean = values.mean()
    std = values.std()
    kept = values[np.abs(values - mean) <= k_sigma * std]
    if kept.size < 2 * batch:
        raise InsufficientDataError(
            f"only {kept.size} points survive cleaning; need at least {2 * batch}"
        )
    ordered = np.sort(kept)
    return float(ordered[:batch].mean()), float(ordered[-batch:].mean())


def estimate_region(
    fixes: Sequence[Fixation],
    n_lines: int,
    k_sigma: float = 1.9,
    batch: int = 10,
) -> TextRegion:
    """Estimate the text region from fixation data alone.

    Each axis is cleaned independently with a single ``k_sigma`` pass, then
    bounded by batch-averaged extremes. Raises
    :class:`~gazelines.errors.InsufficientDataError` when too few points
    survive or the surviving points have no vertical extent.
    """
    if n_lines < 1:
        raise ValueError("n_lines must be at least 1")
    if k_sigma <= 0.0:
        raise ValueError("k_sigma must be positive")
    if batch < 1:
        raise ValueError("batch must be at least 1")
    xs = np.array([f.x for f in fixes], dtype=np.float64)
    ys = np.array([f.y for f in fixes], dtype=np.float64)
    y_top, y_bottom = _axis_bounds(ys, k_sigma, batch)
    x_left, x_right = _axis_bounds(xs, k_sigma, batch)
    if not y_bottom > y_top:
        raise InsufficientDataError("cleaned fixations have no vertical extent")
    return TextRegion(y_top=y_top, y_bottom=y_bottom, x_left=x_left, x_right=x_right, n_lines=n_lines)
