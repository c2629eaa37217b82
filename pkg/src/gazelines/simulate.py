"""Synthetic reading-gaze generator with per-sample line labels.

A simulated page sweeps the gaze left to right along each line in turn at a
fixed sampling rate, adds Gaussian measurement noise to both coordinates,
and records which line produced every sample. Pages use a unit line width
(the region is ``n_lines`` line-widths tall), so the noise level ``sigma``
is expressed directly in line-widths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import signal

from .errors import SymbolRangeError
from .geometry import Fixation, TextRegion, line_centers


@dataclass(frozen=True)
class SimConfig:
    """Simulator knobs.

    ``t_line`` seconds are spent reading each line and ``t_return`` seconds
    sweeping back between lines, sampled at ``sample_hz``. With
    ``repeat_range=(lo, hi)`` every line is read a uniformly random number
    of consecutive times in ``[lo, hi]``; ``None`` reads each line exactly
    once. ``noise_corr`` is an AR(1) coefficient giving time-correlated
    noise with the same marginal spread; zero keeps samples independent.

    ``include_return_sweep`` additionally emits samples during each
    right-to-left return, labeled with the upcoming line and interpolated
    in y. It is off by default so a page holds exactly
    :func:`samples_per_page` samples; switching it on adds between-line
    samples whose labels no line position can match, which puts a floor
    under every downstream error rate.
    """

    t_line: float = 1.0
    t_return: float = 0.1
    sample_hz: float = 60.0
    n_pages: int = 50
    n_lines: int = 25
    sigma: float = 0.2
    repeat_range: Optional[tuple] = None
    seed: int = 0
    noise_corr: float = 0.0
    include_return_sweep: bool = False

    def __post_init__(self):
        if self.t_line <= 0.0:
            raise ValueError("t_line must be positive")
        if self.t_return < 0.0:
            raise ValueError("t_return cannot be negative")
        if self.sample_hz <= 0.0:
            raise ValueError("sample_hz must be positive")
        if self.n_pages < 1:
            raise ValueError("n_pages must be at least 1")
        if self.n_lines < 1:
            raise ValueError("n_lines must be at least 1")
        if self.sigma < 0.0:
            raise ValueError("sigma cannot be negative")
        if not 0.0 <= self.noise_corr < 1.0:
            raise ValueError("noise_corr must lie in [0, 1)")
        if self.repeat_range is not None:
            lo, hi = self.repeat_range
            if not (isinstance(lo, int) and isinstance(hi, int)):
                raise ValueError("repeat_range bounds must be integers")
            if lo < 1 or hi < lo:
                raise ValueError("repeat_range must satisfy 1 <= lo <= hi")
        if round(self.t_line * self.sample_hz) < 1:
            raise ValueError("t_line * sample_hz must give at least one sample per line")

    @property
    def region(self) -> TextRegion:
        """Unit-line-width page: n_lines line-widths tall and wide."""
        extent = float(self.n_lines)
        return TextRegion(y_top=0.0, y_bottom=extent, x_left=0.0, x_right=extent,
                          n_lines=self.n_lines)

    @property
    def line_samples(self) -> int:
        return int(round(self.t_line * self.sample_hz))

    @property
    def return_samples(self) -> int:
        return int(round(self.t_return * self.sample_hz))

    @property
    def mean_repeat(self) -> float:
        if self.repeat_range is None:
            return 1.0
        lo, hi = self.repeat_range
        return (lo + hi) / 2.0


@dataclass(frozen=True)
class LabeledPage:
    """One page of fixations with the true line behind every sample."""

    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray
    region: TextRegion

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        n = times.shape[0]
        if n == 0:
            raise ValueError("a page must contain at least one sample")
        if not (xs.shape[0] == ys.shape[0] == labels.shape[0] == n):
            raise ValueError("times, xs, ys and labels must have equal lengths")
        if labels.min() < 1 or labels.max() > self.region.n_lines:
            bad = int(labels.min()) if labels.min() < 1 else int(labels.max())
            raise SymbolRangeError(
                f"label {bad} out of range for a {self.region.n_lines}-line region"
            )
        for name, arr in (("times", times), ("xs", xs), ("ys", ys)):
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains a non-finite value")
        for arr in (times, xs, ys, labels):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.times.shape[0]

    def fixations(self) -> list:
        """Materialize the samples as :class:`~gazelines.geometry.Fixation`."""
        return [Fixation(t, x, y) for t, x, y in zip(self.times, self.xs, self.ys)]


def samples_per_page(config: SimConfig) -> int:
    """Expected number of reading samples on one page.

    This is line samples x lines x mean repeat factor; samples emitted
    during return sweeps (when enabled) are not counted. Exact when
    ``repeat_range`` is None.
    """
    return int(round(config.line_samples * config.n_lines * config.mean_repeat))


def _ar1(noise: np.ndarray, rho: float) -> np.ndarray:
    """AR(1)-filter white noise, preserving the marginal spread."""
    if rho == 0.0 or noise.shape[0] < 2:
        return noise
    driven = noise * np.sqrt(1.0 - rho * rho)
    driven[0] = noise[0]
    return signal.lfilter([1.0], [1.0, -rho], driven)


def simulate_page(config: SimConfig, page_index: int) -> LabeledPage:
    """Generate one labeled page, deterministic given (seed, page_index)."""
    rng = np.random.default_rng(config.seed + page_index)
    region = config.region
    centers = line_centers(region)
    n_sweep = config.line_samples
    sweep_frac = (np.arange(n_sweep) + 0.5) / n_sweep

    if config.repeat_range is None:
        visit_lines = list(range(1, config.n_lines + 1))
    else:
        lo, hi = config.repeat_range
        counts = rng.integers(lo, hi + 1, size=config.n_lines)
        visit_lines = [j for j, c in enumerate(counts, start=1) for _ in range(int(c))]

    xs_parts = []
    ys_parts = []
    label_parts = []
    n_return = config.return_samples
    for k, line in enumerate(visit_lines):
        if config.include_return_sweep and k > 0 and n_return > 0:
            prev = visit_lines[k - 1]
            frac = (np.arange(n_return) + 1.0) / (n_return + 1.0)
            xs_parts.append(region.x_right - frac * region.width)
            ys_parts.append(centers[prev - 1] + frac * (centers[line - 1] - centers[prev - 1]))
            label_parts.append(np.full(n_return, line, dtype=np.int64))
        xs_parts.append(region.x_left + sweep_frac * region.width)
        ys_parts.append(np.full(n_sweep, centers[line - 1]))
        label_parts.append(np.full(n_sweep, line, dtype=np.int64))

    xs = np.concatenate(xs_parts)
    ys = np.concatenate(ys_parts)
    labels = np.concatenate(label_parts)
    total = xs.shape[0]

    sigma_units = config.sigma * region.line_spacing
    if sigma_units > 0.0:
        xs = xs + _ar1(rng.normal(0.0, sigma_units, total), config.noise_corr)
        ys = ys + _ar1(rng.normal(0.0, sigma_units, total), config.noise_corr)

    times = np.arange(total) / config.sample_hz
    return LabeledPage(times=times, xs=xs, ys=ys, labels=labels, region=region)


def simulate_corpus(config: SimConfig) -> list:
    """Generate ``config.n_pages`` independent pages (seeds seed + index)."""
    return [simulate_page(config, p) for p in range(config.n_pages)]


def train_test_split(pages: Sequence[LabeledPage], n_train: int = 40) -> tuple:
    """Split a corpus into leading training pages and trailing test pages."""
    if not 1 <= n_train < len(pages):
        raise ValueError(
            f"n_train must be in [1, {len(pages) - 1}] for a {len(pages)}-page corpus"
        )
    return list(pages[:n_train]), list(pages[n_train:])
