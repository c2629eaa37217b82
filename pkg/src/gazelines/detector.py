"""Line detection: HMM initialization, training, decoding and error metrics.

A :class:`LineDetector` couples trained HMM parameters to the text region
used for discretization. Training is unsupervised: page labels, when
present, are never consulted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DataFormatError
from .geometry import TextRegion, discretize_ys
from .hmm import (
    HmmParams,
    ObservationSequence,
    StatePath,
    baum_welch,
    params_from_text,
    params_to_text,
    viterbi,
)
from .simulate import LabeledPage

DEFAULT_WINDOW = 1200


def default_initial_params(n_lines: int, emission_diag: Optional[float] = None) -> HmmParams:
    """Initial HMM guess for a reader starting at the top of the page.

    The prior puts ``(100 - (n - 1)) / 100`` on line 1 and 0.01 on every
    other line; the transition matrix is tridiagonal with 0.9 on the
    diagonal and 0.05 one line up or down (0.1 on the single neighbor of
    the two end lines); the emission matrix carries the same concentrated
    diagonal as the prior with a constant 0.01 off the diagonal.

    ``emission_diag`` overrides the emission diagonal (off-diagonal mass
    stays constant per row); useful when a model trained on simulated
    data must tolerate a noisier real tracker.
    """
    if n_lines < 2:
        raise ValueError("n_lines must be at least 2")
    off = 1 / 100.0
    diag = (100 - (n_lines - 1)) / 100.0
    if diag <= off:
        raise ValueError(f"{n_lines} lines leave no diagonal emission mass; use fewer lines")

    prior = np.full(n_lines, off)
    prior[0] = diag

    transition = np.zeros((n_lines, n_lines))
    np.fill_diagonal(transition, 9 / 10.0)
    transition[0, 1] = 1 / 10.0
    transition[-1, -2] = 1 / 10.0
    for i in range(1, n_lines - 1):
        transition[i, i - 1] = 5 / 100.0
        transition[i, i + 1] = 5 / 100.0

    if emission_diag is None:
        emission_off, emission_diag = off, diag
    else:
        if not 0.0 < emission_diag < 1.0:
            raise ValueError("emission_diag must lie in (0, 1)")
        emission_off = (1.0 - emission_diag) / (n_lines - 1)
    emission = np.full((n_lines, n_lines), emission_off)
    np.fill_diagonal(emission, emission_diag)
    return HmmParams(prior=prior, transition=transition, emission=emission)


@dataclass(frozen=True)
class LineDetector:
    """Trained HMM parameters plus the region they discretize against."""

    params: HmmParams
    region: TextRegion

    def __post_init__(self):
        if self.params.n_states != self.region.n_lines:
            raise ValueError(
                f"model has {self.params.n_states} states but region has "
                f"{self.region.n_lines} lines"
            )

    @property
    def n_lines(self) -> int:
        return self.region.n_lines


@dataclass(frozen=True)
class EvalReport:
    """Per-page error percentages for one prediction method."""

    per_page_error: tuple
    method_tag: str

    def __post_init__(self):
        errors = tuple(float(e) for e in self.per_page_error)
        if any(not 0.0 <= e <= 100.0 for e in errors):
            raise ValueError("page errors are percentages in [0, 100]")
        object.__setattr__(self, "per_page_error", errors)

    @property
    def average_error(self) -> float:
        if not self.per_page_error:
            raise ValueError("report holds no pages")
        return float(np.mean(self.per_page_error))


PageOrObs = Union[LabeledPage, ObservationSequence, Sequence[int], np.ndarray]


def _page_observations(item: PageOrObs) -> ObservationSequence:
    if isinstance(item, LabeledPage):
        return ObservationSequence(discretize_ys(item.ys, item.region))
    if isinstance(item, ObservationSequence):
        return item
    return ObservationSequence(np.asarray(item))


def train(
    corpus: Sequence[PageOrObs],
    n_lines: Optional[int] = None,
    *,
    region: Optional[TextRegion] = None,
    max_iters: int = 100,
    tol: float = 1e-4,
    emission_diag: Optional[float] = None,
) -> LineDetector:
    """Train a detector on pages or pre-discretized observation runs.

    Pages are discretized against their own region first; labels are never
    used. ``n_lines`` may be omitted when the corpus consists of pages (it
    is taken from their region). For bare observation runs a unit-spacing
    region is synthesized unless ``region`` is given. ``emission_diag``
    passes through to :func:`default_initial_params`.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("training corpus is empty")

    page_regions = [item.region for item in corpus if isinstance(item, LabeledPage)]
    if page_regions:
        if any(r.n_lines != page_regions[0].n_lines for r in page_regions):
            raise ValueError("all training pages must share one line count")
        if n_lines is None:
            n_lines = page_regions[0].n_lines
        elif n_lines != page_regions[0].n_lines:
            raise ValueError(
                f"n_lines={n_lines} conflicts with the pages' {page_regions[0].n_lines}-line region"
            )
        if region is None:
            region = page_regions[0]
    if n_lines is None:
        raise ValueError("n_lines is required when training from observation runs")
    if region is None:
        extent = float(n_lines)
        region = TextRegion(0.0, extent, 0.0, extent, n_lines)

    sequences = [_page_observations(item) for item in corpus]
    init = default_initial_params(n_lines, emission_diag=emission_diag)
    params, _ = baum_welch(init, sequences, max_iters=max_iters, tol=tol)
    return LineDetector(params=params, region=region)


def detect_lines(model: LineDetector, obs: PageOrObs) -> StatePath:
    """Per-sample line estimates for a full observation batch (Viterbi)."""
    return viterbi(model.params, _page_observations(obs))


def detect_lines_windowed(
    model: LineDetector, obs: PageOrObs, window: int = DEFAULT_WINDOW
) -> StatePath:
    """Streaming-style decode: Viterbi over consecutive windows.

    Each window after the first replaces the prior with the transition row
    of the previous window's last decoded line, so state carries across
    window boundaries. The log-probability is the sum of the per-window
    path log-probabilities.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    symbols = _page_observations(obs).symbols
    states = []
    total = 0.0
    params = model.params
    for start in range(0, symbols.shape[0], window):
        chunk = ObservationSequence(symbols[start : start + window])
        if states:
            params = HmmParams(
                prior=model.params.transition[states[-1][-1] - 1],
                transition=model.params.transition,
                emission=model.params.emission,
            )
        path = viterbi(params, chunk)
        states.append(path.states)
        total += path.log_prob
    return StatePath(states=np.concatenate(states), log_prob=total)


def page_error(predicted: Union[StatePath, Sequence[int], np.ndarray], truth) -> float:
    """Percentage of samples whose predicted line differs from the truth."""
    pred = predicted.states if isinstance(predicted, StatePath) else np.asarray(predicted)
    actual = truth.labels if isinstance(truth, LabeledPage) else np.asarray(truth)
    if pred.shape[0] != actual.shape[0]:
        raise ValueError(f"prediction length {pred.shape[0]} != truth length {actual.shape[0]}")
    return 100.0 * np.count_nonzero(pred != actual) / pred.shape[0]


def average_error(page_errors: Iterable[float]) -> float:
    """Arithmetic mean of per-page error percentages."""
    errors = [float(e) for e in page_errors]
    if not errors:
        raise ValueError("at least one page error is required")
    return float(np.mean(errors))


REGION_HEADER = "region"


def detector_to_text(model: LineDetector) -> str:
    """Region header line followed by the plain-text HMM matrix block."""
    r = model.region
    header = (
        f"{REGION_HEADER} {float(r.y_top)!r} {float(r.y_bottom)!r} "
        f"{float(r.x_left)!r} {float(r.x_right)!r} {r.n_lines}\n"
    )
    return header + params_to_text(model.params)


def detector_from_text(text: str) -> LineDetector:
    """Parse the model file format written by :func:`detector_to_text`."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(REGION_HEADER):
        raise DataFormatError("model file must start with a region header line")
    fields = lines[0].split()
    if len(fields) != 6:
        raise DataFormatError("region header needs: region y_top y_bottom x_left x_right n_lines")
    try:
        region = TextRegion(
            y_top=float(fields[1]),
            y_bottom=float(fields[2]),
            x_left=float(fields[3]),
            x_right=float(fields[4]),
            n_lines=int(fields[5]),
        )
    except ValueError as exc:
        raise DataFormatError(f"invalid region header: {exc}") from exc
    params = params_from_text("\n".join(lines[1:]))
    return LineDetector(params=params, region=region)


def save_detector(model: LineDetector, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(detector_to_text(model))


def load_detector(path) -> LineDetector:
    with open(path, "r", encoding="utf-8") as f:
        return detector_from_text(f.read())
