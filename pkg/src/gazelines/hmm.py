"""Discrete hidden Markov model engine.

Row-stochastic parameters, scaled forward likelihood, multi-sequence
Baum-Welch training and log-space Viterbi decoding. Observation symbols and
state labels are 1-based throughout this API (they are line numbers); the
compiled kernels work 0-based internally.

All types are immutable values and every operation is a pure function of
its inputs, so concurrent use needs no locking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .errors import DataFormatError, NumericError, SymbolRangeError

STOCHASTIC_TOL = 1e-12
PROB_FLOOR = 1e-10


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HmmParams:
    """Prior vector, transition matrix and emission matrix.

    ``transition[i, j]`` is the probability of moving from state ``i + 1``
    to state ``j + 1``; ``emission[i, j]`` is the probability of observing
    symbol ``j + 1`` while in state ``i + 1`` (rows index the hidden
    state). Construction only checks shapes; call :func:`validate` for the
    stochastic invariants.
    """

    prior: np.ndarray
    transition: np.ndarray
    emission: np.ndarray

    def __post_init__(self):
        prior = _frozen(self.prior, np.float64)
        transition = _frozen(self.transition, np.float64)
        emission = _frozen(self.emission, np.float64)
        if prior.ndim != 1:
            raise ValueError("prior must be a 1-D vector")
        n = prior.shape[0]
        if transition.shape != (n, n):
            raise ValueError(f"transition must be {n}x{n}, got {transition.shape}")
        if emission.shape != (n, n):
            raise ValueError(f"emission must be {n}x{n}, got {emission.shape}")
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "emission", emission)

    @property
    def n_states(self) -> int:
        return self.prior.shape[0]


@dataclass(frozen=True)
class ObservationSequence:
    """A run of discretized observations; symbols are 1-based line numbers."""

    symbols: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.symbols)
        if raw.dtype.kind not in "iu":
            raise ValueError("observation symbols must be integers")
        symbols = _frozen(raw, np.int64)
        if symbols.ndim != 1:
            raise ValueError("observation symbols must form a 1-D sequence")
        if symbols.shape[0] == 0:
            raise ValueError("observation sequence must be non-empty")
        if symbols.min() < 1:
            raise SymbolRangeError(f"symbol {int(symbols.min())} below 1")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return self.symbols.shape[0]

    def __iter__(self):
        return iter(self.symbols)


@dataclass(frozen=True)
class StatePath:
    """Decoded state sequence with its joint log-probability."""

    states: np.ndarray
    log_prob: float

    def __post_init__(self):
        states = _frozen(np.asarray(self.states), np.int64)
        if states.ndim != 1 or states.shape[0] == 0:
            raise ValueError("state path must be a non-empty 1-D sequence")
        if self.log_prob > 0.0:
            raise ValueError(f"path log-probability {self.log_prob} above 0")
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return self.states.shape[0]


@dataclass(frozen=True)
class TrainingTrace:
    """Per-iteration total log-likelihoods from Baum-Welch."""

    log_likelihoods: tuple
    iterations_run: int
    converged: bool


Observations = Union[ObservationSequence, Sequence[int], np.ndarray]


def validate(params: HmmParams) -> Optional[str]:
    """Check the stochastic invariants; return None when all hold.

    Otherwise return a description of the first violated invariant (rows
    are reported 1-based).
    """
    if params.n_states < 2:
        return "n_states must be at least 2"
    for name, mat in (
        ("prior", params.prior[np.newaxis, :]),
        ("transition", params.transition),
        ("emission", params.emission),
    ):
        if not np.isfinite(mat).all():
            return f"{name} contains a non-finite entry"
        if (mat < 0.0).any() or (mat > 1.0).any():
            return f"{name} has an entry outside [0, 1]"
    if abs(params.prior.sum() - 1.0) > STOCHASTIC_TOL:
        return f"prior not stochastic (sums to {params.prior.sum()!r})"
    for name, mat in (("transition", params.transition), ("emission", params.emission)):
        sums = mat.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > STOCHASTIC_TOL)[0]
        if bad.size:
            return f"{name} row {bad[0] + 1} not stochastic (sums to {sums[bad[0]]!r})"
    return None


def _require_valid(params: HmmParams) -> None:
    violation = validate(params)
    if violation is not None:
        raise ValueError(f"invalid HMM parameters: {violation}")


def _symbols0(obs: Observations, n_states: int) -> np.ndarray:
    """1-based symbols as a 0-based int64 array, range-checked."""
    seq = obs if isinstance(obs, ObservationSequence) else ObservationSequence(np.asarray(obs))
    top = int(seq.symbols.max())
    if top > n_states:
        raise SymbolRangeError(f"symbol {top} out of range for {n_states} states")
    return seq.symbols - 1


def forward_log_likelihood(params: HmmParams, obs: Observations) -> float:
    """log P(obs | params), computed with a per-step scaled forward pass.

    Scaling keeps runs of length 10,000 and beyond in range; an impossible
    observation run yields -inf.
    """
    _require_valid(params)
    sym = _symbols0(obs, params.n_states)
    loglik, _, _ = _kernels.forward_scaled(params.prior, params.transition, params.emission, sym)
    return float(loglik)


def viterbi(params: HmmParams, obs: Observations) -> StatePath:
    """Most probable hidden-state path for the observations.

    Argmax ties resolve to the lower state index, so the result is fully
    deterministic. Runs in O(n_states^2 * T).
    """
    _require_valid(params)
    sym = _symbols0(obs, params.n_states)
    with np.errstate(divide="ignore"):
        log_prior = np.log(params.prior)
        log_transition = np.log(params.transition)
        log_emission = np.log(params.emission)
    path0, log_prob = _kernels.viterbi_path(log_prior, log_transition, log_emission, sym)
    return StatePath(states=path0 + 1, log_prob=float(log_prob))


def _floored_rows(mat: np.ndarray) -> np.ndarray:
    """Floor every entry at PROB_FLOOR and renormalize rows to sum to 1."""
    out = np.maximum(mat, PROB_FLOOR)
    return out / out.sum(axis=-1, keepdims=True)


def baum_welch(
    init: HmmParams,
    sequences: Sequence[Observations],
    max_iters: int = 100,
    tol: float = 1e-4,
) -> tuple[HmmParams, TrainingTrace]:
    """Multi-sequence Baum-Welch (EM) estimation starting from ``init``.

    E-step statistics are summed over all sequences before each M-step.
    After every M-step each row is floored at 1e-10 and renormalized so
    sparse data cannot permanently starve a state or symbol. Training
    stops when the absolute improvement of the total log-likelihood drops
    below ``tol``, or after ``max_iters`` E-steps. The recorded
    log-likelihoods are those of the parameters entering each iteration,
    so the trace is non-decreasing up to floating-point noise.
    """
    _require_valid(init)
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    sequences = list(sequences)
    if not sequences:
        raise ValueError("at least one training sequence is required")
    n = init.n_states
    seqs = [_symbols0(s, n) for s in sequences]

    prior = np.array(init.prior)
    transition = np.array(init.transition)
    emission = np.array(init.emission)

    trace: list = []
    converged = False
    for _ in range(max_iters):
        total_ll = 0.0
        gamma0 = np.zeros(n)
        trans_num = np.zeros((n, n))
        trans_den = np.zeros(n)
        emis_num = np.zeros((n, n))
        for sym in seqs:
            ll, g0, tn, td, en = _kernels.estep_counts(prior, transition, emission, sym)
            if ll == -np.inf:
                raise NumericError(
                    "a training sequence has zero probability under the current parameters"
                )
            total_ll += ll
            gamma0 += g0
            trans_num += tn
            trans_den += td
            emis_num += en
        trace.append(total_ll)
        if len(trace) >= 2 and trace[-1] - trace[-2] < tol:
            converged = True
            break

        new_transition = transition.copy()
        rows = trans_den > 0.0
        new_transition[rows] = trans_num[rows] / trans_den[rows, np.newaxis]
        emis_den = emis_num.sum(axis=1)
        new_emission = emission.copy()
        rows = emis_den > 0.0
        new_emission[rows] = emis_num[rows] / emis_den[rows, np.newaxis]

        prior = _floored_rows(gamma0 / len(seqs))
        transition = _floored_rows(new_transition)
        emission = _floored_rows(new_emission)

    params = HmmParams(prior=prior, transition=transition, emission=emission)
    return params, TrainingTrace(tuple(trace), len(trace), converged)


def params_to_text(params: HmmParams) -> str:
    """Plain-text form: n_states, prior row, transition rows, emission rows.

    Values are written with repr so a round-trip restores them exactly
    (beyond 15 significant digits).
    """
    lines = [str(params.n_states), " ".join(repr(float(v)) for v in params.prior)]
    for mat in (params.transition, params.emission):
        lines.extend(" ".join(repr(float(v)) for v in row) for row in mat)
    return "\n".join(lines) + "\n"


def params_from_text(text: str) -> HmmParams:
    """Parse the plain-text matrix format written by :func:`params_to_text`."""
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 1:
        raise DataFormatError("expected the state count on the first line")
    try:
        n = int(rows[0][0])
    except ValueError as exc:
        raise DataFormatError(f"invalid state count {rows[0][0]!r}") from exc
    if n < 1:
        raise DataFormatError(f"invalid state count {n}")
    if len(rows) != 2 + 2 * n:
        raise DataFormatError(f"expected {2 + 2 * n} lines for {n} states, got {len(rows)}")
    try:
        values = [[float(v) for v in row] for row in rows[1:]]
    except ValueError as exc:
        raise DataFormatError(f"invalid matrix entry: {exc}") from exc
    if any(len(row) != n for row in values):
        raise DataFormatError(f"every matrix row must have {n} entries")
    return HmmParams(
        prior=np.array(values[0]),
        transition=np.array(values[1 : 1 + n]),
        emission=np.array(values[1 + n :]),
    )


def save_params(params: HmmParams, path) -> None:
    """Write parameters to ``path`` in the plain-text matrix format."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(params_to_text(params))


def load_params(path) -> HmmParams:
    """Read parameters from a plain-text matrix file."""
    with open(path, "r", encoding="utf-8") as f:
        return params_from_text(f.read())
