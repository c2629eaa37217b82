"""Independent brute-force oracles used across the test suite.

These deliberately avoid the library's own recursions: paths are fully
enumerated and probabilities multiplied out directly, so they stay valid
reference points for the dynamic-programming implementations.
"""

import itertools

import numpy as np


def _path_matrix(n_states: int, length: int) -> np.ndarray:
    return np.array(list(itertools.product(range(n_states), repeat=length)), dtype=np.int64)


def all_path_log_probs(params, symbols) -> np.ndarray:
    """Joint log-probability of every state path, accumulated in time order."""
    symbols0 = np.asarray(symbols, dtype=np.int64) - 1
    paths = _path_matrix(params.n_states, symbols0.shape[0])
    with np.errstate(divide="ignore"):
        log_prior = np.log(params.prior)
        log_a = np.log(params.transition)
        log_b = np.log(params.emission)
    ll = log_prior[paths[:, 0]] + log_b[paths[:, 0], symbols0[0]]
    for t in range(1, symbols0.shape[0]):
        ll = ll + log_a[paths[:, t - 1], paths[:, t]] + log_b[paths[:, t], symbols0[t]]
    return ll


def best_path_log_prob(params, symbols) -> float:
    return float(all_path_log_probs(params, symbols).max())


def best_path_states(params, symbols) -> np.ndarray:
    """Argmax path with ties resolved to the lexicographically first path."""
    ll = all_path_log_probs(params, symbols)
    paths = _path_matrix(params.n_states, len(symbols))
    return paths[int(np.argmax(ll))] + 1


def total_probability(params, symbols) -> float:
    """Sum over all state paths in plain probability space (no logs)."""
    symbols0 = np.asarray(symbols, dtype=np.int64) - 1
    paths = _path_matrix(params.n_states, symbols0.shape[0])
    prob = params.prior[paths[:, 0]] * params.emission[paths[:, 0], symbols0[0]]
    for t in range(1, symbols0.shape[0]):
        prob = prob * (
            params.transition[paths[:, t - 1], paths[:, t]]
            * params.emission[paths[:, t], symbols0[t]]
        )
    return float(prob.sum())


def nearest_center_lines(ys, region) -> np.ndarray:
    """Nearest line center by explicit distance argmin (ties to lower index)."""
    centers = region.y_top + (np.arange(1, region.n_lines + 1) - 0.5) * (
        (region.y_bottom - region.y_top) / region.n_lines
    )
    distances = np.abs(np.asarray(ys, dtype=np.float64)[:, None] - centers[None, :])
    return np.argmin(distances, axis=1) + 1


def random_params(rng, n_states: int):
    """A random valid parameter set (dirichlet rows)."""
    from gazelines.hmm import HmmParams

    return HmmParams(
        prior=rng.dirichlet(np.ones(n_states)),
        transition=rng.dirichlet(np.ones(n_states), n_states),
        emission=rng.dirichlet(np.ones(n_states), n_states),
    )
