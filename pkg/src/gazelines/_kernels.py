"""Compiled inner loops for the HMM engine.

Everything here works on plain float64 matrices and 0-based int64
observation arrays so numba can compile it; the wrappers in ``hmm`` own
validation and the 1-based symbol convention. Loops are written in a fixed
sequential order so results are reproducible bit-for-bit.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def forward_scaled(prior, transition, emission, obs):
    """Scaled forward pass.

    Returns ``(log_likelihood, alpha, scales)`` where ``alpha[t]`` is the
    filtered state distribution (normalized to sum to 1) and ``scales[t]``
    the per-step normalizer. A zero scale means the observed prefix has
    probability zero; the log-likelihood is then -inf and the rows beyond
    that step are unspecified.
    """
    n = prior.shape[0]
    T = obs.shape[0]
    alpha = np.zeros((T, n))
    scales = np.zeros(T)

    c = 0.0
    for i in range(n):
        v = prior[i] * emission[i, obs[0]]
        alpha[0, i] = v
        c += v
    scales[0] = c
    if c == 0.0:
        return -np.inf, alpha, scales
    for i in range(n):
        alpha[0, i] /= c
    loglik = np.log(c)

    for t in range(1, T):
        o = obs[t]
        c = 0.0
        for j in range(n):
            acc = 0.0
            for i in range(n):
                acc += alpha[t - 1, i] * transition[i, j]
            v = acc * emission[j, o]
            alpha[t, j] = v
            c += v
        scales[t] = c
        if c == 0.0:
            return -np.inf, alpha, scales
        for j in range(n):
            alpha[t, j] /= c
        loglik += np.log(c)

    return loglik, alpha, scales


@njit(cache=True)
def estep_counts(prior, transition, emission, obs):
    """Forward-backward pass collecting Baum-Welch sufficient statistics.

    Returns ``(log_likelihood, gamma0, trans_num, trans_den, emis_num)``:

    * ``gamma0``    posterior state distribution at t = 0
    * ``trans_num`` expected transition counts (sum of xi over t)
    * ``trans_den`` expected state occupancy over t = 0..T-2
    * ``emis_num``  expected per-state symbol counts (sum of gamma over t)

    All zeros with log-likelihood -inf when the sequence is impossible
    under the parameters.
    """
    n = prior.shape[0]
    T = obs.shape[0]
    gamma0 = np.zeros(n)
    trans_num = np.zeros((n, n))
    trans_den = np.zeros(n)
    emis_num = np.zeros((n, n))

    loglik, alpha, scales = forward_scaled(prior, transition, emission, obs)
    if loglik == -np.inf:
        return loglik, gamma0, trans_num, trans_den, emis_num

    beta = np.ones(n)
    newbeta = np.zeros(n)
    tmp = np.zeros(n)

    for i in range(n):
        emis_num[i, obs[T - 1]] += alpha[T - 1, i]

    for t in range(T - 2, -1, -1):
        o_next = obs[t + 1]
        c_next = scales[t + 1]
        for j in range(n):
            tmp[j] = emission[j, o_next] * beta[j] / c_next
        for i in range(n):
            acc = 0.0
            a_ti = alpha[t, i]
            for j in range(n):
                w = transition[i, j] * tmp[j]
                trans_num[i, j] += a_ti * w
                acc += w
            newbeta[i] = acc
        for i in range(n):
            beta[i] = newbeta[i]
            g = alpha[t, i] * beta[i]
            trans_den[i] += g
            emis_num[i, obs[t]] += g

    for i in range(n):
        gamma0[i] = alpha[0, i] * beta[i]

    return loglik, gamma0, trans_num, trans_den, emis_num


@njit(cache=True)
def viterbi_path(log_prior, log_transition, log_emission, obs):
    """Most probable state path in log space, O(n^2 T).

    Ties at every argmax resolve to the lowest state index. Returns
    ``(path, log_prob)`` with the 0-based path and the joint
    log-probability of the path and the observations.
    """
    n = log_prior.shape[0]
    T = obs.shape[0]
    back = np.zeros((T, n), dtype=np.int64)
    delta = np.empty(n)
    newdelta = np.empty(n)

    for i in range(n):
        delta[i] = log_prior[i] + log_emission[i, obs[0]]

    for t in range(1, T):
        o = obs[t]
        for j in range(n):
            best = delta[0] + log_transition[0, j]
            arg = 0
            for i in range(1, n):
                v = delta[i] + log_transition[i, j]
                if v > best:
                    best = v
                    arg = i
            newdelta[j] = best + log_emission[j, o]
            back[t, j] = arg
        for j in range(n):
            delta[j] = newdelta[j]

    best = delta[0]
    arg = 0
    for i in range(1, n):
        if delta[i] > best:
            best = delta[i]
            arg = i

    path = np.zeros(T, dtype=np.int64)
    path[T - 1] = arg
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path, best
