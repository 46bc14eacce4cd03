"""Compiled forward/backward recursions over concatenated sequences.

Sequences are stored back to back in ``obs``; sequence ``s`` occupies
``obs[offsets[s]:offsets[s + 1]]``.  Emission probabilities are passed
transposed (``BT[k, j] = b_j(k)``) so each step reads one contiguous row.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def forward(A, BT, pi, obs, offsets, alpha, scale):
    """Fill ``alpha`` and ``scale``; return (sequence, step) of the first zero mass or (-1, -1)."""
    m = A.shape[0]
    tmp = np.empty(m)
    for s in range(offsets.shape[0] - 1):
        start, stop = offsets[s], offsets[s + 1]
        for t in range(start, stop):
            e = BT[obs[t]]
            if t == start:
                for j in range(m):
                    tmp[j] = pi[j] * e[j]
            else:
                for j in range(m):
                    tmp[j] = 0.0
                for i in range(m):
                    a = alpha[t - 1, i]
                    for j in range(m):
                        tmp[j] += a * A[i, j]
                for j in range(m):
                    tmp[j] *= e[j]
            mass = 0.0
            for j in range(m):
                mass += tmp[j]
            if not mass > 0.0:
                return s, t - start
            c = 1.0 / mass
            scale[t] = c
            for j in range(m):
                alpha[t, j] = tmp[j] * c
    return -1, -1


@numba.njit(cache=True, nogil=True)
def backward(A, BT, obs, offsets, scale, beta):
    m = A.shape[0]
    tmp = np.empty(m)
    for s in range(offsets.shape[0] - 1):
        start, stop = offsets[s], offsets[s + 1]
        last = stop - 1
        for i in range(m):
            beta[last, i] = scale[last]
        for t in range(last - 1, start - 1, -1):
            e = BT[obs[t + 1]]
            for j in range(m):
                tmp[j] = e[j] * beta[t + 1, j]
            c = scale[t]
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc += A[i, j] * tmp[j]
                beta[t, i] = acc * c


@numba.njit(cache=True, nogil=True)
def expected_counts(A, BT, obs, offsets, alpha, beta, scale, trans, emit, first):
    """Accumulate sum xi, sum gamma per symbol and gamma_1, in sequence order."""
    m = A.shape[0]
    tmp = np.empty(m)
    xi = np.zeros((m, m))
    for s in range(offsets.shape[0] - 1):
        start, stop = offsets[s], offsets[s + 1]
        for t in range(start, stop):
            # gamma_t = alpha_hat * beta_hat / c_t; dividing by the row's own
            # sum instead keeps each posterior row summing to 1 in floating point
            total = 0.0
            for i in range(m):
                tmp[i] = alpha[t, i] * beta[t, i]
                total += tmp[i]
            o = obs[t]
            for i in range(m):
                g = tmp[i] / total
                emit[i, o] += g
                if t == start:
                    first[i] += g
            if t + 1 < stop:
                e = BT[obs[t + 1]]
                for j in range(m):
                    tmp[j] = e[j] * beta[t + 1, j]
                for i in range(m):
                    a = alpha[t, i]
                    for j in range(m):
                        xi[i, j] += a * tmp[j]
    for i in range(m):
        for j in range(m):
            trans[i, j] += xi[i, j] * A[i, j]
