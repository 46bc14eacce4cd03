"""Scaled forward-backward inference for discrete HMMs.

Scaling follows Rabiner: at each step the forward mass is normalised to one
and the reciprocal of that mass is stored as ``c_t``, so that
``log P(O) = -sum(log c_t)``.  The backward pass reuses the same ``c_t``
(with ``beta_hat_T = c_T``), which makes ``xi`` exact without a final
division and ``gamma_t = alpha_hat_t * beta_hat_t / c_t``.  Since
``sum_i alpha_hat_t(i) * beta_hat_t(i) = c_t`` in exact arithmetic, gamma
rows are divided by their own sum instead, so they sum to one in floating
point as well.

Several sequences are processed together, stored back to back; the
single-sequence functions are thin wrappers over the batch code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .model import GameSequence, HmmParams, as_sequence


class ZeroProbabilityError(ValueError):
    """The observations are impossible under the parameters."""

    def __init__(self, step: int, game_id: str | None = None, index: int | None = None):
        self.step = step
        self.game_id = game_id
        self.index = index
        where = f" in sequence {game_id!r}" if game_id is not None else ""
        super().__init__(f"zero probability at step {step}{where}")


@dataclass(frozen=True, eq=False)
class ForwardResult:
    alpha_hat: np.ndarray
    scale: np.ndarray
    log_likelihood: float


@dataclass(frozen=True, eq=False)
class BackwardResult:
    beta_hat: np.ndarray


@dataclass(frozen=True, eq=False)
class Posteriors:
    gamma: np.ndarray
    xi: np.ndarray


@dataclass(eq=False)
class Batch:
    obs: np.ndarray       # all outcomes, concatenated
    offsets: np.ndarray   # (S + 1,) sequence boundaries
    ids: tuple[str, ...]

    @classmethod
    def from_sequences(cls, sequences: Sequence) -> Batch:
        seqs = [as_sequence(s, f"seq{i}") for i, s in enumerate(sequences)]
        if not seqs:
            raise ValueError("no sequences")
        offsets = np.zeros(len(seqs) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(s) for s in seqs])
        obs = np.fromiter((o for s in seqs for o in s.outcomes), dtype=np.int64,
                          count=int(offsets[-1]))
        return cls(obs, offsets, tuple(s.game_id for s in seqs))

    def __len__(self) -> int:
        return len(self.ids)

    def check_symbols(self, n: int) -> None:
        bad = np.flatnonzero(self.obs >= n)
        if bad.size:
            pos = int(bad[0])
            s = int(np.searchsorted(self.offsets, pos, side="right")) - 1
            raise ValueError(
                f"sequence {self.ids[s]!r}: symbol {int(self.obs[pos])} at position "
                f"{pos - int(self.offsets[s])} outside alphabet of size {n}"
            )


@dataclass(eq=False)
class BatchInference:
    batch: Batch
    alpha_hat: np.ndarray  # (N, m)
    scale: np.ndarray      # (N,)
    beta_hat: np.ndarray   # (N, m)

    @property
    def log_likelihoods(self) -> np.ndarray:
        logs = np.log(self.scale)
        return -np.add.reduceat(logs, self.batch.offsets[:-1])

    def gamma(self) -> np.ndarray:
        g = self.alpha_hat * self.beta_hat
        return g / g.sum(axis=1, keepdims=True)


def _arrays(params: HmmParams):
    return (np.ascontiguousarray(params.A, dtype=float),
            np.ascontiguousarray(params.B.T, dtype=float),
            np.ascontiguousarray(params.pi, dtype=float))


def forward_batch(params: HmmParams, batch: Batch) -> tuple[np.ndarray, np.ndarray]:
    batch.check_symbols(params.n)
    A, BT, pi = _arrays(params)
    N = batch.obs.shape[0]
    alpha = np.zeros((N, params.m))
    scale = np.ones(N)
    s, t = _kernels.forward(A, BT, pi, batch.obs, batch.offsets, alpha, scale)
    if s >= 0:
        raise ZeroProbabilityError(int(t) + 1, batch.ids[s], int(s))
    return alpha, scale


def backward_batch(params: HmmParams, batch: Batch, scale: np.ndarray) -> np.ndarray:
    A, BT, _ = _arrays(params)
    beta = np.zeros((batch.obs.shape[0], params.m))
    _kernels.backward(A, BT, batch.obs, batch.offsets, np.ascontiguousarray(scale, dtype=float), beta)
    return beta


def infer_batch(params: HmmParams, batch: Batch) -> BatchInference:
    alpha, scale = forward_batch(params, batch)
    beta = backward_batch(params, batch, scale)
    return BatchInference(batch, alpha, scale, beta)


def expected_counts(params: HmmParams, inf: BatchInference):
    """Pooled ``(sum xi, sum gamma by symbol, sum gamma_1)`` over the batch."""
    A, BT, _ = _arrays(params)
    m, n = params.m, params.n
    trans, emit, first = np.zeros((m, m)), np.zeros((m, n)), np.zeros(m)
    b = inf.batch
    _kernels.expected_counts(A, BT, b.obs, b.offsets, inf.alpha_hat, inf.beta_hat,
                             inf.scale, trans, emit, first)
    return trans, emit, first


# --- single-sequence API -------------------------------------------------


def forward(params: HmmParams, seq: GameSequence | Sequence[int]) -> ForwardResult:
    """Scaled forward pass for one sequence.

    Raises :class:`ZeroProbabilityError` naming the 1-based step at which the
    forward mass vanished.
    """
    alpha, scale = forward_batch(params, Batch.from_sequences([seq]))
    return ForwardResult(alpha, scale, float(-np.log(scale).sum()))


def backward(params: HmmParams, seq: GameSequence | Sequence[int], scale) -> BackwardResult:
    batch = Batch.from_sequences([seq])
    scale = np.asarray(scale, dtype=float)
    if scale.shape != batch.obs.shape:
        raise ValueError(f"scale has shape {scale.shape}, sequence has length {batch.obs.shape[0]}")
    batch.check_symbols(params.n)
    return BackwardResult(backward_batch(params, batch, scale))


def posteriors(params: HmmParams, seq: GameSequence | Sequence[int]) -> Posteriors:
    """State posteriors ``gamma`` (T x m) and pair posteriors ``xi`` (T-1 x m x m)."""
    inf = infer_batch(params, Batch.from_sequences([seq]))
    alpha, beta = inf.alpha_hat, inf.beta_hat
    right = params.B.T[inf.batch.obs[1:]] * beta[1:]
    xi = alpha[:-1, :, None] * params.A[None] * right[:, None, :]
    return Posteriors(inf.gamma(), xi)


def log_likelihood(params: HmmParams, sequences: Sequence) -> float:
    """Total log-likelihood over several sequences."""
    _, scale = forward_batch(params, Batch.from_sequences(sequences))
    return float(-np.log(scale).sum())
