"""Baum-Welch re-estimation of per-game (or pooled multi-game) HMM parameters."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hmm import Batch, ZeroProbabilityError, expected_counts, infer_batch
from .model import HmmParams, ZeroRowPolicy, ZERO_ROW_POLICIES, renormalize_rows
from .synth import rng_stream

log = logging.getLogger(__name__)

INIT_JITTER = 0.05


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int = 200
    loglik_tolerance: float = 1e-6
    restarts: int = 1
    seed: int = 0
    smoothing_epsilon: float = 0.0
    zero_row_policy: ZeroRowPolicy = "uniform"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.loglik_tolerance > 0:
            raise ValueError("loglik_tolerance must be > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.smoothing_epsilon < 0:
            raise ValueError("smoothing_epsilon must be >= 0")
        if self.zero_row_policy not in ZERO_ROW_POLICIES:
            raise ValueError(f"unknown zero-row policy {self.zero_row_policy!r}")


@dataclass(frozen=True, eq=False)
class TrainReport:
    final_params: HmmParams
    loglik_trace: tuple[float, ...]
    iterations_used: int
    converged: bool
    restart_index: int
    initial_loglik: float
    restart_logliks: tuple[float | None, ...] = field(default=())

    @property
    def final_loglik(self) -> float:
        return self.loglik_trace[-1] if self.loglik_trace else self.initial_loglik

    def to_dict(self) -> dict:
        return {
            "loglik_trace": list(self.loglik_trace),
            "initial_loglik": self.initial_loglik,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "restart_index": self.restart_index,
            "restart_logliks": list(self.restart_logliks),
        }


class TrainingError(RuntimeError):
    def __init__(self, failures: list[Exception]):
        self.failures = failures
        detail = "; ".join(f"restart {i}: {e}" for i, e in enumerate(failures))
        super().__init__(f"all restarts failed ({detail})")


def init_params(m: int, n: int, seed: int) -> HmmParams:
    """Uniform parameters with a seeded multiplicative jitter of at most 5%."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    rng = rng_stream(seed, 10)

    def jittered(rows: int, cols: int) -> np.ndarray:
        noise = rng.uniform(-INIT_JITTER, INIT_JITTER, size=(rows, cols))
        return renormalize_rows((1.0 + noise) / cols).matrix

    A = jittered(m, m)
    B = jittered(m, n)
    pi = jittered(1, m)[0]
    return HmmParams(A, B, pi)


@dataclass(eq=False)
class Statistics:
    """Expected sufficient statistics pooled over a batch of sequences."""

    trans: np.ndarray     # (m, m) sum_t xi_t
    emit: np.ndarray      # (m, n) sum_{t: o_t = k} gamma_t
    first: np.ndarray     # (m,) sum over sequences of gamma_1
    n_sequences: int
    log_likelihood: float


def expected_statistics(params: HmmParams, batch: Batch) -> Statistics:
    inf = infer_batch(params, batch)
    trans, emit, first = expected_counts(params, inf)
    return Statistics(trans, emit, first, len(batch), float(inf.log_likelihoods.sum()))


def maximize(stats: Statistics, epsilon: float = 0.0,
             zero_row_policy: ZeroRowPolicy = "uniform") -> HmmParams:
    A = renormalize_rows(stats.trans + epsilon, zero_row_policy).matrix
    B = renormalize_rows(stats.emit + epsilon, "uniform").matrix
    pi = renormalize_rows((stats.first + epsilon)[None, :], "uniform").matrix[0]
    return HmmParams(A, B, pi)


def _batch(sequences) -> Batch:
    if isinstance(sequences, Batch):
        return sequences
    if len(sequences) == 0:
        raise ValueError("no sequences")
    return Batch.from_sequences(sequences)


def reestimate(params: HmmParams, sequences: Sequence, *, epsilon: float = 0.0,
               zero_row_policy: ZeroRowPolicy = "uniform") -> HmmParams:
    """One EM step pooled over ``sequences``.

    Transition and emission numerators are summed across sequences before
    dividing; the initial distribution is the mean of ``gamma_1``.  A state
    with no posterior mass keeps a fallback row chosen by ``zero_row_policy``.
    """
    params.check()
    stats = expected_statistics(params, _batch(sequences))
    return maximize(stats, epsilon, zero_row_policy)


def _safe_log(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(x)


def _weighted_log(weights: np.ndarray, probs: np.ndarray) -> float:
    # 0 * log 0 = 0; positive weight on a zero probability gives -inf
    mask = weights > 0
    if not mask.any():
        return 0.0
    return float((weights[mask] * _safe_log(probs[mask])).sum())


def q_function(current: HmmParams, candidate: HmmParams, sequences: Sequence) -> float:
    """Expected complete-data log-likelihood of ``candidate`` under ``current``'s posteriors.

    Sum of the initial, transition and emission terms, each weighted by the
    posterior of ``current`` given the observations.
    """
    current.check()
    candidate.check(current.m, current.n)
    stats = expected_statistics(current, _batch(sequences))
    return (_weighted_log(stats.first, candidate.pi)
            + _weighted_log(stats.trans, candidate.A)
            + _weighted_log(stats.emit, candidate.B))


def _run_once(batch: Batch, init: HmmParams, config: TrainConfig, restart: int,
              on_iteration: Callable[[int, HmmParams, float], None] | None) -> TrainReport:
    params = init
    stats = expected_statistics(params, batch)
    initial = prev = stats.log_likelihood
    trace: list[float] = []
    converged = False
    for it in range(1, config.max_iterations + 1):
        params = maximize(stats, config.smoothing_epsilon, config.zero_row_policy)
        stats = expected_statistics(params, batch)
        ll = stats.log_likelihood
        trace.append(ll)
        if on_iteration is not None:
            on_iteration(it, params, ll)
        if abs(ll - prev) < config.loglik_tolerance:
            converged = True
            break
        prev = ll
    log.debug("restart %d: %d iterations, loglik %.6f, converged=%s",
              restart, len(trace), trace[-1], converged)
    return TrainReport(params, tuple(trace), len(trace), converged, restart, initial)


def train(sequences: Sequence, m: int, n: int, config: TrainConfig = TrainConfig(), *,
          on_iteration: Callable[[int, HmmParams, float], None] | None = None) -> TrainReport:
    """Run EM from ``config.restarts`` seeded starts and keep the best.

    Restart ``r`` starts from ``init_params(m, n, seed_r)`` where ``seed_r`` is
    derived from ``(config.seed, r)``.  Ties on the final log-likelihood go to
    the lowest restart index.  ``on_iteration(iteration, params, loglik)`` is
    called after every re-estimation.
    """
    if len(sequences) == 0:
        raise ValueError("no sequences")
    batch = Batch.from_sequences(sequences)
    batch.check_symbols(n)
    best: TrainReport | None = None
    failures: list[Exception] = []
    finals: list[float | None] = []
    for r in range(config.restarts):
        seed_r = int(rng_stream(config.seed, 20, r).integers(0, 2**63))
        try:
            report = _run_once(batch, init_params(m, n, seed_r), config, r, on_iteration)
        except ZeroProbabilityError as exc:
            log.warning("restart %d failed: %s", r, exc)
            failures.append(exc)
            finals.append(None)
            continue
        finals.append(report.final_loglik)
        if best is None or report.final_loglik > best.final_loglik:
            best = report
    if best is None:
        raise TrainingError(failures)
    return TrainReport(best.final_params, best.loglik_trace, best.iterations_used,
                       best.converged, best.restart_index, best.initial_loglik,
                       tuple(finals))
