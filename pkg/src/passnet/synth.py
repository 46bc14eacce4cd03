"""Sampling from known parameters, and brute-force oracles for testing.

Random streams come from numpy's PCG64 generator.  A stream is identified by
``(seed, stream_index)`` and built as ``SeedSequence(seed, spawn_key=...)``,
so every operation draws from its own reproducible stream instead of a shared
global state.
"""

from __future__ import annotations

import datetime as _dt
import itertools
from typing import Sequence

import numpy as np

from .hmm import Posteriors
from .model import GameSequence, HmmParams, as_sequence

ENUMERATION_LIMIT = 10**7


def rng_stream(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` and the stream path ``stream``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(stream))
    return np.random.Generator(np.random.PCG64(ss))


def _draw(rng: np.random.Generator, probs: np.ndarray) -> int:
    # inverse-CDF on a single uniform keeps the draw count fixed per step
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    idx = min(idx, len(probs) - 1)
    while probs[idx] == 0.0 and idx > 0:
        idx -= 1
    return idx


def sample_sequence(params: HmmParams, length: int, seed: int, *,
                    game_id: str = "sim", date: _dt.date | None = None,
                    result: str = "W") -> tuple[GameSequence, tuple[int, ...]]:
    """Sample one sequence; returns it along with the hidden state path."""
    if length < 1:
        raise ValueError("length must be at least 1")
    rng = rng_stream(seed, 0)
    states, outcomes = [], []
    state = _draw(rng, params.pi)
    for t in range(length):
        if t:
            state = _draw(rng, params.A[state])
        states.append(state)
        outcomes.append(_draw(rng, params.B[state]))
    seq = GameSequence(game_id, date or _dt.date(2000, 1, 1), result, tuple(outcomes))
    return seq, tuple(states)


def generate_dataset(params: HmmParams, num_games: int, length_range: tuple[int, int],
                     seed: int, *, return_paths: bool = False):
    """Independent games with lengths uniform on the inclusive ``length_range``.

    With ``return_paths`` the hidden state paths come back as a second list.
    """
    lo, hi = length_range
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid length range {length_range!r}")
    meta = rng_stream(seed, 1)
    games, paths = [], []
    start = _dt.date(2000, 1, 1)
    for g in range(num_games):
        length = int(meta.integers(lo, hi + 1))
        result = "W" if meta.random() < 0.5 else "L"
        seq, path = sample_sequence(
            params, length, _game_seed(seed, g),
            game_id=f"g{g + 1:04d}", date=start + _dt.timedelta(days=g), result=result,
        )
        games.append(seq)
        paths.append(path)
    return (games, paths) if return_paths else games


def transition_counts(paths: Sequence[Sequence[int]], m: int) -> np.ndarray:
    """Counts of consecutive state pairs over all paths."""
    counts = np.zeros((m, m), dtype=np.int64)
    for path in paths:
        for a, b in zip(path, path[1:]):
            counts[a, b] += 1
    return counts


def _game_seed(seed: int, g: int) -> int:
    return int(np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(2, g)).generate_state(1, np.uint64)[0])


def random_params(m: int, n: int, seed: int, concentration: float = 1.0) -> HmmParams:
    """Dirichlet-distributed parameters, mostly for tests."""
    rng = rng_stream(seed, 3)
    A = rng.dirichlet(np.full(m, concentration), size=m)
    B = rng.dirichlet(np.full(n, concentration), size=m)
    pi = rng.dirichlet(np.full(m, concentration))
    return HmmParams(A, B, pi)


# --- oracles -------------------------------------------------------------


def _paths(m: int, T: int):
    if m**T > ENUMERATION_LIMIT:
        raise ValueError(f"{m}^{T} state paths exceed the enumeration limit")
    return itertools.product(range(m), repeat=T)


def _path_prob(params: HmmParams, path, obs) -> float:
    A, B, pi = params.A, params.B, params.pi
    p = float(pi[path[0]]) * float(B[path[0], obs[0]])
    for t in range(1, len(obs)):
        p *= float(A[path[t - 1], path[t]]) * float(B[path[t], obs[t]])
    return p


def brute_force_likelihood(params: HmmParams, seq: GameSequence | Sequence[int]) -> float:
    """P(O) by summing over every state path."""
    obs = as_sequence(seq).outcomes
    return sum(_path_prob(params, path, obs) for path in _paths(params.m, len(obs)))


def brute_force_posteriors(params: HmmParams, seq: GameSequence | Sequence[int]) -> Posteriors:
    obs = as_sequence(seq).outcomes
    m, T = params.m, len(obs)
    gamma = np.zeros((T, m))
    xi = np.zeros((max(T - 1, 0), m, m))
    total = 0.0
    for path in _paths(m, T):
        p = _path_prob(params, path, obs)
        if p == 0.0:
            continue
        total += p
        for t, s in enumerate(path):
            gamma[t, s] += p
            if t + 1 < T:
                xi[t, s, path[t + 1]] += p
    if total == 0.0:
        raise ValueError("sequence has zero total likelihood")
    return Posteriors(gamma / total, xi / total)
