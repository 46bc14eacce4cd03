"""Trained-vs-empirical comparison, state alignment and player value profiles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .model import HmmParams, Roster
from .network import EdgeBand, PassingNetwork

EXHAUSTIVE_MAX_STATES = 8
RECOVERY_MAX_ABS = 0.1


@dataclass(frozen=True, eq=False)
class MatrixComparison:
    abs_diff: np.ndarray
    max_abs: float
    mean_abs: float
    frobenius: float
    heatmap_pair: tuple[np.ndarray, np.ndarray]

    def summary(self) -> dict:
        return {"max_abs": self.max_abs, "mean_abs": self.mean_abs,
                "frobenius": self.frobenius}


def compare_transition(empirical, trained) -> MatrixComparison:
    emp = np.asarray(empirical, dtype=float)
    tr = np.asarray(trained, dtype=float)
    if emp.shape != tr.shape or emp.ndim != 2:
        raise ValueError(f"dimension mismatch: {emp.shape} vs {tr.shape}")
    diff = np.abs(emp - tr)
    return MatrixComparison(
        diff,
        float(diff.max()) if diff.size else 0.0,
        float(diff.mean()) if diff.size else 0.0,
        float(np.sqrt((diff ** 2).sum())),
        (np.clip(emp, 0.0, 1.0), np.clip(tr, 0.0, 1.0)),
    )


# --- alignment -----------------------------------------------------------


def tv_distance(p, q) -> np.ndarray:
    """Total-variation distance along the last axis."""
    return 0.5 * np.abs(np.asarray(p) - np.asarray(q)).sum(axis=-1)


def permute_params(params: HmmParams, perm: Sequence[int]) -> HmmParams:
    """Relabel so that new state ``i`` is old state ``perm[i]``."""
    perm = np.asarray(perm)
    return HmmParams(params.A[np.ix_(perm, perm)], params.B[perm], params.pi[perm])


def alignment_residual(reference: HmmParams, candidate: HmmParams, perm: Sequence[int]) -> float:
    aligned = permute_params(candidate, perm)
    return float(tv_distance(reference.A, aligned.A).sum()
                 + tv_distance(reference.B, aligned.B).sum()
                 + tv_distance(reference.pi, aligned.pi))


@dataclass(frozen=True)
class StateAlignment:
    """``permutation[i]`` is the candidate state matched to reference state ``i``."""

    permutation: tuple[int, ...]
    residual: float


def _greedy(reference: HmmParams, candidate: HmmParams) -> list[int]:
    m = reference.m
    cost = tv_distance(reference.B[:, None, :], candidate.B[None, :, :])
    perm = [-1] * m
    used_ref, used_cand = set(), set()
    for flat in np.argsort(cost, axis=None, kind="stable"):
        i, j = divmod(int(flat), m)
        if i in used_ref or j in used_cand:
            continue
        perm[i] = j
        used_ref.add(i)
        used_cand.add(j)
    # pairwise-swap refinement on the full residual
    best = alignment_residual(reference, candidate, perm)
    improved = True
    while improved:
        improved = False
        for a, b in itertools.combinations(range(m), 2):
            trial = list(perm)
            trial[a], trial[b] = trial[b], trial[a]
            r = alignment_residual(reference, candidate, trial)
            if r < best:
                perm, best, improved = trial, r, True
    return perm


def align_states(reference: HmmParams, candidate: HmmParams) -> StateAlignment:
    """Best relabelling of ``candidate`` onto ``reference`` by summed row TV distance.

    Exhaustive over all permutations for up to 8 states (first minimum in
    lexicographic order wins ties), greedy matching plus swaps above that.
    """
    if (reference.m, reference.n) != (candidate.m, candidate.n):
        raise ValueError("reference and candidate differ in shape")
    m = reference.m
    if m > EXHAUSTIVE_MAX_STATES:
        perm = _greedy(reference, candidate)
        return StateAlignment(tuple(perm), alignment_residual(reference, candidate, perm))
    # vectorised: cost of B and pi is separable, A needs the full permutation
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    b_cost = tv_distance(reference.B[:, None, :], candidate.B[None, :, :])  # (m, m)
    pi_diff = np.abs(reference.pi[None, :] - candidate.pi[perms]).sum(axis=1) * 0.5
    rows = np.arange(m)
    sep = b_cost[rows[None, :], perms].sum(axis=1) + pi_diff
    a_perm = candidate.A[perms[:, :, None], perms[:, None, :]]  # (P, m, m)
    a_cost = 0.5 * np.abs(reference.A[None] - a_perm).sum(axis=(1, 2))
    total = sep + a_cost
    k = int(np.argmin(total))
    perm = tuple(int(v) for v in perms[k])
    return StateAlignment(perm, alignment_residual(reference, candidate, perm))


# --- player reports ------------------------------------------------------


def entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


@dataclass(frozen=True)
class PlayerValueReport:
    """Three-feature profile of one player.

    ``out_entropy`` and ``breadth`` are summary statistics added on top of
    the raw profile; ``breadth`` and the pass totals need a network and are
    None without one.
    """

    player: str
    organizer_prob: float
    score_distribution: tuple[float, ...]
    out_profile: dict[str, float]
    in_profile: dict[str, float]
    out_entropy: float
    breadth: int | None = None
    passes_made: int | None = None
    passes_received: int | None = None
    symbols: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "player": self.player,
            "organizer_prob": self.organizer_prob,
            "score_distribution": dict(zip(self.symbols, self.score_distribution))
            if self.symbols else list(self.score_distribution),
            "out_profile": self.out_profile,
            "in_profile": self.in_profile,
            "out_entropy": self.out_entropy,
            "breadth": self.breadth,
            "passes_made": self.passes_made,
            "passes_received": self.passes_received,
        }


def player_report(params: HmmParams, roster: Roster, player: str,
                  net: PassingNetwork | None = None,
                  symbols: Sequence[str] = ()) -> PlayerValueReport:
    i = roster.index(player)
    ids = roster.ids
    breadth = made = received = None
    if net is not None:
        net.roster.index(player)
        outs = net.out_edges(player)
        breadth = sum(1 for e in outs if e.band >= EdgeBand.GREEN)
        made = sum(e.count for e in outs)
        received = sum(e.count for e in net.in_edges(player))
    return PlayerValueReport(
        player=player,
        organizer_prob=float(params.pi[i]),
        score_distribution=tuple(float(v) for v in params.B[i]),
        out_profile={pid: float(v) for pid, v in zip(ids, params.A[i])},
        in_profile={pid: float(v) for pid, v in zip(ids, params.A[:, i])},
        out_entropy=entropy(params.A[i]),
        breadth=breadth,
        passes_made=made,
        passes_received=received,
        symbols=tuple(symbols),
    )


@dataclass(frozen=True)
class GameComparison:
    player: str
    win_report: PlayerValueReport
    loss_report: PlayerValueReport
    deltas: dict

    def to_dict(self) -> dict:
        return {"player": self.player, "win": self.win_report.to_dict(),
                "loss": self.loss_report.to_dict(), "deltas": self.deltas}


def _profile_delta(a: dict[str, float], b: dict[str, float]) -> dict[str, float]:
    keys = list(a) + [k for k in b if k not in a]
    return {k: a.get(k, 0.0) - b.get(k, 0.0) for k in keys}


def _opt_delta(a, b):
    return None if a is None or b is None else a - b


GameSide = tuple  # (HmmParams, Roster, PassingNetwork | None)


def compare_games(win: GameSide, loss: GameSide, player: str) -> GameComparison:
    """Win-minus-loss differences of one player's profile.

    Each side is ``(params, roster)`` or ``(params, roster, network)``.
    """
    reports = []
    for label, side in (("win", win), ("loss", loss)):
        params, roster, *rest = side
        net = rest[0] if rest else None
        if player not in roster.ids:
            raise ValueError(f"player {player!r} missing from the {label} game roster")
        reports.append(player_report(params, roster, player, net))
    w, l = reports
    if len(w.score_distribution) != len(l.score_distribution):
        raise ValueError("the two games use different alphabets")
    deltas = {
        "organizer_prob": w.organizer_prob - l.organizer_prob,
        "score_distribution": [a - b for a, b in zip(w.score_distribution, l.score_distribution)],
        "out_profile": _profile_delta(w.out_profile, l.out_profile),
        "in_profile": _profile_delta(w.in_profile, l.in_profile),
        "out_entropy": w.out_entropy - l.out_entropy,
        "breadth": _opt_delta(w.breadth, l.breadth),
        "passes_made": _opt_delta(w.passes_made, l.passes_made),
        "passes_received": _opt_delta(w.passes_received, l.passes_received),
    }
    return GameComparison(player, w, l, deltas)


# --- figure data ---------------------------------------------------------


@dataclass(frozen=True)
class FigureData:
    kind: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    title: str = ""

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
        return "\n".join(lines) + "\n"


def figure_data(params: HmmParams, kind: Literal["pie", "bar", "heatmap"], subject=None, *,
                roster: Roster | None = None, symbols: Sequence[str] | None = None) -> FigureData:
    """Label/value rows for a chart.

    ``pie``: one player's score distribution (``subject`` = player id).
    ``bar``: organizer probability of every player (no subject).
    ``heatmap``: the transition matrix as grid cells; with ``subject`` set to
    an empirical matrix, both grids are emitted.
    """
    roster = roster or Roster.from_ids([f"S{i}" for i in range(params.m)])
    symbols = tuple(symbols) if symbols else tuple(str(k) for k in range(params.n))
    if kind == "pie":
        if subject not in roster.ids:
            raise ValueError(f"pie chart needs a known player, got {subject!r}")
        row = params.B[roster.index(subject)]
        return FigureData("pie", ("label", "value"),
                          tuple((s, float(v)) for s, v in zip(symbols, row)),
                          f"score distribution of {subject}")
    if kind == "bar":
        if subject is not None:
            raise ValueError("bar chart takes no subject")
        return FigureData("bar", ("label", "value"),
                          tuple((pid, float(v)) for pid, v in zip(roster.ids, params.pi)),
                          "organizer probability")
    if kind == "heatmap":
        grids = [("trained", params.A)]
        if subject is not None:
            emp = np.asarray(subject, dtype=float)
            if emp.shape != params.A.shape:
                raise ValueError(f"heatmap subject has shape {emp.shape}, expected {params.A.shape}")
            grids.insert(0, ("empirical", emp))
        rows = tuple(
            (name, src, dst, float(grid[i, j]))
            for name, grid in grids
            for i, src in enumerate(roster.ids)
            for j, dst in enumerate(roster.ids)
        )
        return FigureData("heatmap", ("grid", "from", "to", "value"), rows, "transition probability")
    raise ValueError(f"unknown figure kind {kind!r}")
